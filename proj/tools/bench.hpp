#pragma once

#include <string>
#include <vector>

#include "lsseg/levelset.hpp"
#include "lsseg/phantom.hpp"

namespace lsseg::cli {

/// Default run settings for one suite phantom. Classical and Geodesic1 share
/// the first-order iteration budget.
struct BenchCase {
  PhantomSpec spec;
  double sigma = 1.0;
  int n_max_first_order = 400;
  int n_max_second_order = 2000;

  int n_max(Model m) const {
    return m == Model::Geodesic2 ? n_max_second_order : n_max_first_order;
  }
};

std::vector<BenchCase> bench_cases();
BenchCase bench_case(const std::string& name);

struct BenchRow {
  std::string phantom;
  Model model{};
  int n_max = 0;
  int iterations = 0;
  double dt = 0.0;
  double wall_seconds = 0.0;
  double dice = 0.0;
  int slices = 0;
};

/// Segments the left tube of `c` with `model` and scores it against truth.
BenchRow run_bench_case(const BenchCase& c, Model model);

}  // namespace lsseg::cli
