#include "bench.hpp"

#include "lsseg/metrics.hpp"

namespace lsseg::cli {

std::vector<BenchCase> bench_cases() {
  std::vector<BenchCase> cases;
  for (auto& spec : default_suite()) {
    BenchCase c{spec};
    if (spec.name == "medium") {
      c.n_max_first_order = 500;
      c.n_max_second_order = 2500;
    }
    cases.push_back(std::move(c));
  }
  return cases;
}

BenchCase bench_case(const std::string& name) {
  for (auto& c : bench_cases()) {
    if (c.spec.name == name) return c;
  }
  throw Error("unknown bench phantom '" + name + "'");
}

BenchRow run_bench_case(const BenchCase& c, Model model) {
  const auto ph = generate_phantom(c.spec);
  SolverConfig cfg;
  cfg.model = model;
  cfg.n_max = c.n_max(model);
  cfg.seed = tube_center(c.spec.left, c.spec.dims.nz / 2);
  PreprocessConfig pre;
  pre.sigma = c.sigma;
  const auto r = evolve(ph.hu, cfg, pre);
  return {c.spec.name, model,           cfg.n_max,
          r.iterations, r.dt,           r.wall_seconds,
          dice(r.mask, ph.truth_left), c.spec.dims.nz};
}

}  // namespace lsseg::cli
