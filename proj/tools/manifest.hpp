#pragma once

#include <optional>
#include <string>

#include "lsseg/levelset.hpp"
#include "lsseg/preprocess.hpp"

namespace lsseg::cli {

/// Everything needed to replay a `segment` run.
struct RunManifest {
  std::string input;
  std::string out;
  VoxelIndex seed_left{};
  VoxelIndex seed_right{};
  SolverConfig solver;  // solver.seed is overwritten per side
  PreprocessConfig preprocess;
  bool postprocess = true;
  std::optional<int> start_slice;  // defaults to each seed's slice

  bool operator==(const RunManifest& o) const;
};

std::string to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

}  // namespace lsseg::cli
