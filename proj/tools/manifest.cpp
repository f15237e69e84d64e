#include "manifest.hpp"

#include <json.hpp>

namespace lsseg::cli {

using json = nlohmann::json;

namespace {

json voxel(VoxelIndex v) { return {v.i, v.j, v.k}; }

VoxelIndex voxel_from(const json& j) {
  return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
}

}  // namespace

bool RunManifest::operator==(const RunManifest& o) const {
  const auto& a = solver;
  const auto& b = o.solver;
  const auto& p = preprocess;
  const auto& q = o.preprocess;
  return input == o.input && out == o.out && seed_left == o.seed_left &&
         seed_right == o.seed_right && a.model == b.model && a.mu == b.mu &&
         a.eta == b.eta && a.epsilon == b.epsilon && a.p == b.p &&
         a.dx == b.dx && a.n_max == b.n_max &&
         a.seed_radius_voxels == b.seed_radius_voxels &&
         a.curvature_delta == b.curvature_delta && a.cfl_bound == b.cfl_bound &&
         a.stagnation_window == b.stagnation_window &&
         p.hu_clip_threshold == q.hu_clip_threshold &&
         p.tissue_low == q.tissue_low && p.tissue_high == q.tissue_high &&
         p.sigma == q.sigma && p.equalization_bins == q.equalization_bins &&
         postprocess == o.postprocess && start_slice == o.start_slice;
}

std::string to_json(const RunManifest& m) {
  const auto& s = m.solver;
  const auto& p = m.preprocess;
  json j;
  j["input"] = m.input;
  j["out"] = m.out;
  j["seed_left"] = voxel(m.seed_left);
  j["seed_right"] = voxel(m.seed_right);
  j["model"] = to_string(s.model);
  j["mu"] = s.mu;
  j["eta"] = s.eta;
  j["epsilon"] = s.epsilon;
  j["p"] = s.p;
  j["dx"] = s.dx;
  j["n_max"] = s.n_max;
  j["seed_radius_voxels"] = s.seed_radius_voxels;
  j["curvature_delta"] = s.curvature_delta;
  j["cfl_bound"] = s.cfl_bound == CflBound::Printed ? "printed" : "generalized";
  j["stagnation_window"] =
      s.stagnation_window ? json(*s.stagnation_window) : json(nullptr);
  j["sigma"] = p.sigma;
  j["hu_clip_threshold"] = p.hu_clip_threshold;
  j["tissue_interval"] = {p.tissue_low, p.tissue_high};
  j["equalization_bins"] = p.equalization_bins;
  j["postprocess"] = m.postprocess;
  j["start_slice"] = m.start_slice ? json(*m.start_slice) : json(nullptr);
  return j.dump(2);
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    auto& s = m.solver;
    auto& p = m.preprocess;
    m.input = j.at("input").get<std::string>();
    m.out = j.at("out").get<std::string>();
    m.seed_left = voxel_from(j.at("seed_left"));
    m.seed_right = voxel_from(j.at("seed_right"));
    s.model = parse_model(j.at("model").get<std::string>());
    s.mu = j.at("mu").get<double>();
    s.eta = j.at("eta").get<double>();
    s.epsilon = j.at("epsilon").get<double>();
    s.p = j.at("p").get<int>();
    s.dx = j.at("dx").get<double>();
    s.n_max = j.at("n_max").get<int>();
    s.seed_radius_voxels = j.at("seed_radius_voxels").get<int>();
    s.curvature_delta = j.at("curvature_delta").get<double>();
    const auto bound = j.at("cfl_bound").get<std::string>();
    if (bound != "printed" && bound != "generalized") {
      throw Error("manifest: cfl_bound must be printed|generalized");
    }
    s.cfl_bound = bound == "printed" ? CflBound::Printed : CflBound::Generalized;
    if (!j.at("stagnation_window").is_null()) {
      s.stagnation_window = j["stagnation_window"].get<int>();
    }
    p.sigma = j.at("sigma").get<double>();
    p.hu_clip_threshold = j.at("hu_clip_threshold").get<double>();
    p.tissue_low = j.at("tissue_interval").at(0).get<double>();
    p.tissue_high = j.at("tissue_interval").at(1).get<double>();
    p.equalization_bins = j.at("equalization_bins").get<int>();
    m.postprocess = j.at("postprocess").get<bool>();
    if (!j.at("start_slice").is_null()) m.start_slice = j["start_slice"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace lsseg::cli
