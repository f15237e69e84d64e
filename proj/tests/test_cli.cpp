#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "lsseg/metrics.hpp"
#include "lsseg/volume_io.hpp"
#include "manifest.hpp"

using namespace lsseg;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path workdir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "lsseg_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes the easy phantom once per test binary run.
const fs::path& easy_dir() {
  static const fs::path dir = [] {
    auto d = workdir("phantoms");
    const auto r = run_cli({"phantom", "--suite", "easy", "--out", d.string()});
    REQUIRE(r.status == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> segment_args(const fs::path& out, const std::string& model,
                                      const std::string& nmax) {
  return {"segment",      "--input",      (easy_dir() / "easy.json").string(),
          "--seed-left",  "19,30,16",     "--seed-right",
          "60,30,16",     "--model",      model,
          "--nmax",       nmax,           "--sigma",
          "1",            "--out",        out.string()};
}

}  // namespace

TEST_CASE("phantom command writes the volume and both truths") {
  const auto& dir = easy_dir();
  for (const char* f : {"easy.json", "easy_left.json", "easy_right.json"})
    CHECK(fs::exists(dir / f));
  const auto vol = load_volume(dir / "easy.json");
  CHECK(vol.dims() == Dims{80, 64, 33});
}

TEST_CASE("phantom command is byte-reproducible and rejects bad specs") {
  const auto a = workdir("rep_a"), b = workdir("rep_b");
  REQUIRE(run_cli({"phantom", "--suite", "hard", "--out", a.string()}).status == 0);
  REQUIRE(run_cli({"phantom", "--suite", "hard", "--out", b.string()}).status == 0);
  for (const char* f : {"hard.raw", "hard_left.raw", "hard_right.raw"})
    CHECK(slurp(a / f) == slurp(b / f));

  const auto bad = a / "bad.json";
  std::ofstream(bad) << "{ not json";
  const auto r = run_cli({"phantom", "--spec", bad.string(), "--out", a.string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("error") != std::string::npos);
  CHECK(run_cli({"phantom", "--suite", "nope", "--out", a.string()}).status != 0);
}

TEST_CASE("segment end to end on the easy phantom") {
  const auto out = workdir("segment");
  const auto r = run_cli(segment_args(out, "gmfd1", "400"));
  REQUIRE(r.status == 0);
  for (const char* f : {"left.json", "right.json", "merged.json", "manifest.json",
                        "timing.json", "contours.csv"})
    CHECK(fs::exists(out / f));
  const auto timing = json::parse(slurp(out / "timing.json"));
  CHECK(timing["left"]["iterations"] == 400);
  CHECK(timing["model"] == "gmfd1");
  CHECK(r.err.find("dt") != std::string::npos);

  const auto left = load_mask(out / "left.json");
  const auto truth = load_mask(easy_dir() / "easy_left.json");
  CHECK(dice(left, truth) >= 0.90);
  const auto merged = load_mask(out / "merged.json");
  CHECK(count(merged) == count(left) + count(load_mask(out / "right.json")));

  const auto m = run_cli({"metrics", (out / "left.json").string(),
                          (easy_dir() / "easy_left.json").string()});
  CHECK(m.status == 0);
  CHECK(json::parse(m.out)["dice"].get<double>() >= 0.90);

  // replaying the manifest reproduces the masks
  const auto manifest = cli::manifest_from_json(slurp(out / "manifest.json"));
  auto replay = manifest;
  const auto out2 = workdir("segment_replay");
  replay.out = out2.string();
  std::ofstream(out2 / "m.json") << cli::to_json(replay);
  REQUIRE(run_cli({"segment", "--manifest", (out2 / "m.json").string()}).status == 0);
  CHECK(load_mask(out2 / "left.json") == left);
  CHECK(load_mask(out2 / "right.json") == load_mask(out / "right.json"));
}

TEST_CASE("segment with gmfd2 logs the parabolic time step") {
  const auto out = workdir("segment_gmfd2");
  const auto r = run_cli(segment_args(out, "gmfd2", "2"));
  REQUIRE(r.status == 0);
  CHECK(r.err.find("dt = 0.0025") != std::string::npos);
}

TEST_CASE("segment argument errors") {
  const auto out = workdir("segment_bad");
  auto args = segment_args(out, "gmfd1", "5");
  args.erase(args.begin() + 5, args.begin() + 7);  // drop --seed-right
  const auto r = run_cli(args);
  CHECK(r.status != 0);
  CHECK(r.err.find("--seed-right") != std::string::npos);

  auto bad_model = segment_args(out, "gmfd3", "5");
  CHECK(run_cli(bad_model).status != 0);

  auto fat_seed = segment_args(out, "gmfd1", "5");
  fat_seed[4] = "39,10,16";
  const auto f = run_cli(fat_seed);
  CHECK(f.status != 0);
  CHECK(f.err.find("tissue") != std::string::npos);

  auto outside = segment_args(out, "gmfd1", "5");
  outside[4] = "500,10,16";
  CHECK(run_cli(outside).status != 0);
}

TEST_CASE("metrics command conventions") {
  const auto& dir = easy_dir();
  const auto self = run_cli({"metrics", (dir / "easy_left.json").string(),
                             (dir / "easy_left.json").string()});
  REQUIRE(self.status == 0);
  const auto j = json::parse(self.out);
  CHECK(j["dice"] == 1.0);
  CHECK(j["hausdorff"] == 0.0);

  const auto disjoint = run_cli({"metrics", (dir / "easy_left.json").string(),
                                 (dir / "easy_right.json").string(), "--spacing",
                                 "1,1,2"});
  CHECK(disjoint.status == 0);
  CHECK(json::parse(disjoint.out)["dice"] == 0.0);

  const auto empty_dir = workdir("metrics_empty");
  store_volume(BinaryMask({80, 64, 33}), empty_dir / "empty.json");
  const auto e = run_cli({"metrics", (dir / "easy_left.json").string(),
                          (empty_dir / "empty.json").string()});
  CHECK(e.status != 0);
  CHECK(json::parse(e.out)["hausdorff"].is_null());
  CHECK_FALSE(e.err.empty());

  store_volume(BinaryMask({8, 8, 8}), empty_dir / "small.json");
  CHECK(run_cli({"metrics", (dir / "easy_left.json").string(),
                 (empty_dir / "small.json").string()})
            .status != 0);
}

TEST_CASE("manifest JSON round trip") {
  cli::RunManifest m;
  m.input = "/data/ct.json";
  m.out = "/tmp/run";
  m.seed_left = {1, 2, 3};
  m.seed_right = {4, 5, 6};
  m.solver.model = Model::Geodesic2;
  m.solver.mu = 0.9;
  m.solver.eta = 0.3;
  m.solver.epsilon = 0.07;
  m.solver.p = 3;
  m.solver.dx = 0.05;
  m.solver.n_max = 1234;
  m.solver.cfl_bound = CflBound::Generalized;
  m.solver.stagnation_window = 50;
  m.solver.curvature_delta = 1e-6;
  m.preprocess.sigma = 2;
  m.preprocess.equalization_bins = 128;
  m.preprocess.tissue_low = 10;
  m.postprocess = false;
  m.start_slice = 7;
  CHECK(cli::manifest_from_json(cli::to_json(m)) == m);
  CHECK(cli::manifest_from_json(cli::to_json(cli::RunManifest{})) == cli::RunManifest{});
  CHECK_THROWS(cli::manifest_from_json("[1,2"));
}

TEST_CASE("unknown subcommands fail") {
  CHECK(run_cli({}).status != 0);
  CHECK(run_cli({"frobnicate"}).status != 0);
}
