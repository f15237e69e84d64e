#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench.hpp"
#include "lsseg/levelset.hpp"
#include "lsseg/metrics.hpp"
#include "lsseg/phantom.hpp"
#include "lsseg/postprocess.hpp"
#include "lsseg/volume_io.hpp"
#include "manifest.hpp"

namespace lsseg::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text << '\n';
  if (!out) throw Error("cannot write " + p.string());
}

VoxelIndex parse_voxel(const std::string& s) {
  VoxelIndex v;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> v.i >> c1 >> v.j >> c2 >> v.k) || c1 != ',' || c2 != ',' ||
      !in.eof()) {
    throw Error("expected voxel as x,y,z but got '" + s + "'");
  }
  return v;
}

Spacing parse_spacing(const std::string& s) {
  Spacing sp;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> sp.x >> c1 >> sp.y >> c2 >> sp.z) || c1 != ',' || c2 != ',') {
    throw Error("expected spacing as sx,sy,sz but got '" + s + "'");
  }
  return sp;
}

// In-plane boundary pixels of the mask, one CSV row each.
void append_contours(std::ostream& csv, const BinaryMask& m, const char* side) {
  const Dims d = m.dims();
  const auto fg = [&](int i, int j, int k) { return m.contains(i, j, k) && m(i, j, k); };
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i)
        if (fg(i, j, k) && (!fg(i - 1, j, k) || !fg(i + 1, j, k) ||
                            !fg(i, j - 1, k) || !fg(i, j + 1, k))) {
          csv << side << ',' << k << ',' << i << ',' << j << '\n';
        }
}

struct SideResult {
  BinaryMask mask;
  EvolutionResult run;
};

SideResult segment_side(const ScalarVolume& vol, const RunManifest& m,
                        VoxelIndex seed, const char* side, std::ostream& err) {
  if (!vol.contains(seed)) {
    throw Error(std::string(side) + " seed outside the volume");
  }
  SolverConfig cfg = m.solver;
  cfg.seed = seed;
  auto run = evolve(vol, cfg, m.preprocess);
  std::ostringstream log;
  log << "[segment] " << side << ": model " << to_string(cfg.model)
      << " dt = " << run.dt;
  if (cfg.model == Model::Geodesic2) log << " (0.25*dx^2)";
  log << ", " << run.iterations << " iterations, " << std::fixed
      << std::setprecision(2) << run.wall_seconds << " s\n";
  err << log.str();
  BinaryMask mask = run.mask;
  if (m.postprocess) {
    mask = postprocess(mask, seed, m.start_slice.value_or(seed.k));
  }
  return {std::move(mask), std::move(run)};
}

int do_segment(const RunManifest& m, std::ostream& out, std::ostream& err) {
  const ScalarVolume vol = load_volume(m.input);
  const fs::path dir = m.out;
  fs::create_directories(dir);

  auto left = segment_side(vol, m, m.seed_left, "left", err);
  auto right = segment_side(vol, m, m.seed_right, "right", err);

  BinaryMask merged = left.mask;
  for (std::size_t n = 0; n < merged.size(); ++n) merged[n] |= right.mask[n];
  store_volume(left.mask, dir / "left.json");
  store_volume(right.mask, dir / "right.json");
  store_volume(merged, dir / "merged.json");
  write_file(dir / "manifest.json", to_json(m));

  const auto timing = [&](const SideResult& r) {
    return json{{"iterations", r.run.iterations},
                {"cpu_seconds", r.run.wall_seconds},
                {"dt", r.run.dt},
                {"voxels", count(r.mask)}};
  };
  json t;
  t["model"] = to_string(m.solver.model);
  t["n_max"] = m.solver.n_max;
  t["p"] = m.solver.p;
  t["sigma"] = m.preprocess.sigma;
  t["slices"] = vol.dims().nz;
  t["left"] = timing(left);
  t["right"] = timing(right);
  write_file(dir / "timing.json", t.dump(2));

  std::ofstream csv(dir / "contours.csv");
  csv << "side,slice,i,j\n";
  append_contours(csv, left.mask, "left");
  append_contours(csv, right.mask, "right");

  out << t.dump() << '\n';
  return 0;
}

int do_metrics(const std::string& a_path, const std::string& b_path,
               const std::string& spacing_text, bool full_set, std::ostream& out,
               std::ostream& err) {
  const BinaryMask a = load_mask(a_path);
  const BinaryMask b = load_mask(b_path);
  require_same_dims(a, b, "metrics");
  const Spacing spacing = spacing_text.empty() ? a.spacing() : parse_spacing(spacing_text);

  json j;
  j["dice"] = dice(a, b);
  j["jaccard"] = jaccard(a, b);
  if (count(a) == 0 || count(b) == 0) {
    j["hausdorff"] = nullptr;
    j["assd"] = nullptr;
    out << j.dump() << '\n';
    err << "metrics: distances undefined because a mask is empty\n";
    return 1;
  }
  j["hausdorff"] = hausdorff(a, b, spacing,
                             full_set ? HausdorffMode::FullSet : HausdorffMode::Surface);
  j["assd"] = assd(a, b, spacing);
  out << j.dump() << '\n';
  return 0;
}

int do_bench(const std::vector<std::string>& phantoms,
             const std::vector<std::string>& models, const std::string& json_path,
             std::ostream& out, std::ostream& err) {
  std::vector<BenchCase> cases;
  if (phantoms.empty()) {
    cases = bench_cases();
  } else {
    for (const auto& p : phantoms) cases.push_back(bench_case(p));
  }
  std::vector<Model> ms;
  for (const auto& m : models) ms.push_back(parse_model(m));
  if (ms.empty()) ms = {Model::Classical, Model::Geodesic1, Model::Geodesic2};

  json rows = json::array();
  out << std::left << std::setw(10) << "method" << std::setw(9) << "phantom"
      << std::setw(7) << "N_max" << std::setw(9) << "dt" << std::setw(10) << "CPU[s]"
      << std::setw(3) << "p" << std::setw(7) << "sigma" << std::setw(8) << "slices"
      << "dice\n";
  for (const auto& c : cases) {
    for (Model m : ms) {
      err << "[bench] " << c.spec.name << " / " << to_string(m) << "\n";
      const BenchRow r = run_bench_case(c, m);
      out << std::left << std::setw(10) << to_string(m) << std::setw(9) << r.phantom
          << std::setw(7) << r.iterations << std::setw(9) << std::setprecision(4)
          << r.dt << std::setw(10) << std::fixed << std::setprecision(2)
          << r.wall_seconds << std::setw(3) << 2 << std::setw(7)
          << std::setprecision(1) << c.sigma << std::setw(8) << r.slices
          << std::setprecision(4) << r.dice << std::defaultfloat << "\n";
      rows.push_back({{"phantom", r.phantom},
                      {"model", to_string(m)},
                      {"n_max", r.n_max},
                      {"iterations", r.iterations},
                      {"dt", r.dt},
                      {"cpu_seconds", r.wall_seconds},
                      {"p", 2},
                      {"sigma", c.sigma},
                      {"slices", r.slices},
                      {"dice", r.dice}});
    }
  }
  if (!json_path.empty()) write_file(json_path, rows.dump(2));
  return 0;
}

int do_phantom(const std::string& suite, const std::string& spec_path,
               const std::string& out_dir, std::ostream& out) {
  std::vector<PhantomSpec> specs;
  if (!spec_path.empty()) {
    specs.push_back(phantom_spec_from_json(read_file(spec_path)));
  } else if (suite == "all") {
    specs = default_suite();
  } else {
    specs.push_back(suite_spec(suite));
  }
  const fs::path dir = out_dir;
  fs::create_directories(dir);
  for (const auto& s : specs) {
    const auto ph = generate_phantom(s);
    store_volume(ph.hu, dir / (s.name + ".json"), DType::I16);
    store_volume(ph.truth_left, dir / (s.name + "_left.json"));
    store_volume(ph.truth_right, dir / (s.name + "_right.json"));
    const auto seed_l = tube_center(s.left, s.dims.nz / 2);
    const auto seed_r = tube_center(s.right, s.dims.nz / 2);
    out << s.name << ": " << (dir / (s.name + ".json")).string() << " seeds "
        << seed_l.i << ',' << seed_l.j << ',' << seed_l.k << ' ' << seed_r.i << ','
        << seed_r.j << ',' << seed_r.k << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Level-set segmentation of paired muscles in CT volumes", "lsseg"};
  app.require_subcommand(1);

  // segment
  auto* seg = app.add_subcommand("segment", "segment both muscles from two seeds");
  RunManifest m;
  std::string seed_left, seed_right, model = "gmfd1", manifest_path,
                                     postprocess_flag = "on", cfl = "printed";
  std::optional<int> stagnation;
  seg->add_option("--input", m.input, "volume header (JSON)");
  seg->add_option("--seed-left", seed_left, "left seed voxel x,y,z");
  seg->add_option("--seed-right", seed_right, "right seed voxel x,y,z");
  seg->add_option("--model", model, "classical|gmfd1|gmfd2")
      ->check(CLI::IsMember({"classical", "gmfd1", "gmfd2"}));
  seg->add_option("--nmax", m.solver.n_max, "iteration budget");
  seg->add_option("--p", m.solver.p, "edge exponent")->capture_default_str();
  seg->add_option("--sigma", m.preprocess.sigma, "Gaussian deviation (voxels)")
      ->capture_default_str();
  seg->add_option("--mu", m.solver.mu)->capture_default_str();
  seg->add_option("--eta", m.solver.eta)->capture_default_str();
  seg->add_option("--epsilon", m.solver.epsilon)->capture_default_str();
  seg->add_option("--dx", m.solver.dx)->capture_default_str();
  seg->add_option("--out", m.out, "output directory");
  seg->add_option("--postprocess", postprocess_flag, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  seg->add_option("--start-slice", m.start_slice,
                  "post-processing start slice (default: seed slice)");
  seg->add_option("--cfl", cfl, "printed|generalized first-order time-step bound")
      ->check(CLI::IsMember({"printed", "generalized"}));
  seg->add_option("--stagnation", stagnation,
                  "stop after this many iterations without mask change");
  seg->add_option("--manifest", manifest_path, "replay a saved run manifest");

  // metrics
  auto* met = app.add_subcommand("metrics", "compare two masks");
  std::string mask_a, mask_b, spacing;
  bool full_set = false;
  met->add_option("a", mask_a, "first mask header")->required();
  met->add_option("b", mask_b, "second mask header")->required();
  met->add_option("--spacing", spacing, "sx,sy,sz (default: from the first mask)");
  met->add_flag("--full-set", full_set, "Hausdorff over all voxels, not surfaces");

  // bench
  auto* bench = app.add_subcommand("bench", "run every model on the phantom suite");
  std::vector<std::string> phantoms, models;
  std::string bench_json;
  bench->add_option("--phantom", phantoms, "suite entries (default: all)");
  bench->add_option("--models", models, "models (default: all)");
  bench->add_option("--json", bench_json, "also write rows as JSON");

  // phantom
  auto* ph = app.add_subcommand("phantom", "write phantom volumes and truth masks");
  std::string suite = "all", spec_path, ph_out;
  ph->add_option("--suite", suite, "easy|medium|hard|all")->capture_default_str();
  ph->add_option("--spec", spec_path, "phantom spec JSON (overrides --suite)");
  ph->add_option("--out", ph_out, "output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*seg) {
      if (!manifest_path.empty()) {
        return do_segment(manifest_from_json(read_file(manifest_path)), out, err);
      }
      if (m.input.empty() || seed_left.empty() || seed_right.empty() ||
          m.out.empty() || seg->count("--nmax") == 0) {
        err << "segment: --input, --seed-left, --seed-right, --nmax and --out "
               "are required\n"
            << seg->help();
        return 2;
      }
      m.seed_left = parse_voxel(seed_left);
      m.seed_right = parse_voxel(seed_right);
      m.solver.model = parse_model(model);
      m.solver.cfl_bound =
          cfl == "printed" ? CflBound::Printed : CflBound::Generalized;
      m.solver.stagnation_window = stagnation;
      m.postprocess = postprocess_flag == "on";
      m.input = fs::absolute(m.input).string();
      m.out = fs::absolute(m.out).string();
      return do_segment(m, out, err);
    }
    if (*met) return do_metrics(mask_a, mask_b, spacing, full_set, out, err);
    if (*bench) return do_bench(phantoms, models, bench_json, out, err);
    if (*ph) return do_phantom(suite, spec_path, ph_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lsseg::cli
