// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bench.hpp"
#include "lsseg/levelset.hpp"
#include "lsseg/metrics.hpp"
#include "lsseg/phantom.hpp"
#include "lsseg/postprocess.hpp"
#include "oracles.hpp"

using namespace lsseg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double took = seconds_since(t0);
  const bool in_time = budget_s <= 0 || took < budget_s;
  const bool ok = v.pass && in_time;
  failures += !ok;
  if (budget_s > 0) {
    std::printf("%s  %-28s %s [%.2f s / %.0f s]\n", ok ? "PASS" : "FAIL", name,
                v.detail.c_str(), took, budget_s);
  } else {
    std::printf("%s  %-28s %s [%.2f s]\n", ok ? "PASS" : "FAIL", name,
                v.detail.c_str(), took);
  }
  std::fflush(stdout);
}

void info(const std::string& text) {
  std::printf("INFO  %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const Model kModels[] = {Model::Classical, Model::Geodesic1, Model::Geodesic2};

// ---------------------------------------------------------------- numerics

Verdict consistency() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ug(0, 1), ud(-5, 5), up(-10, 10);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const LocalSpeed s{ug(rng), ud(rng), ud(rng), ud(rng)};
    const double a = up(rng), b = up(rng), c = up(rng);
    const UpwindDiffs d{a, a, b, b, c, c};
    for (Model m : kModels) {
      const double h = llf_hamiltonian(m, s, d, 1.0, 0.25);
      worst = std::max(worst, std::abs(h - hamiltonian(m, s, a, b, c, 1.0, 0.25)));
    }
  }
  return {worst <= 1e-12, fmt("max |h - H| = %.2e over 10000 draws x 3 models (tol 1e-12)", worst)};
}

Verdict monotonicity() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u01(0, 1), uv(-1, 1), bump(1e-3, 0.5);
  std::uniform_int_distribution<int> axis(0, 5);
  const Dims d{6, 6, 6};
  std::uniform_int_distribution<int> coord(0, 5);
  const int offsets[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                             {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
  int violations = 0, trials = 0;
  double worst = 0.0;
  while (trials < 1000) {
    const Model model = kModels[trials % 3];
    ScalarVolume g(d);
    for (auto& x : g.values()) x = u01(rng);
    const auto speed = SpeedField::from_speed(std::move(g), 0.1);
    SolverConfig cfg;
    cfg.model = model;
    // the parabolic step carries the first-order part only
    if (model == Model::Geodesic2) cfg.epsilon = 0.0;
    const double dt = cfl_dt(speed, model, cfg.mu, cfg.eta, cfg.dx);

    LevelSetField f{ScalarVolume(d)};
    for (auto& x : f.v.values()) x = uv(rng);
    const VoxelIndex c{coord(rng), coord(rng), coord(rng)};
    const auto* o = offsets[axis(rng)];
    const VoxelIndex nb{c.i + o[0], c.j + o[1], c.k + o[2]};
    if (!f.v.contains(nb)) continue;
    ++trials;
    LevelSetField bumped = f;
    bumped.v.at(nb) += bump(rng);
    const double before = step(f, speed, cfg, dt).v.at(c);
    const double after = step(bumped, speed, cfg, dt).v.at(c);
    if (after < before - 1e-14) {
      ++violations;
      worst = std::max(worst, before - after);
    }
  }
  return {violations == 0,
          fmt("%d/1000 neighbor increases lowered the update (worst %.2e)", violations, worst)};
}

double diagonal_error(const LevelSetField& f, VoxelIndex c, double dx) {
  const double expected = 5 * dx + f.time;
  double worst = 0.0;
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) {
        double radius = -1.0;
        for (int s = 0;; ++s) {
          const VoxelIndex a{c.i + sx * s, c.j + sy * s, c.k + sz * s};
          const VoxelIndex b{a.i + sx, a.j + sy, a.k + sz};
          if (!f.v.contains(b)) break;
          const double va = f.v.at(a), vb = f.v.at(b);
          if (va < 0 && vb >= 0) {
            radius = dx * std::sqrt(3.0) * (s + va / (va - vb));
            break;
          }
        }
        if (radius < 0) return INFINITY;
        worst = std::max(worst, std::abs(radius - expected));
      }
  return worst;
}

Verdict eikonal() {
  const Dims d{64, 64, 64};
  const double dx = 0.1;
  const auto speed = SpeedField::from_speed(ScalarVolume(d, {}, 1.0), dx);
  SolverConfig cfg;
  cfg.model = Model::Classical;
  cfg.seed = {32, 32, 32};
  cfg.n_max = 100;
  // Along the axes the front leaves the box, so measure on the 8 diagonals.
  std::string trace;
  double final_error = INFINITY, expected = 0.0;
  evolve_speed(speed, cfg, [&](const LevelSetField& f) {
    if (f.iteration % 20 == 0) {
      final_error = diagonal_error(f, cfg.seed, dx);
      expected = 5 * dx + f.time;
      trace += fmt(" %d:%.3f", f.iteration, final_error);
    }
    return true;
  });
  info("eikonal front error by step (physical units):" + trace);
  return {final_error <= 2 * dx,
          fmt("r0 + n*dt = %.4f, max diagonal error %.4f (tol %.2f)", expected, final_error,
              2 * dx)};
}

// Max relative error of 2/R over voxels with a sign change to a 6-neighbor.
double sphere_curvature_error(double dx, double R) {
  const int n = static_cast<int>(std::ceil(2 * R / dx)) + 12;
  const Dims d{n, n, n};
  const double c = 0.5 * (n - 1) + 0.17;  // off-lattice center
  ScalarVolume v(d);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) v(i, j, k) = dx * std::hypot(i - c, j - c, k - c) - R;
  const auto kappa = curvature_3d(v, dx, 1e-8);
  double worst = 0.0;
  for (int k = 1; k < n - 1; ++k)
    for (int j = 1; j < n - 1; ++j)
      for (int i = 1; i < n - 1; ++i) {
        const bool neg = v(i, j, k) < 0;
        const bool adjacent = (v(i - 1, j, k) < 0) != neg || (v(i + 1, j, k) < 0) != neg ||
                              (v(i, j - 1, k) < 0) != neg || (v(i, j + 1, k) < 0) != neg ||
                              (v(i, j, k - 1) < 0) != neg || (v(i, j, k + 1) < 0) != neg;
        if (adjacent) worst = std::max(worst, std::abs(kappa(i, j, k) * R / 2 - 1));
      }
  return worst;
}

Verdict curvature() {
  const double R = 1.0;
  const double e1 = sphere_curvature_error(0.1, R);
  const double e2 = sphere_curvature_error(0.05, R);
  const double e3 = sphere_curvature_error(0.025, R);
  return {e1 <= 0.15 && e2 < e1 && e3 < e2,
          fmt("max rel. error at R=10dx: %.3f (tol 0.15); dx/2: %.3f; dx/4: %.3f", e1, e2, e3)};
}

Verdict epsilon_zero() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0, 1), uv(-1, 1);
  const Dims d{24, 20, 16};
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    ScalarVolume g(d);
    for (auto& x : g.values()) x = u01(rng);
    const auto speed = SpeedField::from_speed(std::move(g), 0.1);
    LevelSetField f{ScalarVolume(d)};
    for (auto& x : f.v.values()) x = uv(rng);
    SolverConfig c1, c2;
    c1.model = Model::Geodesic1;
    c2.model = Model::Geodesic2;
    c2.epsilon = 0.0;
    const double dt = 0.0025;
    const auto a = step(f, speed, c1, dt), b = step(f, speed, c2, dt);
    for (std::size_t n = 0; n < a.v.size(); ++n)
      worst = std::max(worst, std::abs(a.v[n] - b.v[n]));
  }
  return {worst <= 1e-12, fmt("max per-step difference %.2e over 10 random fields (tol 1e-12)", worst)};
}

// --------------------------------------------------------------- phantoms

struct Prepared {
  Phantom phantom;
  SpeedField speed;
  VoxelIndex seed;
};

Prepared prepare(const cli::BenchCase& c) {
  auto ph = generate_phantom(c.spec);
  PreprocessConfig pre;
  pre.sigma = c.sigma;
  const auto p = preprocess_pipeline(ph.hu, pre);
  SolverConfig defaults;
  auto speed = build_speed(p.image, p.tissue, defaults.p, defaults.dx);
  return {std::move(ph), std::move(speed), tube_center(c.spec.left, c.spec.dims.nz / 2)};
}

Verdict end_to_end() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"easy", "medium"}) {
    const auto c = cli::bench_case(name);
    for (Model m : kModels) {
      const auto row = cli::run_bench_case(c, m);
      ok = ok && row.dice >= 0.90;
      detail += fmt("%s/%s %.3f  ", name, to_string(m).c_str(), row.dice);
    }
  }

  // hard phantom: the distractor organ touches the left tube
  const auto c = cli::bench_case("hard");
  const auto prep = prepare(c);
  const auto& ph = prep.phantom;
  BinaryMask organ(c.spec.dims);
  for (const auto& o : c.spec.organs)
    for (int k = o.k_begin; k <= o.k_end; ++k)
      for (int j = 0; j < c.spec.dims.ny; ++j)
        for (int i = 0; i < c.spec.dims.nx; ++i)
          if (o.shape.contains(i, j) && !ph.truth_left(i, j, k)) organ(i, j, k) = 1;
  const auto tally = [&](const BinaryMask& m, const BinaryMask& region) {
    std::size_t n = 0;
    for (std::size_t q = 0; q < m.size(); ++q) n += m[q] && region[q];
    return static_cast<double>(n);
  };
  const auto judge = [&](const BinaryMask& before, const char* label) {
    const BinaryMask after = postprocess(before, prep.seed, prep.seed.k);
    const double spurious = tally(before, organ);
    const double removed = spurious > 0 ? 1.0 - tally(after, organ) / spurious : 0.0;
    const double tube_before = tally(before, ph.truth_left);
    const double change = std::abs(tally(after, ph.truth_left) - tube_before) / tube_before;
    detail += fmt("| hard %s: %.0f spurious, %.1f%% removed, tube change %.2f%% ", label,
                  spurious, 100 * removed, 100 * change);
    return spurious > 0 && removed >= 0.95 && change < 0.01;
  };

  BinaryMask injected = ph.truth_left;
  for (std::size_t q = 0; q < injected.size(); ++q) injected[q] |= organ[q];
  ok = judge(injected, "injected") && ok;

  SolverConfig cfg;
  cfg.model = Model::Geodesic1;
  cfg.n_max = c.n_max_first_order;
  cfg.seed = prep.seed;
  ok = judge(evolve_speed(prep.speed, cfg).mask, "gmfd1 leak") && ok;
  return {ok, detail + "(Dice tol 0.90, removal >= 95%, tube change < 1%)"};
}

struct Reach {
  int iterations = -1;
  double wall = 0.0;
  double dt = 0.0;
};

// Iterations until Dice >= target, then a plain timed run of that length.
Reach reach(const Prepared& p, Model model, CflBound bound, int cap, double target) {
  SolverConfig cfg;
  cfg.model = model;
  cfg.cfl_bound = bound;
  cfg.seed = p.seed;
  cfg.n_max = cap;
  Reach r;
  evolve_speed(p.speed, cfg, [&](const LevelSetField& f) {
    if (dice(extract_mask(f), p.phantom.truth_left) >= target) {
      r.iterations = f.iteration;
      return false;
    }
    return true;
  });
  if (r.iterations < 0) return r;
  cfg.n_max = r.iterations;
  const auto timed = evolve_speed(p.speed, cfg);
  r.wall = timed.wall_seconds;
  r.dt = timed.dt;
  return r;
}

Verdict cost_gap() {
  const double target = 0.90;
  bool ok = true;
  std::string detail;
  for (const char* name : {"easy", "medium"}) {
    const auto prep = prepare(cli::bench_case(name));
    const auto first = reach(prep, Model::Geodesic1, CflBound::Generalized, 2000, target);
    const auto second = reach(prep, Model::Geodesic2, CflBound::Printed, 6000, target);
    if (first.iterations < 0 || second.iterations < 0) {
      return {false, fmt("%s: Dice %.2f not reached", name, target)};
    }
    const double it_ratio = double(second.iterations) / first.iterations;
    const double wall_ratio = second.wall / first.wall;
    ok = ok && it_ratio >= 5 && wall_ratio >= 5;
    detail += fmt("%s: gmfd1 %d it %.2f s, gmfd2 %d it %.2f s -> %.1fx it, %.1fx wall  ", name,
                  first.iterations, first.wall, second.iterations, second.wall, it_ratio,
                  wall_ratio);

    const auto printed = reach(prep, Model::Geodesic1, CflBound::Printed, 4000, target);
    info(fmt("cost gap on %s with the printed first-order bound (dt %.5f vs generalized %.5f): "
             "gmfd1 %d it %.2f s -> %.1fx it, %.1fx wall",
             name, printed.dt, first.dt, printed.iterations, printed.wall,
             double(second.iterations) / printed.iterations, second.wall / printed.wall));
  }
  return {ok, detail + "(matched Dice 0.90, tol 5x; gmfd1 on the eta-weighted CFL bound)"};
}

// ---------------------------------------------------------- metrics, alg. 1

Verdict metric_oracles() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> side(3, 16);
  double worst = 0.0;
  bool identity = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Dims d{side(rng), side(rng), side(rng)};
    auto a = oracle::random_mask(d, rng, 2, 0.02);
    auto b = oracle::random_mask(d, rng, 2, 0.02);
    a(0, 0, 0) = 1;
    b(d.nx - 1, d.ny - 1, d.nz - 1) = 1;
    const Spacing sp{0.5 + trial % 3 * 0.25, 1.0, 1.5};
    const auto c = oracle::set_counts(a, b);
    const double j = jaccard(a, b), dc = dice(a, b);
    identity = identity && dc == 2 * j / (1 + j);
    const auto ba = oracle::boundary(a), bb = oracle::boundary(b);
    worst = std::max({worst, std::abs(dc - 2 * c.both / (c.a + c.b)),
                      std::abs(j - c.both / (c.a + c.b - c.both)),
                      std::abs(hausdorff(a, b, sp) - oracle::hausdorff(ba, bb, sp)),
                      std::abs(assd(a, b, sp) - oracle::assd(ba, bb, sp))});
  }
  return {worst <= 1e-12 && identity,
          fmt("max deviation %.2e on 100 pairs (tol 1e-12); dice = 2j/(1+j) %s", worst,
              identity ? "exact" : "VIOLATED")};
}

Verdict algorithm_one() {
  bool ok = true;
  // worked step-2 examples, distances in pixels against tol 0.75
  const std::vector<PlanePoint> prev{{0.0, 0.0}};
  const auto tol = spurious_tolerances(prev, prev);
  const std::vector<PlanePoint> far{{2.0, 0.0}}, near{{0.5, 0.0}};
  ok = ok && tol.at(0) == 0.75;
  ok = ok && within_tolerance(far, prev, tol)[0] == 0;
  ok = ok && within_tolerance(near, prev, tol)[0] == 1;

  BinaryMask m({12, 12, 4});
  for (int k = 0; k < 4; ++k)
    for (int j = 4; j <= 6; ++j)
      for (int i = 4; i <= 6; ++i) m(i, j, k) = 1;
  const BinaryMask clean = m;
  m(8, 5, 2) = 1;
  ok = ok && clean_spurious(m, 1, ScanDirection::Up) == clean;
  ok = ok && clean_spurious(clean, 1, ScanDirection::Up) == clean;

  std::mt19937_64 rng(7);
  int idempotent = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto r = oracle::random_mask({16, 16, 12}, rng, 4, 0.03);
    const VoxelIndex seed{8, 8, 6};
    for (int j = 6; j <= 10; ++j)
      for (int i = 6; i <= 10; ++i) r(i, j, seed.k) = 1;
    const auto once = postprocess(r, seed, seed.k);
    idempotent += postprocess(once, seed, seed.k) == once;
  }
  return {ok && idempotent == 50,
          fmt("worked examples %s; idempotent on %d/50 random masks", ok ? "exact" : "FAILED",
              idempotent)};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  report("hamiltonian-consistency", 1, consistency);
  report("monotonicity", 10, monotonicity);
  report("eikonal-expansion", 30, eikonal);
  report("curvature-sphere", 10, curvature);
  report("geodesic2-eps0", 5, epsilon_zero);
  report("phantom-end-to-end", 600, end_to_end);
  report("cost-gap", 0, cost_gap);
  report("metric-oracles", 0, metric_oracles);
  report("algorithm1", 0, algorithm_one);
  std::printf("%s: %d failing criteria, %.1f s total\n", failures ? "FAILED" : "ALL PASSED",
              failures, seconds_since(t0));
  return failures ? 1 : 0;
}
