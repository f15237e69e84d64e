#include "lsseg/levelset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace lsseg {

void SolverConfig::validate() const {
  if (!(dx > 0.0)) throw Error("solver: dx must be positive");
  if (n_max < 0) throw Error("solver: n_max must be >= 0");
  if (mu < 0.0 || eta < 0.0 || epsilon < 0.0) {
    throw Error("solver: mu, eta and epsilon must be nonnegative");
  }
  if (p < 1) throw Error("solver: p must be >= 1");
  if (seed_radius_voxels < 0) throw Error("solver: seed radius must be >= 0");
  if (!(curvature_delta > 0.0)) throw Error("solver: curvature delta must be > 0");
  if (stagnation_window && *stagnation_window < 1) {
    throw Error("solver: stagnation window must be >= 1");
  }
}

LevelSetField init_levelset(Dims dims, double dx, VoxelIndex seed,
                            int radius_voxels) {
  const int margin = radius_voxels + 2;
  const auto too_close = [margin](int c, int n) {
    return c < margin || (n - 1 - c) < margin;
  };
  if (too_close(seed.i, dims.nx) || too_close(seed.j, dims.ny) ||
      too_close(seed.k, dims.nz)) {
    throw Error("init_levelset: seed (" + std::to_string(seed.i) + "," +
                std::to_string(seed.j) + "," + std::to_string(seed.k) +
                ") closer than " + std::to_string(margin) +
                " voxels to the boundary");
  }
  LevelSetField f{ScalarVolume(dims)};
  for (int k = 0; k < dims.nz; ++k) {
    for (int j = 0; j < dims.ny; ++j) {
      for (int i = 0; i < dims.nx; ++i) {
        const double di = i - seed.i, dj = j - seed.j, dk = k - seed.k;
        f.v(i, j, k) = dx * std::sqrt(di * di + dj * dj + dk * dk) -
                       dx * radius_voxels;
      }
    }
  }
  return f;
}

namespace {

struct Neighborhood {
  // Offsets to the -/+ neighbor along each axis; 0 on a face.
  std::ptrdiff_t xm, xp, ym, yp, zm, zp;
};

inline Neighborhood neighborhood(const Dims& d, int i, int j, int k) {
  const auto sy = static_cast<std::ptrdiff_t>(d.nx);
  const auto sz = static_cast<std::ptrdiff_t>(d.slice_size());
  return {i > 0 ? -1 : 0,       i < d.nx - 1 ? 1 : 0,
          j > 0 ? -sy : 0,      j < d.ny - 1 ? sy : 0,
          k > 0 ? -sz : 0,      k < d.nz - 1 ? sz : 0};
}

// A face neighbor replicates the center voxel, so the missing difference
// is 0; this keeps the update monotone on the boundary.
inline void one_sided(const double* p, std::ptrdiff_t m, std::ptrdiff_t q,
                      double inv_dx, double& minus, double& plus) {
  minus = (p[0] - p[m]) * inv_dx;
  plus = (p[q] - p[0]) * inv_dx;
}

inline UpwindDiffs diffs_at(const double* p, const Neighborhood& nb,
                            double inv_dx) {
  UpwindDiffs d;
  one_sided(p, nb.xm, nb.xp, inv_dx, d.px_minus, d.px_plus);
  one_sided(p, nb.ym, nb.yp, inv_dx, d.py_minus, d.py_plus);
  one_sided(p, nb.zm, nb.zp, inv_dx, d.pz_minus, d.pz_plus);
  return d;
}

struct CentredDerivatives {
  double grad_norm;  // |Dv| from centered differences
  double curvature;
};

// Centered first and second derivatives; faces replicate the edge value.
inline CentredDerivatives centred_at(const double* p, const Neighborhood& nb,
                                     double dx, double delta) {
  const double c = p[0];
  const double xm = p[nb.xm], xp = p[nb.xp];
  const double ym = p[nb.ym], yp = p[nb.yp];
  const double zm = p[nb.zm], zp = p[nb.zp];
  const double h2 = 2.0 * dx;
  const double dx2 = dx * dx;
  const double vx = (xp - xm) / h2;
  const double vy = (yp - ym) / h2;
  const double vz = (zp - zm) / h2;
  const double vxx = (xp - 2.0 * c + xm) / dx2;
  const double vyy = (yp - 2.0 * c + ym) / dx2;
  const double vzz = (zp - 2.0 * c + zm) / dx2;
  const double q = 4.0 * dx2;
  const double vxy = (p[nb.xp + nb.yp] - p[nb.xp + nb.ym] - p[nb.xm + nb.yp] +
                      p[nb.xm + nb.ym]) / q;
  const double vxz = (p[nb.xp + nb.zp] - p[nb.xp + nb.zm] - p[nb.xm + nb.zp] +
                      p[nb.xm + nb.zm]) / q;
  const double vyz = (p[nb.yp + nb.zp] - p[nb.yp + nb.zm] - p[nb.ym + nb.zp] +
                      p[nb.ym + nb.zm]) / q;
  const double sx = vx * vx, sy = vy * vy, sz = vz * vz;
  const double num = vxx * (sy + sz) + vyy * (sx + sz) + vzz * (sx + sy) -
                     2.0 * (vx * vy * vxy + vx * vz * vxz + vy * vz * vyz);
  const double norm2 = sx + sy + sz;
  const double reg = norm2 + delta;
  const double denom = reg * std::sqrt(reg);
  return {std::sqrt(norm2), num / denom};
}

inline double hamiltonian_impl(Model model, const LocalSpeed& s, double a,
                               double b, double c, double mu, double eta) {
  const double norm = std::sqrt(a * a + b * b + c * c);
  if (model == Model::Classical) return s.g * norm;
  return mu * s.g * norm - eta * (s.gx * a + s.gy * b + s.gz * c);
}

inline double llf_impl(Model model, const LocalSpeed& s, const UpwindDiffs& d,
                       double mu, double eta) {
  const double a = 0.5 * (d.px_minus + d.px_plus);
  const double b = 0.5 * (d.py_minus + d.py_plus);
  const double c = 0.5 * (d.pz_minus + d.pz_plus);
  double ax, ay, az;
  if (model == Model::Classical) {
    ax = ay = az = s.g;
  } else {
    // |dH/dp_x| <= mu g + eta |g_x| for every gradient, likewise per axis.
    ax = mu * s.g + eta * std::abs(s.gx);
    ay = mu * s.g + eta * std::abs(s.gy);
    az = mu * s.g + eta * std::abs(s.gz);
  }
  return hamiltonian_impl(model, s, a, b, c, mu, eta) -
         0.5 * ax * (d.px_plus - d.px_minus) -
         0.5 * ay * (d.py_plus - d.py_minus) -
         0.5 * az * (d.pz_plus - d.pz_minus);
}

// Writes the updated field into `out` and returns how many voxels changed
// side of the front.
std::size_t step_into(const ScalarVolume& in, ScalarVolume& out,
                      const SpeedField& speed, const SolverConfig& cfg,
                      double dt) {
  const Dims d = in.dims();
  const double inv_dx = 1.0 / cfg.dx;
  const bool curvature = cfg.model == Model::Geodesic2;
  const double* base = in.values().data();
  std::size_t flips = 0;
  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        const std::size_t n = in.index(i, j, k);
        const double* p = base + n;
        const Neighborhood nb = neighborhood(d, i, j, k);
        const LocalSpeed s{speed.g[n], speed.gx[n], speed.gy[n], speed.gz[n]};
        double h = llf_impl(cfg.model, s, diffs_at(p, nb, inv_dx), cfg.mu,
                            cfg.eta);
        if (curvature) {
          const auto cd = centred_at(p, nb, cfg.dx, cfg.curvature_delta);
          h += -cfg.epsilon * s.g * cd.grad_norm * cd.curvature;
        }
        const double updated = p[0] - dt * h;
        flips += (updated < 0.0) != (p[0] < 0.0);
        out[n] = updated;
      }
    }
  }
  return flips;
}

bool all_finite(const ScalarVolume& v) {
  return std::all_of(v.values().begin(), v.values().end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

UpwindDiffs upwind_diffs(const ScalarVolume& v, double dx, VoxelIndex at) {
  if (!v.contains(at)) throw Error("upwind_diffs: voxel outside volume");
  const double* p = v.values().data() + v.index(at);
  return diffs_at(p, neighborhood(v.dims(), at.i, at.j, at.k), 1.0 / dx);
}

double hamiltonian(Model model, const LocalSpeed& s, double a, double b,
                   double c, double mu, double eta) {
  return hamiltonian_impl(model, s, a, b, c, mu, eta);
}

double llf_hamiltonian(Model model, const LocalSpeed& s, const UpwindDiffs& d,
                       double mu, double eta) {
  return llf_impl(model, s, d, mu, eta);
}

ScalarVolume curvature_3d(const ScalarVolume& v, double dx, double delta) {
  const Dims d = v.dims();
  ScalarVolume out(d, v.spacing());
  const double* base = v.values().data();
  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        const std::size_t n = v.index(i, j, k);
        out[n] = centred_at(base + n, neighborhood(d, i, j, k), dx, delta).curvature;
      }
    }
  }
  return out;
}

LevelSetField step(const LevelSetField& field, const SpeedField& speed,
                   const SolverConfig& cfg, double dt) {
  require_same_dims(field.v, speed.g, "step");
  LevelSetField next{ScalarVolume(field.v.dims(), field.v.spacing()),
                     field.iteration + 1, field.time + dt};
  step_into(field.v, next.v, speed, cfg, dt);
  if (!all_finite(next.v)) throw NumericalBlowUp(next.iteration);
  return next;
}

EvolutionResult evolve_speed(const SpeedField& speed, const SolverConfig& cfg,
                             const IterationObserver& observer) {
  cfg.validate();
  const double dt = cfl_dt(speed, cfg.model, cfg.mu, cfg.eta, cfg.dx, cfg.cfl_bound);
  const auto start = std::chrono::steady_clock::now();

  LevelSetField current =
      init_levelset(speed.g.dims(), cfg.dx, cfg.seed, cfg.seed_radius_voxels);
  LevelSetField scratch{ScalarVolume(current.v.dims())};
  int quiet = 0;
  while (current.iteration < cfg.n_max) {
    const std::size_t flips = step_into(current.v, scratch.v, speed, cfg, dt);
    scratch.iteration = current.iteration + 1;
    scratch.time = current.time + dt;
    std::swap(current, scratch);
    if (!all_finite(current.v)) throw NumericalBlowUp(current.iteration);

    quiet = flips == 0 ? quiet + 1 : 0;
    if (observer && !observer(current)) break;
    if (cfg.stagnation_window && quiet >= *cfg.stagnation_window) break;
  }

  const auto stop = std::chrono::steady_clock::now();
  return {extract_mask(current), current.iteration,
          std::chrono::duration<double>(stop - start).count(), dt};
}

EvolutionResult evolve(const ScalarVolume& raw, const SolverConfig& cfg,
                       const PreprocessConfig& pre) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto prepared = preprocess_pipeline(raw, pre);
  if (!prepared.tissue.contains(cfg.seed)) {
    throw Error("evolve: seed outside the volume");
  }
  if (!prepared.tissue.at(cfg.seed)) {
    throw Error("evolve: seed outside the tissue mask");
  }
  const auto speed = build_speed(prepared.image, prepared.tissue, cfg.p, cfg.dx);
  auto result = evolve_speed(speed, cfg);
  result.mask.set_spacing(raw.spacing());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

BinaryMask extract_mask(const LevelSetField& field) {
  BinaryMask m(field.v.dims(), field.v.spacing());
  for (std::size_t n = 0; n < m.size(); ++n) m[n] = field.v[n] < 0.0;
  return m;
}

}  // namespace lsseg
