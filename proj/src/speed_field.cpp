#include "lsseg/speed_field.hpp"

#include <algorithm>
#include <cmath>

namespace lsseg {

std::string to_string(Model m) {
  switch (m) {
    case Model::Classical: return "classical";
    case Model::Geodesic1: return "gmfd1";
    case Model::Geodesic2: return "gmfd2";
  }
  return "?";
}

Model parse_model(const std::string& s) {
  if (s == "classical") return Model::Classical;
  if (s == "gmfd1") return Model::Geodesic1;
  if (s == "gmfd2") return Model::Geodesic2;
  throw Error("unknown model '" + s + "' (expected classical|gmfd1|gmfd2)");
}

namespace {

// Derivative along one axis with stride `step` at coordinate c of extent n.
inline double axis_derivative(const double* p, std::size_t step, int c, int n,
                              double dx) {
  if (c == 0) return (p[step] - p[0]) / dx;
  if (c == n - 1) return (p[0] - p[-static_cast<std::ptrdiff_t>(step)]) / dx;
  return (p[step] - p[-static_cast<std::ptrdiff_t>(step)]) / (2.0 * dx);
}

}  // namespace

Gradient gradient_centered(const ScalarVolume& vol, double dx) {
  if (!(dx > 0.0)) throw Error("gradient_centered: dx must be positive");
  const Dims d = vol.dims();
  Gradient out{ScalarVolume(d, vol.spacing()), ScalarVolume(d, vol.spacing()),
               ScalarVolume(d, vol.spacing())};
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(d.nx);
  const std::size_t sz = d.slice_size();
  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        const std::size_t n = vol.index(i, j, k);
        const double* p = vol.values().data() + n;
        out.x[n] = axis_derivative(p, sx, i, d.nx, dx);
        out.y[n] = axis_derivative(p, sy, j, d.ny, dx);
        out.z[n] = axis_derivative(p, sz, k, d.nz, dx);
      }
    }
  }
  return out;
}

double sup_norm(const ScalarVolume& vol) {
  double m = 0.0;
  for (double v : vol.values()) m = std::max(m, std::abs(v));
  return m;
}

SpeedField SpeedField::from_speed(ScalarVolume g, double dx) {
  auto grad = gradient_centered(g, dx);
  SpeedField s{std::move(g), std::move(grad.x), std::move(grad.y),
               std::move(grad.z)};
  s.sup_g = sup_norm(s.g);
  s.sup_gx = sup_norm(s.gx);
  s.sup_gy = sup_norm(s.gy);
  s.sup_gz = sup_norm(s.gz);
  return s;
}

SpeedField build_speed(const ScalarVolume& preprocessed, const BinaryMask& tissue,
                       int p, double dx) {
  if (p < 1) throw Error("build_speed: p must be >= 1");
  require_same_dims(preprocessed, tissue, "build_speed");
  const auto grad = gradient_centered(preprocessed, dx);
  ScalarVolume g(preprocessed.dims(), preprocessed.spacing());
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!tissue[n]) {
      g[n] = 0.0;
      continue;
    }
    const double mag = std::sqrt(grad.x[n] * grad.x[n] + grad.y[n] * grad.y[n] +
                                 grad.z[n] * grad.z[n]);
    g[n] = 1.0 / (1.0 + std::pow(mag, p));
  }
  return SpeedField::from_speed(std::move(g), dx);
}

double cfl_dt(const SpeedField& speed, Model model, double mu, double eta,
              double dx, CflBound bound) {
  if (!(dx > 0.0)) throw Error("cfl_dt: dx must be positive");
  if (!(speed.sup_g > 0.0)) throw Error("cfl_dt: degenerate speed field");
  const double grad_sum = speed.sup_gx + speed.sup_gy + speed.sup_gz;
  switch (model) {
    case Model::Classical:
      return dx / (3.0 * speed.sup_g);
    case Model::Geodesic1: {
      const double denom = bound == CflBound::Printed
                               ? 3.0 * speed.sup_g + grad_sum
                               : 3.0 * mu * speed.sup_g + eta * grad_sum;
      if (!(denom > 0.0)) throw Error("cfl_dt: degenerate speed field");
      return dx / denom;
    }
    case Model::Geodesic2:
      return 0.25 * dx * dx;
  }
  return 0.0;
}

}  // namespace lsseg
