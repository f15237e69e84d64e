#pragma once

#include <array>

#include "lsseg/model.hpp"
#include "lsseg/volume.hpp"

namespace lsseg {

/// Edge-stopping speed g and its centered gradient, with the sup-norms the
/// time-step bound needs.
struct SpeedField {
  ScalarVolume g;
  ScalarVolume gx;
  ScalarVolume gy;
  ScalarVolume gz;
  double sup_g = 0.0;
  double sup_gx = 0.0;
  double sup_gy = 0.0;
  double sup_gz = 0.0;

  /// Builds a field from g alone, computing gradient and norms.
  static SpeedField from_speed(ScalarVolume g, double dx);
};

struct Gradient {
  ScalarVolume x;
  ScalarVolume y;
  ScalarVolume z;
};

/// Central differences /(2 dx) inside, one-sided /dx on the faces.
Gradient gradient_centered(const ScalarVolume& vol, double dx);

double sup_norm(const ScalarVolume& vol);

/// g = 1 / (1 + |grad I|^p), forced to 0 outside the tissue mask.
SpeedField build_speed(const ScalarVolume& preprocessed, const BinaryMask& tissue,
                       int p, double dx);

enum class CflBound {
  /// lambda = 1 / (3|g| + |gx| + |gy| + |gz|)
  Printed,
  /// lambda = 1 / (3 mu |g| + eta (|gx| + |gy| + |gz|))
  Generalized,
};

/// Explicit time step for the model:
///  Classical: dx / (3 sup g); Geodesic1: lambda dx; Geodesic2: 0.25 dx^2.
double cfl_dt(const SpeedField& speed, Model model, double mu, double eta,
              double dx, CflBound bound = CflBound::Printed);

}  // namespace lsseg
