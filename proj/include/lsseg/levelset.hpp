#pragma once

#include <functional>
#include <optional>

#include "lsseg/model.hpp"
#include "lsseg/preprocess.hpp"
#include "lsseg/speed_field.hpp"
#include "lsseg/volume.hpp"

namespace lsseg {

struct SolverConfig {
  Model model = Model::Geodesic1;
  double mu = 1.0;
  double eta = 0.25;
  double epsilon = 0.05;  // Geodesic2 only
  int p = 2;
  double dx = 0.1;  // abstract grid step, independent of voxel spacing
  int n_max = 400;
  VoxelIndex seed{};
  int seed_radius_voxels = 5;
  double curvature_delta = 1e-8;
  CflBound cfl_bound = CflBound::Printed;
  /// Stop once the mask has not changed for this many consecutive
  /// iterations. Unset runs the full n_max.
  std::optional<int> stagnation_window;

  void validate() const;
};

/// Level-set function, negative inside the evolving region.
struct LevelSetField {
  ScalarVolume v;
  int iteration = 0;
  double time = 0.0;
};

struct EvolutionResult {
  BinaryMask mask;
  int iterations = 0;
  double wall_seconds = 0.0;
  double dt = 0.0;
};

class NumericalBlowUp : public Error {
 public:
  explicit NumericalBlowUp(int iteration)
      : Error("numerical blow-up at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Signed distance to a ball around `seed`: dx*|x - seed| - dx*radius.
LevelSetField init_levelset(Dims dims, double dx, VoxelIndex seed,
                            int radius_voxels);

/// One-sided differences around a voxel. Outside a face the grid replicates
/// the edge value, so the missing difference is 0.
struct UpwindDiffs {
  double px_minus = 0.0, px_plus = 0.0;
  double py_minus = 0.0, py_plus = 0.0;
  double pz_minus = 0.0, pz_plus = 0.0;
};

UpwindDiffs upwind_diffs(const ScalarVolume& v, double dx, VoxelIndex at);

/// Speed and its gradient at one voxel.
struct LocalSpeed {
  double g = 0.0;
  double gx = 0.0, gy = 0.0, gz = 0.0;
};

/// Continuous first-order Hamiltonian at gradient (a, b, c).
double hamiltonian(Model model, const LocalSpeed& s, double a, double b,
                   double c, double mu, double eta);

/// Local Lax-Friedrichs numerical Hamiltonian of the first-order part of
/// `model` (for Geodesic2, its eikonal + advection part).
double llf_hamiltonian(Model model, const LocalSpeed& s, const UpwindDiffs& d,
                       double mu, double eta);

/// Mean curvature div(Dv/|Dv|) with centered differences; the gradient
/// norm in the denominator is regularized by delta.
ScalarVolume curvature_3d(const ScalarVolume& v, double dx, double delta);

/// One explicit update v <- v - dt * h over every voxel.
LevelSetField step(const LevelSetField& field, const SpeedField& speed,
                   const SolverConfig& cfg, double dt);

/// Called after every iteration; returning false stops the run.
using IterationObserver = std::function<bool(const LevelSetField&)>;

/// Evolves the seeded sphere through `speed` with the model's CFL step.
EvolutionResult evolve_speed(const SpeedField& speed, const SolverConfig& cfg,
                             const IterationObserver& observer = {});

/// Preprocess, build the speed, then evolve_speed. One seed per call.
EvolutionResult evolve(const ScalarVolume& raw, const SolverConfig& cfg,
                       const PreprocessConfig& pre);

/// True exactly where v < 0.
BinaryMask extract_mask(const LevelSetField& field);

}  // namespace lsseg
