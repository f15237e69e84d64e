#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lsseg/volume.hpp"

namespace lsseg {

/// Axis-aligned ellipse in the (x, y) plane of a slice.
struct Ellipse {
  double cx = 0.0, cy = 0.0;
  double rx = 1.0, ry = 1.0;

  bool contains(double x, double y) const {
    const double u = (x - cx) / rx, v = (y - cy) / ry;
    return u * u + v * v <= 1.0;
  }
};

/// Muscle tube given as one disk per slice.
struct Tube {
  std::vector<double> cx, cy, radius;  // one entry per slice, radius in voxels
};

/// Extra muscle-intensity structure over a slice range [k_begin, k_end].
struct Organ {
  Ellipse shape;
  int k_begin = 0;
  int k_end = 0;
};

struct PhantomSpec {
  std::string name = "phantom";
  Dims dims{64, 64, 33};
  Spacing spacing{};
  Ellipse body;   // fat; air outside
  Ellipse spine;  // bone, every slice
  Tube left;
  Tube right;
  std::vector<Organ> organs;  // share the muscle HU
  double hu_muscle = 60.0;
  double hu_fat = -100.0;
  double hu_bone = 400.0;
  double hu_air = -1000.0;
  double noise_std = 10.0;
  std::uint64_t seed = 1;

  /// Throws on overlapping tubes, radii below 2 voxels, per-slice vectors of
  /// the wrong length, or muscle HU outside [5, 120].
  void validate() const;
};

struct Phantom {
  ScalarVolume hu;
  BinaryMask truth_left;
  BinaryMask truth_right;
};

/// Piecewise-constant HU volume plus seeded Gaussian noise; truth masks are
/// the noiseless tube voxels.
Phantom generate_phantom(const PhantomSpec& spec);

/// Three canonical specs: "easy" (straight tubes), "medium" (curved,
/// tapering), "hard" (a muscle-HU organ touching the left tube).
std::vector<PhantomSpec> default_suite();
PhantomSpec suite_spec(const std::string& name);

/// In-tube voxel on the tube axis at slice k, for seeding.
VoxelIndex tube_center(const Tube& t, int k);

std::string to_json(const PhantomSpec& spec);
PhantomSpec phantom_spec_from_json(const std::string& text);

}  // namespace lsseg
