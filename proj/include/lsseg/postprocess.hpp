#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "lsseg/volume.hpp"

namespace lsseg {

struct Pixel {
  int i = 0;
  int j = 0;
  bool operator==(const Pixel&) const = default;
};

/// 8-connected components of one slice. Ids run 1..count, 0 is background;
/// components[id - 1] lists the pixels of component id.
struct SliceLabeling {
  int nx = 0;
  int ny = 0;
  std::vector<int> labels;
  int count = 0;
  std::vector<std::vector<Pixel>> components;
  std::vector<std::array<double, 2>> centroids;  // (x, y) pixel coordinates

  int label_at(int i, int j) const { return labels[i + nx * j]; }
};

SliceLabeling label_components_2d(std::span<const std::uint8_t> slice, int nx,
                                  int ny);

/// Step 1: keep one component per slice. The seed slice keeps the component
/// holding the seed; scanning away from it in both directions, each slice
/// keeps the component holding the rounded centroid of the previous kept
/// component (or the nearest component if the centroid falls on background).
/// An empty slice ends that scan direction.
BinaryMask reduce_components(const BinaryMask& mask, VoxelIndex seed);

enum class ScanDirection : int { Up = 1, Down = -1 };

inline constexpr double kSpuriousTolerance = 0.75;

/// Continuous in-plane (x, y) position in pixel units.
using PlanePoint = std::array<double, 2>;

/// tol(i) = distance from current[i] to the nearest point of `previous`,
/// plus kSpuriousTolerance. An empty `previous` contributes distance 0.
std::vector<double> spurious_tolerances(std::span<const PlanePoint> current,
                                        std::span<const PlanePoint> previous);

/// For each candidate: 1 if its distance to the nearest point i_min of
/// `previous` is at most previous_tol[i_min], else 0. Ties on the nearest
/// point go to the lowest index.
std::vector<std::uint8_t> within_tolerance(std::span<const PlanePoint> candidates,
                                           std::span<const PlanePoint> previous,
                                           std::span<const double> previous_tol);

/// Step 2 along one direction. `start_slice` and its predecessor are taken
/// as clean; every later slice drops new pixels (absent at the same (i,j) in
/// the previous slice) whose in-plane distance to the previous slice exceeds
/// the tolerance of their nearest previous pixel. Tolerances are the
/// distance to the slice before plus 0.75.
BinaryMask clean_spurious(const BinaryMask& mask, int start_slice,
                          ScanDirection direction);

enum class ScanDirections { Both, Up, Down };

/// Step 1 then step 2 from `start_slice`, repeated until the mask stops
/// changing. Only ever removes voxels.
BinaryMask postprocess(const BinaryMask& mask, VoxelIndex seed, int start_slice,
                       ScanDirections directions = ScanDirections::Both);

}  // namespace lsseg
