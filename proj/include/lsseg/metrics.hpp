#pragma once

#include <string>
#include <vector>

#include "lsseg/volume.hpp"

namespace lsseg {

struct MetricsReport {
  double dice = 0.0;
  double jaccard = 0.0;
  double hausdorff = 0.0;  // physical units
  double assd = 0.0;       // physical units
};

std::string to_json(const MetricsReport& r);

/// 2|A n B| / (|A| + |B|); 1 when both are empty. Computed from the Jaccard
/// index so that dice == 2j / (1 + j) holds bit-for-bit.
double dice(const BinaryMask& a, const BinaryMask& b);

/// |A n B| / |A u B|; 1 when both are empty.
double jaccard(const BinaryMask& a, const BinaryMask& b);

/// Foreground voxels with at least one background 6-neighbor; out-of-bounds
/// counts as background.
std::vector<VoxelIndex> surface_voxels(const BinaryMask& m);

enum class HausdorffMode { Surface, FullSet };

/// Symmetric Hausdorff distance, Euclidean with `spacing`.
/// Throws for an empty mask.
double hausdorff(const BinaryMask& a, const BinaryMask& b, Spacing spacing,
                 HausdorffMode mode = HausdorffMode::Surface);

/// Average symmetric surface distance pooled over both boundaries.
double assd(const BinaryMask& a, const BinaryMask& b, Spacing spacing);

/// All four metrics. Throws if either mask is empty.
MetricsReport compare(const BinaryMask& a, const BinaryMask& b, Spacing spacing);

/// Exact squared Euclidean distance from every voxel to the nearest voxel of
/// `sites` (infinity if none), with anisotropic spacing.
std::vector<double> squared_distance_transform(const BinaryMask& sites,
                                               Spacing spacing);

}  // namespace lsseg
