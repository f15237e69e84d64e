#pragma once

#include <utility>

#include "lsseg/volume.hpp"

namespace lsseg {

struct PreprocessConfig {
  double hu_clip_threshold = 120.0;
  double tissue_low = 5.0;
  double tissue_high = 120.0;
  double sigma = 0.0;  // voxels
  int equalization_bins = 256;

  void validate() const;
};

/// Values strictly above `threshold` become 0.
ScalarVolume clip_hu(const ScalarVolume& vol, double threshold);

/// Per k-slice histogram equalization onto [0,1]. Each slice uses `bins`
/// equal-width bins spanning its own [min,max]; a voxel maps to the
/// cumulative fraction of its bin. Constant slices map to 0.
ScalarVolume equalize_slices(const ScalarVolume& vol, int bins = 256);

/// 2D Gaussian per k-slice, radius ceil(3*sigma), renormalized kernel,
/// edge replication. sigma == 0 is the identity.
ScalarVolume gaussian_smooth(const ScalarVolume& vol, double sigma);

/// True exactly where low <= HU <= high. Expects the unprocessed HU volume.
BinaryMask tissue_mask(const ScalarVolume& raw, double low, double high);

struct Preprocessed {
  ScalarVolume image;
  BinaryMask tissue;
};

/// clip -> equalize -> smooth on the image; tissue mask from the raw HU.
Preprocessed preprocess_pipeline(const ScalarVolume& raw,
                                 const PreprocessConfig& cfg);

}  // namespace lsseg
