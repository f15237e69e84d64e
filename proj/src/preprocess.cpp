#include "lsseg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace lsseg {

void PreprocessConfig::validate() const {
  if (!(tissue_low < tissue_high)) {
    throw Error("preprocess: tissue interval requires low < high");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error("preprocess: sigma must be >= 0");
  }
  if (equalization_bins < 2) {
    throw Error("preprocess: equalization needs at least 2 bins");
  }
}

ScalarVolume clip_hu(const ScalarVolume& vol, double threshold) {
  ScalarVolume out = vol;
  for (auto& v : out.values()) {
    if (v > threshold) v = 0.0;
  }
  return out;
}

ScalarVolume equalize_slices(const ScalarVolume& vol, int bins) {
  if (bins < 2) throw Error("equalize_slices: bins must be >= 2");
  ScalarVolume out(vol.dims(), vol.spacing());
  std::vector<std::size_t> hist(static_cast<std::size_t>(bins));
  std::vector<int> bin_of(vol.dims().slice_size());

  for (int k = 0; k < vol.dims().nz; ++k) {
    auto in = vol.slice(k);
    auto dst = out.slice(k);
    const auto [lo_it, hi_it] = std::minmax_element(in.begin(), in.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (hi <= lo) {
      std::fill(dst.begin(), dst.end(), 0.0);
      continue;
    }

    std::fill(hist.begin(), hist.end(), 0);
    const double scale = bins / (hi - lo);
    for (std::size_t n = 0; n < in.size(); ++n) {
      int b = static_cast<int>((in[n] - lo) * scale);
      b = std::clamp(b, 0, bins - 1);
      bin_of[n] = b;
      ++hist[static_cast<std::size_t>(b)];
    }

    std::vector<double> cdf(static_cast<std::size_t>(bins));
    std::size_t running = 0;
    const double total = static_cast<double>(in.size());
    for (int b = 0; b < bins; ++b) {
      running += hist[static_cast<std::size_t>(b)];
      cdf[static_cast<std::size_t>(b)] = static_cast<double>(running) / total;
    }
    for (std::size_t n = 0; n < in.size(); ++n) {
      dst[n] = cdf[static_cast<std::size_t>(bin_of[n])];
    }
  }
  return out;
}

namespace {

std::vector<double> gaussian_kernel_1d(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * t * t / (sigma * sigma));
    k[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

}  // namespace

ScalarVolume gaussian_smooth(const ScalarVolume& vol, double sigma) {
  if (!(sigma >= 0.0)) throw Error("gaussian_smooth: sigma must be >= 0");
  if (sigma == 0.0) return vol;

  // The separable pass with a normalized 1D kernel equals the normalized
  // 2D kernel, since exp(-(x^2+y^2)) factors.
  const auto kernel = gaussian_kernel_1d(sigma);
  const int radius = static_cast<int>(kernel.size() / 2);
  const int nx = vol.dims().nx;
  const int ny = vol.dims().ny;

  ScalarVolume out(vol.dims(), vol.spacing());
  std::vector<double> tmp(vol.dims().slice_size());
  for (int k = 0; k < vol.dims().nz; ++k) {
    auto in = vol.slice(k);
    auto dst = out.slice(k);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const int ii = std::clamp(i + t, 0, nx - 1);
          acc += kernel[static_cast<std::size_t>(t + radius)] * in[ii + nx * j];
        }
        tmp[i + nx * j] = acc;
      }
    }
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
          const int jj = std::clamp(j + t, 0, ny - 1);
          acc += kernel[static_cast<std::size_t>(t + radius)] * tmp[i + nx * jj];
        }
        dst[i + nx * j] = acc;
      }
    }
  }
  return out;
}

BinaryMask tissue_mask(const ScalarVolume& raw, double low, double high) {
  BinaryMask m(raw.dims(), raw.spacing());
  for (std::size_t n = 0; n < raw.size(); ++n) {
    m[n] = raw[n] >= low && raw[n] <= high;
  }
  return m;
}

Preprocessed preprocess_pipeline(const ScalarVolume& raw,
                                 const PreprocessConfig& cfg) {
  cfg.validate();
  auto image = gaussian_smooth(
      equalize_slices(clip_hu(raw, cfg.hu_clip_threshold), cfg.equalization_bins),
      cfg.sigma);
  return {std::move(image), tissue_mask(raw, cfg.tissue_low, cfg.tissue_high)};
}

}  // namespace lsseg
