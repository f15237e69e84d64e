#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsseg {

/// Base class for every failure raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  std::size_t slice_size() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  bool operator==(const Dims&) const = default;
};

/// Physical extent of one voxel along each axis.
struct Spacing {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;
  bool operator==(const Spacing&) const = default;
};

/// 0-based voxel coordinate, i along x.
struct VoxelIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  bool operator==(const VoxelIndex&) const = default;
};

namespace detail {
template <typename T>
inline constexpr int kMinExtent = 1;
// Scalar volumes feed centered stencils and need an interior voxel per axis.
template <>
inline constexpr int kMinExtent<double> = 3;
}  // namespace detail

/// Dense x-fastest 3D grid: index(i,j,k) = i + nx*(j + ny*k).
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(Dims dims, Spacing spacing = {}, T fill = T{})
      : dims_(checked(dims)), spacing_(spacing), values_(dims.size(), fill) {}

  Grid(Dims dims, Spacing spacing, std::vector<T> values)
      : dims_(checked(dims)), spacing_(spacing), values_(std::move(values)) {
    if (values_.size() != dims_.size()) {
      throw Error("grid value count " + std::to_string(values_.size()) +
                  " does not match dims product " +
                  std::to_string(dims_.size()));
    }
  }

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  void set_spacing(Spacing s) { spacing_ = s; }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(j) +
                static_cast<std::size_t>(dims_.ny) * static_cast<std::size_t>(k));
  }
  std::size_t index(VoxelIndex v) const { return index(v.i, v.j, v.k); }

  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims_.nx && j < dims_.ny &&
           k < dims_.nz;
  }
  bool contains(VoxelIndex v) const { return contains(v.i, v.j, v.k); }

  T& operator()(int i, int j, int k) { return values_[index(i, j, k)]; }
  const T& operator()(int i, int j, int k) const {
    return values_[index(i, j, k)];
  }
  T& operator[](std::size_t n) { return values_[n]; }
  const T& operator[](std::size_t n) const { return values_[n]; }
  T& at(VoxelIndex v) { return values_[index(v)]; }
  const T& at(VoxelIndex v) const { return values_[index(v)]; }

  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }

  std::span<T> slice(int k) {
    return std::span<T>(values_).subspan(k * dims_.slice_size(), dims_.slice_size());
  }
  std::span<const T> slice(int k) const {
    return std::span<const T>(values_).subspan(k * dims_.slice_size(),
                                               dims_.slice_size());
  }

  bool operator==(const Grid&) const = default;

 private:
  static Dims checked(Dims d) {
    constexpr int m = detail::kMinExtent<T>;
    if (d.nx < m || d.ny < m || d.nz < m) {
      throw Error("grid dims (" + std::to_string(d.nx) + "," +
                  std::to_string(d.ny) + "," + std::to_string(d.nz) +
                  ") below minimum extent " + std::to_string(m));
    }
    return d;
  }

  Dims dims_{};
  Spacing spacing_{};
  std::vector<T> values_;
};

using ScalarVolume = Grid<double>;
/// Voxel value 1 marks the segmented region.
using BinaryMask = Grid<std::uint8_t>;

inline std::size_t count(const BinaryMask& m) {
  std::size_t n = 0;
  for (auto v : m.values()) n += v != 0;
  return n;
}

/// Throws unless a and b share dims.
template <typename A, typename B>
void require_same_dims(const Grid<A>& a, const Grid<B>& b, const char* what) {
  if (a.dims() != b.dims()) {
    throw Error(std::string(what) + ": dims mismatch");
  }
}

}  // namespace lsseg
