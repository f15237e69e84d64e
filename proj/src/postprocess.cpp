#include "lsseg/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lsseg {

SliceLabeling label_components_2d(std::span<const std::uint8_t> slice, int nx,
                                  int ny) {
  if (slice.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny)) {
    throw Error("label_components_2d: slice size does not match nx*ny");
  }
  SliceLabeling out;
  out.nx = nx;
  out.ny = ny;
  out.labels.assign(slice.size(), 0);
  std::vector<Pixel> stack;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!slice[i + nx * j] || out.labels[i + nx * j]) continue;
      const int id = ++out.count;
      auto& members = out.components.emplace_back();
      out.labels[i + nx * j] = id;
      stack.push_back({i, j});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        members.push_back(p);
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            const int a = p.i + di, b = p.j + dj;
            if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
            const std::size_t n = a + static_cast<std::size_t>(nx) * b;
            if (slice[n] && !out.labels[n]) {
              out.labels[n] = id;
              stack.push_back({a, b});
            }
          }
        }
      }
    }
  }
  for (auto& members : out.components) {
    std::sort(members.begin(), members.end(), [](Pixel a, Pixel b) {
      return a.j != b.j ? a.j < b.j : a.i < b.i;
    });
    double sx = 0.0, sy = 0.0;
    for (const auto& p : members) {
      sx += p.i;
      sy += p.j;
    }
    const double n = static_cast<double>(members.size());
    out.centroids.push_back({sx / n, sy / n});
  }
  return out;
}

namespace {

double squared(double v) { return v * v; }

// Component holding the rounded point, else the one nearest to it.
int pick_component(const SliceLabeling& lab, std::array<double, 2> point) {
  const int ci = static_cast<int>(std::lround(point[0]));
  const int cj = static_cast<int>(std::lround(point[1]));
  if (ci >= 0 && cj >= 0 && ci < lab.nx && cj < lab.ny) {
    if (const int id = lab.label_at(ci, cj)) return id;
  }
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int id = 1; id <= lab.count; ++id) {
    for (const auto& p : lab.components[id - 1]) {
      const double d = squared(p.i - point[0]) + squared(p.j - point[1]);
      if (d < best_d) {
        best_d = d;
        best = id;
      }
    }
  }
  return best;
}

void copy_component(const SliceLabeling& lab, int id, BinaryMask& out, int k) {
  for (const auto& p : lab.components[id - 1]) out(p.i, p.j, k) = 1;
}

BinaryMask reduce_impl(const BinaryMask& mask, VoxelIndex seed, bool strict) {
  if (!mask.contains(seed)) throw Error("reduce_components: seed outside volume");
  const Dims d = mask.dims();
  BinaryMask out(d, mask.spacing());

  const auto seed_lab = label_components_2d(mask.slice(seed.k), d.nx, d.ny);
  int seed_id = seed_lab.label_at(seed.i, seed.j);
  if (seed_id == 0) {
    if (strict || seed_lab.count == 0) {
      throw Error("reduce_components: seed is not in any component of its slice");
    }
    seed_id = pick_component(seed_lab, {double(seed.i), double(seed.j)});
  }
  copy_component(seed_lab, seed_id, out, seed.k);

  for (int dir : {1, -1}) {
    auto centroid = seed_lab.centroids[seed_id - 1];
    for (int k = seed.k + dir; k >= 0 && k < d.nz; k += dir) {
      const auto lab = label_components_2d(mask.slice(k), d.nx, d.ny);
      if (lab.count == 0) break;
      const int id = pick_component(lab, centroid);
      copy_component(lab, id, out, k);
      centroid = lab.centroids[id - 1];
    }
  }
  return out;
}

std::vector<PlanePoint> points_of(const BinaryMask& m, int k) {
  std::vector<PlanePoint> out;
  const auto s = m.slice(k);
  for (int j = 0; j < m.dims().ny; ++j)
    for (int i = 0; i < m.dims().nx; ++i)
      if (s[i + m.dims().nx * j]) out.push_back({double(i), double(j)});
  return out;
}

// Nearest point of `set` to p (first on ties), or -1 when `set` is empty.
std::pair<int, double> nearest(std::span<const PlanePoint> set, PlanePoint p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < set.size(); ++n) {
    const double d = squared(set[n][0] - p[0]) + squared(set[n][1] - p[1]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(n);
    }
  }
  return {best, std::sqrt(best_d)};
}

}  // namespace

BinaryMask reduce_components(const BinaryMask& mask, VoxelIndex seed) {
  return reduce_impl(mask, seed, true);
}

std::vector<double> spurious_tolerances(std::span<const PlanePoint> current,
                                        std::span<const PlanePoint> previous) {
  std::vector<double> tol;
  tol.reserve(current.size());
  for (const auto& p : current) {
    const double d = previous.empty() ? 0.0 : nearest(previous, p).second;
    tol.push_back(d + kSpuriousTolerance);
  }
  return tol;
}

std::vector<std::uint8_t> within_tolerance(std::span<const PlanePoint> candidates,
                                           std::span<const PlanePoint> previous,
                                           std::span<const double> previous_tol) {
  if (previous.size() != previous_tol.size()) {
    throw Error("within_tolerance: one tolerance per previous point required");
  }
  std::vector<std::uint8_t> keep(candidates.size(), 0);
  if (previous.empty()) return keep;
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    const auto [i_min, dist] = nearest(previous, candidates[n]);
    keep[n] = dist <= previous_tol[static_cast<std::size_t>(i_min)];
  }
  return keep;
}

BinaryMask clean_spurious(const BinaryMask& mask, int start_slice,
                          ScanDirection direction) {
  const Dims d = mask.dims();
  if (start_slice < 0 || start_slice >= d.nz) {
    throw Error("clean_spurious: start slice out of range");
  }
  BinaryMask out = mask;
  const int step = static_cast<int>(direction);

  std::vector<PlanePoint> current = points_of(mask, start_slice);
  if (current.empty()) throw Error("clean_spurious: start slice is empty");
  const int before = start_slice - step;
  const std::vector<PlanePoint> predecessor =
      before >= 0 && before < d.nz ? points_of(mask, before) : current;
  std::vector<double> tol = spurious_tolerances(current, predecessor);

  for (int k = start_slice + step; k >= 0 && k < d.nz; k += step) {
    const std::vector<PlanePoint> previous = std::move(current);
    const std::vector<double> previous_tol = std::move(tol);
    if (previous.empty()) break;

    const auto slice = out.slice(k);
    const auto prev_slice = out.slice(k - step);
    // P_diff: pixels absent at the same (i, j) in the cleaned previous slice.
    std::vector<PlanePoint> diff;
    std::vector<std::size_t> diff_index;
    for (const auto& p : points_of(out, k)) {
      const std::size_t n = static_cast<std::size_t>(p[0]) +
                            static_cast<std::size_t>(d.nx) * static_cast<std::size_t>(p[1]);
      if (!prev_slice[n]) {
        diff.push_back(p);
        diff_index.push_back(n);
      }
    }
    const auto keep = within_tolerance(diff, previous, previous_tol);
    for (std::size_t q = 0; q < diff.size(); ++q) {
      if (!keep[q]) slice[diff_index[q]] = 0;
    }
    current = points_of(out, k);
    tol = spurious_tolerances(current, previous);
  }
  return out;
}

BinaryMask postprocess(const BinaryMask& mask, VoxelIndex seed, int start_slice,
                       ScanDirections directions) {
  const bool up = directions != ScanDirections::Down;
  const bool down = directions != ScanDirections::Up;
  BinaryMask current = mask;
  for (bool first = true;; first = false) {
    BinaryMask next = reduce_impl(current, seed, first);
    const BinaryMask up_pass =
        up ? clean_spurious(next, start_slice, ScanDirection::Up) : next;
    const BinaryMask down_pass =
        down ? clean_spurious(next, start_slice, ScanDirection::Down) : next;
    // Each scan only touches slices on its own side of start_slice.
    for (int k = 0; k < next.dims().nz; ++k) {
      if (k == start_slice) continue;
      const auto src = k > start_slice ? up_pass.slice(k) : down_pass.slice(k);
      std::copy(src.begin(), src.end(), next.slice(k).begin());
    }
    if (next == current) return next;
    current = std::move(next);
  }
}

}  // namespace lsseg
