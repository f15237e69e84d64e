#include "lsseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace lsseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counts {
  std::size_t a = 0, b = 0, both = 0;
};

Counts overlap(const BinaryMask& a, const BinaryMask& b, const char* what) {
  require_same_dims(a, b, what);
  Counts c;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const bool x = a[n] != 0, y = b[n] != 0;
    c.a += x;
    c.b += y;
    c.both += x && y;
  }
  return c;
}

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line
// with sample positions q*step.
void edt_line(const double* f, double* out, std::size_t n, double step,
              std::vector<int>& v, std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  int k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    const double xq = static_cast<double>(q) * step;
    if (k < 0) {
      k = 0;
      v[0] = static_cast<int>(q);
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    const auto meet = [&](int r) {
      const double xr = r * step;
      return ((f[q] + xq * xq) - (f[r] + xr * xr)) / (2.0 * (xq - xr));
    };
    double s = meet(v[k]);
    while (s <= z[k]) {  // z[0] is -inf, so k never drops below 0
      --k;
      s = meet(v[k]);
    }
    ++k;
    v[k] = static_cast<int>(q);
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out, out + n, kInf);
    return;
  }
  int j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double xq = static_cast<double>(q) * step;
    while (z[j + 1] < xq) ++j;
    const double d = xq - v[j] * step;
    out[q] = d * d + f[v[j]];
  }
}

std::vector<VoxelIndex> points_of(const BinaryMask& m, HausdorffMode mode) {
  if (mode == HausdorffMode::Surface) return surface_voxels(m);
  std::vector<VoxelIndex> pts;
  const Dims d = m.dims();
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i)
        if (m(i, j, k)) pts.push_back({i, j, k});
  return pts;
}

BinaryMask as_mask(const BinaryMask& like, const std::vector<VoxelIndex>& pts) {
  BinaryMask m(like.dims(), like.spacing());
  for (const auto& p : pts) m.at(p) = 1;
  return m;
}

// Distances from each point of `from` to the nearest point of `to`.
std::vector<double> directed(const std::vector<VoxelIndex>& from,
                             const BinaryMask& to_sites, Spacing spacing) {
  const auto sq = squared_distance_transform(to_sites, spacing);
  std::vector<double> out;
  out.reserve(from.size());
  for (const auto& p : from) out.push_back(std::sqrt(sq[to_sites.index(p)]));
  return out;
}

void require_nonempty(const BinaryMask& a, const BinaryMask& b, const char* what) {
  if (count(a) == 0 || count(b) == 0) {
    throw Error(std::string(what) + ": distance undefined for an empty mask");
  }
}

}  // namespace

std::string to_json(const MetricsReport& r) {
  nlohmann::json j;
  j["dice"] = r.dice;
  j["jaccard"] = r.jaccard;
  j["hausdorff"] = r.hausdorff;
  j["assd"] = r.assd;
  return j.dump();
}

double jaccard(const BinaryMask& a, const BinaryMask& b) {
  const Counts c = overlap(a, b, "jaccard");
  const std::size_t uni = c.a + c.b - c.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(c.both) / static_cast<double>(uni);
}

double dice(const BinaryMask& a, const BinaryMask& b) {
  const double j = jaccard(a, b);
  return 2.0 * j / (1.0 + j);
}

std::vector<VoxelIndex> surface_voxels(const BinaryMask& m) {
  std::vector<VoxelIndex> out;
  const Dims d = m.dims();
  const auto bg = [&](int i, int j, int k) {
    return !m.contains(i, j, k) || !m(i, j, k);
  };
  for (int k = 0; k < d.nz; ++k) {
    for (int j = 0; j < d.ny; ++j) {
      for (int i = 0; i < d.nx; ++i) {
        if (!m(i, j, k)) continue;
        if (bg(i - 1, j, k) || bg(i + 1, j, k) || bg(i, j - 1, k) ||
            bg(i, j + 1, k) || bg(i, j, k - 1) || bg(i, j, k + 1)) {
          out.push_back({i, j, k});
        }
      }
    }
  }
  return out;
}

std::vector<double> squared_distance_transform(const BinaryMask& sites,
                                               Spacing spacing) {
  const Dims d = sites.dims();
  std::vector<double> f(sites.size());
  for (std::size_t n = 0; n < f.size(); ++n) f[n] = sites[n] ? 0.0 : kInf;

  std::vector<int> v;
  std::vector<double> z;
  const std::size_t longest = static_cast<std::size_t>(std::max({d.nx, d.ny, d.nz}));
  std::vector<double> line(longest), result(longest);

  const auto pass = [&](std::size_t n, std::size_t stride, double step,
                        auto&& origins) {
    for (std::size_t o : origins) {
      for (std::size_t q = 0; q < n; ++q) line[q] = f[o + q * stride];
      edt_line(line.data(), result.data(), n, step, v, z);
      for (std::size_t q = 0; q < n; ++q) f[o + q * stride] = result[q];
    }
  };

  std::vector<std::size_t> origins;
  // x lines
  for (int k = 0; k < d.nz; ++k)
    for (int j = 0; j < d.ny; ++j) origins.push_back(sites.index(0, j, k));
  pass(static_cast<std::size_t>(d.nx), 1, spacing.x, origins);
  origins.clear();
  for (int k = 0; k < d.nz; ++k)
    for (int i = 0; i < d.nx; ++i) origins.push_back(sites.index(i, 0, k));
  pass(static_cast<std::size_t>(d.ny), static_cast<std::size_t>(d.nx), spacing.y,
       origins);
  origins.clear();
  for (int j = 0; j < d.ny; ++j)
    for (int i = 0; i < d.nx; ++i) origins.push_back(sites.index(i, j, 0));
  pass(static_cast<std::size_t>(d.nz), d.slice_size(), spacing.z, origins);
  return f;
}

double hausdorff(const BinaryMask& a, const BinaryMask& b, Spacing spacing,
                 HausdorffMode mode) {
  require_same_dims(a, b, "hausdorff");
  require_nonempty(a, b, "hausdorff");
  const auto pa = points_of(a, mode);
  const auto pb = points_of(b, mode);
  double h = 0.0;
  for (double x : directed(pa, as_mask(b, pb), spacing)) h = std::max(h, x);
  for (double x : directed(pb, as_mask(a, pa), spacing)) h = std::max(h, x);
  return h;
}

double assd(const BinaryMask& a, const BinaryMask& b, Spacing spacing) {
  require_same_dims(a, b, "assd");
  require_nonempty(a, b, "assd");
  const auto sa = surface_voxels(a);
  const auto sb = surface_voxels(b);
  double sum = 0.0;
  for (double x : directed(sa, as_mask(b, sb), spacing)) sum += x;
  for (double x : directed(sb, as_mask(a, sa), spacing)) sum += x;
  return sum / static_cast<double>(sa.size() + sb.size());
}

MetricsReport compare(const BinaryMask& a, const BinaryMask& b, Spacing spacing) {
  return {dice(a, b), jaccard(a, b), hausdorff(a, b, spacing), assd(a, b, spacing)};
}

}  // namespace lsseg
