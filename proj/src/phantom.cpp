#include "lsseg/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

namespace lsseg {

using json = nlohmann::json;

namespace {

bool in_disk(const Tube& t, int k, double x, double y) {
  const double dx = x - t.cx[k], dy = y - t.cy[k];
  return dx * dx + dy * dy <= t.radius[k] * t.radius[k];
}

void check_tube(const Tube& t, int nz, const char* side) {
  const auto n = static_cast<std::size_t>(nz);
  if (t.cx.size() != n || t.cy.size() != n || t.radius.size() != n) {
    throw Error(std::string("phantom: ") + side +
                " tube needs one center and radius per slice");
  }
  for (double r : t.radius) {
    if (r < 2.0) throw Error(std::string("phantom: ") + side + " tube radius < 2");
  }
}

}  // namespace

void PhantomSpec::validate() const {
  if (dims.nx < 3 || dims.ny < 3 || dims.nz < 3) {
    throw Error("phantom: dims must be >= 3 per axis");
  }
  check_tube(left, dims.nz, "left");
  check_tube(right, dims.nz, "right");
  for (int k = 0; k < dims.nz; ++k) {
    const double d = std::hypot(left.cx[k] - right.cx[k], left.cy[k] - right.cy[k]);
    if (d <= left.radius[k] + right.radius[k]) {
      throw Error("phantom: tubes overlap at slice " + std::to_string(k));
    }
  }
  if (hu_muscle < 5.0 || hu_muscle > 120.0) {
    throw Error("phantom: muscle HU must lie in the [5, 120] tissue interval");
  }
  if (noise_std < 0.0) throw Error("phantom: noise_std must be >= 0");
  for (const auto& o : organs) {
    if (o.k_begin < 0 || o.k_end >= dims.nz || o.k_begin > o.k_end) {
      throw Error("phantom: organ slice range out of bounds");
    }
  }
}

Phantom generate_phantom(const PhantomSpec& spec) {
  spec.validate();
  Phantom ph{ScalarVolume(spec.dims, spec.spacing),
             BinaryMask(spec.dims, spec.spacing),
             BinaryMask(spec.dims, spec.spacing)};
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  for (int k = 0; k < spec.dims.nz; ++k) {
    for (int j = 0; j < spec.dims.ny; ++j) {
      for (int i = 0; i < spec.dims.nx; ++i) {
        const double x = i, y = j;
        double hu = spec.hu_air;
        if (spec.body.contains(x, y)) hu = spec.hu_fat;
        if (spec.spine.contains(x, y)) hu = spec.hu_bone;
        for (const auto& o : spec.organs) {
          if (k >= o.k_begin && k <= o.k_end && o.shape.contains(x, y)) {
            hu = spec.hu_muscle;
          }
        }
        if (in_disk(spec.left, k, x, y)) {
          hu = spec.hu_muscle;
          ph.truth_left(i, j, k) = 1;
        } else if (in_disk(spec.right, k, x, y)) {
          hu = spec.hu_muscle;
          ph.truth_right(i, j, k) = 1;
        }
        // One draw per voxel keeps the noise field independent of geometry.
        ph.hu(i, j, k) = hu + spec.noise_std * noise(rng);
      }
    }
  }
  return ph;
}

VoxelIndex tube_center(const Tube& t, int k) {
  return {static_cast<int>(std::lround(t.cx[k])),
          static_cast<int>(std::lround(t.cy[k])), k};
}

namespace {

PhantomSpec base_spec(std::string name, int nz) {
  PhantomSpec s;
  s.name = std::move(name);
  s.dims = {80, 64, nz};
  s.body = {39.5, 31.5, 37.0, 29.0};
  s.spine = {39.5, 38.0, 7.0, 6.0};
  return s;
}

Tube straight(double cx, double cy, double r, int nz) {
  return {std::vector<double>(nz, cx), std::vector<double>(nz, cy),
          std::vector<double>(nz, r)};
}

}  // namespace

std::vector<PhantomSpec> default_suite() {
  std::vector<PhantomSpec> suite;

  {
    auto s = base_spec("easy", 33);
    s.left = straight(19.0, 30.0, 12.0, 33);
    s.right = straight(60.0, 30.0, 12.0, 33);
    s.seed = 11;
    suite.push_back(std::move(s));
  }
  {
    // Tubes bow outward along z and taper toward the caudal end.
    const int nz = 41;
    auto s = base_spec("medium", nz);
    s.left = s.right = Tube{};
    for (int k = 0; k < nz; ++k) {
      const double t = static_cast<double>(k) / (nz - 1);
      const double bow = 4.0 * std::sin(std::numbers::pi * t);
      const double r = 12.0 - 3.0 * t;
      s.left.cx.push_back(20.0 - bow);
      s.left.cy.push_back(29.0 + 2.0 * t);
      s.left.radius.push_back(r);
      s.right.cx.push_back(59.0 + bow);
      s.right.cy.push_back(29.0 + 2.0 * t);
      s.right.radius.push_back(r);
    }
    s.seed = 12;
    suite.push_back(std::move(s));
  }
  {
    // A smaller muscle-HU organ presses against the left tube over a few
    // slices and stands apart from it elsewhere.
    const int nz = 35;
    auto s = base_spec("hard", nz);
    s.left = straight(19.0, 30.0, 12.0, nz);
    s.right = straight(60.0, 30.0, 12.0, nz);
    s.organs.push_back({{19.0, 48.0, 6.0, 6.0}, 20, 26});
    s.organs.push_back({{19.0, 52.0, 6.0, 5.0}, 27, 31});
    s.seed = 13;
    suite.push_back(std::move(s));
  }
  return suite;
}

PhantomSpec suite_spec(const std::string& name) {
  for (auto& s : default_suite()) {
    if (s.name == name) return s;
  }
  throw Error("unknown phantom suite entry '" + name + "'");
}

namespace {

json ellipse_json(const Ellipse& e) { return {e.cx, e.cy, e.rx, e.ry}; }

Ellipse ellipse_from(const json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw Error("phantom spec: ellipse must be [cx, cy, rx, ry]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
          j[3].get<double>()};
}

json tube_json(const Tube& t) {
  return {{"cx", t.cx}, {"cy", t.cy}, {"radius", t.radius}};
}

Tube tube_from(const json& j) {
  return {j.at("cx").get<std::vector<double>>(),
          j.at("cy").get<std::vector<double>>(),
          j.at("radius").get<std::vector<double>>()};
}

}  // namespace

std::string to_json(const PhantomSpec& s) {
  json j;
  j["name"] = s.name;
  j["dims"] = {s.dims.nx, s.dims.ny, s.dims.nz};
  j["spacing"] = {s.spacing.x, s.spacing.y, s.spacing.z};
  j["body"] = ellipse_json(s.body);
  j["spine"] = ellipse_json(s.spine);
  j["left"] = tube_json(s.left);
  j["right"] = tube_json(s.right);
  j["organs"] = json::array();
  for (const auto& o : s.organs) {
    j["organs"].push_back(
        {{"ellipse", ellipse_json(o.shape)}, {"slices", {o.k_begin, o.k_end}}});
  }
  j["hu"] = {{"muscle", s.hu_muscle},
             {"fat", s.hu_fat},
             {"bone", s.hu_bone},
             {"air", s.hu_air}};
  j["noise_std"] = s.noise_std;
  j["seed"] = s.seed;
  return j.dump(2);
}

PhantomSpec phantom_spec_from_json(const std::string& text) {
  PhantomSpec s;
  try {
    const json j = json::parse(text);
    s.name = j.value("name", s.name);
    const auto& d = j.at("dims");
    s.dims = {d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()};
    if (j.contains("spacing")) {
      const auto& sp = j["spacing"];
      s.spacing = {sp.at(0).get<double>(), sp.at(1).get<double>(),
                   sp.at(2).get<double>()};
    }
    s.body = ellipse_from(j.at("body"));
    s.spine = ellipse_from(j.at("spine"));
    s.left = tube_from(j.at("left"));
    s.right = tube_from(j.at("right"));
    for (const auto& o : j.value("organs", json::array())) {
      const auto& sl = o.at("slices");
      s.organs.push_back({ellipse_from(o.at("ellipse")), sl.at(0).get<int>(),
                          sl.at(1).get<int>()});
    }
    if (j.contains("hu")) {
      const auto& hu = j["hu"];
      s.hu_muscle = hu.value("muscle", s.hu_muscle);
      s.hu_fat = hu.value("fat", s.hu_fat);
      s.hu_bone = hu.value("bone", s.hu_bone);
      s.hu_air = hu.value("air", s.hu_air);
    }
    s.noise_std = j.value("noise_std", s.noise_std);
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw Error(std::string("phantom spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace lsseg
