#pragma once

#include <string>

namespace lsseg {

/// Front-evolution model.
///  Classical: v_t + g|Dv| = 0
///  Geodesic1: v_t + mu g|Dv| - eta Dg.Dv = 0
///  Geodesic2: Geodesic1 plus the curvature term -eps g|Dv| div(Dv/|Dv|)
enum class Model { Classical, Geodesic1, Geodesic2 };

/// CLI names: "classical", "gmfd1", "gmfd2".
std::string to_string(Model m);
Model parse_model(const std::string& s);

inline bool is_geodesic(Model m) { return m != Model::Classical; }

}  // namespace lsseg
