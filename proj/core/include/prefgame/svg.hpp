#pragma once

#include <string>
#include <vector>

#include "prefgame/policy.hpp"

namespace prefgame {

struct PlotSeries {
  std::string label;
  std::vector<Policy> points;  // 3-response policies only
};

// Barycentric plot of policy trajectories over the 2-simplex: the triangle
// with response 0 at the bottom-left vertex, response 1 at the top and
// response 2 at the bottom-right; one polyline per series, a dot at each
// series' first point and a star at the equilibrium. Returns a complete SVG
// document. Throws StructuralError for dimensions other than 3.
std::string render_simplex_svg(const std::vector<PlotSeries>& series,
                               const Policy& nash);

}  // namespace prefgame
