#include "stpa/thinning.hpp"

#include <cmath>
#include <limits>

namespace stpa {

void ThinningParams::validate() const {
  if (!(r_c > 0.0)) throw GeometryError("capture radius r_c must be positive");
  if (!(s > 0.0)) throw GeometryError("sunflower pitch s must be positive");
}

std::vector<Point2> thinning_centers(const ElementGrid& grid, const ThinningParams& params) {
  params.validate();
  const Point2 origin = grid.centroid();
  const double half_w = 0.5 * (grid.nx - 1) * grid.spacing;
  const double half_h = 0.5 * (grid.ny - 1) * grid.spacing;
  const double circumscribed = std::hypot(half_w, half_h);

  auto lattice = sunflower_centers(sunflower_count_for_radius(circumscribed + params.r_c, params.s),
                                   params.s, params.tau);
  std::vector<Point2> centers;
  for (const auto& c : lattice) {
    if (params.extent == LatticeExtent::kInsideAperture) {
      const double fx = half_w + 0.5 * grid.spacing;
      const double fy = half_h + 0.5 * grid.spacing;
      if (std::abs(c.x) + params.r_c > fx || std::abs(c.y) + params.r_c > fy) continue;
    }
    centers.push_back(c + origin);
  }
  return centers;
}

SubarrayLayout select_tiles_by_sunflower(const DominoTiling& tiling, const ThinningParams& params) {
  params.validate();
  validate_tiling(tiling);
  const auto& grid = tiling.grid;
  const auto centers = thinning_centers(grid, params);

  // Distance that decides capture and assignment for one tile/center pair.
  auto reach = [&](std::size_t tile, const Point2& c) {
    if (params.rule == CaptureRule::kPhaseCenter) return distance(tiling.phase_center(tile), c);
    const auto& [a, b] = tiling.tiles[tile];
    return std::max(distance(grid.position(a), c), distance(grid.position(b), c));
  };

  std::vector<std::vector<std::size_t>> members(centers.size());
  for (std::size_t t = 0; t < tiling.tiles.size(); ++t) {
    std::size_t best = centers.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < centers.size(); ++m) {
      const double d = reach(t, centers[m]);
      if (d <= params.r_c && d < best_d) {
        best_d = d;
        best = m;
      }
    }
    if (best < centers.size()) members[best].push_back(t);
  }

  SubarrayLayout layout;
  layout.design_wavelength = 1.0;
  for (std::size_t m = 0; m < centers.size(); ++m) {
    if (members[m].empty()) continue;
    Subarray sub;
    sub.center = centers[m];
    for (std::size_t t : members[m]) {
      const auto& [a, b] = tiling.tiles[t];
      sub.tiles.push_back({{grid.position(a) - sub.center, grid.position(b) - sub.center}});
    }
    layout.subarrays.push_back(std::move(sub));
  }
  if (layout.subarrays.empty()) throw GeometryError("no tile lies within r_c of a sunflower point");
  return layout;
}

}  // namespace stpa
