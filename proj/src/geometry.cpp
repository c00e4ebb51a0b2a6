#include "stpa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stpa {

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double deg2rad(double deg) { return deg * kPi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / kPi; }

DirectionCosines direction_cosines(double theta_deg, double phi_deg) {
  const double th = deg2rad(theta_deg);
  const double ph = deg2rad(phi_deg);
  return {std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph)};
}

ElementGrid::ElementGrid(int nx_, int ny_, double spacing_) : nx(nx_), ny(ny_), spacing(spacing_) {
  if (nx < 1 || ny < 1) throw GeometryError("element grid needs nx, ny >= 1");
  if (!(spacing > 0.0)) throw GeometryError("element spacing must be positive");
}

Point2 ElementGrid::position(int idx) const {
  return {column(idx) * spacing, row(idx) * spacing};
}

Point2 ElementGrid::centroid() const {
  return {0.5 * (nx - 1) * spacing, 0.5 * (ny - 1) * spacing};
}

Point2 DominoTiling::phase_center(std::size_t tile) const {
  const auto& t = tiles.at(tile);
  return 0.5 * (grid.position(t[0]) + grid.position(t[1]));
}

std::vector<Point2> DominoTiling::phase_centers() const {
  std::vector<Point2> out;
  out.reserve(tiles.size());
  for (std::size_t t = 0; t < tiles.size(); ++t) out.push_back(phase_center(t));
  return out;
}

bool is_perfect_cover(const DominoTiling& tiling) {
  const auto& g = tiling.grid;
  if (g.size() % 2 != 0) return false;
  if (tiling.tiles.size() * 2 != static_cast<std::size_t>(g.size())) return false;
  std::vector<int> seen(g.size(), 0);
  for (const auto& [a, b] : tiling.tiles) {
    if (a < 0 || b < 0 || a >= g.size() || b >= g.size()) return false;
    const int di = std::abs(g.column(a) - g.column(b));
    const int dj = std::abs(g.row(a) - g.row(b));
    if (di + dj != 1) return false;
    if (++seen[a] > 1 || ++seen[b] > 1) return false;
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

void validate_tiling(const DominoTiling& tiling) {
  if (!is_perfect_cover(tiling)) throw GeometryError("tiling is not a perfect domino cover");
}

Point2 SubarrayTile::phase_center_offset() const {
  Point2 acc;
  for (const auto& p : element_offsets) acc = acc + p;
  return (1.0 / static_cast<double>(element_offsets.size())) * acc;
}

std::size_t SubarrayLayout::tile_count() const {
  std::size_t n = 0;
  for (const auto& s : subarrays) n += s.tiles.size();
  return n;
}

std::size_t SubarrayLayout::element_count() const {
  std::size_t n = 0;
  for (const auto& s : subarrays)
    for (const auto& t : s.tiles) n += t.element_offsets.size();
  return n;
}

bool ArrayGeometry::is_tiled() const {
  return std::any_of(tiles.begin(), tiles.end(), [](const auto& t) { return t.size() > 1; });
}

Point2 ArrayGeometry::phase_center(std::size_t tile) const {
  const auto& members = tiles.at(tile);
  Point2 acc;
  for (int e : members) acc = acc + elements[e];
  return (1.0 / static_cast<double>(members.size())) * acc;
}

std::vector<Point2> ArrayGeometry::phase_centers() const {
  std::vector<Point2> out;
  out.reserve(tiles.size());
  for (std::size_t t = 0; t < tiles.size(); ++t) out.push_back(phase_center(t));
  return out;
}

Point2 ArrayGeometry::centroid() const {
  Point2 acc;
  for (const auto& p : elements) acc = acc + p;
  return (1.0 / static_cast<double>(elements.size())) * acc;
}

ArrayGeometry ArrayGeometry::centered() const {
  ArrayGeometry out = *this;
  const Point2 c = centroid();
  for (auto& p : out.elements) p = p - c;
  return out;
}

ArrayGeometry make_geometry(std::vector<Point2> elements, std::vector<std::vector<int>> tiles,
                            std::vector<int> subarray_of_tile, double design_frequency_hz) {
  if (elements.empty()) throw GeometryError("geometry has no elements");
  for (const auto& p : elements)
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw GeometryError("element positions must be finite");
  if (!(design_frequency_hz > 0.0)) throw GeometryError("design frequency must be positive");

  ArrayGeometry g;
  g.elements = std::move(elements);
  g.design_frequency_hz = design_frequency_hz;
  if (tiles.empty()) {
    tiles.reserve(g.elements.size());
    for (std::size_t e = 0; e < g.elements.size(); ++e) tiles.push_back({static_cast<int>(e)});
  }
  g.tile_of_element.assign(g.elements.size(), -1);
  for (std::size_t t = 0; t < tiles.size(); ++t) {
    if (tiles[t].empty()) throw GeometryError("empty tile " + std::to_string(t));
    for (int e : tiles[t]) {
      if (e < 0 || static_cast<std::size_t>(e) >= g.elements.size())
        throw GeometryError("tile references unknown element " + std::to_string(e));
      if (g.tile_of_element[e] != -1)
        throw GeometryError("element " + std::to_string(e) + " belongs to two tiles");
      g.tile_of_element[e] = static_cast<int>(t);
    }
  }
  for (std::size_t e = 0; e < g.elements.size(); ++e)
    if (g.tile_of_element[e] == -1)
      throw GeometryError("element " + std::to_string(e) + " is not in any tile");
  if (!subarray_of_tile.empty() && subarray_of_tile.size() != tiles.size())
    throw GeometryError("subarray map length does not match tile count");
  g.tiles = std::move(tiles);
  g.subarray_of_tile = std::move(subarray_of_tile);
  return g;
}

ArrayGeometry make_uniform_grid(int nx, int ny, double spacing) {
  const ElementGrid grid(nx, ny, spacing);
  std::vector<Point2> elements;
  elements.reserve(grid.size());
  for (int idx = 0; idx < grid.size(); ++idx) elements.push_back(grid.position(idx));
  return make_geometry(std::move(elements), {});
}

ArrayGeometry geometry_from_tiling(const DominoTiling& tiling, double design_frequency_hz) {
  validate_tiling(tiling);
  std::vector<Point2> elements;
  elements.reserve(tiling.grid.size());
  for (int idx = 0; idx < tiling.grid.size(); ++idx) elements.push_back(tiling.grid.position(idx));
  std::vector<std::vector<int>> tiles;
  tiles.reserve(tiling.tiles.size());
  for (const auto& [a, b] : tiling.tiles) tiles.push_back({a, b});
  return make_geometry(std::move(elements), std::move(tiles), {}, design_frequency_hz);
}

ArrayGeometry geometry_from_layout(const SubarrayLayout& layout, double design_frequency_hz) {
  std::vector<Point2> elements;
  std::vector<std::vector<int>> tiles;
  std::vector<int> subarray_of_tile;
  for (std::size_t s = 0; s < layout.subarrays.size(); ++s) {
    const auto& sub = layout.subarrays[s];
    for (const auto& tile : sub.tiles) {
      std::vector<int> members;
      for (const auto& off : tile.element_offsets) {
        members.push_back(static_cast<int>(elements.size()));
        elements.push_back(sub.center + off);
      }
      tiles.push_back(std::move(members));
      subarray_of_tile.push_back(static_cast<int>(s));
    }
  }
  return make_geometry(std::move(elements), std::move(tiles), std::move(subarray_of_tile),
                       design_frequency_hz);
}

std::vector<Point2> sunflower_centers(int m_count, double s, double tau) {
  if (m_count < 1) throw GeometryError("sunflower needs at least one point");
  if (!(s > 0.0)) throw GeometryError("sunflower pitch must be positive");
  std::vector<Point2> out;
  out.reserve(m_count);
  for (int m = 1; m <= m_count; ++m) {
    const double rho = s * std::sqrt(m / kPi);
    const double psi = kTwoPi * m * tau;
    out.push_back({rho * std::cos(psi), rho * std::sin(psi)});
  }
  return out;
}

int sunflower_count_for_radius(double radius, double s) {
  // rho_m > radius  <=>  m > pi (radius / s)^2
  const double bound = kPi * (radius / s) * (radius / s);
  return std::max(1, static_cast<int>(std::floor(bound)) + 1);
}

double min_inter_subarray_tile_distance(const SubarrayLayout& layout) {
  if (layout.subarrays.size() < 2)
    throw GeometryError("inter-subarray distance needs at least two subarrays");
  std::vector<std::vector<Point2>> centers(layout.subarrays.size());
  for (std::size_t s = 0; s < layout.subarrays.size(); ++s)
    for (const auto& t : layout.subarrays[s].tiles)
      centers[s].push_back(layout.subarrays[s].center + t.phase_center_offset());

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < centers.size(); ++a)
    for (std::size_t b = a + 1; b < centers.size(); ++b)
      for (const auto& p : centers[a])
        for (const auto& q : centers[b]) best = std::min(best, distance(p, q));
  return best;
}

bool beams_overlap(double uc, double vc, double us, double vs, double rb) {
  if (!(rb > 0.0)) throw GeometryError("beam radius must be positive");
  const double du = uc - us;
  const double dv = vc - vs;
  return du * du + dv * dv < rb * rb;
}

}  // namespace stpa
