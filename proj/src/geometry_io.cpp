#include "stpa/geometry_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace stpa {

using nlohmann::json;

json geometry_to_json(const ArrayGeometry& geometry, const std::optional<ElementGrid>& grid) {
  json doc;
  json elements = json::array();
  for (const auto& p : geometry.elements) elements.push_back({p.x, p.y});
  doc["elements"] = std::move(elements);
  json tiles = json::array();
  if (geometry.is_tiled())
    for (const auto& t : geometry.tiles) tiles.push_back(t);
  doc["tiles"] = std::move(tiles);
  json subarrays = json::array();
  if (!geometry.subarray_of_tile.empty()) {
    int count = 0;
    for (int s : geometry.subarray_of_tile) count = std::max(count, s + 1);
    std::vector<std::vector<int>> groups(count);
    for (std::size_t t = 0; t < geometry.subarray_of_tile.size(); ++t)
      groups[geometry.subarray_of_tile[t]].push_back(static_cast<int>(t));
    for (auto& g : groups) subarrays.push_back(std::move(g));
  }
  doc["subarrays"] = std::move(subarrays);
  doc["design_frequency_hz"] = geometry.design_frequency_hz;
  if (grid) doc["grid"] = {{"nx", grid->nx}, {"ny", grid->ny}, {"spacing", grid->spacing}};
  return doc;
}

ArrayGeometry geometry_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("elements"))
    throw GeometryError("geometry document needs an 'elements' array");
  std::vector<Point2> elements;
  for (const auto& e : doc.at("elements")) {
    if (!e.is_array() || e.size() != 2) throw GeometryError("each element must be [x, y]");
    elements.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  std::vector<std::vector<int>> tiles;
  if (doc.contains("tiles"))
    for (const auto& t : doc.at("tiles")) tiles.push_back(t.get<std::vector<int>>());

  std::vector<int> subarray_of_tile;
  if (doc.contains("subarrays") && !doc.at("subarrays").empty()) {
    const std::size_t tile_count = tiles.empty() ? elements.size() : tiles.size();
    subarray_of_tile.assign(tile_count, -1);
    int s = 0;
    for (const auto& group : doc.at("subarrays")) {
      for (int t : group.get<std::vector<int>>()) {
        if (t < 0 || static_cast<std::size_t>(t) >= tile_count)
          throw GeometryError("subarray references unknown tile " + std::to_string(t));
        if (subarray_of_tile[t] != -1) throw GeometryError("tile " + std::to_string(t) + " is in two subarrays");
        subarray_of_tile[t] = s;
      }
      ++s;
    }
    for (int v : subarray_of_tile)
      if (v == -1) throw GeometryError("every tile must belong to a subarray");
  }
  const double f = doc.value("design_frequency_hz", 28e9);
  return make_geometry(std::move(elements), std::move(tiles), std::move(subarray_of_tile), f);
}

std::optional<ElementGrid> grid_from_json(const json& doc) {
  if (!doc.contains("grid")) return std::nullopt;
  const auto& g = doc.at("grid");
  return ElementGrid(g.at("nx").get<int>(), g.at("ny").get<int>(), g.at("spacing").get<double>());
}

DominoTiling tiling_from_geometry(const ArrayGeometry& geometry, const ElementGrid& grid) {
  if (geometry.element_count() != static_cast<std::size_t>(grid.size()))
    throw GeometryError("geometry does not match the element grid");
  for (int i = 0; i < grid.size(); ++i)
    if (distance(geometry.elements[i], grid.position(i)) > 1e-9)
      throw GeometryError("element " + std::to_string(i) + " is off the grid");
  DominoTiling tiling{grid, {}};
  for (const auto& t : geometry.tiles) {
    if (t.size() != 2) throw GeometryError("tiling needs two-element tiles");
    tiling.tiles.push_back({t[0], t[1]});
  }
  validate_tiling(tiling);
  return tiling;
}

SubarrayLayout layout_from_geometry(const ArrayGeometry& geometry) {
  if (geometry.subarray_of_tile.empty()) throw GeometryError("geometry has no subarrays");
  int count = 0;
  for (int s : geometry.subarray_of_tile) count = std::max(count, s + 1);
  SubarrayLayout layout;
  layout.design_wavelength = 1.0;
  layout.subarrays.resize(count);
  std::vector<int> tiles_in(count, 0);
  for (std::size_t t = 0; t < geometry.tile_count(); ++t) {
    const int s = geometry.subarray_of_tile[t];
    layout.subarrays[s].center = layout.subarrays[s].center + geometry.phase_center(t);
    ++tiles_in[s];
  }
  for (int s = 0; s < count; ++s) {
    if (tiles_in[s] == 0) throw GeometryError("empty subarray " + std::to_string(s));
    layout.subarrays[s].center = (1.0 / tiles_in[s]) * layout.subarrays[s].center;
  }
  for (std::size_t t = 0; t < geometry.tile_count(); ++t) {
    auto& sub = layout.subarrays[geometry.subarray_of_tile[t]];
    SubarrayTile tile;
    for (int e : geometry.tiles[t]) tile.element_offsets.push_back(geometry.elements[e] - sub.center);
    sub.tiles.push_back(std::move(tile));
  }
  return layout;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

ArrayGeometry load_geometry(std::string_view source) {
  constexpr std::string_view prefix = "cupa:";
  if (source.starts_with(prefix)) {
    const auto spec = source.substr(prefix.size());
    const auto x = spec.find('x');
    int nx = 0, ny = 0;
    if (x == std::string_view::npos ||
        std::from_chars(spec.data(), spec.data() + x, nx).ec != std::errc{} ||
        std::from_chars(spec.data() + x + 1, spec.data() + spec.size(), ny).ec != std::errc{} || nx < 1 ||
        ny < 1)
      throw GeometryError("expected cupa:NXxNY, got " + std::string(source));
    return make_uniform_grid(nx, ny);
  }
  return geometry_from_json(read_json_file(std::filesystem::path(source)));
}

}  // namespace stpa
