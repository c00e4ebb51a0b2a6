#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include <json.hpp>

#include "stpa/geometry.hpp"

namespace stpa {

/// {elements: [[x, y]...], tiles: [[i, j]...], subarrays: [[tile...]...],
/// design_frequency_hz}. Untiled apertures write an empty tile list and
/// ungrouped ones an empty subarray list. `grid` is recorded when given so
/// that a tiling can be recovered later.
nlohmann::json geometry_to_json(const ArrayGeometry& geometry,
                                const std::optional<ElementGrid>& grid = std::nullopt);
ArrayGeometry geometry_from_json(const nlohmann::json& doc);

/// Element grid stored with the geometry, if any.
std::optional<ElementGrid> grid_from_json(const nlohmann::json& doc);

/// Recovers the domino tiling of a geometry whose elements are the grid
/// points in index order and whose tiles are all pairs.
DominoTiling tiling_from_geometry(const ArrayGeometry& geometry, const ElementGrid& grid);

/// Rebuilds rigid subarrays, each centered on the mean of its tile phase centers.
SubarrayLayout layout_from_geometry(const ArrayGeometry& geometry);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// A geometry JSON file, or a built-in uniform aperture written "cupa:NXxNY".
ArrayGeometry load_geometry(std::string_view source);

}  // namespace stpa
