#pragma once

#include "stpa/geometry.hpp"

namespace stpa {

/// Which part of a tile must fall inside an r_c capture circle.
enum class CaptureRule { kPhaseCenter, kFootprint };

/// Which sunflower points take part in the selection.
///  - kInsideAperture: points whose whole r_c circle lies within the aperture
///    footprint (element span plus half a spacing on every side).
///  - kCoverCircumscribed: points m = 1.. until rho_m exceeds the circumscribed
///    radius of the grid plus r_c.
enum class LatticeExtent { kInsideAperture, kCoverCircumscribed };

struct ThinningParams {
  double r_c = 1.15;    // capture radius [wavelengths]
  double s = 3.5;       // sunflower pitch [wavelengths]
  double tau = 1.618;   // angular step ratio
  CaptureRule rule = CaptureRule::kPhaseCenter;
  LatticeExtent extent = LatticeExtent::kInsideAperture;

  void validate() const;
};

/// Sunflower points (already shifted to the grid centroid) selected by `extent`.
std::vector<Point2> thinning_centers(const ElementGrid& grid, const ThinningParams& params);

/// Groups tiles around sunflower points centered on the aperture centroid.
/// A tile is kept when it lies within r_c of some point and joins the nearest
/// such point (lower index on exact ties); empty subarrays are dropped.
/// Subarray centers are the sunflower points.
SubarrayLayout select_tiles_by_sunflower(const DominoTiling& tiling, const ThinningParams& params);

}  // namespace stpa
