#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace stpa {

/// Speed of light used throughout the link and sensing models [m/s].
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Raised when a geometric object violates its construction contract.
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Planar position in wavelengths at the design frequency.
struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

double distance(Point2 a, Point2 b);

/// Rectangular lattice of nx columns by ny rows. Element (i, j) has linear
/// index j * nx + i and sits at (i * spacing, j * spacing).
struct ElementGrid {
  int nx = 0;
  int ny = 0;
  double spacing = 0.5;

  ElementGrid() = default;
  ElementGrid(int nx, int ny, double spacing = 0.5);

  int size() const { return nx * ny; }
  int index(int i, int j) const { return j * nx + i; }
  int column(int idx) const { return idx % nx; }
  int row(int idx) const { return idx / nx; }
  Point2 position(int idx) const;
  Point2 centroid() const;
};

using TilePair = std::array<int, 2>;

/// Perfect cover of an ElementGrid by 1x2 dominoes.
struct DominoTiling {
  ElementGrid grid;
  std::vector<TilePair> tiles;

  /// Mean of the two element positions.
  Point2 phase_center(std::size_t tile) const;
  std::vector<Point2> phase_centers() const;
};

/// True when every element appears in exactly one tile and each tile joins
/// horizontally or vertically adjacent elements.
bool is_perfect_cover(const DominoTiling& tiling);

/// Throws GeometryError if the tiling is not a perfect domino cover.
void validate_tiling(const DominoTiling& tiling);

/// One tile of a subarray, stored as element offsets from the subarray center.
struct SubarrayTile {
  std::vector<Point2> element_offsets;

  Point2 phase_center_offset() const;
};

struct Subarray {
  Point2 center;
  std::vector<SubarrayTile> tiles;
};

/// Tiles grouped into rigid subarrays. Moving a subarray moves only `center`.
struct SubarrayLayout {
  std::vector<Subarray> subarrays;
  double design_wavelength = 1.0;

  std::size_t tile_count() const;
  std::size_t element_count() const;
};

/// Flattened aperture consumed by pattern, channel and sensing code.
///
/// `tiles` always partitions `elements`; an untiled aperture carries one
/// singleton tile per element so that per-tile weights are uniform across
/// every code path. `subarray_of_tile` is empty when no grouping exists.
struct ArrayGeometry {
  std::vector<Point2> elements;
  std::vector<std::vector<int>> tiles;
  std::vector<int> tile_of_element;
  std::vector<int> subarray_of_tile;
  double design_frequency_hz = 28e9;

  std::size_t element_count() const { return elements.size(); }
  std::size_t tile_count() const { return tiles.size(); }
  /// True when at least one tile groups more than one element.
  bool is_tiled() const;
  Point2 phase_center(std::size_t tile) const;
  std::vector<Point2> phase_centers() const;
  Point2 centroid() const;
  /// Copy translated so that the element centroid is at the origin.
  ArrayGeometry centered() const;
  double design_wavelength_m() const { return kSpeedOfLight / design_frequency_hz; }
};

/// Builds an ArrayGeometry from element positions and tile membership and
/// checks that the tiles partition the elements.
ArrayGeometry make_geometry(std::vector<Point2> elements, std::vector<std::vector<int>> tiles,
                            std::vector<int> subarray_of_tile = {},
                            double design_frequency_hz = 28e9);

/// Untiled rectangular aperture (e.g. the CUPA baselines).
ArrayGeometry make_uniform_grid(int nx, int ny, double spacing = 0.5);

ArrayGeometry geometry_from_tiling(const DominoTiling& tiling, double design_frequency_hz = 28e9);
ArrayGeometry geometry_from_layout(const SubarrayLayout& layout, double design_frequency_hz = 28e9);

/// Sunflower (Fermat spiral) points m = 1..m_count at polar
/// rho_m = s * sqrt(m / pi), psi_m = 2 pi m tau, around the origin.
std::vector<Point2> sunflower_centers(int m_count, double s, double tau);

/// Number of sunflower points needed before rho_m exceeds `radius`.
int sunflower_count_for_radius(double radius, double s);

/// Smallest phase-center distance between tiles of different subarrays.
double min_inter_subarray_tile_distance(const SubarrayLayout& layout);

/// Strict-inequality beam overlap test in (u, v) space.
bool beams_overlap(double uc, double vc, double us, double vs, double rb);

/// Direction cosines u = cos(theta) cos(phi), v = cos(theta) sin(phi);
/// theta is elevation from the array plane, phi azimuth from the x axis.
struct DirectionCosines {
  double u;
  double v;
};
DirectionCosines direction_cosines(double theta_deg, double phi_deg);

double deg2rad(double deg);
double rad2deg(double rad);

}  // namespace stpa
