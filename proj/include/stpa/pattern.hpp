#pragma once

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "stpa/geometry.hpp"

namespace stpa {

using cdouble = std::complex<double>;

struct UV {
  double u = 0.0;
  double v = 0.0;
};

/// (theta, phi) sweep mapped to direction cosines. theta in
/// [theta_min, theta_max] inclusive, phi in [phi_min, phi_max).
struct AngleGridSpec {
  double step_deg = 1.0;
  double theta_min_deg = 0.0;
  double theta_max_deg = 90.0;
  double phi_min_deg = -180.0;
  double phi_max_deg = 180.0;
};

/// Direction-cosine images of the angle grid with duplicates (e.g. every phi
/// at theta = 90 deg) removed. Order is deterministic.
std::vector<UV> angle_grid_uv(const AngleGridSpec& spec);

/// Sampled, peak-normalized power pattern. `evaluate` gives the same
/// normalized power at arbitrary (u, v), which lets metrics refine the main
/// beam off-grid.
struct PatternGrid {
  std::vector<UV> samples;
  std::vector<double> values;
  UV peak;  // steering point: (0, 0) for an EBP, (u_s, v_s) for a scan
  double zeta = 1.0;
  double frequency_ratio = 1.0;
  std::function<double(double, double)> evaluate;
};

struct PatternMetrics {
  double max_sll_db = 0.0;
  /// Radial distance at which the azimuth-averaged power first falls to one half.
  double half_power_radius = 0.0;
  /// Main-beam width in the pattern's own coordinates (2 x half_power_radius).
  double beamwidth_radius = 0.0;
  /// Main-lobe exclusion radius used for max_sll_db.
  double exclusion_radius = 0.0;
};

/// (1/N) sum_n w[tile(n)] exp(j 2 pi ratio (u x_n + v y_n)).
cdouble array_factor(const ArrayGeometry& geometry, std::span<const cdouble> tile_weights, double u,
                     double v, double freq_ratio = 1.0);

/// Expanded-beam field (1/N) sum_n exp(j 2 pi zeta ratio (u x_n + v y_n)).
cdouble expanded_field(const ArrayGeometry& geometry, double zeta, double ut, double vt,
                       double freq_ratio = 1.0);

/// Per-tile conventional beamforming phases exp(-j k (u_s x_t + v_s y_t))
/// evaluated at the tile phase centers.
std::vector<cdouble> tile_steering_weights(const ArrayGeometry& geometry, double us, double vs,
                                           double freq_ratio = 1.0);

/// |F(u, v; u_s, v_s)|^2 with one phase shifter per tile, normalized to the
/// value at the steering point.
PatternGrid scanned_pattern(const ArrayGeometry& geometry, UV scan, const AngleGridSpec& grid,
                            double freq_ratio = 1.0);

/// F_zeta sampled on the angle grid image.
PatternGrid expanded_beam_pattern(const ArrayGeometry& geometry, double zeta,
                                  const AngleGridSpec& grid, double freq_ratio = 1.0);

/// EBP power at each sample, summed per sample in element order so results do
/// not depend on the thread split.
std::vector<double> expanded_beam_values(const ArrayGeometry& geometry, double zeta,
                                         std::span<const UV> samples, double freq_ratio = 1.0);

/// Main-beam radii from the azimuth-averaged radial profile around the peak.
struct MainBeam {
  double half_power_radius = 0.0;
  double first_null_radius = 0.0;  // 0 when no null is found before max_radius
};
MainBeam measure_main_beam(const std::function<double(double, double)>& power, UV peak,
                           double max_radius = 1.0);

/// exclusion <= 0 selects the first radial null (fallback 2 x beamwidth).
PatternMetrics extract_metrics(const PatternGrid& pattern, double exclusion = 0.0);

double power_db(double linear);

/// (ratio, max SLL dB) of the EBP at each frequency ratio.
std::vector<std::pair<double, double>> frequency_sweep_sll(const ArrayGeometry& geometry, double zeta,
                                                           std::span<const double> ratios,
                                                           const AngleGridSpec& grid = {});

/// Worker threads used by grid evaluations (0 = hardware concurrency).
void set_thread_count(int threads);
int thread_count();

}  // namespace stpa
