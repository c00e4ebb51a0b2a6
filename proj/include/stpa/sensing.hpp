#pragma once

#include <cstdint>
#include <vector>

#include "stpa/channel.hpp"

namespace stpa {

struct OfdmParams {
  double carrier_hz = 28e9;
  double bandwidth_hz = 40e6;
  int subcarriers = 2048;
  double symbol_time_s = 51.2e-6;

  /// Throws unless the numerology is consistent (T_s = N_sc / B).
  void validate() const;

  double subcarrier_spacing_hz() const { return 1.0 / symbol_time_s; }
  double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
  double range_resolution_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }
  double velocity_resolution_mps(int dwell_symbols) const;
  double max_range_m() const { return kSpeedOfLight * symbol_time_s / 2.0; }
  double max_velocity_mps() const { return kSpeedOfLight / (4.0 * carrier_hz * symbol_time_s); }
};

/// Derived resolutions next to the published reference numbers.
struct NumerologyCheck {
  double range_resolution_m = 0.0;
  double velocity_resolution_mps = 0.0;
  double max_range_m = 0.0;
  double max_velocity_mps = 0.0;
  double worst_relative_error = 0.0;
  bool ok = false;
};

/// Compares against 3.75 m, 3.07 m/s, 7680 m and 52.32 m/s within `tolerance`.
NumerologyCheck check_numerology(const OfdmParams& params, int dwell_symbols, double tolerance = 0.005);

/// Beam schedule: within one packet (one azimuth) every elevation is dwelt
/// on for `dwell_symbols` OFDM symbols; successive packets step the azimuth.
struct ScanSchedule {
  int dwell_symbols = 34;
  std::vector<double> elevations_deg;
  std::vector<double> azimuths_deg;

  /// 19 elevations 0..90 deg and 73 azimuths -180..180 deg, 5 deg apart.
  static ScanSchedule full();
  /// Same elevations, azimuths limited to [-half_width, half_width].
  static ScanSchedule azimuth_window(double half_width_deg, double step_deg = 5.0);

  int elevation_count() const { return static_cast<int>(elevations_deg.size()); }
  int azimuth_count() const { return static_cast<int>(azimuths_deg.size()); }
  int symbols_per_packet() const { return dwell_symbols * elevation_count(); }
  void validate() const;
};

struct SensingTarget {
  double range_m = 70.0;
  double velocity_mps = 20.0;
  double theta_deg = 70.0;
  double phi_deg = 0.0;
};

/// Two-way gain lambda^2 / ((4 pi)^{3/2} r^2) with unit RCS and element gains.
double monostatic_gain(double wavelength_m, double range_m);

struct SensingSetup {
  double rho = 0.5;
  double noise_offset_db = 10.0;  // noise this far below the strongest target echo
  bool add_noise = true;
  std::uint64_t seed = 1;
  /// Communication beam held during every packet; empty means no comm beam (rho ignored).
  CVector w_c;
};

/// Per-dwell synthesis of the symbol-normalized received subcarriers.
class EchoSynthesizer {
 public:
  EchoSynthesizer(const ArrayGeometry& geometry, std::vector<SensingTarget> targets,
                  const ScanSchedule& schedule, const OfdmParams& params, const SensingSetup& setup);

  /// N_sc x N_d block for packet `a` (azimuth index) and elevation index `e`.
  Eigen::MatrixXcd dwell(int a, int e) const;
  double noise_variance() const { return noise_variance_; }
  const ScanSchedule& schedule() const { return schedule_; }
  const OfdmParams& params() const { return params_; }

 private:
  CVector weights(int a, int e) const;

  const ArrayGeometry* geometry_;
  std::vector<SensingTarget> targets_;
  ScanSchedule schedule_;
  OfdmParams params_;
  SensingSetup setup_;
  std::vector<CVector> steering_;  // per target
  std::vector<double> gain_;       // per target
  double noise_variance_ = 0.0;
};

/// ytilde[n, a, k] for a whole schedule, stored dwell by dwell.
struct SensingCube {
  int subcarriers = 0;
  int azimuths = 0;
  int symbols = 0;  // N_e * N_d per packet
  int dwell_symbols = 0;
  std::vector<cdouble> values;  // index ((a * symbols) + k) * subcarriers + n

  cdouble at(int n, int a, int k) const {
    return values[(static_cast<std::size_t>(a) * symbols + k) * subcarriers + n];
  }
  Eigen::MatrixXcd dwell(int a, int e) const;
};

/// Full cube; refuses schedules larger than `max_entries` samples.
SensingCube synthesize_rx(const ArrayGeometry& geometry, const std::vector<SensingTarget>& targets,
                          const ScanSchedule& schedule, const OfdmParams& params,
                          const SensingSetup& setup, std::size_t max_entries = std::size_t{1} << 26);

/// |IDFT_n DFT_k|^2 with unitary scaling; bins stored range-major.
struct RangeDopplerMap {
  int range_bins = 0;
  int doppler_bins = 0;
  double range_resolution_m = 0.0;
  double velocity_resolution_mps = 0.0;
  std::vector<double> power;  // index range_bin * doppler_bins + doppler_bin

  double at(int r, int d) const { return power[static_cast<std::size_t>(r) * doppler_bins + d]; }
  double range_of(int r) const { return r * range_resolution_m; }
  /// Doppler bin folded to [-N_d/2, N_d/2) and scaled to m/s.
  double velocity_of(int d) const;
  std::pair<int, int> argmax() const;
  double total_power() const;
};

RangeDopplerMap range_doppler_map(const Eigen::MatrixXcd& dwell, const OfdmParams& params);
RangeDopplerMap range_doppler_map(const SensingCube& cube, int a, int e, const OfdmParams& params);

/// Normalized power of one range-Doppler cell over the scanned angles.
struct AngleImage {
  std::vector<double> theta_deg;
  std::vector<double> phi_deg;
  std::vector<double> power;  // index e * phi count + a, peak 1

  double at(int e, int a) const { return power[static_cast<std::size_t>(e) * phi_deg.size() + a]; }
  int nearest_elevation(double theta_deg) const;
};

AngleImage angle_image(const SensingCube& cube, const ScanSchedule& schedule, const OfdmParams& params,
                       int range_bin, int doppler_bin);

struct AzimuthPeaks {
  bool resolved = false;
  std::vector<double> peak_phi_deg;  // significant local maxima, strongest first
  std::vector<double> pair_phi_deg;  // the strongest resolving pair, empty when unresolved
  double cut_theta_deg = 0.0;
};

/// Resolution test on the azimuth cut nearest `theta_deg`: true when two
/// local maxima no more than `min_peak_db` below the cut maximum are
/// separated by a dip at least `dip_db` below the weaker of the two.
AzimuthPeaks resolve_two_targets(const AngleImage& image, double theta_deg, double dip_db = 3.0,
                                 double min_peak_db = -6.0);

struct Detection {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double theta_deg = 0.0;
  double phi_deg = 0.0;
};

struct SensingReport {
  double noise_variance = 0.0;
  int range_bin = 0;
  int doppler_bin = 0;
  RangeDopplerMap peak_map;  // dwell with the strongest detected cell
  double peak_theta_deg = 0.0;
  double peak_phi_deg = 0.0;
  AngleImage image;
  AzimuthPeaks peaks;
  std::vector<Detection> detections;
};

/// Streams the whole schedule without holding the cube: pass one integrates
/// range-Doppler power over all dwells to find the target cell, pass two
/// regenerates each dwell (noise is seeded per dwell) to read that cell.
/// Each peak of the resolving pair (or the single image peak when
/// unresolved) is then re-estimated from its own dwell.
SensingReport run_sensing(const ArrayGeometry& geometry, const std::vector<SensingTarget>& targets,
                          const ScanSchedule& schedule, const OfdmParams& params,
                          const SensingSetup& setup);

}  // namespace stpa
