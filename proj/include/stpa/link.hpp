#pragma once

#include <cstdint>
#include <vector>

#include "stpa/channel.hpp"

namespace stpa {

/// Best tile-constant beamformer for the vector channel y = h^T w: the
/// conjugate channel averaged over each tile, unit norm. `phase` rotates the
/// result globally (h^T w = ||.|| e^{j phase}).
CVector comm_weight(const ArrayGeometry& geometry, const CVector& h, double phase = 0.0);

/// Tile-constant principal right singular vector of y = H w for an
/// N_R x N channel matrix.
CVector comm_weight(const ArrayGeometry& geometry, const Eigen::MatrixXcd& H);

/// Conjugate steering computed at tile phase centers, unit norm.
CVector sensing_weight(const ArrayGeometry& geometry, double theta_deg, double phi_deg);

struct JcasWeights {
  CVector w_c;
  CVector w_s;
  double rho = 0.5;
  CVector w;
};

JcasWeights multibeam(const CVector& w_c, const CVector& w_s, double rho);

/// log2(1 + |h^T w|^2 / sigma2).
double spectral_efficiency(const CVector& h, const CVector& w, double sigma2);
/// log2 det(I + H w w^H H^H / sigma2) = log2(1 + ||H w||^2 / sigma2).
double spectral_efficiency(const Eigen::MatrixXcd& H, const CVector& w, double sigma2);

/// Downlink link-level setup shared by the SE experiments. SNR is the LOS
/// power per phase-shifter port over the noise variance, with the channel
/// scaled so that E||h_LOS + h_NLOS||^2 equals the port count.
struct LinkConfig {
  double r_ue = 50.0;
  double theta_ue_deg = 70.0;
  double phi_ue_deg = 50.0;
  double rho = 0.5;
  int realizations = 200;
  ClusterSpec clusters{};
  std::uint64_t seed = 1;

  void validate() const;
};

/// Noise variance giving `snr_db` on the normalized channel.
double noise_variance(const LinkConfig& config, double snr_db);

/// Normalized LOS + NLOS channel for realization `index`. The NLOS angles
/// and gains depend only on (seed, index), so different geometries see the
/// same propagation environment.
ChannelRealization ue_channel(const ArrayGeometry& geometry, const LinkConfig& config, int index);

struct SeStats {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Mean SE with the sensing beam parked at (theta_s, phi_s).
SeStats average_se(const ArrayGeometry& geometry, const LinkConfig& config, double snr_db,
                   double theta_s_deg, double phi_s_deg);

enum class ScanAxis { kAzimuth, kElevation };

struct SweepPoint {
  double angle_deg = 0.0;
  double se_mean = 0.0;
  double se_std = 0.0;
};

/// Sensing beam swept in azimuth at theta = theta_ue or in elevation at
/// phi = phi_ue; the comm beam stays on the UE.
std::vector<SweepPoint> scan_sweep_se(const ArrayGeometry& geometry, const LinkConfig& config,
                                      ScanAxis axis, std::span<const double> angles_deg, double snr_db);

/// Half-width of the contiguous run of angles around the UE where
/// |SE - baseline| / baseline exceeds `threshold`; 0 when the UE angle itself
/// does not exceed it.
double overlap_width_deg(std::span<const SweepPoint> sweep, double ue_angle_deg, double baseline,
                         double threshold = 0.05);

/// Largest |angle - ue_angle| over every exceedance, including sidelobes.
double outermost_deviation_deg(std::span<const SweepPoint> sweep, double ue_angle_deg, double baseline,
                               double threshold = 0.05);

struct BlockageTimeline {
  std::vector<double> theta_deg;
  std::vector<double> se_mean;
  std::vector<char> overlap;
  /// Same beams on the channel without the body (LOS + NLOS).
  std::vector<double> se_unblocked;
  double interval_deg = 0.0;           // contiguous overlapping span around the UE elevation
  double se_outside = 0.0;             // mean SE over the non-overlapping samples
  double se_inside = 0.0;              // mean SE over the overlapping samples
  double se_inside_unblocked = 0.0;    // mean unblocked SE over the overlapping samples
  /// SNR-equivalent blockage loss 10 log10((2^se_inside_unblocked - 1) / (2^se_inside - 1)).
  double drop_db = 0.0;
};

/// Tracked body crossing the LOS: the sensing beam follows theta_t at
/// phi = phi_ue, the comm beam is held on the UE, and the LOS vanishes while
/// the two beams overlap (beam radius `rb` in (u, v)).
BlockageTimeline blockage_sweep(const ArrayGeometry& geometry, const LinkConfig& config,
                                const BlockageScenario& scenario, double rb,
                                std::span<const double> theta_grid_deg, double snr_db);

/// Evenly spaced grid from `first` to `last` inclusive.
std::vector<double> linspace_step(double first, double last, double step);

}  // namespace stpa
