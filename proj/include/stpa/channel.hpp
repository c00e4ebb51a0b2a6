#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stpa/geometry.hpp"
#include "stpa/pattern.hpp"

namespace stpa {

using CVector = Eigen::VectorXcd;

/// One propagation path. Angles in degrees; the receive side is a single
/// isotropic antenna, so (theta_r, phi_r) are informational only.
struct PathParams {
  cdouble gain{0.0, 0.0};
  double delay_s = 0.0;
  double doppler_hz = 0.0;
  double theta_t_deg = 90.0;
  double phi_t_deg = 0.0;
  double theta_r_deg = 90.0;
  double phi_r_deg = 0.0;
};

/// Narrowband downlink channel toward a single-antenna UE, kept per component.
struct ChannelRealization {
  std::vector<PathParams> paths;
  CVector h;
  CVector los;
  CVector nlos;
  CVector target;
};

struct ClusterSpec {
  int clusters = 8;
  int rays = 10;
  double power_offset_db = -10.0;  // total NLOS power relative to LOS
  double ray_spread_deg = 5.0;

  void validate() const;
};

/// exp(j 2 pi ratio (u x_n + v y_n)) for every element.
CVector steering_vector(const ArrayGeometry& geometry, double theta_deg, double phi_deg,
                        double freq_ratio = 1.0);

/// Free-space LOS term a_T (lambda / 4 pi r) e^{-j 2 pi r / lambda}.
CVector los_component(const ArrayGeometry& geometry, double r_m, double theta_deg, double phi_deg,
                      double wavelength_m);

/// Clustered NLOS channel. `los_power` is the per-element LOS power the
/// cluster powers are referenced to; rays get i.i.d. CN(0, p) gains with the
/// total spread evenly over clusters and rays.
ChannelRealization sample_nlos_channel(const ArrayGeometry& geometry, const ClusterSpec& spec,
                                       double los_power, std::uint64_t seed);

/// Linear standard deviation used for a perturbation quoted in dB.
double sigma_db_to_linear(double sigma_db);

/// Body reflection (eps sin d - sqrt(eps - cos^2 d)) / (eps sin d + sqrt(eps - cos^2 d))
/// plus a CN(0, sigma^2) perturbation, sigma from sigma_db_to_linear.
cdouble body_reflection_coeff(double delta_deg, cdouble eps_b, double sigma_b_db, std::uint64_t seed);

/// Target path a_T (lambda / 4 pi d) gamma e^{-j 2 pi d / lambda} with d = r_t + r_r.
CVector target_component(const ArrayGeometry& geometry, double theta_deg, double phi_deg, double r_t,
                         double r_r, cdouble gamma, double wavelength_m);

/// A body crossing the LOS on a line perpendicular to it, in the vertical
/// plane of the UE azimuth.
struct BlockageScenario {
  double r_ue = 70.0;
  double theta_ue_deg = 70.0;
  double phi_ue_deg = 50.0;
  double r_m = 35.0;  // distance along the LOS at which the body crosses it
  cdouble eps_b{0.1, -2.33};
  double sigma_b_db = 0.45;
  double gamma_blocked = 0.1;

  void validate() const;
};

struct TargetRanges {
  double r_t = 0.0;  // base station to body
  double r_r = 0.0;  // body to UE
};

/// Plane geometry of the crossing: the body at elevation theta_t sits on the
/// perpendicular through the point r_m along the LOS.
TargetRanges blockage_target_ranges(const BlockageScenario& scenario, double theta_t_deg);

/// LOS + NLOS + reflected target when the beams are apart, NLOS + diffracted
/// target when they overlap. Components are unscaled; `nlos` supplies the
/// NLOS part and its paths.
ChannelRealization compose_blockage_channel(const ArrayGeometry& geometry,
                                            const BlockageScenario& scenario, double theta_t_deg,
                                            const ChannelRealization& nlos, bool overlap,
                                            std::uint64_t seed);

/// Number of independent phase shifters: tiles for a tiled aperture, elements otherwise.
std::size_t port_count(const ArrayGeometry& geometry);

/// Amplitude factor that makes E||h_LOS + h_NLOS||^2 equal port_count for a
/// LOS per-element power `los_power` and the given NLOS offset.
double channel_scale(const ArrayGeometry& geometry, double los_power, double nlos_offset_db);

}  // namespace stpa
