#include "stpa/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "stpa/rng.hpp"

namespace stpa {

namespace {

double wrap_azimuth(double phi) {
  phi = std::fmod(phi + 180.0, 360.0);
  if (phi < 0.0) phi += 360.0;
  return phi - 180.0;
}

cdouble complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

void ClusterSpec::validate() const {
  if (clusters < 1 || rays < 1) throw std::invalid_argument("cluster and ray counts must be >= 1");
  if (!(ray_spread_deg >= 0.0)) throw std::invalid_argument("ray spread must be >= 0");
}

void BlockageScenario::validate() const {
  if (!(r_ue > 0.0) || !(r_m > 0.0)) throw std::invalid_argument("ranges must be positive");
  if (!(r_m < r_ue)) throw std::invalid_argument("the body must cross the LOS before the UE (r_m < r_ue)");
}

CVector steering_vector(const ArrayGeometry& geometry, double theta_deg, double phi_deg,
                        double freq_ratio) {
  if (geometry.elements.empty()) throw std::invalid_argument("empty geometry");
  const auto [u, v] = direction_cosines(theta_deg, phi_deg);
  const double k = kTwoPi * freq_ratio;
  CVector a(static_cast<Eigen::Index>(geometry.element_count()));
  for (std::size_t n = 0; n < geometry.element_count(); ++n) {
    const auto& p = geometry.elements[n];
    a[static_cast<Eigen::Index>(n)] = std::polar(1.0, k * (u * p.x + v * p.y));
  }
  return a;
}

CVector los_component(const ArrayGeometry& geometry, double r_m, double theta_deg, double phi_deg,
                      double wavelength_m) {
  if (!(r_m > 0.0)) throw std::invalid_argument("LOS range must be positive");
  const cdouble g = wavelength_m / (4.0 * kPi * r_m) * std::polar(1.0, -kTwoPi * r_m / wavelength_m);
  return g * steering_vector(geometry, theta_deg, phi_deg);
}

ChannelRealization sample_nlos_channel(const ArrayGeometry& geometry, const ClusterSpec& spec,
                                       double los_power, std::uint64_t seed) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(geometry.element_count());
  ChannelRealization ch;
  ch.nlos = CVector::Zero(n);
  ch.los = CVector::Zero(n);
  ch.target = CVector::Zero(n);

  const double total = std::isinf(spec.power_offset_db) && spec.power_offset_db < 0.0
                           ? 0.0
                           : los_power * std::pow(10.0, spec.power_offset_db / 10.0);
  const double ray_power = total / (spec.clusters * spec.rays);

  Rng rng(seed);
  std::uniform_real_distribution<double> elev(0.0, 90.0);
  std::uniform_real_distribution<double> azim(-180.0, 180.0);
  std::uniform_real_distribution<double> spread(-spec.ray_spread_deg, spec.ray_spread_deg);
  for (int c = 0; c < spec.clusters; ++c) {
    const double tc = elev(rng);
    const double pc = azim(rng);
    for (int r = 0; r < spec.rays; ++r) {
      PathParams p;
      p.theta_t_deg = std::clamp(tc + spread(rng), 0.0, 90.0);
      p.phi_t_deg = wrap_azimuth(pc + spread(rng));
      p.gain = complex_normal(rng, ray_power);
      if (ray_power > 0.0) ch.nlos += p.gain * steering_vector(geometry, p.theta_t_deg, p.phi_t_deg);
      ch.paths.push_back(p);
    }
  }
  ch.h = ch.nlos;
  return ch;
}

double sigma_db_to_linear(double sigma_db) { return std::pow(10.0, sigma_db / 20.0) - 1.0; }

cdouble body_reflection_coeff(double delta_deg, cdouble eps_b, double sigma_b_db, std::uint64_t seed) {
  if (!(delta_deg > 0.0 && delta_deg <= 90.0)) throw std::invalid_argument("incidence angle must be in (0, 90] deg");
  const double d = deg2rad(delta_deg);
  const double c = std::cos(d);
  const cdouble root = std::sqrt(eps_b - c * c);
  const cdouble gamma = (eps_b * std::sin(d) - root) / (eps_b * std::sin(d) + root);
  const double sigma = sigma_db_to_linear(sigma_b_db);
  if (sigma == 0.0) return gamma;
  Rng rng(seed);
  return gamma + complex_normal(rng, sigma * sigma);
}

CVector target_component(const ArrayGeometry& geometry, double theta_deg, double phi_deg, double r_t,
                         double r_r, cdouble gamma, double wavelength_m) {
  if (!(r_t > 0.0) || !(r_r > 0.0)) throw std::invalid_argument("target ranges must be positive");
  const double d = r_t + r_r;
  const cdouble g = wavelength_m / (4.0 * kPi * d) * gamma * std::polar(1.0, -kTwoPi * d / wavelength_m);
  return g * steering_vector(geometry, theta_deg, phi_deg);
}

TargetRanges blockage_target_ranges(const BlockageScenario& scenario, double theta_t_deg) {
  scenario.validate();
  const double off = deg2rad(theta_t_deg - scenario.theta_ue_deg);
  if (!(std::abs(off) < 0.5 * kPi)) throw std::invalid_argument("target never reaches the crossing line");
  const double lateral = scenario.r_m * std::tan(off);
  return {scenario.r_m / std::cos(off), std::hypot(scenario.r_ue - scenario.r_m, lateral)};
}

ChannelRealization compose_blockage_channel(const ArrayGeometry& geometry,
                                            const BlockageScenario& scenario, double theta_t_deg,
                                            const ChannelRealization& nlos, bool overlap,
                                            std::uint64_t seed) {
  const double lambda = geometry.design_wavelength_m();
  const auto n = static_cast<Eigen::Index>(geometry.element_count());
  if (nlos.nlos.size() != n) throw std::invalid_argument("NLOS realization does not match the geometry");
  const auto ranges = blockage_target_ranges(scenario, theta_t_deg);

  ChannelRealization ch;
  ch.paths = nlos.paths;
  ch.nlos = nlos.nlos;
  const cdouble gamma = overlap ? cdouble(scenario.gamma_blocked, 0.0)
                                : body_reflection_coeff(theta_t_deg, scenario.eps_b, scenario.sigma_b_db, seed);
  ch.target = target_component(geometry, theta_t_deg, scenario.phi_ue_deg, ranges.r_t, ranges.r_r, gamma, lambda);
  ch.los = overlap ? CVector::Zero(n)
                   : los_component(geometry, scenario.r_ue, scenario.theta_ue_deg, scenario.phi_ue_deg, lambda);

  const double d = ranges.r_t + ranges.r_r;
  PathParams tp;
  tp.gain = lambda / (4.0 * kPi * d) * gamma * std::polar(1.0, -kTwoPi * d / lambda);
  tp.delay_s = d / kSpeedOfLight;
  tp.theta_t_deg = theta_t_deg;
  tp.phi_t_deg = scenario.phi_ue_deg;
  ch.paths.push_back(tp);
  if (!overlap) {
    PathParams lp;
    lp.gain = lambda / (4.0 * kPi * scenario.r_ue) * std::polar(1.0, -kTwoPi * scenario.r_ue / lambda);
    lp.delay_s = scenario.r_ue / kSpeedOfLight;
    lp.theta_t_deg = scenario.theta_ue_deg;
    lp.phi_t_deg = scenario.phi_ue_deg;
    ch.paths.push_back(lp);
  }
  ch.h = ch.los + ch.nlos + ch.target;
  return ch;
}

std::size_t port_count(const ArrayGeometry& geometry) {
  return geometry.is_tiled() ? geometry.tile_count() : geometry.element_count();
}

double channel_scale(const ArrayGeometry& geometry, double los_power, double nlos_offset_db) {
  if (!(los_power > 0.0)) throw std::invalid_argument("LOS power must be positive");
  const double nlos = std::isinf(nlos_offset_db) ? 0.0 : std::pow(10.0, nlos_offset_db / 10.0);
  const double expected = static_cast<double>(geometry.element_count()) * los_power * (1.0 + nlos);
  return std::sqrt(static_cast<double>(port_count(geometry)) / expected);
}

}  // namespace stpa
