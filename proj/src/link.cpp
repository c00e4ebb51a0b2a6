#include "stpa/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"
#include "stpa/rng.hpp"

namespace stpa {

namespace {

double los_power(double wavelength_m, double r) {
  const double a = wavelength_m / (4.0 * kPi * r);
  return a * a;
}

SeStats stats(const std::vector<double>& xs) {
  SeStats s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - s.mean) * (x - s.mean);
  s.stddev = xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  return s;
}

// Phase of the LOS path seen by every element: the reference that makes the
// comm beam add in phase with a sensing beam steered at the UE.
double los_phase(double wavelength_m, double r) { return -kTwoPi * r / wavelength_m; }

}  // namespace

CVector comm_weight(const ArrayGeometry& geometry, const CVector& h, double phase) {
  if (h.size() != static_cast<Eigen::Index>(geometry.element_count()))
    throw std::invalid_argument("channel length does not match the geometry");
  CVector w(h.size());
  for (const auto& tile : geometry.tiles) {
    cdouble sum{0.0, 0.0};
    for (int n : tile) sum += h[n];
    const cdouble value = std::conj(sum) / static_cast<double>(tile.size());
    for (int n : tile) w[n] = value;
  }
  const double norm = w.norm();
  if (norm == 0.0) throw std::invalid_argument("zero channel has no beamformer");
  return (std::polar(1.0, phase) / norm) * w;
}

CVector comm_weight(const ArrayGeometry& geometry, const Eigen::MatrixXcd& H) {
  const auto n = static_cast<Eigen::Index>(geometry.element_count());
  if (H.cols() != n) throw std::invalid_argument("channel width does not match the geometry");
  const auto tiles = static_cast<Eigen::Index>(geometry.tile_count());
  // w = T D^{-1/2} x with T the tile expansion and D the tile sizes, so that
  // ||w|| = ||x|| and the constrained problem becomes an unconstrained SVD.
  Eigen::MatrixXcd expand = Eigen::MatrixXcd::Zero(n, tiles);
  for (Eigen::Index t = 0; t < tiles; ++t) {
    const auto& members = geometry.tiles[static_cast<std::size_t>(t)];
    const double scale = 1.0 / std::sqrt(static_cast<double>(members.size()));
    for (int e : members) expand(e, t) = scale;
  }
  const Eigen::MatrixXcd reduced = H * expand;
  if (reduced.norm() == 0.0) throw std::invalid_argument("zero channel has no beamformer");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(reduced, Eigen::ComputeThinV);
  CVector w = expand * svd.matrixV().col(0);
  return w / w.norm();
}

CVector sensing_weight(const ArrayGeometry& geometry, double theta_deg, double phi_deg) {
  const auto [u, v] = direction_cosines(theta_deg, phi_deg);
  const auto tile_w = tile_steering_weights(geometry, u, v);
  CVector w(static_cast<Eigen::Index>(geometry.element_count()));
  for (std::size_t t = 0; t < geometry.tile_count(); ++t)
    for (int n : geometry.tiles[t]) w[n] = tile_w[t];
  return w / w.norm();
}

JcasWeights multibeam(const CVector& w_c, const CVector& w_s, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("power split rho must be in [0, 1]");
  if (w_c.size() != w_s.size()) throw std::invalid_argument("beam weights differ in length");
  JcasWeights out{w_c, w_s, rho, std::sqrt(rho) * w_c + std::sqrt(1.0 - rho) * w_s};
  return out;
}

double spectral_efficiency(const CVector& h, const CVector& w, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
  return std::log2(1.0 + std::norm(h.cwiseProduct(w).sum()) / sigma2);
}

double spectral_efficiency(const Eigen::MatrixXcd& H, const CVector& w, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("noise variance must be positive");
  return std::log2(1.0 + (H * w).squaredNorm() / sigma2);
}

void LinkConfig::validate() const {
  if (!(r_ue > 0.0)) throw std::invalid_argument("UE range must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("power split rho must be in [0, 1]");
  if (realizations < 1) throw std::invalid_argument("need at least one channel realization");
  clusters.validate();
}

double noise_variance(const LinkConfig& config, double snr_db) {
  const double nlos = std::isinf(config.clusters.power_offset_db)
                          ? 0.0
                          : std::pow(10.0, config.clusters.power_offset_db / 10.0);
  // LOS power per port on the normalized channel.
  const double los_per_port = 1.0 / (1.0 + nlos);
  return los_per_port / std::pow(10.0, snr_db / 10.0);
}

ChannelRealization ue_channel(const ArrayGeometry& geometry, const LinkConfig& config, int index) {
  const double lambda = geometry.design_wavelength_m();
  const double p = los_power(lambda, config.r_ue);
  auto ch = sample_nlos_channel(geometry, config.clusters, p,
                                stream_seed(config.seed, "nlos", static_cast<std::uint64_t>(index)));
  ch.los = los_component(geometry, config.r_ue, config.theta_ue_deg, config.phi_ue_deg, lambda);
  const double scale = channel_scale(geometry, p, config.clusters.power_offset_db);
  ch.los *= scale;
  ch.nlos *= scale;
  ch.h = ch.los + ch.nlos;
  for (auto& path : ch.paths) path.gain *= scale;
  PathParams lp;
  lp.gain = scale * std::sqrt(p) * std::polar(1.0, los_phase(lambda, config.r_ue));
  lp.delay_s = config.r_ue / kSpeedOfLight;
  lp.theta_t_deg = config.theta_ue_deg;
  lp.phi_t_deg = config.phi_ue_deg;
  ch.paths.push_back(lp);
  return ch;
}

SeStats average_se(const ArrayGeometry& geometry, const LinkConfig& config, double snr_db,
                   double theta_s_deg, double phi_s_deg) {
  config.validate();
  const double sigma2 = noise_variance(config, snr_db);
  const double phase = los_phase(geometry.design_wavelength_m(), config.r_ue);
  const CVector w_s = sensing_weight(geometry, theta_s_deg, phi_s_deg);
  std::vector<double> se(static_cast<std::size_t>(config.realizations));
  detail::parallel_for(se.size(), [&](std::size_t i) {
    const auto ch = ue_channel(geometry, config, static_cast<int>(i));
    const auto jw = multibeam(comm_weight(geometry, ch.h, phase), w_s, config.rho);
    se[i] = spectral_efficiency(ch.h, jw.w, sigma2);
  });
  return stats(se);
}

std::vector<SweepPoint> scan_sweep_se(const ArrayGeometry& geometry, const LinkConfig& config,
                                      ScanAxis axis, std::span<const double> angles_deg, double snr_db) {
  config.validate();
  const double sigma2 = noise_variance(config, snr_db);
  const double phase = los_phase(geometry.design_wavelength_m(), config.r_ue);
  const std::size_t R = static_cast<std::size_t>(config.realizations);

  std::vector<CVector> h(R), w_c(R);
  detail::parallel_for(R, [&](std::size_t i) {
    h[i] = ue_channel(geometry, config, static_cast<int>(i)).h;
    w_c[i] = comm_weight(geometry, h[i], phase);
  });

  std::vector<SweepPoint> out(angles_deg.size());
  detail::parallel_for(angles_deg.size(), [&](std::size_t a) {
    const double theta = axis == ScanAxis::kAzimuth ? config.theta_ue_deg : angles_deg[a];
    const double phi = axis == ScanAxis::kAzimuth ? angles_deg[a] : config.phi_ue_deg;
    const CVector w_s = sensing_weight(geometry, theta, phi);
    std::vector<double> se(R);
    for (std::size_t i = 0; i < R; ++i)
      se[i] = spectral_efficiency(h[i], multibeam(w_c[i], w_s, config.rho).w, sigma2);
    const auto s = stats(se);
    out[a] = {angles_deg[a], s.mean, s.stddev};
  });
  return out;
}

double overlap_width_deg(std::span<const SweepPoint> sweep, double ue_angle_deg, double baseline,
                         double threshold) {
  if (!(baseline > 0.0)) throw std::invalid_argument("baseline SE must be positive");
  if (sweep.empty()) return 0.0;
  auto exceeds = [&](std::size_t i) { return std::abs(sweep[i].se_mean - baseline) / baseline > threshold; };
  std::size_t centre = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (std::abs(sweep[i].angle_deg - ue_angle_deg) < std::abs(sweep[centre].angle_deg - ue_angle_deg)) centre = i;
  if (!exceeds(centre)) return 0.0;
  std::size_t lo = centre, hi = centre;
  while (lo > 0 && exceeds(lo - 1)) --lo;
  while (hi + 1 < sweep.size() && exceeds(hi + 1)) ++hi;
  return std::max(std::abs(sweep[lo].angle_deg - ue_angle_deg), std::abs(sweep[hi].angle_deg - ue_angle_deg));
}

double outermost_deviation_deg(std::span<const SweepPoint> sweep, double ue_angle_deg, double baseline,
                               double threshold) {
  if (!(baseline > 0.0)) throw std::invalid_argument("baseline SE must be positive");
  double width = 0.0;
  for (const auto& p : sweep)
    if (std::abs(p.se_mean - baseline) / baseline > threshold)
      width = std::max(width, std::abs(p.angle_deg - ue_angle_deg));
  return width;
}

BlockageTimeline blockage_sweep(const ArrayGeometry& geometry, const LinkConfig& config,
                                const BlockageScenario& scenario, double rb,
                                std::span<const double> theta_grid_deg, double snr_db) {
  config.validate();
  scenario.validate();
  if (theta_grid_deg.empty()) throw std::invalid_argument("empty target sweep");
  const double lambda = geometry.design_wavelength_m();
  const double p = los_power(lambda, scenario.r_ue);
  const double scale = channel_scale(geometry, p, config.clusters.power_offset_db);
  const double sigma2 = noise_variance(config, snr_db);
  const double phase = los_phase(lambda, scenario.r_ue);
  const std::size_t R = static_cast<std::size_t>(config.realizations);
  const std::size_t T = theta_grid_deg.size();
  const auto ue = direction_cosines(scenario.theta_ue_deg, scenario.phi_ue_deg);

  std::vector<ChannelRealization> nlos(R);
  std::vector<CVector> w_c(R);
  const CVector los = los_component(geometry, scenario.r_ue, scenario.theta_ue_deg, scenario.phi_ue_deg, lambda);
  detail::parallel_for(R, [&](std::size_t i) {
    nlos[i] = sample_nlos_channel(geometry, config.clusters, p, stream_seed(config.seed, "nlos", i));
    w_c[i] = comm_weight(geometry, scale * (los + nlos[i].nlos), phase);
  });

  BlockageTimeline tl;
  tl.theta_deg.assign(theta_grid_deg.begin(), theta_grid_deg.end());
  tl.se_mean.assign(T, 0.0);
  tl.overlap.assign(T, 0);
  tl.se_unblocked.assign(T, 0.0);
  detail::parallel_for(T, [&](std::size_t k) {
    const double theta_t = theta_grid_deg[k];
    const auto tgt = direction_cosines(theta_t, scenario.phi_ue_deg);
    const bool overlap = beams_overlap(ue.u, ue.v, tgt.u, tgt.v, rb);
    const CVector w_s = sensing_weight(geometry, theta_t, scenario.phi_ue_deg);
    double acc = 0.0, clear = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
      const auto ch = compose_blockage_channel(geometry, scenario, theta_t, nlos[i], overlap,
                                               stream_seed(config.seed, "body", i * T + k));
      const CVector w = multibeam(w_c[i], w_s, config.rho).w;
      acc += spectral_efficiency(CVector(scale * ch.h), w, sigma2);
      clear += spectral_efficiency(CVector(scale * (los + nlos[i].nlos)), w, sigma2);
    }
    tl.se_mean[k] = acc / static_cast<double>(R);
    tl.se_unblocked[k] = clear / static_cast<double>(R);
    tl.overlap[k] = overlap ? 1 : 0;
  });

  // Contiguous overlapping run around the sample closest to the UE elevation.
  std::size_t centre = 0;
  for (std::size_t k = 1; k < T; ++k)
    if (std::abs(theta_grid_deg[k] - scenario.theta_ue_deg) < std::abs(theta_grid_deg[centre] - scenario.theta_ue_deg))
      centre = k;
  if (tl.overlap[centre]) {
    std::size_t lo = centre, hi = centre;
    while (lo > 0 && tl.overlap[lo - 1]) --lo;
    while (hi + 1 < T && tl.overlap[hi + 1]) ++hi;
    const double step = T > 1 ? std::abs(theta_grid_deg[1] - theta_grid_deg[0]) : 0.0;
    tl.interval_deg = std::abs(theta_grid_deg[hi] - theta_grid_deg[lo]) + step;
  }

  double in = 0.0, out = 0.0, clear = 0.0;
  int n_in = 0, n_out = 0;
  for (std::size_t k = 0; k < T; ++k) {
    if (tl.overlap[k]) {
      in += tl.se_mean[k];
      clear += tl.se_unblocked[k];
      ++n_in;
    } else {
      out += tl.se_mean[k];
      ++n_out;
    }
  }
  tl.se_inside = n_in ? in / n_in : 0.0;
  tl.se_outside = n_out ? out / n_out : 0.0;
  if (n_in) {
    tl.se_inside_unblocked = clear / n_in;
    tl.drop_db = 10.0 * std::log10((std::exp2(tl.se_inside_unblocked) - 1.0) / (std::exp2(tl.se_inside) - 1.0));
  }
  return tl;
}

std::vector<double> linspace_step(double first, double last, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((last - first) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(first + static_cast<double>(i) * step);
  return out;
}

}  // namespace stpa
