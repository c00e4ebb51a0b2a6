#include "stpa/sensing.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <stdexcept>

#include "parallel.hpp"
#include "stpa/link.hpp"
#include "stpa/rng.hpp"

namespace stpa {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Range IDFT along subcarriers followed by Doppler DFT along the dwell
// symbols, both unitary, on an N_sc x N_d column-major block.
class DwellTransform {
 public:
  DwellTransform(int n_sc, int n_d) : n_sc_(n_sc), n_d_(n_d) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(n_sc) * n_d);
    range_ = fftw_plan_many_dft(1, &n_sc_, n_d_, tmp, nullptr, 1, n_sc_, tmp, nullptr, 1, n_sc_,
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    doppler_ = fftw_plan_many_dft(1, &n_d_, n_sc_, tmp, nullptr, n_sc_, 1, tmp, nullptr, n_sc_, 1,
                                  FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(tmp);
    if (!range_ || !doppler_) throw std::runtime_error("FFTW planning failed");
  }
  ~DwellTransform() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(range_);
    fftw_destroy_plan(doppler_);
  }
  DwellTransform(const DwellTransform&) = delete;
  DwellTransform& operator=(const DwellTransform&) = delete;

  RangeDopplerMap power_map(const Eigen::MatrixXcd& dwell, const OfdmParams& params) const {
    if (dwell.rows() != n_sc_ || dwell.cols() != n_d_) throw std::invalid_argument("dwell block has the wrong shape");
    const std::size_t total = static_cast<std::size_t>(n_sc_) * n_d_;
    fftw_complex* buf = fftw_alloc_complex(total);
    for (int d = 0; d < n_d_; ++d)
      for (int n = 0; n < n_sc_; ++n) {
        const cdouble v = dwell(n, d);
        buf[static_cast<std::size_t>(d) * n_sc_ + n][0] = v.real();
        buf[static_cast<std::size_t>(d) * n_sc_ + n][1] = v.imag();
      }
    fftw_execute_dft(range_, buf, buf);
    fftw_execute_dft(doppler_, buf, buf);

    RangeDopplerMap map;
    map.range_bins = n_sc_;
    map.doppler_bins = n_d_;
    map.range_resolution_m = params.range_resolution_m();
    map.velocity_resolution_mps = params.velocity_resolution_mps(n_d_);
    map.power.resize(total);
    const double scale = 1.0 / static_cast<double>(total);
    for (int r = 0; r < n_sc_; ++r)
      for (int d = 0; d < n_d_; ++d) {
        const auto& c = buf[static_cast<std::size_t>(d) * n_sc_ + r];
        map.power[static_cast<std::size_t>(r) * n_d_ + d] = (c[0] * c[0] + c[1] * c[1]) * scale;
      }
    fftw_free(buf);
    return map;
  }

 private:
  int n_sc_;
  int n_d_;
  fftw_plan range_ = nullptr;
  fftw_plan doppler_ = nullptr;
};

}  // namespace

void OfdmParams::validate() const {
  if (!(carrier_hz > 0.0) || !(bandwidth_hz > 0.0) || !(symbol_time_s > 0.0) || subcarriers < 1)
    throw std::invalid_argument("OFDM parameters must be positive");
  const double expected = subcarriers / bandwidth_hz;
  if (std::abs(symbol_time_s - expected) > 1e-9 * expected)
    throw std::invalid_argument("symbol time must equal subcarriers / bandwidth");
}

double OfdmParams::velocity_resolution_mps(int dwell_symbols) const {
  if (dwell_symbols < 1) throw std::invalid_argument("dwell must hold at least one symbol");
  return kSpeedOfLight / (2.0 * carrier_hz * dwell_symbols * symbol_time_s);
}

NumerologyCheck check_numerology(const OfdmParams& params, int dwell_symbols, double tolerance) {
  params.validate();
  NumerologyCheck c;
  c.range_resolution_m = params.range_resolution_m();
  c.velocity_resolution_mps = params.velocity_resolution_mps(dwell_symbols);
  c.max_range_m = params.max_range_m();
  c.max_velocity_mps = params.max_velocity_mps();
  const double derived[] = {c.range_resolution_m, c.velocity_resolution_mps, c.max_range_m, c.max_velocity_mps};
  const double reference[] = {3.75, 3.07, 7680.0, 52.32};
  for (int i = 0; i < 4; ++i)
    c.worst_relative_error = std::max(c.worst_relative_error, std::abs(derived[i] - reference[i]) / reference[i]);
  c.ok = c.worst_relative_error <= tolerance;
  return c;
}

ScanSchedule ScanSchedule::full() {
  ScanSchedule s;
  s.elevations_deg = linspace_step(0.0, 90.0, 5.0);
  s.azimuths_deg = linspace_step(-180.0, 180.0, 5.0);
  return s;
}

ScanSchedule ScanSchedule::azimuth_window(double half_width_deg, double step_deg) {
  ScanSchedule s = full();
  s.azimuths_deg = linspace_step(-half_width_deg, half_width_deg, step_deg);
  return s;
}

void ScanSchedule::validate() const {
  if (dwell_symbols < 1) throw std::invalid_argument("dwell must hold at least one symbol");
  if (elevations_deg.empty() || azimuths_deg.empty()) throw std::invalid_argument("empty scan schedule");
}

double monostatic_gain(double wavelength_m, double range_m) {
  if (!(range_m > 0.0)) throw std::invalid_argument("target range must be positive");
  return wavelength_m * wavelength_m / (std::pow(4.0 * kPi, 1.5) * range_m * range_m);
}

EchoSynthesizer::EchoSynthesizer(const ArrayGeometry& geometry, std::vector<SensingTarget> targets,
                                 const ScanSchedule& schedule, const OfdmParams& params,
                                 const SensingSetup& setup)
    : geometry_(&geometry), targets_(std::move(targets)), schedule_(schedule), params_(params), setup_(setup) {
  params_.validate();
  schedule_.validate();
  if (targets_.empty()) throw std::invalid_argument("no sensing targets");
  if (!(setup_.rho >= 0.0 && setup_.rho <= 1.0)) throw std::invalid_argument("power split rho must be in [0, 1]");
  if (setup_.w_c.size() != 0 && setup_.w_c.size() != static_cast<Eigen::Index>(geometry.element_count()))
    throw std::invalid_argument("comm beam does not match the geometry");
  for (const auto& t : targets_) {
    if (!(t.range_m > 0.0 && t.range_m < params_.max_range_m()))
      throw std::invalid_argument("target range outside the unambiguous interval");
    if (!(std::abs(t.velocity_mps) < params_.max_velocity_mps()))
      throw std::invalid_argument("target speed outside the unambiguous interval");
    steering_.push_back(steering_vector(geometry, t.theta_deg, t.phi_deg));
    gain_.push_back(monostatic_gain(params_.wavelength_m(), t.range_m));
  }
  double strongest = 0.0;
  for (std::size_t l = 0; l < targets_.size(); ++l) {
    CVector w = sensing_weight(geometry, targets_[l].theta_deg, targets_[l].phi_deg);
    if (setup_.w_c.size()) w = std::sqrt(setup_.rho) * setup_.w_c + std::sqrt(1.0 - setup_.rho) * w;
    strongest = std::max(strongest, std::norm(gain_[l] * steering_[l].cwiseProduct(w).sum()));
  }
  noise_variance_ = strongest / std::pow(10.0, setup_.noise_offset_db / 10.0);
}

CVector EchoSynthesizer::weights(int a, int e) const {
  CVector w = sensing_weight(*geometry_, schedule_.elevations_deg[static_cast<std::size_t>(e)],
                             schedule_.azimuths_deg[static_cast<std::size_t>(a)]);
  if (setup_.w_c.size() == 0) return w;
  return std::sqrt(setup_.rho) * setup_.w_c + std::sqrt(1.0 - setup_.rho) * w;
}

Eigen::MatrixXcd EchoSynthesizer::dwell(int a, int e) const {
  if (a < 0 || a >= schedule_.azimuth_count() || e < 0 || e >= schedule_.elevation_count())
    throw std::out_of_range("dwell index outside the schedule");
  const int n_sc = params_.subcarriers;
  const int n_d = schedule_.dwell_symbols;
  const double ts = params_.symbol_time_s;
  const double tf = schedule_.symbols_per_packet() * ts;
  const CVector w = weights(a, e);

  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n_sc, n_d);
  for (std::size_t l = 0; l < targets_.size(); ++l) {
    const auto& t = targets_[l];
    const double tau = 2.0 * t.range_m / kSpeedOfLight;
    const double fd = 2.0 * t.velocity_mps * params_.carrier_hz / kSpeedOfLight;
    const cdouble amp = gain_[l] * steering_[l].cwiseProduct(w).sum();
    Eigen::VectorXcd range_ramp(n_sc);
    for (int n = 0; n < n_sc; ++n) range_ramp[n] = std::polar(1.0, -kTwoPi * n * tau * params_.subcarrier_spacing_hz());
    Eigen::RowVectorXcd doppler(n_d);
    for (int d = 0; d < n_d; ++d) {
      const double time = (static_cast<double>(e) * n_d + d) * ts + a * tf;
      doppler[d] = amp * std::polar(1.0, kTwoPi * fd * time);
    }
    y.noalias() += range_ramp * doppler;
  }
  if (setup_.add_noise && noise_variance_ > 0.0) {
    Rng rng(stream_seed(setup_.seed, "sensing-noise",
                        static_cast<std::uint64_t>(a) * schedule_.elevation_count() + e));
    std::normal_distribution<double> g(0.0, std::sqrt(0.5 * noise_variance_));
    for (int d = 0; d < n_d; ++d)
      for (int n = 0; n < n_sc; ++n) {
        const double re = g(rng);
        const double im = g(rng);
        y(n, d) += cdouble(re, im);
      }
  }
  return y;
}

Eigen::MatrixXcd SensingCube::dwell(int a, int e) const {
  Eigen::MatrixXcd y(subcarriers, dwell_symbols);
  for (int d = 0; d < dwell_symbols; ++d)
    for (int n = 0; n < subcarriers; ++n) y(n, d) = at(n, a, e * dwell_symbols + d);
  return y;
}

SensingCube synthesize_rx(const ArrayGeometry& geometry, const std::vector<SensingTarget>& targets,
                          const ScanSchedule& schedule, const OfdmParams& params,
                          const SensingSetup& setup, std::size_t max_entries) {
  const EchoSynthesizer synth(geometry, targets, schedule, params, setup);
  SensingCube cube;
  cube.subcarriers = params.subcarriers;
  cube.azimuths = schedule.azimuth_count();
  cube.symbols = schedule.symbols_per_packet();
  cube.dwell_symbols = schedule.dwell_symbols;
  const std::size_t entries = static_cast<std::size_t>(cube.subcarriers) * cube.azimuths * cube.symbols;
  if (entries > max_entries) throw std::length_error("sensing cube too large to hold; use run_sensing");
  cube.values.resize(entries);
  const int n_e = schedule.elevation_count();
  detail::parallel_for(static_cast<std::size_t>(cube.azimuths) * n_e, [&](std::size_t idx) {
    const int a = static_cast<int>(idx) / n_e;
    const int e = static_cast<int>(idx) % n_e;
    const auto y = synth.dwell(a, e);
    for (int d = 0; d < cube.dwell_symbols; ++d)
      for (int n = 0; n < cube.subcarriers; ++n)
        cube.values[(static_cast<std::size_t>(a) * cube.symbols + e * cube.dwell_symbols + d) * cube.subcarriers + n] = y(n, d);
  });
  return cube;
}

double RangeDopplerMap::velocity_of(int d) const {
  const int folded = d >= (doppler_bins + 1) / 2 ? d - doppler_bins : d;
  return folded * velocity_resolution_mps;
}

std::pair<int, int> RangeDopplerMap::argmax() const {
  const auto it = std::max_element(power.begin(), power.end());
  const auto idx = static_cast<int>(it - power.begin());
  return {idx / doppler_bins, idx % doppler_bins};
}

double RangeDopplerMap::total_power() const {
  double s = 0.0;
  for (double p : power) s += p;
  return s;
}

RangeDopplerMap range_doppler_map(const Eigen::MatrixXcd& dwell, const OfdmParams& params) {
  const DwellTransform fft(static_cast<int>(dwell.rows()), static_cast<int>(dwell.cols()));
  return fft.power_map(dwell, params);
}

RangeDopplerMap range_doppler_map(const SensingCube& cube, int a, int e, const OfdmParams& params) {
  return range_doppler_map(cube.dwell(a, e), params);
}

int AngleImage::nearest_elevation(double theta) const {
  int best = 0;
  for (std::size_t e = 1; e < theta_deg.size(); ++e)
    if (std::abs(theta_deg[e] - theta) < std::abs(theta_deg[best] - theta)) best = static_cast<int>(e);
  return best;
}

namespace {

void normalize(AngleImage& img) {
  const double peak = *std::max_element(img.power.begin(), img.power.end());
  if (peak > 0.0)
    for (double& p : img.power) p /= peak;
}

}  // namespace

AngleImage angle_image(const SensingCube& cube, const ScanSchedule& schedule, const OfdmParams& params,
                       int range_bin, int doppler_bin) {
  AngleImage img;
  img.theta_deg = schedule.elevations_deg;
  img.phi_deg = schedule.azimuths_deg;
  const int n_e = schedule.elevation_count();
  const int n_a = schedule.azimuth_count();
  img.power.assign(static_cast<std::size_t>(n_e) * n_a, 0.0);
  const DwellTransform fft(cube.subcarriers, cube.dwell_symbols);
  detail::parallel_for(static_cast<std::size_t>(n_a) * n_e, [&](std::size_t idx) {
    const int a = static_cast<int>(idx) / n_e;
    const int e = static_cast<int>(idx) % n_e;
    img.power[static_cast<std::size_t>(e) * n_a + a] = fft.power_map(cube.dwell(a, e), params).at(range_bin, doppler_bin);
  });
  normalize(img);
  return img;
}

AzimuthPeaks resolve_two_targets(const AngleImage& image, double theta_deg, double dip_db, double min_peak_db) {
  AzimuthPeaks out;
  if (image.phi_deg.empty() || image.theta_deg.empty()) return out;
  const int e = image.nearest_elevation(theta_deg);
  out.cut_theta_deg = image.theta_deg[static_cast<std::size_t>(e)];
  const int n = static_cast<int>(image.phi_deg.size());
  std::vector<double> cut(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) cut[static_cast<std::size_t>(a)] = image.at(e, a);
  const double top = *std::max_element(cut.begin(), cut.end());
  if (!(top > 0.0)) return out;

  std::vector<int> peaks;
  for (int a = 0; a < n; ++a) {
    const double p = cut[static_cast<std::size_t>(a)];
    const double left = a > 0 ? cut[static_cast<std::size_t>(a - 1)] : -1.0;
    const double right = a + 1 < n ? cut[static_cast<std::size_t>(a + 1)] : -1.0;
    if (p > left && p >= right && 10.0 * std::log10(p / top) >= min_peak_db) peaks.push_back(a);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int x, int y) { return cut[static_cast<std::size_t>(x)] > cut[static_cast<std::size_t>(y)]; });
  for (int a : peaks) out.peak_phi_deg.push_back(image.phi_deg[static_cast<std::size_t>(a)]);

  const double dip_ratio = std::pow(10.0, -dip_db / 10.0);
  for (std::size_t i = 0; i < peaks.size() && !out.resolved; ++i)
    for (std::size_t j = i + 1; j < peaks.size() && !out.resolved; ++j) {
      const int lo = std::min(peaks[i], peaks[j]);
      const int hi = std::max(peaks[i], peaks[j]);
      const double valley = *std::min_element(cut.begin() + lo, cut.begin() + hi + 1);
      const double weaker = std::min(cut[static_cast<std::size_t>(lo)], cut[static_cast<std::size_t>(hi)]);
      if (valley <= weaker * dip_ratio) {
        out.resolved = true;
        out.pair_phi_deg = {image.phi_deg[static_cast<std::size_t>(peaks[i])],
                            image.phi_deg[static_cast<std::size_t>(peaks[j])]};
      }
    }
  return out;
}

SensingReport run_sensing(const ArrayGeometry& geometry, const std::vector<SensingTarget>& targets,
                          const ScanSchedule& schedule, const OfdmParams& params,
                          const SensingSetup& setup) {
  const EchoSynthesizer synth(geometry, targets, schedule, params, setup);
  const int n_e = schedule.elevation_count();
  const int n_a = schedule.azimuth_count();
  const int n_sc = params.subcarriers;
  const int n_d = schedule.dwell_symbols;
  const std::size_t cells = static_cast<std::size_t>(n_sc) * n_d;
  const DwellTransform fft(n_sc, n_d);

  SensingReport rep;
  rep.noise_variance = synth.noise_variance();

  // Pass one: non-coherent integration, one accumulator per packet so the
  // reduction order does not depend on the thread split.
  std::vector<std::vector<double>> packet_sum(static_cast<std::size_t>(n_a));
  detail::parallel_for(static_cast<std::size_t>(n_a), [&](std::size_t a) {
    auto& acc = packet_sum[a];
    acc.assign(cells, 0.0);
    for (int e = 0; e < n_e; ++e) {
      const auto map = fft.power_map(synth.dwell(static_cast<int>(a), e), params);
      for (std::size_t c = 0; c < cells; ++c) acc[c] += map.power[c];
    }
  });
  std::vector<double> total(cells, 0.0);
  for (const auto& acc : packet_sum)
    for (std::size_t c = 0; c < cells; ++c) total[c] += acc[c];
  packet_sum.clear();
  const auto best = static_cast<int>(std::max_element(total.begin(), total.end()) - total.begin());
  rep.range_bin = best / n_d;
  rep.doppler_bin = best % n_d;

  // Pass two: the detected cell over every scanned angle.
  rep.image.theta_deg = schedule.elevations_deg;
  rep.image.phi_deg = schedule.azimuths_deg;
  rep.image.power.assign(static_cast<std::size_t>(n_e) * n_a, 0.0);
  detail::parallel_for(static_cast<std::size_t>(n_a) * n_e, [&](std::size_t idx) {
    const int a = static_cast<int>(idx) / n_e;
    const int e = static_cast<int>(idx) % n_e;
    rep.image.power[static_cast<std::size_t>(e) * n_a + a] =
        fft.power_map(synth.dwell(a, e), params).at(rep.range_bin, rep.doppler_bin);
  });
  const auto peak_idx = static_cast<int>(std::max_element(rep.image.power.begin(), rep.image.power.end()) -
                                         rep.image.power.begin());
  const int peak_e = peak_idx / n_a;
  const int peak_a = peak_idx % n_a;
  normalize(rep.image);
  rep.peak_theta_deg = schedule.elevations_deg[static_cast<std::size_t>(peak_e)];
  rep.peak_phi_deg = schedule.azimuths_deg[static_cast<std::size_t>(peak_a)];
  rep.peak_map = fft.power_map(synth.dwell(peak_a, peak_e), params);

  rep.peaks = resolve_two_targets(rep.image, rep.peak_theta_deg);
  const std::vector<double> phis = rep.peaks.resolved ? rep.peaks.pair_phi_deg : std::vector<double>{rep.peak_phi_deg};
  for (double phi : phis) {
    const auto a = static_cast<int>(std::find(schedule.azimuths_deg.begin(), schedule.azimuths_deg.end(), phi) -
                                    schedule.azimuths_deg.begin());
    const auto map = fft.power_map(synth.dwell(a, peak_e), params);
    const auto [r, d] = map.argmax();
    rep.detections.push_back({map.range_of(r), map.velocity_of(d), rep.peak_theta_deg, phi});
  }
  return rep;
}

}  // namespace stpa
