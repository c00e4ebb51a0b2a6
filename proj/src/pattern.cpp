#include "stpa/pattern.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "parallel.hpp"

namespace stpa {

namespace {

std::atomic<int> g_threads{0};

constexpr int kProfileRays = 72;

// |sum_n exp(j c (u x_n + v y_n))|^2 / N^2 for unit excitations.
double unit_power(std::span<const Point2> pos, double c, double u, double v) {
  double re = 0.0, im = 0.0;
  for (const auto& p : pos) {
    const double ph = c * (u * p.x + v * p.y);
    re += std::cos(ph);
    im += std::sin(ph);
  }
  const double n = static_cast<double>(pos.size());
  return (re * re + im * im) / (n * n);
}

double radial_profile(const std::function<double(double, double)>& power, UV peak, double r) {
  if (r == 0.0) return power(peak.u, peak.v);
  double acc = 0.0;
  for (int k = 0; k < kProfileRays; ++k) {
    const double a = kTwoPi * k / kProfileRays;
    acc += power(peak.u + r * std::cos(a), peak.v + r * std::sin(a));
  }
  return acc / kProfileRays;
}

}  // namespace

void set_thread_count(int threads) { g_threads = std::max(0, threads); }

int thread_count() {
  const int t = g_threads.load();
  if (t > 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<UV> angle_grid_uv(const AngleGridSpec& spec) {
  if (!(spec.step_deg > 0.0)) throw std::invalid_argument("angle step must be positive");
  const int n_theta =
      static_cast<int>(std::floor((spec.theta_max_deg - spec.theta_min_deg) / spec.step_deg + 1e-9)) + 1;
  const int n_phi =
      static_cast<int>(std::ceil((spec.phi_max_deg - spec.phi_min_deg) / spec.step_deg - 1e-9));
  std::vector<UV> out;
  std::set<std::pair<long long, long long>> seen;
  for (int it = 0; it < n_theta; ++it) {
    const double theta = spec.theta_min_deg + it * spec.step_deg;
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = spec.phi_min_deg + ip * spec.step_deg;
      const auto dc = direction_cosines(theta, phi);
      const auto key = std::make_pair(std::llround(dc.u * 1e9), std::llround(dc.v * 1e9));
      if (!seen.insert(key).second) continue;
      out.push_back({dc.u, dc.v});
    }
  }
  return out;
}

cdouble array_factor(const ArrayGeometry& geometry, std::span<const cdouble> tile_weights, double u,
                     double v, double freq_ratio) {
  if (tile_weights.size() != geometry.tile_count())
    throw std::invalid_argument("excitation count does not match tile count");
  const double c = kTwoPi * freq_ratio;
  cdouble acc{0.0, 0.0};
  for (std::size_t n = 0; n < geometry.element_count(); ++n) {
    const auto& p = geometry.elements[n];
    acc += tile_weights[geometry.tile_of_element[n]] * std::polar(1.0, c * (u * p.x + v * p.y));
  }
  return acc / static_cast<double>(geometry.element_count());
}

cdouble expanded_field(const ArrayGeometry& geometry, double zeta, double ut, double vt,
                       double freq_ratio) {
  const double c = kTwoPi * zeta * freq_ratio;
  cdouble acc{0.0, 0.0};
  for (const auto& p : geometry.elements) acc += std::polar(1.0, c * (ut * p.x + vt * p.y));
  return acc / static_cast<double>(geometry.element_count());
}

std::vector<cdouble> tile_steering_weights(const ArrayGeometry& geometry, double us, double vs,
                                           double freq_ratio) {
  const double c = kTwoPi * freq_ratio;
  std::vector<cdouble> w(geometry.tile_count());
  for (std::size_t t = 0; t < w.size(); ++t) {
    const Point2 pc = geometry.phase_center(t);
    w[t] = std::polar(1.0, -c * (us * pc.x + vs * pc.y));
  }
  return w;
}

std::vector<double> expanded_beam_values(const ArrayGeometry& geometry, double zeta,
                                         std::span<const UV> samples, double freq_ratio) {
  std::vector<double> values(samples.size());
  const double c = kTwoPi * zeta * freq_ratio;
  std::span<const Point2> pos(geometry.elements);
  detail::parallel_for(samples.size(),
                       [&](std::size_t i) { values[i] = unit_power(pos, c, samples[i].u, samples[i].v); });
  return values;
}

PatternGrid expanded_beam_pattern(const ArrayGeometry& geometry, double zeta,
                                  const AngleGridSpec& grid, double freq_ratio) {
  if (!(zeta >= 1.0)) throw std::invalid_argument("EBP expansion factor must be >= 1");
  PatternGrid out;
  out.samples = angle_grid_uv(grid);
  out.values = expanded_beam_values(geometry, zeta, out.samples, freq_ratio);
  out.peak = {0.0, 0.0};
  out.zeta = zeta;
  out.frequency_ratio = freq_ratio;
  const double c = kTwoPi * zeta * freq_ratio;
  auto positions = geometry.elements;
  out.evaluate = [positions = std::move(positions), c](double u, double v) {
    return unit_power(positions, c, u, v);
  };
  return out;
}

PatternGrid scanned_pattern(const ArrayGeometry& geometry, UV scan, const AngleGridSpec& grid,
                            double freq_ratio) {
  if (scan.u * scan.u + scan.v * scan.v > 1.0 + 1e-12)
    throw std::invalid_argument("scan direction outside the visible region");
  const auto weights = tile_steering_weights(geometry, scan.u, scan.v, freq_ratio);
  const double ref = std::norm(array_factor(geometry, weights, scan.u, scan.v, freq_ratio));
  auto eval = [geometry, weights, ref, freq_ratio](double u, double v) {
    return std::norm(array_factor(geometry, weights, u, v, freq_ratio)) / ref;
  };
  PatternGrid out;
  out.samples = angle_grid_uv(grid);
  out.values.resize(out.samples.size());
  detail::parallel_for(out.samples.size(),
                       [&](std::size_t i) { out.values[i] = eval(out.samples[i].u, out.samples[i].v); });
  out.peak = scan;
  out.zeta = 1.0;
  out.frequency_ratio = freq_ratio;
  out.evaluate = std::move(eval);
  return out;
}

MainBeam measure_main_beam(const std::function<double(double, double)>& power, UV peak,
                           double max_radius) {
  MainBeam mb;
  auto profile = [&](double r) { return radial_profile(power, peak, r); };

  // Half-power crossing: coarse outward walk, then bisection.
  const double coarse = 2e-3;
  double lo = 0.0, hi = coarse;
  while (hi <= max_radius && profile(hi) >= 0.5) {
    lo = hi;
    hi += coarse;
  }
  if (hi > max_radius) return mb;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (profile(mid) >= 0.5 ? lo : hi) = mid;
  }
  mb.half_power_radius = 0.5 * (lo + hi);

  // First null: keep walking while the profile decreases.
  const double step = std::max(1e-4, mb.half_power_radius / 25.0);
  double r = mb.half_power_radius;
  double p = profile(r);
  while (r + step <= max_radius) {
    const double q = profile(r + step);
    if (q > p) break;
    r += step;
    p = q;
  }
  if (r + step > max_radius) return mb;
  // Golden-section refinement on [r - step, r + step].
  double a = std::max(0.0, r - step), b = r + step;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = profile(x1), f2 = profile(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = profile(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = profile(x2);
    }
  }
  mb.first_null_radius = 0.5 * (a + b);
  return mb;
}

double power_db(double linear) {
  if (linear <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(linear);
}

PatternMetrics extract_metrics(const PatternGrid& pattern, double exclusion) {
  if (!pattern.evaluate) throw std::invalid_argument("pattern has no evaluator");
  PatternMetrics m;
  const MainBeam mb = measure_main_beam(pattern.evaluate, pattern.peak);
  m.half_power_radius = mb.half_power_radius;
  m.beamwidth_radius = 2.0 * mb.half_power_radius;
  if (exclusion > 0.0) {
    m.exclusion_radius = exclusion;
  } else if (mb.first_null_radius > 0.0) {
    m.exclusion_radius = mb.first_null_radius;
  } else {
    m.exclusion_radius = 2.0 * m.beamwidth_radius;
  }

  const double r2 = m.exclusion_radius * m.exclusion_radius;
  double worst = -1.0;
  for (std::size_t i = 0; i < pattern.samples.size(); ++i) {
    const double du = pattern.samples[i].u - pattern.peak.u;
    const double dv = pattern.samples[i].v - pattern.peak.v;
    if (du * du + dv * dv < r2) continue;
    worst = std::max(worst, pattern.values[i]);
  }
  if (worst < 0.0) throw std::invalid_argument("exclusion disc covers the whole pattern grid");
  m.max_sll_db = power_db(worst);
  return m;
}

std::vector<std::pair<double, double>> frequency_sweep_sll(const ArrayGeometry& geometry, double zeta,
                                                           std::span<const double> ratios,
                                                           const AngleGridSpec& grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(ratios.size());
  for (double r : ratios) {
    if (!(r >= 1.0)) throw std::invalid_argument("frequency ratios must be >= 1");
    const auto ebp = expanded_beam_pattern(geometry, zeta, grid, r);
    out.emplace_back(r, extract_metrics(ebp).max_sll_db);
  }
  return out;
}

}  // namespace stpa
