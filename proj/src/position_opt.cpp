#include "stpa/position_opt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "parallel.hpp"
#include "stpa/lp.hpp"

namespace stpa {

namespace {

// Per-sample, per-subarray partial sums (1/N) sum_{n in s} e^{jk zeta (u x_n + v y_n)}.
struct PartialFields {
  std::size_t samples = 0;
  std::size_t subarrays = 0;
  std::vector<cdouble> values;  // row-major [sample][subarray]

  cdouble at(std::size_t p, std::size_t s) const { return values[p * subarrays + s]; }
};

PartialFields partial_fields(const SubarrayLayout& layout, double zeta, std::span<const UV> samples) {
  PartialFields pf;
  pf.samples = samples.size();
  pf.subarrays = layout.subarrays.size();
  pf.values.resize(pf.samples * pf.subarrays);

  std::vector<std::vector<Point2>> pos(pf.subarrays);
  for (std::size_t s = 0; s < pf.subarrays; ++s)
    for (const auto& t : layout.subarrays[s].tiles)
      for (const auto& off : t.element_offsets) pos[s].push_back(layout.subarrays[s].center + off);
  const double inv_n = 1.0 / static_cast<double>(layout.element_count());
  const double c = kTwoPi * zeta;

  detail::parallel_for(pf.samples, [&](std::size_t p) {
    for (std::size_t s = 0; s < pf.subarrays; ++s) {
      double re = 0.0, im = 0.0;
      for (const auto& q : pos[s]) {
        const double ph = c * (samples[p].u * q.x + samples[p].v * q.y);
        re += std::cos(ph);
        im += std::sin(ph);
      }
      pf.values[p * pf.subarrays + s] = cdouble(re, im) * inv_n;
    }
  });
  return pf;
}

struct TilePairRow {
  std::size_t s, t;
  Point2 direction;  // unit vector from the tile in t to the tile in s
  double rhs;
};

std::vector<TilePairRow> spacing_rows(const SubarrayLayout& layout, double min_distance, double mu) {
  std::vector<std::vector<Point2>> centers(layout.subarrays.size());
  for (std::size_t s = 0; s < layout.subarrays.size(); ++s)
    for (const auto& t : layout.subarrays[s].tiles)
      centers[s].push_back(layout.subarrays[s].center + t.phase_center_offset());

  // Two subarrays can approach each other by at most 2 sqrt(2) mu per step.
  const double horizon = min_distance + 2.0 * std::sqrt(2.0) * mu;
  std::vector<TilePairRow> rows;
  for (std::size_t s = 0; s < centers.size(); ++s)
    for (std::size_t t = s + 1; t < centers.size(); ++t)
      for (const auto& p : centers[s])
        for (const auto& q : centers[t]) {
          const double d = distance(p, q);
          if (d >= horizon || d == 0.0) continue;
          // Projected spacing after the step must reach min_distance, or not
          // shrink when the pair already sits below it.
          rows.push_back({s, t, (1.0 / d) * (p - q), std::max(d - min_distance, 0.0)});
        }
  return rows;
}

}  // namespace

void PositionOptConfig::validate() const {
  if (!(mu >= 0.0)) throw std::invalid_argument("step bound mu must be >= 0");
  if (!(rb_tilde > 0.0)) throw std::invalid_argument("main-beam radius must be positive");
  if (!(grid.step_deg > 0.0)) throw std::invalid_argument("angle step must be positive");
  if (!(zeta >= 1.0)) throw std::invalid_argument("zeta must be >= 1");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
}

std::vector<UV> sidelobe_samples(const PositionOptConfig& config) {
  const double r2 = config.rb_tilde * config.rb_tilde;
  std::vector<UV> out;
  for (const auto& p : angle_grid_uv(config.grid))
    if (p.u * p.u + p.v * p.v >= r2) out.push_back(p);
  return out;
}

cdouble linearized_field(const SubarrayLayout& layout, std::span<const SubarrayShift> shifts,
                         double zeta, double ut, double vt) {
  if (shifts.size() != layout.subarrays.size())
    throw std::invalid_argument("one shift per subarray expected");
  const double c = kTwoPi * zeta;
  cdouble acc{0.0, 0.0};
  for (std::size_t s = 0; s < layout.subarrays.size(); ++s) {
    const auto& sub = layout.subarrays[s];
    const cdouble correction(1.0, c * (ut * shifts[s].eps + vt * shifts[s].beta));
    for (const auto& t : sub.tiles)
      for (const auto& off : t.element_offsets) {
        const Point2 q = sub.center + off;
        acc += std::polar(1.0, c * (ut * q.x + vt * q.y)) * correction;
      }
  }
  return acc / static_cast<double>(layout.element_count());
}

cdouble shifted_field(const SubarrayLayout& layout, std::span<const SubarrayShift> shifts,
                      double zeta, double ut, double vt) {
  const auto moved = apply_shifts(layout, shifts);
  const double c = kTwoPi * zeta;
  cdouble acc{0.0, 0.0};
  for (const auto& sub : moved.subarrays)
    for (const auto& t : sub.tiles)
      for (const auto& off : t.element_offsets) {
        const Point2 q = sub.center + off;
        acc += std::polar(1.0, c * (ut * q.x + vt * q.y));
      }
  return acc / static_cast<double>(moved.element_count());
}

SubarrayLayout apply_shifts(const SubarrayLayout& layout, std::span<const SubarrayShift> shifts) {
  if (shifts.size() != layout.subarrays.size())
    throw std::invalid_argument("one shift per subarray expected");
  SubarrayLayout out = layout;
  for (std::size_t s = 0; s < shifts.size(); ++s)
    out.subarrays[s].center = out.subarrays[s].center + Point2{shifts[s].eps, shifts[s].beta};
  return out;
}

double max_sidelobe_db(const SubarrayLayout& layout, double zeta, std::span<const UV> samples) {
  const auto geom = geometry_from_layout(layout);
  const auto values = expanded_beam_values(geom, zeta, samples);
  return power_db(*std::max_element(values.begin(), values.end()));
}

SubproblemResult solve_position_subproblem(const SubarrayLayout& layout,
                                           const PositionOptConfig& config,
                                           std::span<const UV> sidelobe_set) {
  config.validate();
  if (sidelobe_set.empty()) throw SubproblemError("empty sidelobe sample set");
  const std::size_t S = layout.subarrays.size();
  const std::size_t P = sidelobe_set.size();
  const auto pf = partial_fields(layout, config.zeta, sidelobe_set);

  std::vector<cdouble> base(P);
  for (std::size_t p = 0; p < P; ++p) {
    cdouble a{0.0, 0.0};
    for (std::size_t s = 0; s < S; ++s) a += pf.at(p, s);
    base[p] = a;
  }

  SubproblemResult result;
  result.shifts.assign(S, {});
  if (config.mu == 0.0) {
    for (const auto& a : base) result.gamma = std::max(result.gamma, std::abs(a));
    result.lp_gamma = result.gamma;
    return result;
  }

  // Variables: scaled shifts (eps_s / mu, beta_s / mu) for each subarray, then gamma.
  const int nv = static_cast<int>(2 * S + 1);
  const double kz = kTwoPi * config.zeta * config.mu;
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(nv);
  cost[nv - 1] = 1.0;
  lp::RowLp lp(cost);

  for (int i = 0; i < nv - 1; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row[i] = 1.0;
    lp.add_row(row, 1.0);
    row[i] = -1.0;
    lp.add_row(row, 1.0);
  }

  for (const auto& pr : spacing_rows(layout, config.min_tile_distance, config.mu)) {
    // -dir . (shift_s - shift_t) * mu <= rhs
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    row[2 * pr.s] = -pr.direction.x * config.mu;
    row[2 * pr.s + 1] = -pr.direction.y * config.mu;
    row[2 * pr.t] = pr.direction.x * config.mu;
    row[2 * pr.t + 1] = pr.direction.y * config.mu;
    lp.add_row(row, pr.rhs);
  }

  // Tangent cut of |a + b^T z| <= gamma at phase psi:
  // Re(e^{-j psi} b)^T z - gamma <= -Re(e^{-j psi} a).
  auto add_cut = [&](std::size_t p, double psi) {
    const cdouble rot = std::polar(1.0, -psi);
    Eigen::VectorXd row(nv);
    const cdouble ju(0.0, kz * sidelobe_set[p].u);
    const cdouble jv(0.0, kz * sidelobe_set[p].v);
    for (std::size_t s = 0; s < S; ++s) {
      row[2 * s] = std::real(rot * ju * pf.at(p, s));
      row[2 * s + 1] = std::real(rot * jv * pf.at(p, s));
    }
    row[nv - 1] = -1.0;
    lp.add_row(row, -std::real(rot * base[p]));
    ++result.cuts;
  };

  auto field_at = [&](std::size_t p, const Eigen::VectorXd& z) {
    cdouble gx{0.0, 0.0}, gy{0.0, 0.0};
    for (std::size_t s = 0; s < S; ++s) {
      gx += pf.at(p, s) * z[2 * s];
      gy += pf.at(p, s) * z[2 * s + 1];
    }
    return base[p] + cdouble(0.0, kz) * (sidelobe_set[p].u * gx + sidelobe_set[p].v * gy);
  };

  // Seed with the strongest sidelobes of the current layout.
  std::vector<std::size_t> order(P);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t seed_count = std::min<std::size_t>(P, 64);
  std::partial_sort(order.begin(), order.begin() + seed_count, order.end(),
                    [&](std::size_t a, std::size_t b) { return std::abs(base[a]) > std::abs(base[b]); });
  for (std::size_t i = 0; i < seed_count; ++i) add_cut(order[i], std::arg(base[order[i]]));

  constexpr int kMaxRounds = 5000;
  constexpr std::size_t kCutsPerRound = 48;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(nv);
  std::vector<double> modulus(P);
  for (int round = 0; round < kMaxRounds; ++round) {
    const auto sol = lp.solve();
    if (sol.status != lp::Status::kOptimal)
      throw SubproblemError(std::string("position subproblem LP ended ") + lp::to_string(sol.status));
    z = sol.x;
    result.lp_gamma = z[nv - 1];
    result.cut_rounds = round + 1;

    for (std::size_t p = 0; p < P; ++p) modulus[p] = std::abs(field_at(p, z));
    std::vector<std::size_t> violated;
    for (std::size_t p = 0; p < P; ++p)
      if (modulus[p] > result.lp_gamma + config.cut_tolerance) violated.push_back(p);
    if (violated.empty()) break;
    const std::size_t take = std::min(kCutsPerRound, violated.size());
    std::partial_sort(violated.begin(), violated.begin() + take, violated.end(),
                      [&](std::size_t a, std::size_t b) { return modulus[a] > modulus[b]; });
    for (std::size_t i = 0; i < take; ++i) add_cut(violated[i], std::arg(field_at(violated[i], z)));
  }

  result.gamma = *std::max_element(modulus.begin(), modulus.end());
  for (std::size_t s = 0; s < S; ++s)
    result.shifts[s] = {config.mu * z[2 * s], config.mu * z[2 * s + 1]};

  for (const auto& pr : spacing_rows(layout, config.min_tile_distance, config.mu)) {
    const double lhs = -config.mu * (pr.direction.x * (z[2 * pr.s] - z[2 * pr.t]) +
                                     pr.direction.y * (z[2 * pr.s + 1] - z[2 * pr.t + 1]));
    result.max_violation = std::max(result.max_violation, lhs - pr.rhs);
  }
  return result;
}

PositionOptResult optimize_subarray_positions(const SubarrayLayout& layout,
                                              const PositionOptConfig& config) {
  config.validate();
  if (layout.subarrays.size() < 2) throw std::invalid_argument("position optimization needs >= 2 subarrays");
  const auto samples = sidelobe_samples(config);

  PositionOptResult out;
  out.layout = layout;
  out.initial_sll_db = max_sidelobe_db(layout, config.zeta, samples);

  // A step is kept only if neither the linearized optimum nor the exact
  // sidelobe level gets worse; otherwise the step bound is halved.
  constexpr int kMaxHalvings = 6;
  double current_exact_db = out.initial_sll_db;
  double last_gamma_db = out.initial_sll_db;
  PositionOptConfig step = config;
  for (int it = 0; it < config.max_iterations; ++it) {
    bool accepted = false;
    double gamma_db = 0.0;
    for (int h = 0; h <= kMaxHalvings && !accepted; ++h, step.mu *= 0.5) {
      const auto sub = solve_position_subproblem(out.layout, step, samples);
      gamma_db = 20.0 * std::log10(sub.gamma);
      auto candidate = apply_shifts(out.layout, sub.shifts);
      const double exact_db = max_sidelobe_db(candidate, config.zeta, samples);
      if (gamma_db > last_gamma_db || exact_db > current_exact_db) continue;
      accepted = true;
      out.layout = std::move(candidate);
      out.trace.gamma_db.push_back(gamma_db);
      out.trace.exact_sll_db.push_back(exact_db);
      out.trace.step_bound.push_back(step.mu);
      out.trace.shifts.push_back(sub.shifts);
      current_exact_db = exact_db;
    }
    step.mu = config.mu;
    if (!accepted) break;
    if (last_gamma_db - gamma_db < config.tolerance_db) break;
    last_gamma_db = gamma_db;
  }
  return out;
}

}  // namespace stpa
