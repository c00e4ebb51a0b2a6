#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "stpa/geometry.hpp"
#include "stpa/pattern.hpp"

namespace stpa {

struct PositionOptConfig {
  double zeta = 1.5;
  double rb_tilde = 0.043;           // main-beam exclusion radius in (u~, v~)
  double mu = 1.0 / 25.0;            // per-iteration step bound [wavelengths]
  double min_tile_distance = 1.0;    // cross-subarray phase-center spacing [wavelengths]
  int max_iterations = 60;
  AngleGridSpec grid{};              // sidelobe sweep, 1 deg by default
  double tolerance_db = 1e-3;        // stop when gamma improves by less than this
  double cut_tolerance = 1e-7;       // accepted |f| - gamma on the sidelobe set

  void validate() const;
};

/// Rigid translation of one subarray (epsilon along x, beta along y).
struct SubarrayShift {
  double eps = 0.0;
  double beta = 0.0;
};

struct SubproblemResult {
  std::vector<SubarrayShift> shifts;
  double gamma = 0.0;         // max linearized |f| over the sidelobe set at `shifts`
  double lp_gamma = 0.0;      // epigraph variable returned by the last LP
  double max_violation = 0.0; // worst distance-row violation (should be <= 1e-9)
  int cut_rounds = 0;
  int cuts = 0;
};

struct OptTrace {
  std::vector<double> gamma_db;       // linearized optimum per accepted iteration
  std::vector<double> exact_sll_db;   // exact max sidelobe after the step
  std::vector<double> step_bound;     // mu used for the accepted step
  std::vector<std::vector<SubarrayShift>> shifts;
};

struct PositionOptResult {
  SubarrayLayout layout;
  OptTrace trace;
  double initial_sll_db = 0.0;
};

class SubproblemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sidelobe sample set: the angle grid image with the disc u~^2 + v~^2 < rb~^2 removed.
std::vector<UV> sidelobe_samples(const PositionOptConfig& config);

/// First-order expanded field around the current layout:
/// (1/N) sum_n e^{jk zeta (u x_n + v y_n)} (1 + jk zeta u eps_s(n) + jk zeta v beta_s(n)).
cdouble linearized_field(const SubarrayLayout& layout, std::span<const SubarrayShift> shifts,
                         double zeta, double ut, double vt);

/// The same field evaluated exactly at the shifted positions.
cdouble shifted_field(const SubarrayLayout& layout, std::span<const SubarrayShift> shifts,
                      double zeta, double ut, double vt);

SubarrayLayout apply_shifts(const SubarrayLayout& layout, std::span<const SubarrayShift> shifts);

/// Max |f_zeta|^2 over `samples` in dB for the layout as it stands.
double max_sidelobe_db(const SubarrayLayout& layout, double zeta, std::span<const UV> samples);

/// Epigraph minimax step: minimize gamma subject to the linearized modulus
/// bound on every sidelobe sample, |eps|, |beta| <= mu per subarray and the
/// linearized cross-subarray tile spacing rows. Moduli are enforced by
/// tangent cuts added until every sample is within cut_tolerance of gamma.
SubproblemResult solve_position_subproblem(const SubarrayLayout& layout,
                                           const PositionOptConfig& config,
                                           std::span<const UV> sidelobe_set);

/// Iterated subproblems with step control; see README for the acceptance rule.
PositionOptResult optimize_subarray_positions(const SubarrayLayout& layout,
                                              const PositionOptConfig& config);

}  // namespace stpa
