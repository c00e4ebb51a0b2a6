#include "stpa/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stpa::lp {

namespace {
constexpr double kPivotTol = 1e-9;
constexpr double kPriceTol = 1e-10;
constexpr int kDegenerateSwitch = 50;
}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kIterationLimit: return "iteration limit";
  }
  return "unknown";
}

RowLp::RowLp(Eigen::VectorXd cost) : cost_(std::move(cost)) {
  const auto n = cost_.size();
  if (n == 0) throw std::invalid_argument("LP needs at least one variable");
  sign_.resize(n);
  rhs_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sign_[i] = -cost_[i] >= 0.0 ? 1.0 : -1.0;
    rhs_[i] = -cost_[i] * sign_[i];
  }
}

void RowLp::add_row(const Eigen::VectorXd& a, double b) {
  if (a.size() != cost_.size()) throw std::invalid_argument("LP row has the wrong length");
  rows_.push_back(a);
  bounds_.push_back(b);
}

Eigen::VectorXd RowLp::column(int j) const {
  if (j >= 0) return sign_.cwiseProduct(rows_[j]);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cost_.size());
  e[-j - 1] = 1.0;
  return e;
}

double RowLp::dual_cost(int j, bool phase_one) const {
  if (j < 0) return phase_one ? 1.0 : 0.0;
  return phase_one ? 0.0 : bounds_[j];
}

bool RowLp::refactor() {
  const auto n = cost_.size();
  Eigen::MatrixXd basis(n, n);
  for (Eigen::Index i = 0; i < n; ++i) basis.col(i) = column(basis_[i]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
  if (!lu.isInvertible()) return false;
  basis_inv_ = lu.inverse();
  basic_values_ = basis_inv_ * rhs_;
  return true;
}

int RowLp::run_phase(bool phase_one, int max_pivots, int& pivots, Status& status) {
  const auto n = cost_.size();
  const int m = static_cast<int>(rows_.size());
  std::vector<char> in_basis(m, 0);
  for (int b : basis_)
    if (b >= 0) in_basis[b] = 1;

  int degenerate = 0;
  while (true) {
    if (pivots >= max_pivots) {
      status = Status::kIterationLimit;
      return 1;
    }
    if (!refactor()) throw std::runtime_error("LP basis became singular");

    Eigen::VectorXd basic_cost(n);
    for (Eigen::Index i = 0; i < n; ++i) basic_cost[i] = dual_cost(basis_[i], phase_one);
    const Eigen::VectorXd pi = basis_inv_.transpose() * basic_cost;

    const bool bland = degenerate > kDegenerateSwitch;
    int entering = -1;
    double best = -kPriceTol;
    for (int j = 0; j < m; ++j) {
      if (in_basis[j]) continue;
      const double d = dual_cost(j, phase_one) - pi.dot(sign_.cwiseProduct(rows_[j]));
      if (d < best) {
        best = d;
        entering = j;
        if (bland) break;
      }
    }
    if (entering < 0) return 0;

    const Eigen::VectorXd w = basis_inv_ * column(entering);
    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool artificial = basis_[i] < 0;
      double t;
      if (!phase_one && artificial && std::abs(w[i]) > kPivotTol) {
        t = 0.0;  // a zero-level artificial leaves before it can move
      } else if (w[i] > kPivotTol) {
        t = std::max(0.0, basic_values_[i]) / w[i];
      } else {
        continue;
      }
      const bool better = t < ratio - 1e-12;
      const bool tie = std::abs(t - ratio) <= 1e-12 && leave >= 0;
      if (better || (tie && (bland ? basis_[i] < basis_[leave] : std::abs(w[i]) > std::abs(w[leave])))) {
        ratio = t;
        leave = static_cast<int>(i);
      }
    }
    if (leave < 0) {
      status = Status::kInfeasible;  // dual unbounded: primal rows contradict
      return 1;
    }
    degenerate = ratio < 1e-12 ? degenerate + 1 : 0;
    if (basis_[leave] >= 0) in_basis[basis_[leave]] = 0;
    basis_[leave] = entering;
    in_basis[entering] = 1;
    ++pivots;
  }
}

void RowLp::drive_out_artificials() {
  const auto n = cost_.size();
  const int m = static_cast<int>(rows_.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    if (basis_[r] >= 0) continue;
    if (!refactor()) throw std::runtime_error("LP basis became singular");
    std::vector<char> in_basis(m, 0);
    for (int b : basis_)
      if (b >= 0) in_basis[b] = 1;
    for (int j = 0; j < m; ++j) {
      if (in_basis[j]) continue;
      if (std::abs(basis_inv_.row(r).dot(column(j))) > 1e-7) {
        basis_[r] = j;
        break;
      }
    }
  }
}

Solution RowLp::solve(int max_pivots) {
  const auto n = cost_.size();
  Solution sol;
  Status status = Status::kOptimal;
  if (!feasible_basis_) {
    basis_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) basis_[i] = -static_cast<int>(i) - 1;
    if (run_phase(true, max_pivots, sol.pivots, status) != 0) {
      sol.status = status;
      return sol;
    }
    refactor();
    double infeasibility = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (basis_[i] < 0) infeasibility += basic_values_[i];
    if (infeasibility > 1e-9) {
      // Dual infeasible: the primal objective is unbounded below.
      sol.status = Status::kUnbounded;
      return sol;
    }
    drive_out_artificials();
    feasible_basis_ = true;
  }
  if (run_phase(false, max_pivots, sol.pivots, status) != 0) {
    sol.status = status;
    return sol;
  }
  refactor();
  Eigen::VectorXd basic_cost(n);
  for (Eigen::Index i = 0; i < n; ++i) basic_cost[i] = dual_cost(basis_[i], false);
  const Eigen::VectorXd pi = basis_inv_.transpose() * basic_cost;
  sol.x = sign_.cwiseProduct(pi);
  sol.objective = cost_.dot(sol.x);
  sol.status = Status::kOptimal;
  return sol;
}

}  // namespace stpa::lp
