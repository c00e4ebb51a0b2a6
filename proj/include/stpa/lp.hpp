#pragma once

#include <Eigen/Dense>
#include <vector>

namespace stpa::lp {

enum class Status { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(Status s);

struct Solution {
  Status status = Status::kIterationLimit;
  Eigen::VectorXd x;
  double objective = 0.0;
  int pivots = 0;
};

/// min c^T x  s.t.  a_i^T x <= b_i, with x free.
///
/// Solved through its dual (min b^T y, A^T y = -c, y >= 0) by a dense
/// two-phase revised simplex. The dual has one row per primal variable, so
/// problems with few variables and many constraints stay cheap, and rows
/// added after a solve enter as new dual columns: the previous basis stays
/// feasible and the next solve() warm-starts from it.
class RowLp {
 public:
  explicit RowLp(Eigen::VectorXd cost);

  void add_row(const Eigen::VectorXd& a, double b);
  std::size_t row_count() const { return rows_.size(); }
  int variable_count() const { return static_cast<int>(cost_.size()); }

  Solution solve(int max_pivots = 200000);

 private:
  // Column j of the dual equality system in the sign-normalized form.
  Eigen::VectorXd column(int j) const;
  double dual_cost(int j, bool phase_one) const;
  bool refactor();
  int run_phase(bool phase_one, int max_pivots, int& pivots, Status& status);
  void drive_out_artificials();

  Eigen::VectorXd cost_;
  Eigen::VectorXd sign_;  // row flips making the dual right-hand side >= 0
  Eigen::VectorXd rhs_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<double> bounds_;
  std::vector<int> basis_;  // >= 0: primal row index; < 0: artificial -(i + 1)
  Eigen::MatrixXd basis_inv_;
  Eigen::VectorXd basic_values_;
  bool feasible_basis_ = false;
};

}  // namespace stpa::lp
