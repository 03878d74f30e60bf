#pragma once

#include <Eigen/Dense>

namespace lwocp {

/// minimize c.x subject to a_eq x = b_eq, x >= 0.
struct LPProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPSolution {
  LPStatus status = LPStatus::Optimal;
  double objective = 0.0;
  Eigen::VectorXd x;
};

/// Dense two-phase tableau simplex. Pricing is Dantzig by default and falls
/// back to Bland's rule after a run of degenerate pivots, which guarantees
/// termination. Problems are limited to 10^4 variables.
LPSolution solve_lp(const LPProblem& prob, double tol = 1e-9);

}  // namespace lwocp
