#include "lwocp/lp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lwocp {

namespace {

constexpr double kPivotEps = 1e-11;
constexpr int kDegenerateRunLimit = 64;

// Tableau layout: rows 0..m-1 are constraints, row m is the reduced-cost row;
// column n_total is the right-hand side.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<Eigen::Index> basis, Eigen::Index n_real)
      : t_(std::move(t)), basis_(std::move(basis)), n_real_(n_real) {}

  Eigen::Index rows() const { return t_.rows() - 1; }
  Eigen::Index cols() const { return t_.cols() - 1; }
  double rhs(Eigen::Index r) const { return t_(r, t_.cols() - 1); }
  double objective() const { return -t_(t_.rows() - 1, t_.cols() - 1); }
  const std::vector<Eigen::Index>& basis() const { return basis_; }

  void set_cost_row(const Eigen::VectorXd& c) {
    const Eigen::Index m = rows(), w = t_.cols();
    t_.row(m).setZero();
    t_.row(m).head(c.size()) = c.transpose();
    for (Eigen::Index r = 0; r < m; ++r) {
      const double cb = basis_[static_cast<std::size_t>(r)] < c.size()
                            ? c[basis_[static_cast<std::size_t>(r)]]
                            : 0.0;
      if (cb != 0.0) t_.row(m).head(w) -= cb * t_.row(r).head(w);
    }
  }

  // Runs the simplex over the first `n_cols` columns. Returns false when a
  // negative reduced cost column has no positive entry (unbounded).
  bool iterate(Eigen::Index n_cols, double tol) {
    int degenerate_run = 0;
    bool bland = false;
    const Eigen::Index m = rows();
    for (;;) {
      // Entering column.
      Eigen::Index enter = -1;
      if (bland) {
        for (Eigen::Index j = 0; j < n_cols; ++j)
          if (t_(m, j) < -tol) {
            enter = j;
            break;
          }
      } else {
        double best = -tol;
        for (Eigen::Index j = 0; j < n_cols; ++j)
          if (t_(m, j) < best) {
            best = t_(m, j);
            enter = j;
          }
      }
      if (enter < 0) return true;  // optimal

      // Ratio test; ties resolve to the smallest basis index so Bland's rule
      // is honored whenever it is active.
      Eigen::Index leave = -1;
      double best_ratio = 0.0;
      for (Eigen::Index r = 0; r < m; ++r) {
        const double a = t_(r, enter);
        if (a <= kPivotEps) continue;
        const double ratio = rhs(r) / a;
        if (leave < 0 || ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;  // unbounded direction

      if (best_ratio <= 1e-12) {
        if (++degenerate_run >= kDegenerateRunLimit) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col) {
    t_.row(row) /= t_(row, col);
    for (Eigen::Index r = 0; r < t_.rows(); ++r) {
      if (r == row) continue;
      const double f = t_(r, col);
      if (f != 0.0) t_.row(r) -= f * t_.row(row);
    }
    basis_[static_cast<std::size_t>(row)] = col;
  }

  // Pivots basic artificials onto real columns where possible and drops the
  // redundant rows that remain.
  void eliminate_artificials() {
    const Eigen::Index m = rows();
    std::vector<Eigen::Index> drop;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < n_real_) continue;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n_real_; ++j)
        if (std::abs(t_(r, j)) > kPivotEps) {
          enter = j;
          break;
        }
      if (enter >= 0)
        pivot(r, enter);
      else
        drop.push_back(r);
    }
    if (drop.empty()) return;
    Eigen::MatrixXd kept(t_.rows() - static_cast<Eigen::Index>(drop.size()), t_.cols());
    std::vector<Eigen::Index> kept_basis;
    Eigen::Index at = 0;
    std::size_t drop_at = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
      if (drop_at < drop.size() && drop[drop_at] == r) {
        ++drop_at;
        continue;
      }
      kept.row(at++) = t_.row(r);
      kept_basis.push_back(basis_[static_cast<std::size_t>(r)]);
    }
    kept.row(at) = t_.row(m);
    t_ = std::move(kept);
    basis_ = std::move(kept_basis);
  }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_real_);
    for (Eigen::Index r = 0; r < rows(); ++r) {
      const Eigen::Index b = basis_[static_cast<std::size_t>(r)];
      if (b < n_real_) x[b] = rhs(r);
    }
    return x;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<Eigen::Index> basis_;
  Eigen::Index n_real_;
};

}  // namespace

LPSolution solve_lp(const LPProblem& prob, double tol) {
  const Eigen::Index m = prob.a_eq.rows();
  const Eigen::Index n = prob.a_eq.cols();
  if (prob.c.size() != n || prob.b_eq.size() != m)
    throw std::invalid_argument("solve_lp: inconsistent dimensions");
  if (n > 10000) throw std::invalid_argument("solve_lp: too many variables");

  // Phase-1 tableau: [A | I | b] with b >= 0 and the artificial basis.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  t.block(0, 0, m, n) = prob.a_eq;
  t.block(0, n, m, m).setIdentity();
  t.col(n + m).head(m) = prob.b_eq;
  for (Eigen::Index r = 0; r < m; ++r)
    if (t(r, n + m) < 0.0) t.row(r) = -t.row(r);

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index r = 0; r < m; ++r) basis[static_cast<std::size_t>(r)] = n + r;

  Tableau tab(std::move(t), std::move(basis), n);

  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
  phase1_cost.tail(m).setOnes();
  tab.set_cost_row(phase1_cost);
  tab.iterate(n + m, tol);

  LPSolution sol;
  if (tab.objective() > 1e-8) {
    sol.status = LPStatus::Infeasible;
    return sol;
  }

  tab.eliminate_artificials();
  tab.set_cost_row(prob.c);
  if (!tab.iterate(n, tol)) {
    sol.status = LPStatus::Unbounded;
    return sol;
  }

  sol.status = LPStatus::Optimal;
  sol.x = tab.solution();
  sol.objective = prob.c.dot(sol.x);
  return sol;
}

}  // namespace lwocp
