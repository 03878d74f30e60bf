#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "lwocp/lp.hpp"
#include "lwocp/rng.hpp"

using namespace lwocp;

namespace {

// Independent oracle: every vertex of {x >= 0 : Ax = b} is supported on a
// linearly independent column subset, so enumerating all independent subsets,
// solving on each support and keeping the feasible solutions finds every
// vertex. Exact for problems whose optimum is attained at a vertex, i.e. any
// bounded feasible LP here. Rank-deficient constraint matrices are fine.
struct VertexScan {
  bool feasible = false;
  double best = std::numeric_limits<double>::infinity();
};

VertexScan enumerate_vertices(const LPProblem& p) {
  VertexScan out;
  const Eigen::Index m = p.a_eq.rows();
  const Eigen::Index n = p.a_eq.cols();
  REQUIRE(n <= 16);  // 2^n subsets

  if (p.b_eq.cwiseAbs().maxCoeff() < 1e-12) {
    out.feasible = true;  // x = 0 (empty support)
    out.best = 0.0;
  }
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    if (static_cast<Eigen::Index>(cols.size()) > m) continue;

    Eigen::MatrixXd sub(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = p.a_eq.col(cols[j]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(cols.size())) continue;  // dependent support

    const Eigen::VectorXd xs = qr.solve(p.b_eq);
    if ((sub * xs - p.b_eq).cwiseAbs().maxCoeff() > 1e-8) continue;  // inconsistent
    if ((xs.array() < -1e-9).any()) continue;

    double value = 0.0;
    for (std::size_t j = 0; j < cols.size(); ++j) value += p.c[cols[j]] * xs[static_cast<Eigen::Index>(j)];
    out.feasible = true;
    out.best = std::min(out.best, value);
  }
  return out;
}

LPProblem make(std::initializer_list<double> c,
               std::initializer_list<std::initializer_list<double>> a,
               std::initializer_list<double> b) {
  LPProblem p;
  p.c.resize(static_cast<Eigen::Index>(c.size()));
  Eigen::Index i = 0;
  for (double v : c) p.c[i++] = v;
  p.a_eq.resize(static_cast<Eigen::Index>(a.size()), p.c.size());
  i = 0;
  for (const auto& row : a) {
    Eigen::Index j = 0;
    for (double v : row) p.a_eq(i, j++) = v;
    ++i;
  }
  p.b_eq.resize(static_cast<Eigen::Index>(b.size()));
  i = 0;
  for (double v : b) p.b_eq[i++] = v;
  return p;
}

}  // namespace

TEST_CASE("one-variable problems") {
  const auto sol = solve_lp(make({1}, {{1}}, {1}));
  CHECK(sol.status == LPStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.x[0] == doctest::Approx(1.0));
}

TEST_CASE("degenerate objective picks a vertex of the simplex") {
  const auto sol = solve_lp(make({1, 1}, {{1, 1}}, {1}));
  CHECK(sol.status == LPStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.x.sum() == doctest::Approx(1.0));
  CHECK(sol.x.minCoeff() >= -1e-12);
}

TEST_CASE("infeasible and unbounded problems are flagged distinctly") {
  // x = -1 with x >= 0 cannot hold.
  CHECK(solve_lp(make({1}, {{1}}, {-1})).status == LPStatus::Infeasible);
  // y = 1 fixes y but leaves x free to grow along -x.
  CHECK(solve_lp(make({-1, 0}, {{0, 1}}, {1})).status == LPStatus::Unbounded);
}

TEST_CASE("redundant rows are tolerated") {
  const auto sol = solve_lp(make({2, 3}, {{1, 1}, {2, 2}}, {1, 2}));
  CHECK(sol.status == LPStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0));
}

TEST_CASE("transportation instance matches exhaustive vertex enumeration") {
  // Supplies (2, 3, 4), demands (3, 3, 3); variables x_{ij} row-major.
  LPProblem p;
  p.c.resize(9);
  p.c << 8, 6, 10, 9, 12, 13, 14, 9, 16;
  p.a_eq = Eigen::MatrixXd::Zero(6, 9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p.a_eq(i, 3 * i + j) = 1.0;      // supply rows
      p.a_eq(3 + j, 3 * i + j) = 1.0;  // demand rows
    }
  p.b_eq.resize(6);
  p.b_eq << 2, 3, 4, 3, 3, 3;

  const auto sol = solve_lp(p);
  REQUIRE(sol.status == LPStatus::Optimal);
  const auto scan = enumerate_vertices(p);
  REQUIRE(scan.feasible);
  CHECK(sol.objective == doctest::Approx(scan.best).epsilon(1e-9));
  CHECK((p.a_eq * sol.x - p.b_eq).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(sol.x.minCoeff() >= -1e-12);
}

TEST_CASE("random instances agree with brute force") {
  Rng rng(42);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int it = 0; it < 100; ++it) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng.uniform_int(6));
    const Eigen::Index n =
        m + static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(9 - m)));
    LPProblem p;
    p.a_eq.resize(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) p.a_eq(i, j) = rng.normal();
    p.c.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) p.c[j] = rng.normal();

    if (it % 3 == 0) {
      // Arbitrary right-hand side; may be infeasible.
      p.b_eq.resize(m);
      for (Eigen::Index i = 0; i < m; ++i) p.b_eq[i] = rng.normal();
    } else {
      // Feasible by construction.
      Eigen::VectorXd x0(n);
      for (Eigen::Index j = 0; j < n; ++j) x0[j] = rng.uniform();
      p.b_eq = p.a_eq * x0;
    }

    const auto sol = solve_lp(p);
    const auto scan = enumerate_vertices(p);
    if (sol.status == LPStatus::Optimal) {
      ++optimal_seen;
      REQUIRE(scan.feasible);
      CHECK(sol.objective == doctest::Approx(scan.best).epsilon(1e-7));
      CHECK((p.a_eq * sol.x - p.b_eq).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(sol.x.minCoeff() >= -1e-9);
    } else if (sol.status == LPStatus::Infeasible) {
      ++infeasible_seen;
      CHECK(!scan.feasible);
    }
    // Unbounded statuses are exercised by the dedicated case above.
  }
  CHECK(optimal_seen >= 40);
  CHECK(infeasible_seen >= 5);
}

TEST_CASE("variable-count guard") {
  LPProblem p;
  p.c = Eigen::VectorXd::Zero(10001);
  p.a_eq = Eigen::MatrixXd::Zero(1, 10001);
  p.b_eq = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(solve_lp(p), std::invalid_argument);
}
