#include <random>

#include "doctest.h"
#include "lwocp/rng.hpp"
#include "lwocp/types.hpp"

using namespace lwocp;

namespace {

RawSeries scalar_series(std::initializer_list<double> xs, std::initializer_list<double> ys) {
  RawSeries raw;
  raw.x.resize(static_cast<Eigen::Index>(xs.size()), 1);
  raw.y.resize(static_cast<Eigen::Index>(ys.size()), 1);
  Eigen::Index i = 0;
  for (double v : xs) raw.x(i++, 0) = v;
  i = 0;
  for (double v : ys) raw.y(i++, 0) = v;
  return raw;
}

LiftedSequence random_sequence(int m, Rng& rng) {
  RawSeries raw;
  raw.x.resize(m, 2);
  raw.y.resize(m, 1);
  for (int i = 0; i < m; ++i) {
    raw.x(i, 0) = rng.normal();
    raw.x(i, 1) = rng.normal();
    raw.y(i, 0) = rng.normal();
  }
  return lift(raw, 0);
}

bool points_equal(const AugmentedPoint& a, const AugmentedPoint& b) {
  if (a.is_dummy() != b.is_dummy()) return false;
  if (a.is_dummy()) return true;
  return a.x().flat() == b.x().flat() && a.y() == b.y();
}

bool sequences_equal(const LiftedSequence& a, const LiftedSequence& b) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    if (!points_equal(a.points[static_cast<std::size_t>(i)], b.points[static_cast<std::size_t>(i)]))
      return false;
  return true;
}

}  // namespace

TEST_CASE("lift with no memory is the identity") {
  const auto raw = scalar_series({1, 2, 3}, {10, 20, 30});
  const auto seq = lift(raw, 0);
  REQUIRE(seq.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const auto& p = seq.points[static_cast<std::size_t>(i)];
    CHECK(p.x().history.empty());
    CHECK(p.x().current[0] == raw.x(i, 0));
    CHECK(p.y()[0] == raw.y(i, 0));
  }
}

TEST_CASE("lift with memory one keeps the previous pair") {
  const auto raw = scalar_series({1, 2}, {5, 6});
  const auto seq = lift(raw, 1);
  REQUIRE(seq.size() == 1);
  const auto& p = seq.points[0];
  REQUIRE(p.x().history.size() == 1);
  CHECK(p.x().history[0].x[0] == 1);
  CHECK(p.x().history[0].y[0] == 5);
  CHECK(p.x().current[0] == 2);
  CHECK(p.y()[0] == 6);
  CHECK(p.x().flat_size() == 3);
}

TEST_CASE("autoregressive lift carries only past responses") {
  RawSeries raw;
  raw.x.resize(3, 0);  // no exogenous covariates
  raw.y.resize(3, 1);
  raw.y << 1, 2, 3;
  const auto seq = lift(raw, 2);
  REQUIRE(seq.size() == 1);
  const auto& p = seq.points[0];
  REQUIRE(p.x().history.size() == 2);
  CHECK(p.x().history[0].y[0] == 1);
  CHECK(p.x().history[1].y[0] == 2);
  CHECK(p.x().current.size() == 0);
  CHECK(p.y()[0] == 3);
  const Vec flat = p.x().flat();
  REQUIRE(flat.size() == 2);
  CHECK(flat[0] == 1);
  CHECK(flat[1] == 2);
}

TEST_CASE("lift rejects series shorter than the memory") {
  const auto raw = scalar_series({1, 2}, {1, 2});
  CHECK_THROWS_AS(lift(raw, 2), std::invalid_argument);
  CHECK_THROWS_AS(lift(raw, 5), std::invalid_argument);
}

TEST_CASE("mask blanks the window and nothing else") {
  Rng rng(7);
  const auto seq = random_sequence(5, rng);
  const auto masked = mask(seq, 2, 2);
  REQUIRE(masked.size() == 5);
  CHECK(points_equal(masked.points[0], seq.points[0]));
  CHECK(points_equal(masked.points[1], seq.points[1]));
  CHECK(masked.points[2].is_dummy());
  CHECK(masked.points[3].is_dummy());
  CHECK(points_equal(masked.points[4], seq.points[4]));
}

TEST_CASE("mask at k = -window is the identity") {
  Rng rng(8);
  const auto seq = random_sequence(6, rng);
  CHECK(sequences_equal(mask(seq, -3, 3), seq));
}

TEST_CASE("out-of-range start indices fold back modulo m + window") {
  Rng rng(9);
  const auto seq = random_sequence(5, rng);
  // k = 6 with window 2: k' = ((6+2) mod 7) - 2 = -1, masking only index 1.
  const auto masked = mask(seq, 6, 2);
  CHECK(masked.points[0].is_dummy());
  for (int i = 1; i < 5; ++i) CHECK(!masked.points[static_cast<std::size_t>(i)].is_dummy());
}

TEST_CASE("mask rejects windows as long as the sequence") {
  Rng rng(10);
  const auto seq = random_sequence(4, rng);
  CHECK_THROWS_AS(mask(seq, 0, 4), std::invalid_argument);
  CHECK_NOTHROW(mask(seq, 0, 3));
}

TEST_CASE("training view drops dummies and keeps order") {
  Rng rng(11);
  auto seq = random_sequence(3, rng);
  seq.points[1] = AugmentedPoint::dummy();
  const auto view = training_view(seq);
  REQUIRE(view.size() == 2);
  CHECK(points_equal(view[0], seq.points[0]));
  CHECK(points_equal(view[1], seq.points[2]));

  LiftedSequence all_dummy;
  all_dummy.points.assign(3, AugmentedPoint::dummy());
  CHECK(training_view(all_dummy).empty());

  const auto full = random_sequence(4, rng);
  CHECK(training_view(full).size() == 4);
}

TEST_CASE("mask composition commutes and is idempotent") {
  Rng rng(12);
  std::mt19937_64 pick(3);
  for (int it = 0; it < 200; ++it) {
    const int m = 2 + static_cast<int>(pick() % 6);
    const auto seq = random_sequence(m, rng);
    const int tau1 = static_cast<int>(pick() % static_cast<std::uint64_t>(m));
    const int tau2 = static_cast<int>(pick() % static_cast<std::uint64_t>(m));
    const long k1 = static_cast<long>(pick() % 40) - 20;
    const long k2 = static_cast<long>(pick() % 40) - 20;
    CHECK(sequences_equal(mask(mask(seq, k1, tau1), k2, tau2), mask(mask(seq, k2, tau2), k1, tau1)));
    CHECK(sequences_equal(mask(mask(seq, k1, tau1), k1, tau1), mask(seq, k1, tau1)));
  }
}

TEST_CASE("lift before mask keeps lagged history inside retained points") {
  RawSeries raw;
  raw.x.resize(6, 1);
  raw.y.resize(6, 1);
  raw.x << 1, 2, 3, 4, 5, 6;
  raw.y << 10, 20, 30, 40, 50, 60;
  const auto seq = lift(raw, 2);
  REQUIRE(seq.size() == 4);

  const auto masked = mask(seq, 0, 2);  // masks lifted points 1..2 (raw times 3..4)
  CHECK(masked.points[0].is_dummy());
  CHECK(masked.points[1].is_dummy());
  // Point 3 (raw time 5) retains raw history (x3,y3),(x4,y4) even though the
  // lifted point covering time 4 was masked.
  const auto& p = masked.points[2];
  CHECK(p.x().history[0].x[0] == 3);
  CHECK(p.x().history[0].y[0] == 30);
  CHECK(p.x().history[1].x[0] == 4);
  CHECK(p.x().history[1].y[0] == 40);

  // Responses of a dummy-free lift match the raw tail.
  const auto view = training_view(seq);
  REQUIRE(view.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(view[static_cast<std::size_t>(i)].y()[0] == raw.y(i + 2, 0));
}
