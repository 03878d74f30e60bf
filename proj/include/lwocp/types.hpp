#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace lwocp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// One past observation stored inside a lifted covariate.
struct HistoryPair {
  Vec x;
  Vec y;
};

/// Memory-L covariate: the L most recent (covariate, response) pairs in time
/// order, oldest first, plus the current covariate. L = 0 means an empty
/// history; a zero-length `current` encodes the autoregressive convention of
/// a fixed placeholder covariate that predictors ignore.
struct LiftedCovariate {
  std::vector<HistoryPair> history;
  Vec current;

  Eigen::Index flat_size() const;

  /// Concatenation (x_{t-L}, y_{t-L}, ..., x_{t-1}, y_{t-1}, x_t).
  /// Regression-style predictors operate on this vector.
  Vec flat() const;
};

struct ConcretePoint {
  LiftedCovariate x;
  Vec y;
};

/// A sequence entry: either a concrete (lifted covariate, response) pair or
/// the dummy mark. Dummies carry no payload; they are ignored by training,
/// mapped to themselves by predictors, and contribute zero score.
class AugmentedPoint {
 public:
  AugmentedPoint() = default;  // dummy
  AugmentedPoint(LiftedCovariate x, Vec y) : value_(ConcretePoint{std::move(x), std::move(y)}) {}

  static AugmentedPoint dummy() { return {}; }

  bool is_dummy() const { return !value_.has_value(); }
  const LiftedCovariate& x() const { return value_.value().x; }
  const Vec& y() const { return value_.value().y; }

 private:
  std::optional<ConcretePoint> value_;
};

/// Raw covariate/response series. `x` may have zero columns (autoregressive
/// mode); `start_index` is the label of the first row and is metadata only.
struct RawSeries {
  Mat x;  // T x d_x
  Mat y;  // T x d_y
  long start_index = 1;

  Eigen::Index length() const { return y.rows(); }
};

/// The object every method consumes: an ordered vector of augmented points
/// together with the memory parameter used to build it. Indexing of the
/// points is 1-based throughout the interfaces of this library.
struct LiftedSequence {
  std::vector<AugmentedPoint> points;
  int memory = 0;
  long origin = 1;

  int size() const { return static_cast<int>(points.size()); }
};

/// Memory-L lifting. Produces T - L points; point t carries the history
/// (x_{t-L}, y_{t-L}), ..., (x_{t-1}, y_{t-1}), the current covariate x_t and
/// the response y_t. Lifting happens before any masking, so masking a window
/// never rewrites lagged raw values held inside retained points.
/// Throws std::invalid_argument if the series has at most `memory` rows.
LiftedSequence lift(const RawSeries& raw, int memory);

/// Replaces entries k+1, ..., k+window by dummies (1-based, clipped to the
/// sequence). Out-of-range k is folded back via
///   k' = ((k + window) mod (m + window)) - window,
/// so k = -window is the identity. Throws if window >= sequence length.
LiftedSequence mask(const LiftedSequence& seq, long k, int window);

/// The concrete points of `seq`, order preserved. May be empty.
std::vector<AugmentedPoint> training_view(const LiftedSequence& seq);

}  // namespace lwocp
