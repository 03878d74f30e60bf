#pragma once

#include <limits>
#include <optional>
#include <span>

#include "lwocp/types.hpp"

namespace lwocp {

/// Conformity score families. AbsoluteResidual requires scalar responses;
/// EuclideanNorm works in any response dimension.
enum class ScoreKind { AbsoluteResidual, EuclideanNorm };

/// A response that may be the dummy mark.
using Response = std::optional<Vec>;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// score(y, yhat). Any dummy argument contributes zero score.
/// Throws on dimension mismatch between two concrete arguments.
double score(const Response& y, const Response& yhat, ScoreKind kind);

/// Empirical quantile: the k-th order statistic with k = ceil(level * m).
/// Levels are not restricted to (0,1]: k > m yields +infinity (the trivial
/// region) and k <= 0 yields the minimum. Ties are kept as duplicates.
/// Throws on an empty vector.
double quantile(std::span<const double> v, double level);

/// A conformal prediction region {y : score(y, center) <= radius}. The radius
/// may be +infinity (region = everything); a dummy center also accepts every
/// response, since comparisons against a dummy score zero.
struct PredictionRegion {
  Response center;
  double radius = 0.0;
  ScoreKind kind = ScoreKind::AbsoluteResidual;

  bool contains(const Vec& y) const;
};

}  // namespace lwocp
