#include "lwocp/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lwocp {

double score(const Response& y, const Response& yhat, ScoreKind kind) {
  if (!y.has_value() || !yhat.has_value()) return 0.0;
  const Vec& a = *y;
  const Vec& b = *yhat;
  if (a.size() != b.size()) throw std::invalid_argument("score: dimension mismatch");
  switch (kind) {
    case ScoreKind::AbsoluteResidual:
      if (a.size() != 1) throw std::invalid_argument("score: absolute residual needs scalar responses");
      return std::abs(a[0] - b[0]);
    case ScoreKind::EuclideanNorm:
      return (a - b).norm();
  }
  throw std::logic_error("score: unknown kind");
}

double quantile(std::span<const double> v, double level) {
  if (v.empty()) throw std::invalid_argument("quantile: empty vector");
  const auto m = static_cast<double>(v.size());
  const double k = std::ceil(level * m);
  if (k > m) return kInfinity;
  if (k <= 0.0) return *std::min_element(v.begin(), v.end());
  std::vector<double> sorted(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(k) - 1;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(idx), sorted.end());
  return sorted[idx];
}

bool PredictionRegion::contains(const Vec& y) const {
  if (radius == kInfinity) return true;
  return score(y, center, kind) <= radius;
}

}  // namespace lwocp
