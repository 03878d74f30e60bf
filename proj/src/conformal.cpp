#include "lwocp/conformal.hpp"

#include <stdexcept>

#include "lwocp/parallel.hpp"

namespace lwocp {

namespace {

Response response_of(const AugmentedPoint& p) {
  if (p.is_dummy()) return std::nullopt;
  return p.y();
}

std::optional<LiftedCovariate> covariate_of(const AugmentedPoint& p) {
  if (p.is_dummy()) return std::nullopt;
  return p.x();
}

}  // namespace

LwoResult lwo(const LiftedSequence& seq, double alpha, int window, const PredictorSpec& spec,
              ScoreKind kind, double inflation, std::uint64_t rng_seed) {
  const int n = seq.size() - 1;
  if (window < 0) throw std::invalid_argument("lwo: window must be nonnegative");
  if (n <= window) throw std::invalid_argument("lwo: window too large");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("lwo: alpha must lie in (0,1)");
  if (!(inflation >= 0.0)) throw std::invalid_argument("lwo: inflation must be nonnegative");

  LwoResult result;
  result.window = window;
  result.inflation = inflation;
  result.scores.assign(static_cast<std::size_t>(n), 0.0);

  // The n calibration fits are independent; scores land in their own slots so
  // the output does not depend on scheduling.
  detail::parallel_for(n, [&](int idx) {
    const int k = idx + 1;
    const int cut_hi = std::min(k + window, n);  // masked block k..cut_hi, inclusive
    std::vector<AugmentedPoint> train;
    train.reserve(static_cast<std::size_t>(n - (cut_hi - k + 1)));
    for (int j = 1; j <= n; ++j) {
      if (j >= k && j <= cut_hi) continue;
      train.push_back(seq.points[static_cast<std::size_t>(j - 1)]);
    }
    const FittedPredictor f = fit(spec, train, rng_seed);
    const AugmentedPoint& proxy = seq.points[static_cast<std::size_t>(k - 1)];
    result.scores[static_cast<std::size_t>(idx)] =
        score(response_of(proxy), f.predict(covariate_of(proxy)), kind);
  });

  std::vector<AugmentedPoint> all_train(seq.points.begin(), seq.points.end() - 1);
  const FittedPredictor full = fit(spec, all_train, rng_seed);

  result.threshold = quantile(result.scores, 1.0 - alpha) + inflation;
  result.region.center = full.predict(covariate_of(seq.points.back()));
  result.region.radius = result.threshold;
  result.region.kind = kind;
  return result;
}

LwoResult jackknife(const LiftedSequence& seq, double alpha, const PredictorSpec& spec,
                    ScoreKind kind, std::uint64_t rng_seed) {
  return lwo(seq, alpha, 0, spec, kind, 0.0, rng_seed);
}

PredictionRegion split_cp(const LiftedSequence& seq, double alpha, const PredictorSpec& spec,
                          ScoreKind kind, std::uint64_t rng_seed) {
  const int n = seq.size() - 1;
  if (n < 2) throw std::invalid_argument("split: needs at least two training points");

  const int n_train = n / 2;
  std::vector<AugmentedPoint> train(seq.points.begin(), seq.points.begin() + n_train);
  const FittedPredictor f = fit(spec, train, rng_seed);

  std::vector<double> cal_scores;
  cal_scores.reserve(static_cast<std::size_t>(n - n_train));
  for (int j = n_train; j < n; ++j) {
    const AugmentedPoint& p = seq.points[static_cast<std::size_t>(j)];
    cal_scores.push_back(score(response_of(p), f.predict(covariate_of(p)), kind));
  }

  PredictionRegion region;
  region.center = f.predict(covariate_of(seq.points.back()));
  region.radius = quantile(cal_scores, 1.0 - alpha);
  region.kind = kind;
  return region;
}

}  // namespace lwocp
