#pragma once

#include <cstdint>
#include <vector>

#include "lwocp/predictors.hpp"
#include "lwocp/scoring.hpp"
#include "lwocp/types.hpp"

namespace lwocp {

/// Output of a leave-window-out run: the prediction region plus the
/// calibration scores that produced it. threshold = quantile(scores, 1-alpha)
/// + inflation, and region.radius equals threshold.
struct LwoResult {
  PredictionRegion region;
  std::vector<double> scores;
  double threshold = 0.0;
  int window = 0;
  double inflation = 0.0;
};

/// Leave-a-window-out prediction set. `seq` holds n training points followed
/// by the test point, whose covariate centers the region (its response, when
/// present, is never used here). For each k in 1..n the calibration predictor
/// is trained on all training points except indices k..min(k+window, n); the
/// window never wraps, so the post-window part is empty for k >= n - window.
/// Throws when n <= window or alpha is outside (0,1).
LwoResult lwo(const LiftedSequence& seq, double alpha, int window, const PredictorSpec& spec,
              ScoreKind kind, double inflation, std::uint64_t rng_seed);

/// The vanilla leave-one-out jackknife: lwo with window 0 and no inflation.
LwoResult jackknife(const LiftedSequence& seq, double alpha, const PredictorSpec& spec,
                    ScoreKind kind, std::uint64_t rng_seed);

/// Split conformal prediction: trains on the first floor(n/2) training
/// points, calibrates on the rest, and centers the region at the split-model
/// prediction for the test covariate. Throws when n < 2.
PredictionRegion split_cp(const LiftedSequence& seq, double alpha, const PredictorSpec& spec,
                          ScoreKind kind, std::uint64_t rng_seed);

}  // namespace lwocp
