#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lwocp/scoring.hpp"
#include "lwocp/types.hpp"

namespace lwocp {

namespace detail {
class PredictorImpl;
}

/// Which training algorithm to run, with its hyperparameters. CountFeature
/// wraps another spec: it learns the multiplicity of each raw covariate value
/// in the training set, replaces every covariate by that count, and fits the
/// base predictor on the transformed data.
struct PredictorSpec {
  enum class Kind { Ridge, Knn, Kernel, Tree, Mlp, CountFeature };

  Kind kind = Kind::Ridge;
  double ridge_lambda = 1.0;
  int knn_k = 1;
  double kernel_bandwidth = 0.5;
  int tree_max_depth = 5;
  int tree_min_leaf = 2;
  int mlp_width = 20;
  std::shared_ptr<const PredictorSpec> base;  // CountFeature only

  static PredictorSpec ridge(double lambda);
  static PredictorSpec knn(int k);
  static PredictorSpec kernel(double bandwidth);
  static PredictorSpec tree(int max_depth, int min_leaf);
  static PredictorSpec mlp(int width);
  static PredictorSpec count_feature(PredictorSpec base_spec);

  /// Parses the textual form used by config files and the CLI:
  ///   ridge:<lambda> | knn:<k> | kernel:<bw> | tree:<depth>:<minleaf>
  ///   | mlp:<width> | count:<base>
  static PredictorSpec parse(const std::string& text);
  std::string to_string() const;

  /// Throws std::invalid_argument when a hyperparameter is out of range.
  void validate() const;
};

/// An immutable trained model. predict maps the dummy mark to itself, and a
/// predictor trained on no concrete points (the dummy predictor) maps every
/// input to the dummy mark. Safe to share across threads.
class FittedPredictor {
 public:
  FittedPredictor() = default;  // dummy predictor

  Response predict(const std::optional<LiftedCovariate>& x) const;
  bool is_dummy() const { return impl_ == nullptr; }

 private:
  friend FittedPredictor fit(const PredictorSpec&, const std::vector<AugmentedPoint>&, std::uint64_t);
  explicit FittedPredictor(std::shared_ptr<const detail::PredictorImpl> impl) : impl_(std::move(impl)) {}

  std::shared_ptr<const detail::PredictorImpl> impl_;
};

/// Trains `spec` on the concrete points of `data` (dummies are ignored).
/// Training is a symmetric function of the point multiset: predictors that
/// would otherwise depend on input order (tree, MLP, nearest-neighbor
/// tie-breaking) canonicalize by sorting the data first. `rng_seed` fixes all
/// internal randomness (MLP initialization).
FittedPredictor fit(const PredictorSpec& spec, const std::vector<AugmentedPoint>& data,
                    std::uint64_t rng_seed);

/// Monte-Carlo estimate of the probability that the test-point score moves by
/// more than `t` when a uniformly random block of `block_len` training points
/// is masked out. The last point of `seq` is the test point; blocks start at
/// K ~ Unif{1-block_len, ..., n-block_len} so partial blocks at the front are
/// included. This overload resamples K on the fixed sequence.
double estimate_oos_stability(const PredictorSpec& spec, const LiftedSequence& seq, int block_len,
                              double t, ScoreKind kind, int trials, std::uint64_t rng_seed);

/// As above, but each trial draws a fresh sequence from `make_sequence`
/// (called with a per-trial derived seed) before sampling K.
double estimate_oos_stability(const PredictorSpec& spec,
                              const std::function<LiftedSequence(std::uint64_t)>& make_sequence,
                              int block_len, double t, ScoreKind kind, int trials,
                              std::uint64_t rng_seed);

}  // namespace lwocp
