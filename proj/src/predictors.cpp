#include "lwocp/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lwocp/rng.hpp"

namespace lwocp {

// ---------------------------------------------------------------------------
// PredictorSpec
// ---------------------------------------------------------------------------

PredictorSpec PredictorSpec::ridge(double lambda) {
  PredictorSpec s;
  s.kind = Kind::Ridge;
  s.ridge_lambda = lambda;
  return s;
}

PredictorSpec PredictorSpec::knn(int k) {
  PredictorSpec s;
  s.kind = Kind::Knn;
  s.knn_k = k;
  return s;
}

PredictorSpec PredictorSpec::kernel(double bandwidth) {
  PredictorSpec s;
  s.kind = Kind::Kernel;
  s.kernel_bandwidth = bandwidth;
  return s;
}

PredictorSpec PredictorSpec::tree(int max_depth, int min_leaf) {
  PredictorSpec s;
  s.kind = Kind::Tree;
  s.tree_max_depth = max_depth;
  s.tree_min_leaf = min_leaf;
  return s;
}

PredictorSpec PredictorSpec::mlp(int width) {
  PredictorSpec s;
  s.kind = Kind::Mlp;
  s.mlp_width = width;
  return s;
}

PredictorSpec PredictorSpec::count_feature(PredictorSpec base_spec) {
  PredictorSpec s;
  s.kind = Kind::CountFeature;
  s.base = std::make_shared<const PredictorSpec>(std::move(base_spec));
  return s;
}

namespace {

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("predictor spec: bad " + what + " '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("predictor spec: bad " + what + " '" + text + "'");
  return v;
}

int parse_int(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("predictor spec: bad " + what + " '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("predictor spec: bad " + what + " '" + text + "'");
  return static_cast<int>(v);
}

}  // namespace

PredictorSpec PredictorSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);

  PredictorSpec s;
  if (head == "ridge") {
    s = ridge(rest.empty() ? 1.0 : parse_double(rest, "lambda"));
  } else if (head == "knn") {
    s = knn(parse_int(rest, "k"));
  } else if (head == "kernel") {
    s = kernel(parse_double(rest, "bandwidth"));
  } else if (head == "tree") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw std::invalid_argument("predictor spec: tree needs depth:minleaf");
    s = tree(parse_int(rest.substr(0, c2), "depth"), parse_int(rest.substr(c2 + 1), "min leaf"));
  } else if (head == "mlp") {
    s = mlp(parse_int(rest, "width"));
  } else if (head == "count") {
    if (rest.empty()) throw std::invalid_argument("predictor spec: count needs a base spec");
    s = count_feature(parse(rest));
  } else {
    throw std::invalid_argument("predictor spec: unknown kind '" + head + "'");
  }
  s.validate();
  return s;
}

std::string PredictorSpec::to_string() const {
  auto fmt = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  switch (kind) {
    case Kind::Ridge:
      return "ridge:" + fmt(ridge_lambda);
    case Kind::Knn:
      return "knn:" + std::to_string(knn_k);
    case Kind::Kernel:
      return "kernel:" + fmt(kernel_bandwidth);
    case Kind::Tree:
      return "tree:" + std::to_string(tree_max_depth) + ":" + std::to_string(tree_min_leaf);
    case Kind::Mlp:
      return "mlp:" + std::to_string(mlp_width);
    case Kind::CountFeature:
      return "count:" + (base ? base->to_string() : std::string("?"));
  }
  return "?";
}

void PredictorSpec::validate() const {
  switch (kind) {
    case Kind::Ridge:
      if (!(ridge_lambda >= 0.0)) throw std::invalid_argument("ridge: lambda must be nonnegative");
      return;
    case Kind::Knn:
      if (knn_k < 1) throw std::invalid_argument("knn: k must be positive");
      return;
    case Kind::Kernel:
      if (!(kernel_bandwidth > 0.0)) throw std::invalid_argument("kernel: bandwidth must be positive");
      return;
    case Kind::Tree:
      if (tree_max_depth < 1) throw std::invalid_argument("tree: max depth must be positive");
      if (tree_min_leaf < 1) throw std::invalid_argument("tree: min leaf must be positive");
      return;
    case Kind::Mlp:
      if (mlp_width < 1) throw std::invalid_argument("mlp: width must be positive");
      return;
    case Kind::CountFeature:
      if (!base) throw std::invalid_argument("count: missing base spec");
      base->validate();
      return;
  }
  throw std::invalid_argument("predictor spec: unknown kind");
}

// ---------------------------------------------------------------------------
// Fitted predictor implementations
// ---------------------------------------------------------------------------

namespace detail {

class PredictorImpl {
 public:
  virtual ~PredictorImpl() = default;
  virtual Vec predict_flat(const Vec& x) const = 0;

  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;
};

namespace {

// Lexicographic order on (flattened covariate, response). Sorting by this key
// makes order-sensitive algorithms symmetric in their training multiset.
bool canonical_less(const Vec& xa, const Vec& ya, const Vec& xb, const Vec& yb) {
  const auto cmp = [](const Vec& a, const Vec& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return -1;
      if (a[i] > b[i]) return 1;
    }
    return 0;
  };
  const int cx = cmp(xa, xb);
  if (cx != 0) return cx < 0;
  return cmp(ya, yb) < 0;
}

// Flattened view of the concrete training points.
struct FlatData {
  std::vector<Vec> x;
  std::vector<Vec> y;
  Eigen::Index p = 0;
  Eigen::Index d_y = 0;

  void sort_canonically() {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return canonical_less(x[a], y[a], x[b], y[b]);
    });
    std::vector<Vec> xs, ys;
    xs.reserve(x.size());
    ys.reserve(y.size());
    for (auto i : idx) {
      xs.push_back(std::move(x[i]));
      ys.push_back(std::move(y[i]));
    }
    x = std::move(xs);
    y = std::move(ys);
  }

  Mat x_matrix() const {
    Mat m(static_cast<Eigen::Index>(x.size()), p);
    for (std::size_t i = 0; i < x.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = x[i].transpose();
    return m;
  }
  Mat y_matrix() const {
    Mat m(static_cast<Eigen::Index>(y.size()), d_y);
    for (std::size_t i = 0; i < y.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = y[i].transpose();
    return m;
  }
};

FlatData flatten(const std::vector<AugmentedPoint>& data) {
  FlatData out;
  bool first = true;
  for (const auto& pt : data) {
    if (pt.is_dummy()) continue;
    Vec fx = pt.x().flat();
    const Vec& fy = pt.y();
    if (first) {
      out.p = fx.size();
      out.d_y = fy.size();
      first = false;
    } else if (fx.size() != out.p || fy.size() != out.d_y) {
      throw std::invalid_argument("fit: training points have inconsistent dimensions");
    }
    out.x.push_back(std::move(fx));
    out.y.push_back(fy);
  }
  return out;
}

class RidgeImpl final : public PredictorImpl {
 public:
  RidgeImpl(const FlatData& data, double lambda) {
    input_dim = data.p;
    output_dim = data.d_y;
    const Mat x = data.x_matrix();
    const Mat y = data.y_matrix();
    Mat gram = x.transpose() * x;
    gram.diagonal().array() += lambda;
    // Exact normal equations; SPD solve keeps the fit deterministic.
    weights_ = gram.ldlt().solve(x.transpose() * y);
  }

  Vec predict_flat(const Vec& x) const override { return weights_.transpose() * x; }

 private:
  Mat weights_;  // p x d_y
};

class KnnImpl final : public PredictorImpl {
 public:
  KnnImpl(FlatData data, int k) : k_(k) {
    data.sort_canonically();  // distance ties resolve by canonical rank
    input_dim = data.p;
    output_dim = data.d_y;
    x_ = data.x_matrix();
    y_ = data.y_matrix();
  }

  Vec predict_flat(const Vec& x) const override {
    const Eigen::Index n = x_.rows();
    const Eigen::Index k = std::min<Eigen::Index>(k_, n);
    std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      dist[static_cast<std::size_t>(i)] = {(x_.row(i).transpose() - x).squaredNorm(), i};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    Vec out = Vec::Zero(output_dim);
    for (Eigen::Index j = 0; j < k; ++j) out += y_.row(dist[static_cast<std::size_t>(j)].second).transpose();
    return out / static_cast<double>(k);
  }

 private:
  Mat x_, y_;
  int k_;
};

class KernelImpl final : public PredictorImpl {
 public:
  KernelImpl(const FlatData& data, double bandwidth) : h2_(bandwidth * bandwidth) {
    input_dim = data.p;
    output_dim = data.d_y;
    x_ = data.x_matrix();
    y_ = data.y_matrix();
  }

  Vec predict_flat(const Vec& x) const override {
    const Eigen::Index n = x_.rows();
    Vec d2(n);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x_.row(i).transpose() - x).squaredNorm();
    // Weights are evaluated relative to the nearest point so that distant
    // queries do not underflow every weight to zero.
    const double dmin = d2.minCoeff();
    double total = 0.0;
    Vec out = Vec::Zero(output_dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = std::exp(-(d2[i] - dmin) / (2.0 * h2_));
      total += w;
      out += w * y_.row(i).transpose();
    }
    if (total <= 0.0) return y_.colwise().mean().transpose();  // degenerate weight mass
    return out / total;
  }

 private:
  Mat x_, y_;
  double h2_;
};

class TreeImpl final : public PredictorImpl {
 public:
  TreeImpl(FlatData data, int max_depth, int min_leaf) : min_leaf_(min_leaf) {
    data.sort_canonically();
    input_dim = data.p;
    output_dim = data.d_y;
    x_ = data.x_matrix();
    y_ = data.y_matrix();
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(x_.rows()));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    root_ = build(rows, max_depth);
  }

  Vec predict_flat(const Vec& x) const override {
    int at = root_;
    while (!nodes_[static_cast<std::size_t>(at)].is_leaf()) {
      const Node& nd = nodes_[static_cast<std::size_t>(at)];
      at = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes_[static_cast<std::size_t>(at)].value;
  }

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1, right = -1;
    Vec value;
    bool is_leaf() const { return feature < 0; }
  };

  struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  static double sse(double sumsq, const Vec& sum, double count) {
    return sumsq - sum.squaredNorm() / count;
  }

  int build(const std::vector<Eigen::Index>& rows, int depth_left) {
    const auto m = static_cast<double>(rows.size());
    Vec total = Vec::Zero(output_dim);
    double total_sq = 0.0;
    for (auto r : rows) {
      total += y_.row(r).transpose();
      total_sq += y_.row(r).squaredNorm();
    }

    SplitChoice best;
    if (depth_left > 0 && rows.size() >= static_cast<std::size_t>(2 * min_leaf_)) {
      const double parent_sse = sse(total_sq, total, m);
      for (int f = 0; f < input_dim; ++f) {
        std::vector<std::pair<double, Eigen::Index>> vals;
        vals.reserve(rows.size());
        for (auto r : rows) vals.emplace_back(x_(r, f), r);
        std::sort(vals.begin(), vals.end());

        Vec left_sum = Vec::Zero(output_dim);
        double left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
          left_sum += y_.row(vals[i].second).transpose();
          left_sq += y_.row(vals[i].second).squaredNorm();
          if (vals[i].first == vals[i + 1].first) continue;  // split only between distinct values
          const auto n_left = static_cast<double>(i + 1);
          const auto n_right = m - n_left;
          if (n_left < min_leaf_ || n_right < min_leaf_) continue;
          const double gain = parent_sse - sse(left_sq, left_sum, n_left) -
                              sse(total_sq - left_sq, Vec(total - left_sum), n_right);
          // Strict improvement; equal-gain candidates keep the earlier
          // (feature, threshold) pair, which is the lexicographically least.
          if (gain > best.gain) {
            best.gain = gain;
            best.feature = f;
            best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
          }
        }
      }
    }

    if (best.feature < 0) {
      Node leaf;
      leaf.value = total / m;
      nodes_.push_back(std::move(leaf));
      return static_cast<int>(nodes_.size()) - 1;
    }

    std::vector<Eigen::Index> left_rows, right_rows;
    for (auto r : rows)
      (x_(r, best.feature) <= best.threshold ? left_rows : right_rows).push_back(r);

    Node nd;
    nd.feature = best.feature;
    nd.threshold = best.threshold;
    const int left = build(left_rows, depth_left - 1);
    const int right = build(right_rows, depth_left - 1);
    nd.left = left;
    nd.right = right;
    nodes_.push_back(std::move(nd));
    return static_cast<int>(nodes_.size()) - 1;
  }

  Mat x_, y_;
  int min_leaf_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

// One hidden layer with ReLU, squared loss, full-batch gradient descent.
// The recipe (width aside) is fixed: Glorot-uniform init from the given seed,
// 200 epochs, learning rate 1e-2, data in canonical sorted order.
class MlpImpl final : public PredictorImpl {
 public:
  static constexpr int kEpochs = 200;
  static constexpr double kLearningRate = 1e-2;

  MlpImpl(FlatData data, int width, std::uint64_t seed) {
    data.sort_canonically();
    input_dim = data.p;
    output_dim = data.d_y;
    const Mat x = data.x_matrix();
    const Mat y = data.y_matrix();
    const auto n = static_cast<double>(x.rows());

    Rng rng(seed);
    auto glorot = [&rng](Eigen::Index rows, Eigen::Index cols) {
      const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
      Mat m(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = (2.0 * rng.uniform() - 1.0) * a;
      return m;
    };
    w1_ = glorot(input_dim, width);
    b1_ = Vec::Zero(width);
    w2_ = glorot(width, output_dim);
    b2_ = Vec::Zero(output_dim);

    for (int epoch = 0; epoch < kEpochs; ++epoch) {
      Mat h_pre = (x * w1_).rowwise() + b1_.transpose();
      Mat h = h_pre.cwiseMax(0.0);
      Mat out = (h * w2_).rowwise() + b2_.transpose();
      Mat d_out = (out - y) / n;
      Mat g_w2 = h.transpose() * d_out;
      Vec g_b2 = d_out.colwise().sum().transpose();
      Mat d_h = (d_out * w2_.transpose()).cwiseProduct((h_pre.array() > 0.0).cast<double>().matrix());
      Mat g_w1 = x.transpose() * d_h;
      Vec g_b1 = d_h.colwise().sum().transpose();
      w1_ -= kLearningRate * g_w1;
      b1_ -= kLearningRate * g_b1;
      w2_ -= kLearningRate * g_w2;
      b2_ -= kLearningRate * g_b2;
    }
  }

  Vec predict_flat(const Vec& x) const override {
    Vec h = (w1_.transpose() * x + b1_).cwiseMax(0.0);
    return w2_.transpose() * h + b2_;
  }

 private:
  Mat w1_, w2_;
  Vec b1_, b2_;
};

// Data-dependent feature map: phi(x) = multiplicity of x among the training
// covariates, matched bit-exactly. The base predictor is fit on (phi(x_i), y_i).
class CountFeatureImpl final : public PredictorImpl {
 public:
  CountFeatureImpl(const FlatData& data, const PredictorSpec& base_spec, std::uint64_t seed) {
    input_dim = data.p;
    output_dim = data.d_y;
    for (const auto& fx : data.x) counts_[key_of(fx)] += 1;

    std::vector<AugmentedPoint> transformed;
    transformed.reserve(data.x.size());
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      LiftedCovariate cov;
      cov.current = Vec::Constant(1, count_of(data.x[i]));
      transformed.emplace_back(std::move(cov), data.y[i]);
    }
    base_ = fit(base_spec, transformed, seed);
  }

  Vec predict_flat(const Vec& x) const override {
    LiftedCovariate cov;
    cov.current = Vec::Constant(1, count_of(x));
    Response out = base_.predict(cov);
    if (!out.has_value()) throw std::logic_error("count feature: base predictor is dummy");
    return *out;
  }

 private:
  static std::vector<std::uint64_t> key_of(const Vec& x) {
    std::vector<std::uint64_t> key(static_cast<std::size_t>(x.size()));
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(key.data(), x.data(), sizeof(double) * key.size());
    return key;
  }

  double count_of(const Vec& x) const {
    const auto it = counts_.find(key_of(x));
    return it == counts_.end() ? 0.0 : static_cast<double>(it->second);
  }

  std::map<std::vector<std::uint64_t>, int> counts_;
  FittedPredictor base_;
};

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------
// fit / predict
// ---------------------------------------------------------------------------

Response FittedPredictor::predict(const std::optional<LiftedCovariate>& x) const {
  if (!x.has_value() || impl_ == nullptr) return std::nullopt;
  Vec flat = x->flat();
  if (flat.size() != impl_->input_dim)
    throw std::invalid_argument("predict: covariate dimension mismatch");
  return impl_->predict_flat(flat);
}

FittedPredictor fit(const PredictorSpec& spec, const std::vector<AugmentedPoint>& data,
                    std::uint64_t rng_seed) {
  spec.validate();
  detail::FlatData flat = detail::flatten(data);
  if (flat.x.empty()) return FittedPredictor{};  // dummy predictor

  std::shared_ptr<const detail::PredictorImpl> impl;
  switch (spec.kind) {
    case PredictorSpec::Kind::Ridge:
      impl = std::make_shared<detail::RidgeImpl>(flat, spec.ridge_lambda);
      break;
    case PredictorSpec::Kind::Knn:
      impl = std::make_shared<detail::KnnImpl>(std::move(flat), spec.knn_k);
      break;
    case PredictorSpec::Kind::Kernel:
      impl = std::make_shared<detail::KernelImpl>(flat, spec.kernel_bandwidth);
      break;
    case PredictorSpec::Kind::Tree:
      impl = std::make_shared<detail::TreeImpl>(std::move(flat), spec.tree_max_depth, spec.tree_min_leaf);
      break;
    case PredictorSpec::Kind::Mlp:
      impl = std::make_shared<detail::MlpImpl>(std::move(flat), spec.mlp_width, rng_seed);
      break;
    case PredictorSpec::Kind::CountFeature:
      impl = std::make_shared<detail::CountFeatureImpl>(flat, *spec.base, rng_seed);
      break;
  }
  return FittedPredictor{std::move(impl)};
}

// ---------------------------------------------------------------------------
// OOS stability estimation
// ---------------------------------------------------------------------------

namespace {

struct StabilityCase {
  LiftedSequence prefix;  // training points 1..n
  Response x_test;
  Response y_test;
  std::optional<LiftedCovariate> cov_test;
};

StabilityCase split_test_point(const LiftedSequence& seq, int block_len) {
  const int n = seq.size() - 1;
  if (n < 1) throw std::invalid_argument("stability: sequence needs a training prefix and a test point");
  if (block_len < 1) throw std::invalid_argument("stability: block length must be positive");
  if (block_len >= n) throw std::invalid_argument("stability: block length must be below the training length");

  StabilityCase c;
  c.prefix.memory = seq.memory;
  c.prefix.origin = seq.origin;
  c.prefix.points.assign(seq.points.begin(), seq.points.end() - 1);
  const AugmentedPoint& test = seq.points.back();
  if (!test.is_dummy()) {
    c.cov_test = test.x();
    c.y_test = test.y();
  }
  return c;
}

}  // namespace

double estimate_oos_stability(const PredictorSpec& spec, const LiftedSequence& seq, int block_len,
                              double t, ScoreKind kind, int trials, std::uint64_t rng_seed) {
  if (trials < 1) throw std::invalid_argument("stability: trials must be positive");
  const StabilityCase c = split_test_point(seq, block_len);
  const int n = c.prefix.size();

  const FittedPredictor full = fit(spec, training_view(c.prefix), rng_seed);
  const double base_score = score(c.y_test, full.predict(c.cov_test), kind);

  Rng rng(mix_seed(rng_seed, 0x73746162ULL));
  int exceed = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const long k = (1 - block_len) + static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const FittedPredictor masked = fit(spec, training_view(mask(c.prefix, k, block_len)), rng_seed);
    const double s = score(c.y_test, masked.predict(c.cov_test), kind);
    if (std::abs(s - base_score) > t) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(trials);
}

double estimate_oos_stability(const PredictorSpec& spec,
                              const std::function<LiftedSequence(std::uint64_t)>& make_sequence,
                              int block_len, double t, ScoreKind kind, int trials,
                              std::uint64_t rng_seed) {
  if (trials < 1) throw std::invalid_argument("stability: trials must be positive");
  Rng rng(mix_seed(rng_seed, 0x73746162ULL));
  int exceed = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed = mix_seed(rng_seed, static_cast<std::uint64_t>(trial));
    const LiftedSequence seq = make_sequence(trial_seed);
    const StabilityCase c = split_test_point(seq, block_len);
    const int n = c.prefix.size();

    const FittedPredictor full = fit(spec, training_view(c.prefix), trial_seed);
    const double base_score = score(c.y_test, full.predict(c.cov_test), kind);

    const long k = (1 - block_len) + static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    const FittedPredictor masked = fit(spec, training_view(mask(c.prefix, k, block_len)), trial_seed);
    const double s = score(c.y_test, masked.predict(c.cov_test), kind);
    if (std::abs(s - base_score) > t) ++exceed;
  }
  return static_cast<double>(exceed) / static_cast<double>(trials);
}

}  // namespace lwocp
