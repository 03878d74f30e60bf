#include "lwocp/types.hpp"

namespace lwocp {

Eigen::Index LiftedCovariate::flat_size() const {
  Eigen::Index n = current.size();
  for (const auto& h : history) n += h.x.size() + h.y.size();
  return n;
}

Vec LiftedCovariate::flat() const {
  Vec out(flat_size());
  Eigen::Index at = 0;
  for (const auto& h : history) {
    out.segment(at, h.x.size()) = h.x;
    at += h.x.size();
    out.segment(at, h.y.size()) = h.y;
    at += h.y.size();
  }
  out.segment(at, current.size()) = current;
  return out;
}

LiftedSequence lift(const RawSeries& raw, int memory) {
  if (memory < 0) throw std::invalid_argument("lift: memory must be nonnegative");
  const Eigen::Index t_len = raw.length();
  if (raw.x.rows() != raw.y.rows())
    throw std::invalid_argument("lift: covariate and response lengths differ");
  if (t_len <= memory) throw std::invalid_argument("lift: series shorter than memory");

  LiftedSequence seq;
  seq.memory = memory;
  seq.origin = raw.start_index + memory;
  seq.points.reserve(static_cast<std::size_t>(t_len - memory));
  for (Eigen::Index t = memory; t < t_len; ++t) {
    LiftedCovariate cov;
    cov.history.reserve(static_cast<std::size_t>(memory));
    for (Eigen::Index j = t - memory; j < t; ++j)
      cov.history.push_back({raw.x.row(j).transpose(), raw.y.row(j).transpose()});
    cov.current = raw.x.row(t).transpose();
    seq.points.emplace_back(std::move(cov), raw.y.row(t).transpose());
  }
  return seq;
}

namespace {
long floor_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}
}  // namespace

LiftedSequence mask(const LiftedSequence& seq, long k, int window) {
  const long m = seq.size();
  if (m < 1) throw std::invalid_argument("mask: empty sequence");
  if (window < 0) throw std::invalid_argument("mask: window must be nonnegative");
  if (window >= m) throw std::invalid_argument("mask: window exceeds sequence");

  if (k < -window || k > m - 1) k = floor_mod(k + window, m + window) - window;

  LiftedSequence out = seq;
  const long lo = std::max<long>(k + 1, 1);
  const long hi = std::min<long>(k + window, m);
  for (long i = lo; i <= hi; ++i) out.points[static_cast<std::size_t>(i - 1)] = AugmentedPoint::dummy();
  return out;
}

std::vector<AugmentedPoint> training_view(const LiftedSequence& seq) {
  std::vector<AugmentedPoint> out;
  out.reserve(seq.points.size());
  for (const auto& p : seq.points)
    if (!p.is_dummy()) out.push_back(p);
  return out;
}

}  // namespace lwocp
