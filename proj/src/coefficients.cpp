#include "lwocp/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "lwocp/lp.hpp"
#include "lwocp/rng.hpp"

namespace lwocp {

namespace {

std::size_t power_st(int base, int exp) {
  double v = std::pow(static_cast<double>(base), exp);
  if (v > kMaxDenseStates) throw std::invalid_argument("coefficient lab: state space too large");
  return static_cast<std::size_t>(std::llround(v));
}

void check_lag(const FiniteProcess& p, int tau) {
  const int n = p.length - 1;
  if (tau < 1 || tau > n - 1) throw std::invalid_argument("coefficient lab: lag out of range");
}

}  // namespace

double tv(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("tv: support size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

std::vector<double> marginal_law(const FiniteProcess& p, const std::vector<int>& positions) {
  const std::size_t states = power_st(p.alphabet, p.length);
  const std::size_t out_states = power_st(p.alphabet, static_cast<int>(positions.size()));
  std::vector<double> out(out_states, 0.0);

  // Per-position place values of the reduced key, so each full index maps to
  // its key without decoding to digits.
  std::vector<std::size_t> weight(static_cast<std::size_t>(p.length), 0);
  {
    std::size_t w = 1;
    for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
      weight[static_cast<std::size_t>(*it)] += w;
      w *= static_cast<std::size_t>(p.alphabet);
    }
  }

  std::vector<int> digits(static_cast<std::size_t>(p.length), 0);
  for (std::size_t idx = 0; idx < states; ++idx) {
    if (p.joint[idx] != 0.0) {
      std::size_t rem = idx;
      std::size_t key = 0;
      for (int i = p.length - 1; i >= 0; --i) {
        const auto d = rem % static_cast<std::size_t>(p.alphabet);
        rem /= static_cast<std::size_t>(p.alphabet);
        key += d * weight[static_cast<std::size_t>(i)];
      }
      out[key] += p.joint[idx];
    }
  }
  return out;
}

double beta_mixing(const FiniteProcess& p, int tau) {
  check_lag(p, tau);
  const int m = p.length;
  const int n = m - 1;
  double best = 0.0;
  for (int k = 1; k <= n - tau; ++k) {
    std::vector<int> pre(static_cast<std::size_t>(k));
    std::iota(pre.begin(), pre.end(), 0);
    std::vector<int> suf;
    for (int i = k + tau; i < m; ++i) suf.push_back(i);

    std::vector<int> both = pre;
    both.insert(both.end(), suf.begin(), suf.end());

    const auto joint_blocks = marginal_law(p, both);
    const auto pre_m = marginal_law(p, pre);
    const auto suf_m = marginal_law(p, suf);

    double acc = 0.0;
    const std::size_t suf_states = suf_m.size();
    for (std::size_t a = 0; a < pre_m.size(); ++a)
      for (std::size_t b = 0; b < suf_states; ++b)
        acc += std::abs(joint_blocks[a * suf_states + b] - pre_m[a] * suf_m[b]);
    best = std::max(best, 0.5 * acc);
  }
  return best;
}

double beta_cond_mixing(const FiniteProcess& p, int tau) {
  check_lag(p, tau);
  const int m = p.length;
  const int n = m - 1;
  const int a_size = p.alphabet;
  const std::size_t states = power_st(a_size, m);

  double best = 0.0;
  for (int k = 1; k <= n - tau; ++k) {
    std::vector<int> pre(static_cast<std::size_t>(k));
    std::iota(pre.begin(), pre.end(), 0);
    std::vector<int> mid;
    for (int i = k; i < k + tau; ++i) mid.push_back(i);
    std::vector<int> suf;
    for (int i = k + tau; i < m; ++i) suf.push_back(i);

    std::vector<int> pre_mid = pre;
    pre_mid.insert(pre_mid.end(), mid.begin(), mid.end());
    std::vector<int> mid_suf = mid;
    mid_suf.insert(mid_suf.end(), suf.begin(), suf.end());

    const auto mid_m = marginal_law(p, mid);
    const auto pre_mid_m = marginal_law(p, pre_mid);
    const auto mid_suf_m = marginal_law(p, mid_suf);

    const std::size_t mid_states = mid_m.size();
    const std::size_t suf_states = power_st(a_size, static_cast<int>(suf.size()));

    double acc = 0.0;
    for (std::size_t idx = 0; idx < states; ++idx) {
      // Row-major layout: digits of idx split as (pre, mid, suf) blocks.
      const std::size_t suf_key = idx % suf_states;
      const std::size_t mid_key = (idx / suf_states) % mid_states;
      const std::size_t pre_key = idx / (suf_states * mid_states);
      const double pm = mid_m[mid_key];
      const double q = pm > 0.0 ? pre_mid_m[pre_key * mid_states + mid_key] *
                                      mid_suf_m[mid_key * suf_states + suf_key] / pm
                                : 0.0;
      acc += std::abs(p.joint[idx] - q);
    }
    best = std::max(best, 0.5 * acc);
  }
  return best;
}

namespace {

// Deletion maps behind the switch coefficients: the coordinate positions
// (0-based, ordered) that survive deleting the tau-block after position k,
// read forward (delta0) or from the rotated end (delta1).
std::vector<int> delta0_positions(int m, long k, int tau) {
  const int n = m - 1;
  std::vector<int> pos;
  if (k >= 1 && k <= n - tau) {
    for (long i = 0; i < k; ++i) pos.push_back(static_cast<int>(i));
    for (int i = static_cast<int>(k) + tau; i < m; ++i) pos.push_back(i);
  } else if (k >= n - tau + 1 && k <= n) {
    for (long i = 0; i < k; ++i) pos.push_back(static_cast<int>(i));
  } else {  // -tau <= k <= 0
    for (int i = static_cast<int>(k) + tau; i < m; ++i) pos.push_back(i);
  }
  return pos;
}

std::vector<int> delta1_positions(int m, long k, int tau) {
  const int n = m - 1;
  std::vector<int> pos;
  if (k >= 1 && k <= n - tau) {
    for (long i = n + 1 - k; i <= n; ++i) pos.push_back(static_cast<int>(i));
    for (long i = 0; i <= n - k - tau; ++i) pos.push_back(static_cast<int>(i));
  } else if (k >= n - tau + 1 && k <= n) {
    for (long i = n + 1 - k; i <= n; ++i) pos.push_back(static_cast<int>(i));
  } else {  // -tau <= k <= 0
    for (long i = 0; i <= n - k - tau; ++i) pos.push_back(static_cast<int>(i));
  }
  return pos;
}

void check_switch_index(const FiniteProcess& p, long k, int tau) {
  const int n = p.length - 1;
  if (tau < 0 || tau > n) throw std::invalid_argument("switch: lag out of range");
  if (k < -tau || k > n) throw std::invalid_argument("switch: index out of range");
}

}  // namespace

double switch_coeff(const FiniteProcess& p, long k, int tau) {
  check_switch_index(p, k, tau);
  const auto law0 = marginal_law(p, delta0_positions(p.length, k, tau));
  const auto law1 = marginal_law(p, delta1_positions(p.length, k, tau));
  return tv(law0, law1);
}

double avg_switch(const FiniteProcess& p, int tau) {
  const int n = p.length - 1;
  if (tau < 0 || tau > n) throw std::invalid_argument("switch: lag out of range");
  double acc = 0.0;
  for (long k = -tau; k <= n; ++k) acc += switch_coeff(p, k, tau);
  return acc / static_cast<double>(n + tau + 1);
}

double mixture_switch(const FiniteProcess& p, int tau) {
  const int n = p.length - 1;
  if (tau < 0 || tau > n) throw std::invalid_argument("switch: lag out of range");
  const double w = 1.0 / static_cast<double>(n + tau + 1);

  // Components of equal length overlap, so accumulate per length.
  std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_len;
  for (long k = -tau; k <= n; ++k) {
    const auto pos0 = delta0_positions(p.length, k, tau);
    const auto law0 = marginal_law(p, pos0);
    const auto law1 = marginal_law(p, delta1_positions(p.length, k, tau));
    auto& slot = by_len[pos0.size()];
    if (slot.first.empty()) {
      slot.first.assign(law0.size(), 0.0);
      slot.second.assign(law1.size(), 0.0);
    }
    for (std::size_t i = 0; i < law0.size(); ++i) {
      slot.first[i] += w * law0[i];
      slot.second[i] += w * law1[i];
    }
  }
  double acc = 0.0;
  for (const auto& [len, laws] : by_len)
    for (std::size_t i = 0; i < laws.first.size(); ++i) acc += std::abs(laws.first[i] - laws.second[i]);
  return 0.5 * acc;
}

// ---------------------------------------------------------------------------
// Augmented laws
// ---------------------------------------------------------------------------

void AugmentedPMF::validate() const {
  if (alphabet < 1 || length < 1) throw std::invalid_argument("augmented pmf: bad shape");
  double total = 0.0;
  for (double v : pmf) {
    if (!(v >= 0.0)) throw std::invalid_argument("augmented pmf: negative mass");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("augmented pmf: mass does not sum to 1");
}

AugmentedPMF embed_augmented(const FiniteProcess& p) {
  AugmentedPMF out;
  out.alphabet = p.alphabet;
  out.length = p.length;
  const int b = out.symbols();
  out.pmf.assign(power_st(b, p.length), 0.0);
  const std::size_t states = power_st(p.alphabet, p.length);
  for (std::size_t idx = 0; idx < states; ++idx) {
    if (p.joint[idx] == 0.0) continue;
    const auto z = decode_sequence(idx, p.alphabet, p.length);
    out.pmf[encode_sequence(z, b)] += p.joint[idx];
  }
  return out;
}

AugmentedPMF masked_mixture(const FiniteProcess& p, int tau) {
  const int m = p.length;
  const int n = m - 1;
  if (tau < 0 || tau > n) throw std::invalid_argument("masked mixture: lag out of range");

  AugmentedPMF out;
  out.alphabet = p.alphabet;
  out.length = m;
  const int b = out.symbols();
  const int star = p.alphabet;
  out.pmf.assign(power_st(b, m), 0.0);

  const std::size_t states = power_st(p.alphabet, m);
  const double w = 1.0 / static_cast<double>(n + tau + 1);
  for (long k = -tau; k <= n; ++k) {
    const long lo = std::max<long>(k + 1, 1);
    const long hi = std::min<long>(k + tau, m);
    for (std::size_t idx = 0; idx < states; ++idx) {
      if (p.joint[idx] == 0.0) continue;
      auto z = decode_sequence(idx, p.alphabet, m);
      for (long i = lo; i <= hi; ++i) z[static_cast<std::size_t>(i - 1)] = star;
      out.pmf[encode_sequence(z, b)] += w * p.joint[idx];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cyclic embedding coefficient via linear programming
// ---------------------------------------------------------------------------

double rho_lp(const AugmentedPMF& q, int lengthening, std::uint64_t orbit_order_seed) {
  q.validate();
  if (lengthening < 0) throw std::invalid_argument("rho: lengthening must be nonnegative");
  const int b = q.symbols();
  const int m = q.length;
  const int m_ext = m + lengthening;
  const std::size_t ext_states = power_st(b, m_ext);
  const std::size_t pre_states = q.pmf.size();

  // Cyclic orbits of the extended sequences. A shift-invariant law is
  // constant on each orbit, so one variable per orbit suffices.
  std::vector<std::int32_t> orbit_of(ext_states, -1);
  std::vector<std::int32_t> orbit_size;
  {
    std::vector<int> digits;
    for (std::size_t idx = 0; idx < ext_states; ++idx) {
      if (orbit_of[idx] >= 0) continue;
      const auto id = static_cast<std::int32_t>(orbit_size.size());
      digits = decode_sequence(idx, b, m_ext);
      int members = 0;
      std::vector<int> rot(digits.size());
      for (int s = 0; s < m_ext; ++s) {
        for (int i = 0; i < m_ext; ++i) rot[static_cast<std::size_t>(i)] = digits[static_cast<std::size_t>((i + s) % m_ext)];
        const std::size_t r = encode_sequence(rot, b);
        if (orbit_of[r] < 0) {
          orbit_of[r] = id;
          ++members;
        }
      }
      orbit_size.push_back(members);
    }
  }
  const auto n_orbits = static_cast<std::size_t>(orbit_size.size());

  std::vector<std::size_t> orbit_col(n_orbits);
  std::iota(orbit_col.begin(), orbit_col.end(), std::size_t{0});
  if (orbit_order_seed != 0) {
    Rng rng(orbit_order_seed);
    for (std::size_t i = n_orbits; i > 1; --i)
      std::swap(orbit_col[i - 1], orbit_col[rng.uniform_int(i)]);
  }

  // Variables: [orbit masses | positive residuals | negative residuals].
  const std::size_t n_vars = n_orbits + 2 * pre_states;
  if (n_vars > 10000) throw std::invalid_argument("rho: linear program too large");

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pre_states) + 1,
                                            static_cast<Eigen::Index>(n_vars));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(pre_states) + 1);

  const std::size_t tail = power_st(b, lengthening);
  for (std::size_t idx = 0; idx < ext_states; ++idx) {
    const std::size_t prefix = idx / tail;  // leading m digits
    a(static_cast<Eigen::Index>(prefix),
      static_cast<Eigen::Index>(orbit_col[static_cast<std::size_t>(orbit_of[idx])])) += 1.0;
  }
  for (std::size_t x = 0; x < pre_states; ++x) {
    a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(n_orbits + x)) = 1.0;           // + residual
    a(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(n_orbits + pre_states + x)) = -1.0;  // - residual
    rhs[static_cast<Eigen::Index>(x)] = q.pmf[x];
  }
  for (std::size_t o = 0; o < n_orbits; ++o)
    a(static_cast<Eigen::Index>(pre_states), static_cast<Eigen::Index>(orbit_col[o])) =
        static_cast<double>(orbit_size[o]);
  rhs[static_cast<Eigen::Index>(pre_states)] = 1.0;

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_vars));
  cost.segment(static_cast<Eigen::Index>(n_orbits), static_cast<Eigen::Index>(2 * pre_states))
      .setConstant(0.5);

  const LPSolution sol = solve_lp({cost, std::move(a), std::move(rhs)});
  if (sol.status != LPStatus::Optimal)
    throw std::runtime_error("rho: linear program did not solve (internal error)");
  return std::max(sol.objective, 0.0);
}

// ---------------------------------------------------------------------------
// Rotation extension and inequality verification
// ---------------------------------------------------------------------------

std::vector<double> rotation_extension_tvs(const FiniteProcess& p, int tau) {
  const int m = p.length;
  const int n = m - 1;
  if (tau < 1) throw std::invalid_argument("rotation extension: lag must be positive");
  if (m < 3 * tau) throw std::invalid_argument("rotation extension: sequence shorter than three blocks");

  const int a_size = p.alphabet;
  const int m_ext = m + tau;
  const std::size_t ext_states = power_st(a_size, m_ext);
  const std::size_t block = power_st(a_size, tau);

  // Conditional law of the middle block given its flanking tau-blocks, from
  // the law of the first 3*tau coordinates.
  std::vector<int> head(static_cast<std::size_t>(3 * tau));
  std::iota(head.begin(), head.end(), 0);
  const auto marg3 = marginal_law(p, head);
  std::vector<double> denom(block * block, 0.0);
  for (std::size_t before = 0; before < block; ++before)
    for (std::size_t mid = 0; mid < block; ++mid)
      for (std::size_t after = 0; after < block; ++after)
        denom[before * block + after] += marg3[(before * block + mid) * block + after];

  auto cond = [&](std::size_t w, std::size_t before, std::size_t after) {
    const double d = denom[before * block + after];
    if (d <= 0.0) return 1.0 / static_cast<double>(block);  // unreachable for positive chains
    return marg3[(before * block + w) * block + after] / d;
  };

  // Exact extended law on m + tau coordinates.
  std::vector<double> ext(ext_states, 0.0);
  const std::size_t states = power_st(a_size, m);
  for (std::size_t idx = 0; idx < states; ++idx) {
    if (p.joint[idx] == 0.0) continue;
    const auto z = decode_sequence(idx, a_size, m);
    std::vector<int> last(z.end() - tau, z.end());
    std::vector<int> first(z.begin(), z.begin() + tau);
    const std::size_t before = encode_sequence(last, a_size);
    const std::size_t after = encode_sequence(first, a_size);
    for (std::size_t w = 0; w < block; ++w) {
      const double pw = cond(w, before, after);
      if (pw == 0.0) continue;
      ext[idx * block + w] += p.joint[idx] * pw;  // appended digits are least significant
    }
  }

  std::vector<double> out;
  for (int k = 2 * tau + 2; k <= n - tau + 1; ++k) {
    std::vector<double> rotated(states, 0.0);
    std::vector<int> digits;
    for (std::size_t idx = 0; idx < ext_states; ++idx) {
      if (ext[idx] == 0.0) continue;
      digits = decode_sequence(idx, a_size, m_ext);
      std::vector<int> view(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i)
        view[static_cast<std::size_t>(i)] = digits[static_cast<std::size_t>((k - 1 + i) % m_ext)];
      rotated[encode_sequence(view, a_size)] += ext[idx];
    }
    out.push_back(tv(p.joint, rotated));
  }
  return out;
}

double stationarity_gap(const FiniteProcess& p) {
  std::vector<int> first(static_cast<std::size_t>(p.length - 1));
  std::iota(first.begin(), first.end(), 0);
  std::vector<int> last(static_cast<std::size_t>(p.length - 1));
  std::iota(last.begin(), last.end(), 1);
  return tv(marginal_law(p, first), marginal_law(p, last));
}

bool InequalityReport::all_hold() const {
  for (const auto& c : checks)
    if (!c.skipped && !c.holds) return false;
  return true;
}

std::string InequalityReport::to_json() const {
  nlohmann::json j;
  j["coefficients"] = {{"beta", beta},
                       {"beta_star", beta_star},
                       {"avg_switch", avg_switch},
                       {"psi0", psi0},
                       {"mixture_switch", mixture_switch},
                       {"rho", rho},
                       {"rho_masked", rho_masked},
                       {"stationarity_gap", stationarity}};
  j["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc = {{"name", c.name}, {"lhs", c.lhs},       {"rhs", c.rhs},
                         {"slack", c.slack}, {"tolerance", c.tolerance}, {"holds", c.holds}};
    if (c.skipped) {
      jc["skipped"] = true;
      jc["reason"] = c.reason;
    }
    j["checks"].push_back(jc);
  }
  return j.dump(2);
}

InequalityReport verify_inequalities(const FiniteProcess& p, int tau, double tol) {
  p.validate();
  check_lag(p, tau);
  const int n = p.length - 1;

  InequalityReport rep;
  rep.stationarity = stationarity_gap(p);
  const bool stationary = rep.stationarity <= 1e-10;

  rep.beta = beta_mixing(p, tau);
  rep.beta_star = beta_cond_mixing(p, tau);
  rep.avg_switch = avg_switch(p, tau);
  rep.psi0 = switch_coeff(p, 0, tau);
  rep.mixture_switch = mixture_switch(p, tau);
  rep.rho = rho_lp(embed_augmented(p), tau);
  rep.rho_masked = rho_lp(masked_mixture(p, tau), tau);

  auto add = [&](const std::string& name, double lhs, double rhs, bool skip,
                 const std::string& reason) {
    InequalityCheck c;
    c.name = name;
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = rhs - lhs;
    c.tolerance = tol;
    c.holds = lhs <= rhs + tol;
    c.skipped = skip;
    c.reason = reason;
    rep.checks.push_back(std::move(c));
  };

  const double mixing_rhs = 2.0 * rep.beta + 2.0 * rep.beta_star;
  const std::string nonstationary = "requires stationarity";

  add("embedding-vs-mixing", rep.rho, mixing_rhs + 4.0 * tau / static_cast<double>(n + tau + 1),
      !stationary, stationary ? "" : nonstationary);
  add("avg-switch-vs-embedding", rep.avg_switch, 2.0 * rep.rho, false, "");
  add("masked-embedding-upper", rep.rho_masked, rep.avg_switch + rep.psi0, false, "");
  add("masked-embedding-lower", 0.5 * rep.mixture_switch, rep.rho_masked, false, "");

  if (p.length < 3 * tau || 2 * tau + 2 > n - tau + 1) {
    add("rotation-tv", 0.0, mixing_rhs, true, "no admissible rotation index");
  } else if (!stationary) {
    add("rotation-tv", 0.0, mixing_rhs, true, nonstationary);
  } else {
    const auto tvs = rotation_extension_tvs(p, tau);
    const double worst = *std::max_element(tvs.begin(), tvs.end());
    add("rotation-tv", worst, mixing_rhs, false, "");
  }
  return rep;
}

CoverageBounds theorem_bounds(double alpha, int n, int tau, double nu, double beta,
                              double beta_star, double avg_switch, double psi0) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("bounds: alpha must lie in (0,1)");
  if (n < 1 || tau < 0) throw std::invalid_argument("bounds: bad n or tau");
  if (nu < 0.0 || beta < 0.0 || beta_star < 0.0 || avg_switch < 0.0 || psi0 < 0.0)
    throw std::invalid_argument("bounds: coefficients must be nonnegative");

  const auto dn = static_cast<double>(n);
  CoverageBounds b;
  b.rho_bound = std::min(1.0, 2.0 * beta + 2.0 * beta_star + 4.0 * tau / static_cast<double>(n + tau + 1));
  b.rho_masked_bound = std::min(1.0, avg_switch + psi0);
  b.thm_embedding = 1.0 - alpha - b.rho_bound - (tau + 1.0) / dn - 2.0 * std::sqrt(nu + b.rho_bound);
  b.thm_masked = 1.0 - alpha - 3.0 * std::sqrt(nu + (2.0 * tau + 2.0) / dn + b.rho_masked_bound) -
                 2.0 * std::sqrt(nu + tau / dn + (dn + tau + 1.0) / dn * avg_switch);
  b.cor_markov = 1.0 - alpha - 3.0 * std::sqrt(nu + 2.0 * beta + 2.0 * beta_star + (5.0 * tau + 1.0) / dn);
  b.cor_mixing = 1.0 - alpha - 5.0 * std::sqrt(nu + (2.0 * tau + 2.0) / dn + 2.0 * beta);
  return b;
}

}  // namespace lwocp
