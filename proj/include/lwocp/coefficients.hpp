#pragma once

#include <span>
#include <string>
#include <vector>

#include "lwocp/processes.hpp"

namespace lwocp {

/// Total variation distance between two pmfs on the same support.
double tv(std::span<const double> p, std::span<const double> q);

/// Pushforward of the joint law onto the listed coordinate positions
/// (0-based, in the given order, which need not be monotone). The result is
/// dense over alphabet^positions.size() in the same row-major encoding.
std::vector<double> marginal_law(const FiniteProcess& p, const std::vector<int>& positions);

/// Worst-case TV between a gap-tau block split (prefix, suffix) of the
/// sequence and the product of the two block marginals; the maximum runs over
/// every admissible split point.
double beta_mixing(const FiniteProcess& p, int tau);

/// Worst-case TV between the joint law and the law that redraws prefix and
/// suffix conditionally independently given the tau-length middle block.
/// Middle blocks of probability zero contribute nothing (both laws vanish).
double beta_cond_mixing(const FiniteProcess& p, int tau);

/// Switch coefficient for deletion index k in {-tau, ..., n}: the TV between
/// the forward deletion of the block after position k and the corresponding
/// reversed-rotation deletion.
double switch_coeff(const FiniteProcess& p, long k, int tau);

/// Mean of switch_coeff over k in {-tau, ..., n}.
double avg_switch(const FiniteProcess& p, int tau);

/// TV between the two deletion laws mixed uniformly over k (the deletion
/// index is not observed, so components of equal length overlap).
double mixture_switch(const FiniteProcess& p, int tau);

/// Law over sequences on the alphabet {0..A-1} plus the reserved dummy
/// symbol A, dense over (A+1)^length.
struct AugmentedPMF {
  int alphabet = 0;  // number of real symbols; the dummy symbol is `alphabet`
  int length = 0;
  std::vector<double> pmf;

  int symbols() const { return alphabet + 1; }
  void validate() const;
};

/// Embeds an exact law into the augmented alphabet (no dummy mass).
AugmentedPMF embed_augmented(const FiniteProcess& p);

/// Exact law of the masked sequence with a uniformly random window start
/// K in {-tau, ..., n}: the uniform mixture of the n+tau+1 deterministic
/// maskings of the sequence.
AugmentedPMF masked_mixture(const FiniteProcess& p, int tau);

/// Alphabet-restricted cyclic embedding coefficient: the smallest TV between
/// `q` and the first-m marginal of a law on (A+1)^(m+lengthening) that is
/// invariant under cyclic shifts. Solved as a linear program whose variables
/// are quotiented onto cyclic orbits; `orbit_order_seed` permutes the orbit
/// ordering (0 keeps the natural order) and exists so solver determinism can
/// be checked. The restriction to the original alphabet plus the dummy makes
/// the result an upper bound on the unrestricted coefficient.
double rho_lp(const AugmentedPMF& q, int lengthening, std::uint64_t orbit_order_seed = 0);

/// TV(Z, first-m marginal of the k-rotated conditional extension) for each k
/// in [2*tau+2, n-tau+1]; the extension appends tau points drawn from the
/// conditional law of a middle block given its flanking blocks, evaluated at
/// the sequence edges.
std::vector<double> rotation_extension_tvs(const FiniteProcess& p, int tau);

/// TV between the laws of the first m-1 and last m-1 coordinates; the
/// stationarity screen used by verify_inequalities.
double stationarity_gap(const FiniteProcess& p);

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  double tolerance = 0.0;
  bool holds = false;  // lhs <= rhs + tolerance
  bool skipped = false;
  std::string reason;
};

struct InequalityReport {
  // Computed coefficients, for reference alongside the checks.
  double beta = 0.0;
  double beta_star = 0.0;
  double avg_switch = 0.0;
  double psi0 = 0.0;
  double mixture_switch = 0.0;
  double rho = 0.0;
  double rho_masked = 0.0;
  double stationarity = 0.0;
  std::vector<InequalityCheck> checks;

  bool all_hold() const;
  std::string to_json() const;
};

/// Evaluates the dependence-coefficient inequalities on an exact law:
///   (i)  rho <= 2 beta + 2 beta* + 4 tau / (n+tau+1)        [stationary]
///   (ii) avg switch <= 2 rho
///  (iii) rho(masked mixture) <= avg switch + switch at 0
///   (iv) mixture switch / 2 <= rho(masked mixture)
///    (v) rotation-extension TVs <= 2 beta + 2 beta*          [stationary]
/// Checks that require stationarity are skipped (with a reason) when the
/// stationarity gap exceeds 1e-10.
InequalityReport verify_inequalities(const FiniteProcess& p, int tau, double tol);

/// Coverage lower bounds assembled from dependence and stability inputs; the
/// embedding coefficients are replaced by their mixing/switch upper bounds so
/// the record is pure arithmetic in the given quantities.
struct CoverageBounds {
  double rho_bound = 0.0;         // 2 beta + 2 beta* + 4 tau/(n+tau+1), capped at 1
  double rho_masked_bound = 0.0;  // avg_switch + psi0, capped at 1
  double thm_embedding = 0.0;     // 1 - alpha - rho - (tau+1)/n - 2 sqrt(nu + rho)
  double thm_masked = 0.0;        // bound via the masked-mixture embedding
  double cor_markov = 0.0;        // 1 - alpha - 3 sqrt(nu + 2b + 2b* + (5 tau+1)/n)
  double cor_mixing = 0.0;        // 1 - alpha - 5 sqrt(nu + (2 tau+2)/n + 2b)
};

CoverageBounds theorem_bounds(double alpha, int n, int tau, double nu, double beta,
                              double beta_star, double avg_switch, double psi0);

}  // namespace lwocp
