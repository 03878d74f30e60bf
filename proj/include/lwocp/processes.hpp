#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lwocp/rng.hpp"
#include "lwocp/types.hpp"

namespace lwocp {

/// Multidimensional moving-average process: X_i = w_{i-1} + w_i with
/// w_i i.i.d. standard Gaussian in R^dim, and Y_i = X_{i+1}. Deterministic
/// given the seed.
RawSeries gen_ma1(int dim, int length, std::uint64_t seed);

/// Epoch-based chain with sticky covariates. At each epoch start a latent
/// length K ~ Geom(rho) on {1,2,...} and a level X ~ N(0,1) are drawn; X is
/// held constant through the epoch while each step emits Y ~ N(K, 1). The
/// epoch ends after exactly K steps.
RawSeries gen_sticky_chain(double rho, int length, std::uint64_t seed);

/// Sticky chain with its latent trace, for diagnostics: epoch_length[t] is
/// the K of the epoch containing step t and step_in_epoch[t] counts 1..K.
struct StickyTrace {
  RawSeries series;
  std::vector<int> epoch_length;
  std::vector<int> step_in_epoch;
};
StickyTrace gen_sticky_chain_trace(double rho, int length, std::uint64_t seed);

/// Exact law of a finite-alphabet process of fixed length: a dense
/// probability vector over alphabet^length in row-major order, i.e. the
/// sequence (a_1, ..., a_m) sits at index sum_i a_i * alphabet^(m-i).
struct FiniteProcess {
  int alphabet = 0;
  int length = 0;
  std::vector<double> joint;

  void validate() const;  // nonnegative entries summing to 1
};

/// Dense-storage guard shared by the exact-law operations.
constexpr double kMaxDenseStates = 1e7;

/// Exact joint law of a time-homogeneous Markov chain:
/// joint(z) = init(z_1) * prod_i transition(z_i, z_{i+1}).
FiniteProcess gen_finite_chain(const Mat& transition, const Vec& init, int length);

/// One path of the same chain; agrees with gen_finite_chain in distribution.
std::vector<int> sample_finite_chain(const Mat& transition, const Vec& init, int length, Rng& rng);

/// Binary moving-average analogue: Z_t = (w_{t-1}, w_t) for i.i.d. uniform
/// bits w, encoded over the 4-letter alphabet 2*w_{t-1} + w_t. The joint is
/// computed exactly by enumerating the underlying bits.
FiniteProcess gen_binary_ma(int length);

/// JSON serialization: {"alphabet_size": A, "m": length, "joint": [...]}.
FiniteProcess load_finite_process(const std::string& path);
void save_finite_process(const FiniteProcess& process, const std::string& path);

/// Decoding/encoding helpers for FiniteProcess indices.
std::vector<int> decode_sequence(std::size_t index, int alphabet, int length);
std::size_t encode_sequence(const std::vector<int>& seq, int alphabet);

/// One forecasting problem cut out of a long scalar series: n+1 lifted
/// points built from n + memory + 1 consecutive rows.
struct ChunkProblem {
  LiftedSequence seq;
  long first_row = 0;  // 1-based data-row range this chunk consumed
  long last_row = 0;
};

/// Signals malformed input data (as opposed to bad configuration).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads a scalar series from one column of a headered CSV file and cuts it
/// into disjoint chunks of n + memory + 1 rows separated by `gap` skipped
/// rows; a partial trailing chunk is dropped. Each chunk is lifted with the
/// given memory into n+1 autoregressive points (empty covariates, response =
/// the chosen column). Throws DataError on malformed cells (with the file row
/// number) or when not even one chunk fits.
std::vector<ChunkProblem> ingest_csv(const std::string& path, int column, int memory, int n,
                                     int gap);

}  // namespace lwocp
