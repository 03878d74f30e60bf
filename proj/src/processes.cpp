#include "lwocp/processes.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lwocp {

RawSeries gen_ma1(int dim, int length, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("ma1: dimension must be positive");
  if (length < 2) throw std::invalid_argument("ma1: length must be at least 2");
  Rng rng(seed);

  // Innovations w_0, ..., w_{length+1}; the extra trailing draw feeds the last
  // response Y_length = X_{length+1}.
  Mat w(length + 2, dim);
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (int j = 0; j < dim; ++j) w(i, j) = rng.normal();

  RawSeries out;
  out.x.resize(length, dim);
  out.y.resize(length, dim);
  for (int i = 1; i <= length; ++i) {
    out.x.row(i - 1) = w.row(i - 1) + w.row(i);
    out.y.row(i - 1) = w.row(i) + w.row(i + 1);  // = X_{i+1}
  }
  return out;
}

StickyTrace gen_sticky_chain_trace(double rho, int length, std::uint64_t seed) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("sticky: rho must lie in (0,1)");
  if (length < 1) throw std::invalid_argument("sticky: length must be positive");
  Rng rng(seed);

  StickyTrace out;
  out.series.x.resize(length, 1);
  out.series.y.resize(length, 1);
  out.epoch_length.resize(static_cast<std::size_t>(length));
  out.step_in_epoch.resize(static_cast<std::size_t>(length));

  int k = 0, step = 0;
  double level = 0.0;
  for (int t = 0; t < length; ++t) {
    if (step == k) {  // new epoch (also covers t = 0)
      step = 0;
      k = rng.geometric(rho);
      level = rng.normal();
    }
    ++step;
    out.series.x(t, 0) = level;
    out.series.y(t, 0) = static_cast<double>(k) + rng.normal();
    out.epoch_length[static_cast<std::size_t>(t)] = k;
    out.step_in_epoch[static_cast<std::size_t>(t)] = step;
  }
  return out;
}

RawSeries gen_sticky_chain(double rho, int length, std::uint64_t seed) {
  return gen_sticky_chain_trace(rho, length, seed).series;
}

// ---------------------------------------------------------------------------
// Finite-alphabet processes
// ---------------------------------------------------------------------------

void FiniteProcess::validate() const {
  if (alphabet < 1 || length < 1) throw std::invalid_argument("finite process: bad shape");
  double total = 0.0;
  for (double v : joint) {
    if (!(v >= 0.0)) throw std::invalid_argument("finite process: negative mass");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("finite process: mass does not sum to 1");
}

namespace {

std::size_t checked_state_count(int alphabet, int length, const char* what) {
  const double states = std::pow(static_cast<double>(alphabet), length);
  if (states > kMaxDenseStates) throw std::invalid_argument(std::string(what) + ": state space too large");
  return static_cast<std::size_t>(std::llround(states));
}

}  // namespace

std::vector<int> decode_sequence(std::size_t index, int alphabet, int length) {
  std::vector<int> seq(static_cast<std::size_t>(length));
  for (int i = length - 1; i >= 0; --i) {
    seq[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(alphabet));
    index /= static_cast<std::size_t>(alphabet);
  }
  return seq;
}

std::size_t encode_sequence(const std::vector<int>& seq, int alphabet) {
  std::size_t index = 0;
  for (int s : seq) index = index * static_cast<std::size_t>(alphabet) + static_cast<std::size_t>(s);
  return index;
}

FiniteProcess gen_finite_chain(const Mat& transition, const Vec& init, int length) {
  const int a = static_cast<int>(init.size());
  if (transition.rows() != a || transition.cols() != a)
    throw std::invalid_argument("finite chain: transition shape mismatch");
  for (int i = 0; i < a; ++i) {
    if (std::abs(transition.row(i).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("finite chain: transition rows must sum to 1");
  }
  if (std::abs(init.sum() - 1.0) > 1e-9) throw std::invalid_argument("finite chain: init must sum to 1");

  FiniteProcess out;
  out.alphabet = a;
  out.length = length;
  const std::size_t states = checked_state_count(a, length, "finite chain");
  out.joint.assign(states, 0.0);
  for (std::size_t idx = 0; idx < states; ++idx) {
    const auto z = decode_sequence(idx, a, length);
    double p = init[z[0]];
    for (int i = 0; i + 1 < length && p > 0.0; ++i) p *= transition(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(i) + 1]);
    out.joint[idx] = p;
  }
  return out;
}

std::vector<int> sample_finite_chain(const Mat& transition, const Vec& init, int length, Rng& rng) {
  auto draw = [&rng](const Vec& pmf) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pmf.size(); ++i) {
      acc += pmf[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(pmf.size() - 1);
  };
  std::vector<int> z(static_cast<std::size_t>(length));
  z[0] = draw(init);
  for (int i = 1; i < length; ++i) z[static_cast<std::size_t>(i)] = draw(transition.row(z[static_cast<std::size_t>(i) - 1]).transpose());
  return z;
}

FiniteProcess gen_binary_ma(int length) {
  FiniteProcess out;
  out.alphabet = 4;
  out.length = length;
  const std::size_t states = checked_state_count(4, length, "binary ma");
  out.joint.assign(states, 0.0);

  const int bits = length + 1;  // w_0, ..., w_length
  const double mass = std::pow(0.5, bits);
  for (std::uint64_t w = 0; w < (1ULL << bits); ++w) {
    std::vector<int> z(static_cast<std::size_t>(length));
    for (int t = 1; t <= length; ++t) {
      const int prev = static_cast<int>((w >> (t - 1)) & 1ULL);
      const int cur = static_cast<int>((w >> t) & 1ULL);
      z[static_cast<std::size_t>(t - 1)] = 2 * prev + cur;
    }
    out.joint[encode_sequence(z, 4)] += mass;
  }
  return out;
}

FiniteProcess load_finite_process(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open process file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("bad process file " + path + ": " + e.what());
  }
  FiniteProcess p;
  try {
    p.alphabet = j.at("alphabet_size").get<int>();
    p.length = j.at("m").get<int>();
    p.joint = j.at("joint").get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw DataError("bad process file " + path + ": " + e.what());
  }
  const std::size_t states = checked_state_count(p.alphabet, p.length, "process file");
  if (p.joint.size() != states) throw DataError("bad process file " + path + ": joint has wrong size");
  p.validate();
  return p;
}

void save_finite_process(const FiniteProcess& process, const std::string& path) {
  nlohmann::json j;
  j["alphabet_size"] = process.alphabet;
  j["m"] = process.length;
  j["joint"] = process.joint;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write process file: " + path);
  out << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::vector<ChunkProblem> ingest_csv(const std::string& path, int column, int memory, int n,
                                     int gap) {
  if (column < 0) throw std::invalid_argument("ingest: column must be nonnegative");
  if (memory < 0 || n < 1 || gap < 0) throw std::invalid_argument("ingest: bad chunk geometry");

  std::ifstream in(path);
  if (!in) throw DataError("cannot open csv file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("csv file is empty: " + path);  // header

  std::vector<double> series;
  long row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cells = split_csv_row(line);
    if (column >= static_cast<int>(cells.size()))
      throw DataError("csv row " + std::to_string(row) + ": missing column " + std::to_string(column));
    const std::string& cell = cells[static_cast<std::size_t>(column)];
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw DataError("csv row " + std::to_string(row) + ": non-numeric cell '" + cell + "'");
    }
    if (used != cell.size())
      throw DataError("csv row " + std::to_string(row) + ": non-numeric cell '" + cell + "'");
    series.push_back(value);
  }

  const long chunk_rows = static_cast<long>(n) + memory + 1;
  const long t_total = static_cast<long>(series.size());
  if (t_total < chunk_rows)
    throw DataError("csv has " + std::to_string(t_total) + " data rows; one chunk needs " +
                    std::to_string(chunk_rows));

  const long stride = chunk_rows + gap;
  const long chunks = (t_total + gap) / stride;

  std::vector<ChunkProblem> out;
  out.reserve(static_cast<std::size_t>(chunks));
  for (long c = 0; c < chunks; ++c) {
    const long begin = c * stride;  // 0-based offset into the series
    RawSeries raw;
    raw.x.resize(chunk_rows, 0);  // autoregressive mode: no exogenous covariates
    raw.y.resize(chunk_rows, 1);
    for (long i = 0; i < chunk_rows; ++i) raw.y(i, 0) = series[static_cast<std::size_t>(begin + i)];
    raw.start_index = begin + 1;

    ChunkProblem chunk;
    chunk.seq = lift(raw, memory);
    chunk.first_row = begin + 1;
    chunk.last_row = begin + chunk_rows;
    out.push_back(std::move(chunk));
  }
  return out;
}

}  // namespace lwocp
