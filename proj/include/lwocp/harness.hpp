#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lwocp/conformal.hpp"
#include "lwocp/processes.hpp"

namespace lwocp {

enum class Method { Split, Jackknife, Lwo };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Data source for an experiment: a synthetic generator or a CSV column.
struct ProcessSpec {
  enum class Kind { Ma1, Sticky, Csv };
  Kind kind = Kind::Ma1;
  int dim = 1;          // ma1
  double rho = 0.05;    // sticky
  std::string csv_path;  // csv
  int csv_column = 0;
  int csv_gap = 48;
};

struct ExperimentConfig {
  ProcessSpec process;
  int n = 200;     // training points per trial; each trial sees n+1 lifted points
  int memory = 0;  // lag length L
  int tau = 5;
  double alpha = 0.1;
  double inflation = 0.0;
  int trials = 500;
  std::vector<PredictorSpec> predictors;
  std::vector<Method> methods;
  std::uint64_t seed = 1;

  void validate() const;
};

struct TrialRecord {
  Method method;
  std::string predictor;
  int trial = 0;
  std::uint64_t seed = 0;
  int covered = 0;
  double radius = 0.0;  // +infinity allowed
  double wall_ms = 0.0;
};

/// Runs the configured trials. Trial i derives its seed as
/// mix_seed(config.seed, i) regardless of the methods requested, so every
/// method and predictor is evaluated on identical data (paired comparison).
/// Synthetic processes draw a fresh series per trial; a CSV source maps trial
/// i to chunk i and truncates (with a warning on stderr) when fewer chunks
/// than trials exist. Records are ordered by (trial, predictor, method).
std::vector<TrialRecord> run_trials(const ExperimentConfig& config);

struct SummaryRow {
  std::string method;
  std::string predictor;
  int trials = 0;
  double coverage_mean = 0.0;
  double coverage_se = 0.0;
  double mean_finite_radius = 0.0;
  double radius_se = 0.0;
  int infinite_radius_count = 0;
};

/// Groups records by (method, predictor) in first-appearance order. Radius
/// statistics cover finite radii only; infinite ones are counted separately.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

/// CSV with header method,predictor,trial,seed,covered,radius,wall_ms; the
/// radius column prints `inf` for the infinite sentinel.
void write_records_csv(const std::vector<TrialRecord>& records, std::ostream& out);

std::string summary_to_json(const std::vector<SummaryRow>& rows);

}  // namespace lwocp
