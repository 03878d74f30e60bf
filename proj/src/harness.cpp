#include "lwocp/harness.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "lwocp/parallel.hpp"
#include "lwocp/rng.hpp"

namespace lwocp {

std::string method_name(Method m) {
  switch (m) {
    case Method::Split:
      return "split";
    case Method::Jackknife:
      return "jackknife";
    case Method::Lwo:
      return "lwo";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "split") return Method::Split;
  if (name == "jackknife") return Method::Jackknife;
  if (name == "lwo") return Method::Lwo;
  throw std::invalid_argument("unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (n < 4) throw std::invalid_argument("config: n must be at least 4");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0,1)");
  if (tau < 0 || tau >= n) throw std::invalid_argument("config: tau must lie in [0, n)");
  if (memory < 0) throw std::invalid_argument("config: memory must be nonnegative");
  if (inflation < 0.0) throw std::invalid_argument("config: inflation must be nonnegative");
  if (trials < 0) throw std::invalid_argument("config: trials must be nonnegative");
  if (predictors.empty()) throw std::invalid_argument("config: no predictors given");
  if (methods.empty()) throw std::invalid_argument("config: no methods given");
  for (const auto& p : predictors) p.validate();
  if (process.kind == ProcessSpec::Kind::Ma1 && process.dim < 1)
    throw std::invalid_argument("config: ma1 dimension must be positive");
  if (process.kind == ProcessSpec::Kind::Sticky && !(process.rho > 0.0 && process.rho < 1.0))
    throw std::invalid_argument("config: sticky rho must lie in (0,1)");
  if (process.kind == ProcessSpec::Kind::Csv && process.csv_path.empty())
    throw std::invalid_argument("config: csv path missing");
}

namespace {

LiftedSequence make_trial_sequence(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  const int raw_len = cfg.n + 1 + cfg.memory;
  switch (cfg.process.kind) {
    case ProcessSpec::Kind::Ma1:
      return lift(gen_ma1(cfg.process.dim, raw_len, trial_seed), cfg.memory);
    case ProcessSpec::Kind::Sticky:
      return lift(gen_sticky_chain(cfg.process.rho, raw_len, trial_seed), cfg.memory);
    case ProcessSpec::Kind::Csv:
      throw std::logic_error("csv trials are materialized from chunks");
  }
  throw std::logic_error("unknown process kind");
}

}  // namespace

std::vector<TrialRecord> run_trials(const ExperimentConfig& cfg) {
  cfg.validate();

  std::vector<LiftedSequence> chunks;
  int trials = cfg.trials;
  if (cfg.process.kind == ProcessSpec::Kind::Csv) {
    auto problems = ingest_csv(cfg.process.csv_path, cfg.process.csv_column, cfg.memory, cfg.n,
                               cfg.process.csv_gap);
    if (static_cast<int>(problems.size()) < trials) {
      std::cerr << "warning: only " << problems.size() << " chunks available; truncating from "
                << trials << " trials\n";
      trials = static_cast<int>(problems.size());
    }
    chunks.reserve(problems.size());
    for (auto& p : problems) chunks.push_back(std::move(p.seq));
  }

  const int cells = static_cast<int>(cfg.predictors.size() * cfg.methods.size());
  std::vector<TrialRecord> records(static_cast<std::size_t>(trials * cells));

  detail::parallel_for(trials, [&](int trial) {
    const std::uint64_t trial_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    const LiftedSequence seq = cfg.process.kind == ProcessSpec::Kind::Csv
                                   ? chunks[static_cast<std::size_t>(trial)]
                                   : make_trial_sequence(cfg, trial_seed);
    const AugmentedPoint& test = seq.points.back();
    if (test.is_dummy()) throw std::logic_error("trial sequence has a dummy test point");
    const ScoreKind kind =
        test.y().size() == 1 ? ScoreKind::AbsoluteResidual : ScoreKind::EuclideanNorm;

    int slot = trial * cells;
    for (const auto& predictor : cfg.predictors) {
      for (const Method method : cfg.methods) {
        const auto t0 = std::chrono::steady_clock::now();
        PredictionRegion region;
        switch (method) {
          case Method::Split:
            region = split_cp(seq, cfg.alpha, predictor, kind, trial_seed);
            break;
          case Method::Jackknife:
            region = jackknife(seq, cfg.alpha, predictor, kind, trial_seed).region;
            break;
          case Method::Lwo:
            region =
                lwo(seq, cfg.alpha, cfg.tau, predictor, kind, cfg.inflation, trial_seed).region;
            break;
        }
        const auto t1 = std::chrono::steady_clock::now();

        TrialRecord rec;
        rec.method = method;
        rec.predictor = predictor.to_string();
        rec.trial = trial;
        rec.seed = trial_seed;
        rec.covered = region.contains(test.y()) ? 1 : 0;
        rec.radius = region.radius;
        rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        records[static_cast<std::size_t>(slot++)] = std::move(rec);
      }
    }
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");

  std::vector<SummaryRow> rows;
  auto find_row = [&rows](const std::string& method, const std::string& predictor) -> SummaryRow& {
    for (auto& r : rows)
      if (r.method == method && r.predictor == predictor) return r;
    rows.push_back(SummaryRow{method, predictor, 0, 0, 0, 0, 0, 0});
    return rows.back();
  };

  // First pass: means.
  for (const auto& rec : records) {
    auto& row = find_row(method_name(rec.method), rec.predictor);
    row.trials += 1;
    row.coverage_mean += rec.covered;
    if (std::isinf(rec.radius)) {
      row.infinite_radius_count += 1;
    } else {
      row.mean_finite_radius += rec.radius;
    }
  }
  for (auto& row : rows) {
    row.coverage_mean /= row.trials;
    const int finite = row.trials - row.infinite_radius_count;
    row.mean_finite_radius = finite > 0 ? row.mean_finite_radius / finite : 0.0;
    row.coverage_se = std::sqrt(row.coverage_mean * (1.0 - row.coverage_mean) / row.trials);
  }

  // Second pass: standard error of the finite-radius mean.
  for (const auto& rec : records) {
    if (std::isinf(rec.radius)) continue;
    auto& row = find_row(method_name(rec.method), rec.predictor);
    const double d = rec.radius - row.mean_finite_radius;
    row.radius_se += d * d;
  }
  for (auto& row : rows) {
    const int finite = row.trials - row.infinite_radius_count;
    row.radius_se = finite > 1 ? std::sqrt(row.radius_se / (finite - 1.0) / finite) : 0.0;
  }
  return rows;
}

void write_records_csv(const std::vector<TrialRecord>& records, std::ostream& out) {
  out << "method,predictor,trial,seed,covered,radius,wall_ms\n";
  char buf[64];
  for (const auto& r : records) {
    out << method_name(r.method) << ',' << r.predictor << ',' << r.trial << ',' << r.seed << ','
        << r.covered << ',';
    if (std::isinf(r.radius)) {
      out << "inf";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", r.radius);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.3f", r.wall_ms);
    out << ',' << buf << '\n';
  }
}

std::string summary_to_json(const std::vector<SummaryRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : rows) {
    j.push_back({{"method", r.method},
                 {"predictor", r.predictor},
                 {"trials", r.trials},
                 {"coverage_mean", r.coverage_mean},
                 {"coverage_se", r.coverage_se},
                 {"mean_finite_radius", r.mean_finite_radius},
                 {"radius_se", r.radius_se},
                 {"infinite_radius_count", r.infinite_radius_count}});
  }
  return j.dump(2);
}

}  // namespace lwocp
