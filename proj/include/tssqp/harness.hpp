#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tssqp/diagnostics.hpp"
#include "tssqp/solver.hpp"

namespace tssqp {

struct ExperimentPlan {
  std::vector<std::string> problems;  // registry names or problem-file paths
  std::vector<double> noise_levels{1e-5, 1e-3, 1e-1};
  int trials = 20;
  int budget = 1000;
  std::vector<Strategy> strategies{Strategy::linesearch, Strategy::ablation};
  std::uint64_t base_seed = 0;
  StepsizeParams step;
  unsigned workers = 0;   // 0: hardware concurrency
  bool measure_time = true;
  bool audit = false;

  /// Throws InvalidConfig.
  void validate() const;
};

struct ResultRow {
  std::string problem;
  Strategy strategy = Strategy::linesearch;
  double noise = 0.0;
  int trial = 0;
  RunStatus status = RunStatus::budget_exhausted;
  double feas_error = 0.0;
  double stat_error = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  std::uint64_t seed = 0;
  std::optional<AuditReport> audit;
};

/// Stable per-run seed: a mix of base_seed with an FNV-1a hash of
/// (problem, strategy, noise bits, trial).
std::uint64_t run_seed(std::uint64_t base_seed, const std::string& problem, Strategy strategy,
                       double noise, int trial);

/// One row per (problem, strategy, noise, trial), sorted by that key.
/// Failed runs are rows with status failed; the experiment never aborts.
/// Throws UnknownProblem / ParseError when a problem cannot be loaded.
std::vector<ResultRow> run_experiment(const ExperimentPlan& plan);

enum class GroupKey { problem, strategy, noise };

GroupKey parse_group_key(std::string_view text);

/// min, first quartile, median, third quartile, max. Quartiles use linear
/// interpolation between order statistics (type 7).
struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Type-7 five-number summary of the finite values. Throws EmptyInput.
FiveNumber five_number_summary(std::vector<double> values);

struct SummaryRow {
  std::string problem;  // empty unless grouped by problem
  std::optional<Strategy> strategy;
  std::optional<double> noise;
  int count = 0;
  FiveNumber feas;
  FiveNumber stat;
};

/// Throws EmptyInput for no rows.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows,
                                  const std::vector<GroupKey>& keys = {GroupKey::strategy,
                                                                       GroupKey::noise});

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double value);

/// Header: problem,strategy,noise,trial,status,feas_error,stat_error,iters,wall_ms
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

nlohmann::json rows_to_json(const std::vector<ResultRow>& rows);
nlohmann::json summary_to_json(const std::vector<SummaryRow>& rows);

/// Audit reports of the rows that carry one.
nlohmann::json audits_to_json(const std::vector<ResultRow>& rows);

}  // namespace tssqp
