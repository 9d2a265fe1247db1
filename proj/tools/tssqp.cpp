// Command-line driver for the two-stepsize stochastic SQP experiments.
//
//   tssqp run --suite --strategy linesearch,ablation --noise 1e-5,1e-3,1e-1 \
//             --seeds 20 --iters 1000 --out results.csv
//   tssqp list
//
// Exit codes: 0 success, 2 configuration error, 3 every run failed.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tssqp/errors.hpp"
#include "tssqp/harness.hpp"
#include "tssqp/problem.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kAllFailed = 3;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunOptions {
  std::string problem;
  bool suite = false;
  std::string strategies = "linesearch";
  std::string noise = "1e-5,1e-3,1e-1";
  int seeds = 20;
  int iters = 1000;
  std::uint64_t base_seed = 0;
  unsigned workers = 0;
  tssqp::StepsizeParams step;
  std::string alpha_rule = "backtrack";
  std::string out;
  std::string format = "csv";
  std::string summary_out;
  std::string group_by = "strategy,noise";
  bool audit = false;
  bool no_timing = false;
};

tssqp::ExperimentPlan make_plan(const RunOptions& o) {
  tssqp::ExperimentPlan plan;
  if (o.suite) {
    plan.problems = tssqp::builtin_problem_names();
  } else if (!o.problem.empty()) {
    plan.problems = split_list(o.problem);
  } else {
    throw tssqp::InvalidConfig("either --problem or --suite is required");
  }
  plan.strategies.clear();
  for (const auto& s : split_list(o.strategies)) plan.strategies.push_back(tssqp::parse_strategy(s));
  plan.noise_levels.clear();
  for (const auto& s : split_list(o.noise)) {
    try {
      plan.noise_levels.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw tssqp::InvalidConfig("bad noise level '" + s + "'");
    }
  }
  plan.trials = o.seeds;
  plan.budget = o.iters;
  plan.base_seed = o.base_seed;
  plan.workers = o.workers;
  plan.step = o.step;
  plan.step.alpha_rule = tssqp::parse_alpha_rule(o.alpha_rule);
  plan.audit = o.audit;
  plan.measure_time = !o.no_timing;
  plan.validate();
  return plan;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw tssqp::InvalidConfig("cannot open output file '" + path + "'");
  f << text;
}

int do_run(const RunOptions& o) {
  tssqp::ExperimentPlan plan;
  std::vector<tssqp::GroupKey> keys;
  try {
    plan = make_plan(o);
    for (const auto& k : split_list(o.group_by)) keys.push_back(tssqp::parse_group_key(k));
    if (o.format != "csv" && o.format != "json") {
      throw tssqp::InvalidConfig("--format must be csv or json");
    }
  } catch (const tssqp::Error& e) {
    std::cerr << "tssqp: " << e.what() << '\n';
    return kConfigError;
  }

  std::vector<tssqp::ResultRow> rows;
  try {
    rows = tssqp::run_experiment(plan);
  } catch (const tssqp::Error& e) {
    std::cerr << "tssqp: " << e.what() << '\n';
    return kConfigError;
  }
  const auto summary = tssqp::summarize(rows, keys);

  std::ostringstream body;
  if (o.format == "csv") {
    tssqp::write_csv(body, rows);
  } else {
    nlohmann::json doc{{"rows", tssqp::rows_to_json(rows)},
                       {"summary", tssqp::summary_to_json(summary)}};
    body << doc.dump(2) << '\n';
  }
  try {
    write_output(o.out, body.str());
    if (!o.summary_out.empty()) {
      std::ostringstream s;
      tssqp::write_summary_csv(s, summary);
      write_output(o.summary_out, s.str());
    }
    if (o.audit) {
      const std::string audit_path =
          (o.out.empty() || o.out == "-") ? std::string("audit.json") : o.out + ".audit.json";
      write_output(audit_path, tssqp::audits_to_json(rows).dump(2) + "\n");
    }
  } catch (const tssqp::Error& e) {
    std::cerr << "tssqp: " << e.what() << '\n';
    return kConfigError;
  }

  const bool all_failed = std::all_of(rows.begin(), rows.end(), [](const auto& r) {
    return r.status == tssqp::RunStatus::failed;
  });
  return all_failed ? kAllFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stepsize stochastic SQP for equality-constrained problems"};
  app.require_subcommand(1);

  RunOptions o;
  auto* run = app.add_subcommand("run", "Run an experiment plan and emit one row per run");
  auto* problem_opt = run->add_option("--problem", o.problem,
                                      "Registered problem name or problem-file path (comma list)");
  auto* suite_opt = run->add_flag("--suite", o.suite, "Run every built-in problem");
  problem_opt->excludes(suite_opt);
  run->add_option("--strategy", o.strategies,
                  "linesearch|fixed|adaptive|ablation (comma list)");
  run->add_option("--noise", o.noise, "Gradient noise variance levels (comma list)");
  run->add_option("--seeds", o.seeds, "Trials per configuration");
  run->add_option("--iters", o.iters, "Iteration budget per run");
  run->add_option("--base-seed", o.base_seed, "Base seed of the experiment");
  run->add_option("--beta", o.step.eta, "Tangential stepsize numerator eta (beta = eta/sqrt(K))");
  run->add_option("--horizon", o.step.horizon, "K in beta = eta/sqrt(K)");
  run->add_option("--nu", o.step.nu, "Lower alpha scale nu");
  run->add_option("--theta", o.step.theta, "Alpha range width theta");
  run->add_option("--xi", o.step.xi, "Sufficient decrease constant xi");
  run->add_option("--rho", o.step.rho, "Backtracking factor rho");
  run->add_option("--q0", o.step.q0, "Initial accumulator q_{-1}");
  run->add_option("--b0", o.step.b0, "Initial accumulator b_{-1}");
  run->add_option("--alpha-rule", o.alpha_rule,
                  "lower|upper|backtrack (fixed, adaptive and ablation strategies)");
  run->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  run->add_option("--out", o.out, "Output path ('-' or empty: stdout)");
  run->add_option("--format", o.format, "csv|json");
  run->add_option("--summary", o.summary_out, "Also write five-number summaries (CSV)");
  run->add_option("--group-by", o.group_by, "Summary grouping: problem,strategy,noise");
  run->add_flag("--audit", o.audit, "Audit every run; reports go to <out>.audit.json");
  run->add_flag("--no-timing", o.no_timing, "Write wall_ms as 0 for byte-reproducible output");

  auto* list = app.add_subcommand("list", "List the built-in problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*list) {
    for (const auto& name : tssqp::builtin_problem_names()) {
      const auto p = tssqp::make_builtin_problem(name);
      std::cout << name << "  n=" << p.n() << " m=" << p.m() << '\n';
    }
    return 0;
  }
  return do_run(o);
}
