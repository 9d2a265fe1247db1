#include "tssqp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>
#include <tuple>

#include "tssqp/errors.hpp"

namespace tssqp {

void ExperimentPlan::validate() const {
  if (problems.empty()) throw InvalidConfig("plan has no problems");
  if (strategies.empty()) throw InvalidConfig("plan has no strategies");
  if (noise_levels.empty()) throw InvalidConfig("plan has no noise levels");
  if (trials < 1) throw InvalidConfig("trials must be >= 1");
  if (budget < 1) throw InvalidConfig("budget must be >= 1");
  for (double eps : noise_levels) {
    if (!(eps >= 0.0)) throw InvalidConfig("noise levels must be nonnegative");
  }
  SolverConfig probe;
  probe.step = step;
  probe.max_iters = budget;
  probe.validate();
}

std::uint64_t run_seed(std::uint64_t base_seed, const std::string& problem, Strategy strategy,
                       double noise, int trial) {
  StableHash h;
  h.add(problem).add(to_string(strategy)).add(noise).add(static_cast<std::uint64_t>(trial));
  return derive_seed(base_seed, h.value());
}

namespace {

auto row_key(const ResultRow& r) {
  return std::tuple(r.problem, to_string(r.strategy), r.noise, r.trial);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentPlan& plan) {
  plan.validate();

  std::vector<Problem> problems;
  problems.reserve(plan.problems.size());
  for (const auto& source : plan.problems) problems.push_back(load_problem(source));

  struct Job {
    std::size_t problem;
    Strategy strategy;
    double noise;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    for (Strategy s : plan.strategies) {
      for (double eps : plan.noise_levels) {
        for (int t = 0; t < plan.trials; ++t) jobs.push_back({p, s, eps, t});
      }
    }
  }

  std::vector<ResultRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const Problem& problem = problems[job.problem];
      ResultRow& row = rows[i];
      row.problem = problem.name();
      row.strategy = job.strategy;
      row.noise = job.noise;
      row.trial = job.trial;
      row.seed = run_seed(plan.base_seed, row.problem, job.strategy, job.noise, job.trial);

      SolverConfig config;
      config.strategy = job.strategy;
      config.max_iters = plan.budget;
      config.step = plan.step;
      config.noise = NoiseModel{job.noise, row.seed};
      config.keep_iterates = plan.audit;

      const auto start = std::chrono::steady_clock::now();
      Trace trace;
      try {
        trace = run(problem, config, row.seed);
      } catch (const Error& e) {
        trace.status = RunStatus::failed;
        trace.failure = e.what();
        trace.feas_error = trace.stat_error = std::nan("");
      }
      const auto stop = std::chrono::steady_clock::now();
      row.status = trace.status;
      row.feas_error = trace.feas_error;
      row.stat_error = trace.stat_error;
      row.iters = trace.iterations;
      row.wall_ms = plan.measure_time
                        ? std::chrono::duration<double, std::milli>(stop - start).count()
                        : 0.0;
      if (plan.audit) row.audit = audit_trace(trace, problem);
    }
  };

  unsigned n_workers = plan.workers != 0 ? plan.workers : std::thread::hardware_concurrency();
  n_workers = std::max(1u, std::min<unsigned>(n_workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::jthread> pool;
  for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();

  std::sort(rows.begin(), rows.end(),
            [](const ResultRow& a, const ResultRow& b) { return row_key(a) < row_key(b); });
  return rows;
}

GroupKey parse_group_key(std::string_view text) {
  if (text == "problem") return GroupKey::problem;
  if (text == "strategy") return GroupKey::strategy;
  if (text == "noise") return GroupKey::noise;
  throw InvalidConfig("unknown group key '" + std::string(text) + "'");
}

FiveNumber five_number_summary(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !std::isfinite(v); });
  if (values.empty()) throw EmptyInput("no finite values to summarise");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows,
                                  const std::vector<GroupKey>& keys) {
  if (rows.empty()) throw EmptyInput("no rows to summarise");
  auto has = [&](GroupKey k) { return std::find(keys.begin(), keys.end(), k) != keys.end(); };
  const bool by_problem = has(GroupKey::problem);
  const bool by_strategy = has(GroupKey::strategy);
  const bool by_noise = has(GroupKey::noise);

  using Key = std::tuple<std::string, std::string, double>;
  struct Group {
    SummaryRow row;
    std::vector<double> feas;
    std::vector<double> stat;
  };
  std::map<Key, Group> groups;
  for (const auto& r : rows) {
    Key key{by_problem ? r.problem : std::string(),
            by_strategy ? std::string(to_string(r.strategy)) : std::string(),
            by_noise ? r.noise : 0.0};
    Group& g = groups[key];
    if (g.row.count == 0) {
      if (by_problem) g.row.problem = r.problem;
      if (by_strategy) g.row.strategy = r.strategy;
      if (by_noise) g.row.noise = r.noise;
    }
    ++g.row.count;
    g.feas.push_back(r.feas_error);
    g.stat.push_back(r.stat_error);
  }

  auto summary_or_nan = [](std::vector<double> v) {
    try {
      return five_number_summary(std::move(v));
    } catch (const EmptyInput&) {
      const double nan = std::nan("");
      return FiveNumber{nan, nan, nan, nan, nan};
    }
  };
  std::vector<SummaryRow> out;
  for (auto& [_, g] : groups) {
    g.row.feas = summary_or_nan(std::move(g.feas));
    g.row.stat = summary_or_nan(std::move(g.stat));
    out.push_back(std::move(g.row));
  }
  return out;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "problem,strategy,noise,trial,status,feas_error,stat_error,iters,wall_ms\n";
  for (const auto& r : rows) {
    out << r.problem << ',' << to_string(r.strategy) << ',' << format_double(r.noise) << ','
        << r.trial << ',' << to_string(r.status) << ',' << format_double(r.feas_error) << ','
        << format_double(r.stat_error) << ',' << r.iters << ',' << format_double(r.wall_ms)
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "problem,strategy,noise,count,"
         "feas_min,feas_q1,feas_median,feas_q3,feas_max,"
         "stat_min,stat_q1,stat_median,stat_q3,stat_max\n";
  auto five = [&](const FiveNumber& f) {
    out << format_double(f.min) << ',' << format_double(f.q1) << ','
        << format_double(f.median) << ',' << format_double(f.q3) << ','
        << format_double(f.max);
  };
  for (const auto& r : rows) {
    out << r.problem << ',' << (r.strategy ? to_string(*r.strategy) : "") << ','
        << (r.noise ? format_double(*r.noise) : "") << ',' << r.count << ',';
    five(r.feas);
    out << ',';
    five(r.stat);
    out << '\n';
  }
}

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json five_to_json(const FiveNumber& f) {
  return {{"min", number_or_null(f.min)},       {"q1", number_or_null(f.q1)},
          {"median", number_or_null(f.median)}, {"q3", number_or_null(f.q3)},
          {"max", number_or_null(f.max)}};
}

}  // namespace

nlohmann::json rows_to_json(const std::vector<ResultRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"problem", r.problem},
                   {"strategy", to_string(r.strategy)},
                   {"noise", r.noise},
                   {"trial", r.trial},
                   {"status", to_string(r.status)},
                   {"feas_error", number_or_null(r.feas_error)},
                   {"stat_error", number_or_null(r.stat_error)},
                   {"iters", r.iters},
                   {"wall_ms", r.wall_ms}});
  }
  return out;
}

nlohmann::json summary_to_json(const std::vector<SummaryRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"count", r.count},
                     {"feas_error", five_to_json(r.feas)},
                     {"stat_error", five_to_json(r.stat)}};
    if (!r.problem.empty()) j["problem"] = r.problem;
    if (r.strategy) j["strategy"] = to_string(*r.strategy);
    if (r.noise) j["noise"] = *r.noise;
    out.push_back(std::move(j));
  }
  return out;
}

nlohmann::json audits_to_json(const std::vector<ResultRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    if (!r.audit) continue;
    out.push_back({{"problem", r.problem},
                   {"strategy", to_string(r.strategy)},
                   {"noise", r.noise},
                   {"trial", r.trial},
                   {"report", r.audit->to_json()}});
  }
  return out;
}

}  // namespace tssqp
