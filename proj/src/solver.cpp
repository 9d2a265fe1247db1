#include "tssqp/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tssqp/errors.hpp"

namespace tssqp {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::fixed: return "fixed";
    case Strategy::adaptive: return "adaptive";
    case Strategy::linesearch: return "linesearch";
    case Strategy::ablation: return "ablation";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "fixed") return Strategy::fixed;
  if (text == "adaptive") return Strategy::adaptive;
  if (text == "linesearch") return Strategy::linesearch;
  if (text == "ablation") return Strategy::ablation;
  throw InvalidConfig("unknown strategy '" + std::string(text) + "'");
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::budget_exhausted: return "budget_exhausted";
    case RunStatus::failed: return "failed";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_iters < 0) throw InvalidConfig("max_iters must be nonnegative");
  if (!(feas_tol > 0.0) || !(stat_tol > 0.0)) throw InvalidConfig("tolerances must be positive");
  if (!(noise.epsilon >= 0.0)) throw InvalidConfig("noise level must be nonnegative");
  if (stationarity_interval < 1) throw InvalidConfig("stationarity interval must be >= 1");
  const StepsizeParams& s = step;
  if (!(s.eta > 0.0)) throw InvalidConfig("beta (eta) must be positive");
  if (s.horizon < 1) throw InvalidConfig("horizon must be >= 1");
  if (!(s.nu > 0.0)) throw InvalidConfig("nu must be positive");
  if (!(s.theta >= 0.0)) throw InvalidConfig("theta must be nonnegative");
  if (!(s.xi > 0.0 && s.xi < 1.0)) throw InvalidConfig("xi must lie in (0, 1)");
  if (!(s.rho > 0.0 && s.rho < 1.0)) throw InvalidConfig("rho must lie in (0, 1)");
  if (!(s.q0 > 0.0) || !(s.b0 > 0.0)) throw InvalidConfig("q0 and b0 must be positive");
}

namespace {

FixedSchedule schedule_of(const StepsizeParams& p) {
  return FixedSchedule{p.nu, p.theta, p.eta, p.horizon, p.alpha_rule};
}

double stationarity_error(const Evaluation& e, const ConstraintFactorization& fact) {
  const Vector y = fact.least_squares_multiplier(e.grad);
  return (e.grad + e.jac.transpose() * y).lpNorm<Eigen::Infinity>();
}

IterationRecord advance(SolverState& state, const Problem& problem, const SolverConfig& config,
                        const Evaluation& e, double stationarity);

}  // namespace

SolverState::SolverState(const Problem& problem, const SolverConfig& config,
                         std::uint64_t seed)
    : x_(problem.initial_point()),
      stream_(seed),
      adaptive_(config.step.b0, config.step.q0, config.step.eta, config.step.nu,
                config.step.theta),
      backtracking_(config.step.q0, config.step.nu, config.step.theta, config.step.xi,
                    config.step.rho) {}

IterationRecord step(SolverState& state, const Problem& problem, const SolverConfig& config) {
  const Evaluation e = problem.evaluate(state.x());
  const double stat = state.k() % config.stationarity_interval == 0
                          ? stationarity_error(e, ConstraintFactorization(e.jac))
                          : std::numeric_limits<double>::quiet_NaN();
  return advance(state, problem, config, e, stat);
}

namespace {

IterationRecord advance(SolverState& state, const Problem& problem, const SolverConfig& config,
                        const Evaluation& e, double stationarity) {
  const ReducedKktSolver kkt(problem.hessian(), e.jac);
  const Vector g = perturb_gradient(e.grad, config.noise, state.stream());
  const Vector v = kkt.normal_step(e.c);
  const Vector u = kkt.tangential_step(g, v);

  IterationRecord rec;
  rec.k = state.k();
  rec.c_norm_1 = e.c.lpNorm<1>();
  rec.c_norm_inf = e.c.lpNorm<Eigen::Infinity>();
  rec.stationarity = stationarity;
  rec.u_norm = u.norm();
  rec.v_norm = v.norm();

  const ConstraintOracle oracle = [&problem](const Vector& x) {
    return problem.constraints(x);
  };
  const FixedSchedule schedule = schedule_of(config.step);
  const Vector& x = state.x();

  auto pick_in_range = [&](const AlphaRange& range, const Vector& d) {
    rec.alpha_range = range;
    switch (config.step.alpha_rule) {
      case AlphaRule::lower:
        rec.alpha = range.lower;
        break;
      case AlphaRule::upper:
        rec.alpha = range.upper;
        break;
      case AlphaRule::backtrack: {
        const BacktrackResult bt = safeguarded_backtrack(
            oracle, x, rec.c_norm_1, d,
            {range.upper, range.lower, config.step.xi, config.step.rho});
        rec.alpha = bt.alpha;
        rec.line_search = true;
        rec.backtracks = bt.backtracks;
        rec.hit_safeguard = bt.hit_safeguard;
        break;
      }
    }
  };
  auto adaptive_backtrack = [&](const Vector& d) {
    const auto out = state.backtracking().select(oracle, x, rec.c_norm_1, d, rec.beta);
    rec.alpha = out.alpha;
    rec.alpha_range = out.range;
    rec.line_search = true;
    rec.backtracks = out.search.backtracks;
    rec.hit_safeguard = out.search.hit_safeguard;
  };

  StepDecomposition dec;
  switch (config.strategy) {
    case Strategy::fixed: {
      rec.beta = fixed_beta(schedule);
      dec = compose_direction(u, v, rec.beta);
      pick_in_range(fixed_alpha_range(schedule, rec.beta), dec.d);
      break;
    }
    case Strategy::adaptive: {
      const auto upd = state.adaptive().update(u.squaredNorm(), rec.c_norm_1);
      rec.beta = upd.beta;
      dec = compose_direction(u, v, rec.beta);
      pick_in_range(upd.range, dec.d);
      break;
    }
    case Strategy::linesearch: {
      rec.beta = fixed_beta(schedule);
      dec = compose_direction(u, v, rec.beta);
      adaptive_backtrack(dec.d);
      break;
    }
    case Strategy::ablation: {
      rec.beta = fixed_beta(schedule);
      dec = StepDecomposition{u, v, rec.beta, rec.beta * (u + v)};
      pick_in_range(fixed_alpha_range(schedule, rec.beta), dec.d);
      break;
    }
  }

  if (config.keep_iterates) {
    rec.iterate = IterateSnapshot{x,      e.c, e.grad, g, u, v,
                                  kkt.tangential_step(e.grad, v), dec.d};
  }
  Vector x_next = x + rec.alpha * dec.d;
  state.commit(std::move(x_next), std::move(dec));
  return rec;
}

struct Candidate {
  int k = -1;
  double feas = std::numeric_limits<double>::infinity();
  double stat = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

Trace run(const Problem& problem, const SolverConfig& config, std::uint64_t seed) {
  config.validate();
  Trace trace;
  trace.problem = problem.name();
  trace.config = config;
  trace.seed = seed;

  SolverState state(problem, config, seed);
  Candidate first_feasible;
  Candidate least_infeasible;

  // Measures at the current iterate; returns the stationarity (NaN if skipped).
  auto observe = [&](const Evaluation& e, bool scheduled) {
    const int k = state.k();
    const double feas = e.c.lpNorm<Eigen::Infinity>();
    const bool new_first = first_feasible.k < 0 && feas <= config.feas_tol;
    const bool new_least = first_feasible.k < 0 && feas < least_infeasible.feas;
    // Candidates are recorded before the stationarity solve so that a
    // rank-deficient Jacobian still leaves a feasibility measure behind.
    if (new_first) first_feasible = {k, feas, std::numeric_limits<double>::quiet_NaN()};
    if (new_least) least_infeasible = {k, feas, std::numeric_limits<double>::quiet_NaN()};
    double stat = std::numeric_limits<double>::quiet_NaN();
    if (scheduled || new_first || new_least || feas <= config.feas_tol) {
      stat = stationarity_error(e, ConstraintFactorization(e.jac));
    }
    if (new_first) first_feasible.stat = stat;
    if (new_least) least_infeasible.stat = stat;
    return std::pair{feas, stat};
  };

  bool finished = false;
  try {
    while (state.k() < config.max_iters) {
      const Evaluation e = problem.evaluate(state.x());
      const bool scheduled = state.k() % config.stationarity_interval == 0;
      const auto [feas, stat] = observe(e, scheduled);
      if (feas <= config.feas_tol && stat <= config.stat_tol) {
        first_feasible = {state.k(), feas, stat};
        trace.status = RunStatus::converged;
        finished = true;
        break;
      }
      const double recorded = scheduled ? stat : std::numeric_limits<double>::quiet_NaN();
      trace.records.push_back(advance(state, problem, config, e, recorded));
    }
    if (!finished) {
      observe(problem.evaluate(state.x()), true);
      trace.status = RunStatus::budget_exhausted;
    }
  } catch (const Error& err) {
    trace.status = RunStatus::failed;
    trace.failure = err.what();
  }

  const Candidate& report = first_feasible.k >= 0 ? first_feasible : least_infeasible;
  trace.reported_iterate = report.k;
  trace.feas_error = report.k >= 0 ? report.feas : std::numeric_limits<double>::quiet_NaN();
  trace.stat_error = report.stat;
  trace.iterations = static_cast<int>(trace.records.size());
  trace.x_final = state.x();
  return trace;
}

Trace run_ablation(const Problem& problem, SolverConfig config, std::uint64_t seed) {
  config.strategy = Strategy::ablation;
  return run(problem, config, seed);
}

double fixed_nu_bound(double sigma, double kappa_v, double tau_min, double lipschitz_grad,
                      double lipschitz_jac) {
  return sigma / (2.0 * kappa_v * (tau_min * lipschitz_grad + lipschitz_jac) + 4.0);
}

}  // namespace tssqp
