#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tssqp/problem.hpp"
#include "tssqp/rng.hpp"
#include "tssqp/sqp_core.hpp"
#include "tssqp/stepsize.hpp"

namespace tssqp {

/// How alpha_k and beta_k are chosen.
///   fixed      beta = eta/sqrt(K), alpha in [nu, nu + theta beta]
///   adaptive   Adagrad-Norm beta and alpha range
///   linesearch adaptive backtracking on the constraint violation
///   ablation   single stepsize: d = beta p, alpha in [nu, nu + theta beta]
enum class Strategy { fixed, adaptive, linesearch, ablation };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

struct StepsizeParams {
  double eta = 0.1;  // beta numerator; beta = eta / sqrt(horizon) when pre-specified
  int horizon = 1;
  double nu = 1.0;
  double theta = 1.0;
  double xi = 1e-3;
  double rho = 0.5;
  double q0 = 1e-9;
  double b0 = 1.0;
  AlphaRule alpha_rule = AlphaRule::backtrack;  // fixed, adaptive and ablation
};

struct SolverConfig {
  Strategy strategy = Strategy::linesearch;
  int max_iters = 1000;
  double feas_tol = 1e-6;
  double stat_tol = 1e-4;
  StepsizeParams step;
  NoiseModel noise;
  /// Stationarity is evaluated every this many iterations (and whenever an
  /// iterate becomes the reporting candidate).
  int stationarity_interval = 1;
  /// Keep per-iteration vectors needed by audit_trace.
  bool keep_iterates = true;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Vectors of one iteration, kept only when SolverConfig::keep_iterates.
struct IterateSnapshot {
  Vector x;
  Vector c;
  Vector grad;    // true gradient
  Vector g;       // gradient estimate used for the step
  Vector u;
  Vector v;
  Vector u_true;  // tangential step from the true gradient
  Vector d;
};

struct IterationRecord {
  int k = 0;
  double c_norm_1 = 0.0;
  double c_norm_inf = 0.0;
  double stationarity = 0.0;  // NaN when not evaluated at this iteration
  double alpha = 0.0;
  double beta = 0.0;
  AlphaRange alpha_range;
  bool line_search = false;
  int backtracks = 0;
  bool hit_safeguard = false;
  double u_norm = 0.0;
  double v_norm = 0.0;
  std::optional<IterateSnapshot> iterate;
};

enum class RunStatus { converged, budget_exhausted, failed };

std::string_view to_string(RunStatus s);

/// Loop variables of one run. Owned by a single run.
class SolverState {
 public:
  SolverState(const Problem& problem, const SolverConfig& config, std::uint64_t seed);

  int k() const { return k_; }
  const Vector& x() const { return x_; }
  /// Moves to the next iterate and remembers the direction that produced it.
  void commit(Vector x_next, StepDecomposition dec) {
    x_ = std::move(x_next);
    last_ = std::move(dec);
    ++k_;
  }
  RandomStream& stream() { return stream_; }
  AdaptiveState& adaptive() { return adaptive_; }
  AdaptiveBacktracking& backtracking() { return backtracking_; }
  const std::optional<StepDecomposition>& last_decomposition() const { return last_; }

 private:
  int k_ = 0;
  Vector x_;
  RandomStream stream_;
  AdaptiveState adaptive_;
  AdaptiveBacktracking backtracking_;
  std::optional<StepDecomposition> last_;
};

struct Trace {
  std::string problem;
  SolverConfig config;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;
  RunStatus status = RunStatus::budget_exhausted;
  std::string failure;
  /// Iterates evaluated (x_0 .. x_K).
  int iterations = 0;
  /// Reported errors: at the terminal iterate of a converged run; otherwise
  /// at the first iterate with ||c||_inf <= feas_tol when there is one, else
  /// at the least infeasible iterate.
  double feas_error = 0.0;
  double stat_error = 0.0;
  int reported_iterate = -1;
  Vector x_final;
};

/// One iteration at state.x(). Throws RankDeficientJacobian,
/// IndefiniteReducedHessian or EvaluationFailure.
IterationRecord step(SolverState& state, const Problem& problem, const SolverConfig& config);

/// Iterates from the problem's initial point until converged, out of
/// budget, or failed. Never throws for numerical failures; those end the
/// run with status failed.
Trace run(const Problem& problem, const SolverConfig& config, std::uint64_t seed);

/// `run` with the single-stepsize strategy.
Trace run_ablation(const Problem& problem, SolverConfig config, std::uint64_t seed);

/// Admissible upper bound on nu for the fixed-stepsize convergence theory,
/// sigma / (2 kappa_v (tau_min L + Gamma) + 4), from user-supplied constants.
double fixed_nu_bound(double sigma, double kappa_v, double tau_min, double lipschitz_grad,
                      double lipschitz_jac);

}  // namespace tssqp
