#pragma once

#include <functional>
#include <string_view>

#include "tssqp/linalg.hpp"

namespace tssqp {

/// Closed interval of admissible alpha values.
struct AlphaRange {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double alpha) const { return lower <= alpha && alpha <= upper; }
};

/// How alpha is picked inside its interval.
enum class AlphaRule { lower, upper, backtrack };

std::string_view to_string(AlphaRule rule);
AlphaRule parse_alpha_rule(std::string_view text);

/// Pre-specified stepsizes: beta = eta / sqrt(K) for the whole run and
/// alpha in [nu, nu + theta beta].
struct FixedSchedule {
  double nu = 1.0;
  double theta = 1.0;
  double eta = 0.1;
  int horizon = 1;
  AlphaRule alpha_rule = AlphaRule::backtrack;

  /// Settings of the numerical experiments: beta = 0.1 independent of the
  /// budget, nu = 1, theta = 1.
  static FixedSchedule experiment_profile() { return FixedSchedule{}; }
};

double fixed_beta(const FixedSchedule& schedule);
AlphaRange fixed_alpha_range(const FixedSchedule& schedule, double beta);

/// Adagrad-Norm accumulators
///   b_k^2 = b_{k-1}^2 + ||u_k||^2,  q_k^2 = q_{k-1}^2 + ||c_k||_1,
///   beta_k = eta / b_k,  alpha_k in [nu/q_k, nu/q_k + min(theta/b_k, theta/q_k)].
class AdaptiveState {
 public:
  struct Update {
    double beta;
    AlphaRange range;
  };

  AdaptiveState(double b0, double q0, double eta, double nu, double theta);

  Update update(double u_norm_sq, double c_norm_1);

  double b() const { return b_; }
  double q() const { return q_; }
  double eta() const { return eta_; }

  /// eta / b_{-1}; only used to build the lagged true direction in audits.
  double initial_beta() const { return eta_ / b_initial_; }

 private:
  double b_;
  double q_;
  double b_initial_;
  double eta_;
  double nu_;
  double theta_;
};

using ConstraintOracle = std::function<Vector(const Vector&)>;

struct LineSearchParams {
  double upper = 1.0;
  double lower = 1.0;
  double xi = 1e-3;
  double rho = 0.5;
};

struct BacktrackResult {
  double alpha = 0.0;
  bool hit_safeguard = false;
  int backtracks = 0;
};

/// Upper bound on the backtracks of one call: ceil(log(lower/upper)/log rho) + 1.
int max_backtracks(double lower, double upper, double rho);

/// Backtracks from `upper` on ||c(x + a d)||_1 <= (1 - xi a) ||c(x)||_1 while
/// a > lower. Returns the accepted a, or `lower` with hit_safeguard set when
/// the search drops below the floor without certifying decrease.
/// Throws InvalidLineSearchConfig.
BacktrackResult safeguarded_backtrack(const ConstraintOracle& c_oracle, const Vector& x,
                                      const Vector& d, const LineSearchParams& params);

/// Same, with ||c(x)||_1 already known.
BacktrackResult safeguarded_backtrack(const ConstraintOracle& c_oracle, const Vector& x,
                                      double c_norm_1, const Vector& d,
                                      const LineSearchParams& params);

/// Alpha selection of the adaptive-backtracking method: the floor is
/// nu / q_hat with q_hat^2 = q_{k-1}^2 + ||c_k||_1, the search starts at
/// nu / q_hat + theta beta_k, and q is advanced to q_hat only when the
/// safeguard fires.
class AdaptiveBacktracking {
 public:
  struct Outcome {
    double alpha;
    double q_hat;
    AlphaRange range;
    BacktrackResult search;
  };

  AdaptiveBacktracking(double q0, double nu, double theta, double xi, double rho);

  Outcome select(const ConstraintOracle& c_oracle, const Vector& x, double c_norm_1,
                 const Vector& d, double beta);

  double q() const { return q_; }

 private:
  double q_;
  double nu_;
  double theta_;
  double xi_;
  double rho_;
};

}  // namespace tssqp
