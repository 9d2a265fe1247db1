#include "tssqp/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tssqp/errors.hpp"

namespace tssqp {

std::string_view to_string(AlphaRule rule) {
  switch (rule) {
    case AlphaRule::lower: return "lower";
    case AlphaRule::upper: return "upper";
    case AlphaRule::backtrack: return "backtrack";
  }
  return "?";
}

AlphaRule parse_alpha_rule(std::string_view text) {
  if (text == "lower") return AlphaRule::lower;
  if (text == "upper") return AlphaRule::upper;
  if (text == "backtrack") return AlphaRule::backtrack;
  throw InvalidConfig("unknown alpha rule '" + std::string(text) + "'");
}

double fixed_beta(const FixedSchedule& schedule) {
  if (schedule.horizon < 1) throw InvalidConfig("horizon K must be at least 1");
  return schedule.eta / std::sqrt(static_cast<double>(schedule.horizon));
}

AlphaRange fixed_alpha_range(const FixedSchedule& schedule, double beta) {
  if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive");
  return {schedule.nu, schedule.nu + schedule.theta * beta};
}

AdaptiveState::AdaptiveState(double b0, double q0, double eta, double nu, double theta)
    : b_(b0), q_(q0), b_initial_(b0), eta_(eta), nu_(nu), theta_(theta) {
  if (!(b0 > 0.0) || !(q0 > 0.0) || !(eta > 0.0) || !(nu > 0.0) || !(theta >= 0.0)) {
    throw InvalidConfig("adaptive stepsizes need b0, q0, eta, nu > 0 and theta >= 0");
  }
}

AdaptiveState::Update AdaptiveState::update(double u_norm_sq, double c_norm_1) {
  b_ = std::sqrt(b_ * b_ + u_norm_sq);
  q_ = std::sqrt(q_ * q_ + c_norm_1);
  const double lo = nu_ / q_;
  return {eta_ / b_, {lo, lo + std::min(theta_ / b_, theta_ / q_)}};
}

int max_backtracks(double lower, double upper, double rho) {
  return static_cast<int>(std::ceil(std::log(lower / upper) / std::log(rho))) + 1;
}

namespace {

void validate(const LineSearchParams& p) {
  if (!(p.lower > 0.0) || !(p.lower <= p.upper)) {
    throw InvalidLineSearchConfig("line search needs 0 < lower <= upper");
  }
  if (!(p.xi > 0.0 && p.xi < 1.0)) throw InvalidLineSearchConfig("xi must lie in (0, 1)");
  if (!(p.rho > 0.0 && p.rho < 1.0)) throw InvalidLineSearchConfig("rho must lie in (0, 1)");
}

}  // namespace

BacktrackResult safeguarded_backtrack(const ConstraintOracle& c_oracle, const Vector& x,
                                      const Vector& d, const LineSearchParams& params) {
  validate(params);
  return safeguarded_backtrack(c_oracle, x, c_oracle(x).lpNorm<1>(), d, params);
}

BacktrackResult safeguarded_backtrack(const ConstraintOracle& c_oracle, const Vector& x,
                                      double c_norm_1, const Vector& d,
                                      const LineSearchParams& params) {
  validate(params);
  auto decreases = [&](double alpha) {
    const Vector trial = x + alpha * d;
    return c_oracle(trial).lpNorm<1>() <= (1.0 - params.xi * alpha) * c_norm_1;
  };

  BacktrackResult result;
  double alpha = params.upper;
  bool certified = decreases(alpha);
  while (!certified && alpha > params.lower) {
    alpha *= params.rho;
    ++result.backtracks;
    // Below the floor the step is discarded, so there is nothing to certify.
    if (alpha < params.lower) break;
    certified = decreases(alpha);
  }
  if (certified && alpha >= params.lower) {
    result.alpha = alpha;
    return result;
  }
  result.alpha = params.lower;
  result.hit_safeguard = true;
  return result;
}

AdaptiveBacktracking::AdaptiveBacktracking(double q0, double nu, double theta, double xi,
                                           double rho)
    : q_(q0), nu_(nu), theta_(theta), xi_(xi), rho_(rho) {
  if (!(q0 > 0.0) || !(nu > 0.0) || !(theta >= 0.0)) {
    throw InvalidConfig("adaptive backtracking needs q0, nu > 0 and theta >= 0");
  }
}

AdaptiveBacktracking::Outcome AdaptiveBacktracking::select(const ConstraintOracle& c_oracle,
                                                           const Vector& x, double c_norm_1,
                                                           const Vector& d, double beta) {
  Outcome out;
  out.q_hat = std::sqrt(q_ * q_ + c_norm_1);
  out.range.lower = nu_ / out.q_hat;
  out.range.upper = out.range.lower + theta_ * beta;
  out.search = safeguarded_backtrack(c_oracle, x, c_norm_1, d,
                                     {out.range.upper, out.range.lower, xi_, rho_});
  out.alpha = out.search.alpha;
  if (out.search.hit_safeguard) q_ = out.q_hat;
  return out;
}

}  // namespace tssqp
