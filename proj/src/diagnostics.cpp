#include "tssqp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tssqp/errors.hpp"
#include "tssqp/sqp_core.hpp"
#include "tssqp/stepsize.hpp"

namespace tssqp {

double merit_phi(double f_val, double c_l1, double tau) { return tau * f_val + c_l1; }

double model_l(double f_val, const Vector& grad, const Vector& c, const Matrix& J,
               double tau, const Vector& d) {
  if (grad.size() != d.size() || J.cols() != d.size() || J.rows() != c.size()) {
    throw DimensionMismatch("model_l: inconsistent dimensions");
  }
  return tau * (f_val + grad.dot(d)) + (c + J * d).lpNorm<1>();
}

double model_reduction(const Vector& grad, double c_l1, double tau, const Vector& d) {
  return -tau * grad.dot(d) + c_l1;
}

void MeritInputs::validate() const {
  if (!(tau > 0.0) || !(sigma > 0.0 && sigma < 1.0) || !(kappa_beta > 0.0) ||
      !(kappa_H > 0.0) || !(kappa_u > 0.0) || !(kappa_g > 0.0) || !(kappa_v > 0.0)) {
    throw InvalidConfig("merit inputs must be positive with sigma in (0, 1)");
  }
}

double tau_min(const MeritInputs& in) {
  in.validate();
  return (1.0 - in.sigma) / (in.kappa_v * (in.kappa_beta * in.kappa_H * in.kappa_u + in.kappa_g));
}

ErrorMeasures error_measures(const Problem& problem, const Vector& x) {
  const Evaluation e = problem.evaluate(x);
  ErrorMeasures out;
  out.feasibility = e.c.lpNorm<Eigen::Infinity>();
  out.multiplier = least_squares_multiplier(e.jac, e.grad);
  out.stationarity = (e.grad + e.jac.transpose() * out.multiplier).lpNorm<Eigen::Infinity>();
  return out;
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
}

const AuditCheck* AuditReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

nlohmann::json AuditReport::to_json() const {
  nlohmann::json out;
  out["header"] = header;
  out["passed"] = passed();
  out["checks"] = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc;
    jc["check"] = c.name;
    jc["passed"] = c.passed();
    jc["iterations_checked"] = c.iterations_checked;
    jc["worst_margin"] = c.iterations_checked > 0 ? nlohmann::json(c.worst_margin)
                                                  : nlohmann::json(nullptr);
    jc["violations"] = nlohmann::json::array();
    for (const auto& v : c.violations) {
      jc["violations"].push_back({{"iteration", v.iteration}, {"margin", v.margin}});
    }
    out["checks"].push_back(std::move(jc));
  }
  return out;
}

namespace {

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) { check_.name = std::move(name); }

  /// Records `value <= bound`.
  void observe(int k, double value, double bound) {
    const double margin = bound - value;
    if (check_.iterations_checked == 0 || margin < check_.worst_margin) {
      check_.worst_margin = margin;
    }
    ++check_.iterations_checked;
    if (!(margin >= 0.0)) check_.violations.push_back({k, margin});
  }

  AuditCheck take() { return std::move(check_); }

 private:
  AuditCheck check_;
};

}  // namespace

AuditReport audit_trace(const Trace& trace, const Problem& problem,
                        const AuditTolerances& tol) {
  AuditReport report;
  report.header =
      "merit_parameter uses constants taken as maxima over this trace; it is a "
      "weaker check than the inequality with global constants";

  const SolverConfig& cfg = trace.config;
  const bool noise_free = cfg.noise.epsilon == 0.0;
  const Matrix& H = problem.hessian();
  const ConstraintOracle oracle = [&problem](const Vector& x) {
    return problem.constraints(x);
  };

  CheckBuilder decomposition("decomposition");
  CheckBuilder normal_bound("normal_bound");
  CheckBuilder alpha_range("alpha_range");
  CheckBuilder decrease("decrease");
  CheckBuilder backtrack_bound("backtrack_bound");
  CheckBuilder true_step("true_step");
  CheckBuilder merit("merit_parameter");

  // Empirical constants for the merit-parameter inequality.
  double kappa_g = 0.0;
  double kappa_u = 0.0;
  double kappa_v = 0.0;
  double kappa_beta = 0.0;
  const double kappa_H = Eigen::JacobiSVD<Matrix>(H).singularValues().maxCoeff();
  const double initial_beta = cfg.step.eta / cfg.step.b0;

  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const IterationRecord& rec = trace.records[i];
    const int k = rec.k;

    // alpha in [lower, upper], with relative rounding slack on the upper end.
    const double scale = std::max(1.0, std::abs(rec.alpha_range.upper));
    alpha_range.observe(k, rec.alpha_range.lower - rec.alpha, 0.0);
    alpha_range.observe(k, rec.alpha, rec.alpha_range.upper + tol.rounding * scale);

    if (rec.line_search) {
      const int bound = max_backtracks(rec.alpha_range.lower, rec.alpha_range.upper, cfg.step.rho);
      backtrack_bound.observe(k, rec.backtracks, bound);
    }

    if (!rec.iterate) continue;
    const IterateSnapshot& it = *rec.iterate;
    const Matrix J = problem.evaluate(it.x).jac;
    const ConstraintFactorization fact(J);

    const double c_inf = it.c.lpNorm<Eigen::Infinity>();
    decomposition.observe(k, (J * it.u).lpNorm<Eigen::Infinity>(),
                          tol.linear * std::max(1.0, it.u.lpNorm<Eigen::Infinity>()));
    decomposition.observe(k, (J * it.v + it.c).lpNorm<Eigen::Infinity>(),
                          tol.linear * std::max(1.0, c_inf));
    decomposition.observe(k, std::abs(it.u.dot(it.v)),
                          tol.linear * it.u.norm() * it.v.norm());

    normal_bound.observe(k, it.v.norm(),
                         it.c.norm() / fact.sigma_min() * (1.0 + tol.rounding));

    if (rec.line_search && !rec.hit_safeguard) {
      const double after = oracle(it.x + rec.alpha * it.d).lpNorm<1>();
      decrease.observe(k, after, (1.0 - cfg.step.xi * rec.alpha) * it.c.lpNorm<1>());
    }

    if (noise_free) {
      true_step.observe(k, (it.u - it.u_true).lpNorm<Eigen::Infinity>(),
                        tol.linear * std::max(1.0, it.u_true.lpNorm<Eigen::Infinity>()));
      const double c2 = it.c.norm();
      kappa_g = std::max(kappa_g, it.grad.norm());
      kappa_u = std::max(kappa_u, it.u_true.norm());
      if (c2 > 0.0) {
        const double vn = it.v.norm();
        kappa_v = std::max(kappa_v, std::max(vn, vn * vn) / c2);
      }
    }
    const double beta_used =
        cfg.strategy == Strategy::adaptive
            ? (i == 0 ? initial_beta : trace.records[i - 1].beta)
            : rec.beta;
    kappa_beta = std::max(kappa_beta, beta_used);
  }

  if (noise_free && kappa_v > 0.0 && kappa_g + kappa_u > 0.0) {
    MeritInputs in;
    in.sigma = tol.sigma;
    in.kappa_beta = kappa_beta;
    in.kappa_H = kappa_H;
    in.kappa_u = std::max(kappa_u, std::numeric_limits<double>::min());
    in.kappa_g = std::max(kappa_g, std::numeric_limits<double>::min());
    in.kappa_v = kappa_v;
    const double tau = tau_min(in);
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
      const IterationRecord& rec = trace.records[i];
      if (!rec.iterate) continue;
      const IterateSnapshot& it = *rec.iterate;
      const double beta = cfg.strategy == Strategy::adaptive
                              ? (i == 0 ? initial_beta : trace.records[i - 1].beta)
                              : rec.beta;
      const Vector d_true = beta * it.u_true + it.v;
      const double quad = it.u_true.dot(H * it.u_true);
      const double lhs = tau * (it.grad.dot(d_true) + beta * quad);
      const double rhs = (1.0 - in.sigma) * it.c.lpNorm<1>();
      const double scale = tau * (std::abs(it.grad.dot(d_true)) +
                                  beta * it.u_true.norm() * it.grad.norm() +
                                  beta * std::abs(quad)) +
                           rhs;
      const double slack = tol.rounding * scale;
      merit.observe(rec.k, lhs, rhs + slack);
    }
  }

  report.checks.push_back(decomposition.take());
  report.checks.push_back(normal_bound.take());
  report.checks.push_back(alpha_range.take());
  report.checks.push_back(decrease.take());
  report.checks.push_back(backtrack_bound.take());
  report.checks.push_back(true_step.take());
  report.checks.push_back(merit.take());
  return report;
}

}  // namespace tssqp
