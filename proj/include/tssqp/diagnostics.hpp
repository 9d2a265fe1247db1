#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tssqp/linalg.hpp"
#include "tssqp/problem.hpp"
#include "tssqp/solver.hpp"

namespace tssqp {

/// phi(x, tau) = tau f(x) + ||c(x)||_1.
double merit_phi(double f_val, double c_l1, double tau);

/// l(x, tau, d) = tau (f + grad^T d) + ||c + J d||_1.
double model_l(double f_val, const Vector& grad, const Vector& c, const Matrix& J,
               double tau, const Vector& d);

/// l(x, tau, 0) - l(x, tau, d) = -tau grad^T d + ||c||_1, valid when c + J d = 0.
double model_reduction(const Vector& grad, double c_l1, double tau, const Vector& d);

struct MeritInputs {
  double tau = 1.0;
  double sigma = 0.5;
  double kappa_beta = 1.0;
  double kappa_H = 1.0;
  double kappa_u = 1.0;
  double kappa_g = 1.0;
  double kappa_v = 1.0;

  /// Throws InvalidConfig unless all constants are positive and sigma in (0,1).
  void validate() const;
};

/// (1 - sigma) / (kappa_v (kappa_beta kappa_H kappa_u + kappa_g)).
double tau_min(const MeritInputs& inputs);

struct ErrorMeasures {
  double feasibility = 0.0;   // ||c||_inf
  double stationarity = 0.0;  // ||grad f + J^T y_ls||_inf
  Vector multiplier;          // least-squares multiplier from the true gradient
};

ErrorMeasures error_measures(const Problem& problem, const Vector& x);

struct AuditTolerances {
  double linear = kLinearTolerance;
  /// Relative slack for inequalities that hold exactly in real arithmetic.
  double rounding = 1e-10;
  /// sigma used for the merit-parameter inequality.
  double sigma = 0.5;
};

struct AuditViolation {
  int iteration = 0;
  double margin = 0.0;  // bound - value; negative means violated
};

struct AuditCheck {
  std::string name;
  int iterations_checked = 0;
  double worst_margin = 0.0;
  std::vector<AuditViolation> violations;

  bool passed() const { return violations.empty(); }
};

struct AuditReport {
  std::string header;
  std::vector<AuditCheck> checks;

  bool passed() const;
  const AuditCheck* find(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// Re-verifies a trace against the method's invariants:
///   decomposition     J u = 0, J v = -c, u^T v = 0
///   normal_bound      ||v|| <= ||c||_2 / sigma_min(J)
///   alpha_range       alpha within its regime's interval
///   decrease          non-safeguard line-search steps certify
///                     ||c(x + alpha d)||_1 <= (1 - xi alpha) ||c||_1
///   backtrack_bound   backtracks <= ceil(log(lower/upper)/log rho) + 1
///   true_step         u = u_true (noise-free traces only)
///   merit_parameter   tau_min (grad^T d_true + beta u_true^T H u_true)
///                     <= (1 - sigma) ||c||_1 with empirical constants
///                     (noise-free traces only)
/// Iterations without a snapshot are skipped by the vector-based checks.
AuditReport audit_trace(const Trace& trace, const Problem& problem,
                        const AuditTolerances& tolerances = {});

}  // namespace tssqp
