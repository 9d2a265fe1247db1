#pragma once

#include "tssqp/linalg.hpp"

namespace tssqp {

/// Relative tolerance on the residuals of every linear solve below.
inline constexpr double kLinearTolerance = 1e-8;

/// Solution of the Newton SQP system
///   [H J^T; J 0] [p; y] = -[g; c].
struct KktSolution {
  Vector p;
  Vector y;
};

/// Orthogonal split of the SQP step and the two-stepsize direction
/// d = beta * u + v, with u in Null(J) and v in Range(J^T).
struct StepDecomposition {
  Vector u;
  Vector v;
  double beta = 1.0;
  Vector d;
};

/// Tangential and normal components of a step, p = u + v.
struct StepComponents {
  Vector u;
  Vector v;
};

/// Thin QR of J^T: J^T = Y R with Y n x m orthonormal, and Z an orthonormal
/// basis of the complement, so that Null(J) = span(Z), Range(J^T) = span(Y).
///
/// Construction fails with RankDeficientJacobian when
/// sigma_min(J) <= max(1e-10 sigma_max(J), 1e-14).
class ConstraintFactorization {
 public:
  explicit ConstraintFactorization(const Matrix& jac);

  Eigen::Index n() const { return range_basis_.rows(); }
  Eigen::Index m() const { return range_basis_.cols(); }

  const Matrix& range_basis() const { return range_basis_; }
  const Matrix& null_basis() const { return null_basis_; }
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }

  /// Minimum-norm solution of J v = -c, v = -J^T (J J^T)^{-1} c.
  Vector normal_step(const Vector& c) const;

  /// argmin_y ||r + J^T y||, i.e. y = -(J J^T)^{-1} J r.
  Vector least_squares_multiplier(const Vector& r) const;

 private:
  Matrix range_basis_;
  Matrix null_basis_;
  Matrix r_;  // m x m upper triangular
  double sigma_min_ = 0.0;
  double sigma_max_ = 0.0;
};

/// Null-space solve of the Newton SQP system for a fixed (H, J).
/// The reduced Hessian Z^T H Z is factored once, so repeated solves with
/// different gradients (Monte-Carlo, true vs. stochastic) are cheap.
class ReducedKktSolver {
 public:
  /// Throws IndefiniteReducedHessian when Z^T H Z is not positive definite.
  ReducedKktSolver(const Matrix& hessian, const Matrix& jac);

  const ConstraintFactorization& factorization() const { return fact_; }

  Vector normal_step(const Vector& c) const { return fact_.normal_step(c); }

  /// u = -Z (Z^T H Z)^{-1} Z^T (g + H v).
  Vector tangential_step(const Vector& g, const Vector& v) const;

  /// Full solve: p = u + v, then y from the first block row by least squares.
  KktSolution solve(const Vector& g, const Vector& c) const;

  /// Same as solve() but also returns the components.
  KktSolution solve(const Vector& g, const Vector& c, StepComponents& parts) const;

 private:
  Matrix hessian_;
  ConstraintFactorization fact_;
  Eigen::LLT<Matrix> reduced_;
};

KktSolution solve_newton_kkt(const Matrix& H, const Matrix& J, const Vector& g,
                             const Vector& c);

/// Orthonormal basis of Null(J), n x (n - m). Column signs are arbitrary.
Matrix null_space_basis(const Matrix& J);

Vector normal_component(const Matrix& J, const Vector& c);

/// Splits a KKT step into u = p - v and v = normal_component(J, c).
StepComponents tangential_component(const KktSolution& ksol, const Matrix& J,
                                    const Vector& c);

/// d = beta u + v. Throws NonPositiveBeta.
StepDecomposition compose_direction(const Vector& u, const Vector& v, double beta);

Vector least_squares_multiplier(const Matrix& J, const Vector& grad);

}  // namespace tssqp
