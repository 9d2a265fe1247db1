#include "tssqp/sqp_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tssqp/errors.hpp"

namespace tssqp {

ConstraintFactorization::ConstraintFactorization(const Matrix& jac) {
  const Eigen::Index m = jac.rows();
  const Eigen::Index n = jac.cols();
  if (m == 0 || m > n) {
    throw RankDeficientJacobian("Jacobian of size " + std::to_string(m) + "x" +
                                std::to_string(n) + " cannot have full row rank");
  }
  Eigen::HouseholderQR<Matrix> qr(jac.transpose());
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  range_basis_ = q.leftCols(m);
  null_basis_ = q.rightCols(n - m);
  r_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

  // R has the singular values of J.
  Eigen::JacobiSVD<Matrix> svd(r_);
  const auto& s = svd.singularValues();
  sigma_max_ = s.size() > 0 ? s.maxCoeff() : 0.0;
  sigma_min_ = s.size() > 0 ? s.minCoeff() : 0.0;
  const double rank_tol = std::max(1e-10 * sigma_max_, 1e-14);
  if (!(sigma_min_ > rank_tol)) {
    throw RankDeficientJacobian("Jacobian is rank deficient (sigma_min = " +
                                std::to_string(sigma_min_) + ")");
  }
}

Vector ConstraintFactorization::normal_step(const Vector& c) const {
  // J = R^T Y^T, so J v = -c with v = Y w gives R^T w = -c.
  const Vector w = r_.transpose().triangularView<Eigen::Lower>().solve(-c);
  return range_basis_ * w;
}

Vector ConstraintFactorization::least_squares_multiplier(const Vector& r) const {
  // J^T y = Y R y; minimising ||r + Y R y|| gives R y = -Y^T r.
  const Vector rhs = -(range_basis_.transpose() * r);
  return r_.triangularView<Eigen::Upper>().solve(rhs);
}

ReducedKktSolver::ReducedKktSolver(const Matrix& hessian, const Matrix& jac)
    : hessian_(hessian), fact_(jac) {
  if (hessian.rows() != jac.cols() || hessian.cols() != jac.cols()) {
    throw DimensionMismatch("Hessian must be n x n with n = columns of J");
  }
  const Matrix& Z = fact_.null_basis();
  if (Z.cols() > 0) {
    Matrix reduced = Z.transpose() * hessian_ * Z;
    reduced = 0.5 * (reduced + reduced.transpose());
    reduced_.compute(reduced);
    if (reduced_.info() != Eigen::Success) {
      throw IndefiniteReducedHessian("reduced Hessian Z^T H Z is not positive definite");
    }
  }
}

Vector ReducedKktSolver::tangential_step(const Vector& g, const Vector& v) const {
  const Matrix& Z = fact_.null_basis();
  if (Z.cols() == 0) return Vector::Zero(g.size());
  const Vector rhs = -(Z.transpose() * (g + hessian_ * v));
  return Z * reduced_.solve(rhs);
}

KktSolution ReducedKktSolver::solve(const Vector& g, const Vector& c) const {
  StepComponents parts;
  return solve(g, c, parts);
}

KktSolution ReducedKktSolver::solve(const Vector& g, const Vector& c,
                                    StepComponents& parts) const {
  if (g.size() != fact_.n() || c.size() != fact_.m()) {
    throw DimensionMismatch("KKT right-hand side does not match (H, J)");
  }
  parts.v = fact_.normal_step(c);
  parts.u = tangential_step(g, parts.v);
  KktSolution sol;
  sol.p = parts.u + parts.v;
  sol.y = fact_.least_squares_multiplier(g + hessian_ * sol.p);
  return sol;
}

KktSolution solve_newton_kkt(const Matrix& H, const Matrix& J, const Vector& g,
                             const Vector& c) {
  return ReducedKktSolver(H, J).solve(g, c);
}

Matrix null_space_basis(const Matrix& J) {
  return ConstraintFactorization(J).null_basis();
}

Vector normal_component(const Matrix& J, const Vector& c) {
  if (c.size() != J.rows()) throw DimensionMismatch("normal_component: c has wrong length");
  return ConstraintFactorization(J).normal_step(c);
}

StepComponents tangential_component(const KktSolution& ksol, const Matrix& J,
                                    const Vector& c) {
  if (ksol.p.size() != J.cols()) {
    throw DimensionMismatch("tangential_component: p has wrong length");
  }
  StepComponents parts;
  parts.v = normal_component(J, c);
  parts.u = ksol.p - parts.v;
  return parts;
}

StepDecomposition compose_direction(const Vector& u, const Vector& v, double beta) {
  if (!(beta > 0.0)) throw NonPositiveBeta("beta must be positive");
  if (u.size() != v.size()) throw DimensionMismatch("u and v differ in length");
  return StepDecomposition{u, v, beta, beta * u + v};
}

Vector least_squares_multiplier(const Matrix& J, const Vector& grad) {
  if (grad.size() != J.cols()) {
    throw DimensionMismatch("least_squares_multiplier: gradient has wrong length");
  }
  return ConstraintFactorization(J).least_squares_multiplier(grad);
}

}  // namespace tssqp
