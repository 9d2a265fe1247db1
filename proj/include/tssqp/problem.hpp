#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tssqp/linalg.hpp"
#include "tssqp/rng.hpp"

namespace tssqp {

/// Deterministic quantities of the problem at one point.
struct Evaluation {
  double f = 0.0;
  Vector grad;
  Vector c;
  Matrix jac;  // m x n
};

/// A primal-dual pair satisfying grad f(x) + J(x)^T y = 0, c(x) = 0.
struct KktPoint {
  Vector x;
  Vector y;
};

using Evaluator = std::function<Evaluation(const Vector&)>;

/// min f(x) s.t. c(x) = 0 with deterministic oracles for f, grad f, c and J.
/// Immutable after construction; safe to share between concurrent runs.
class Problem {
 public:
  Problem(std::string name, int n, int m, Evaluator eval, Vector initial_point,
          std::optional<KktPoint> known_kkt = std::nullopt,
          std::optional<Matrix> hessian = std::nullopt);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int m() const { return m_; }
  const Vector& initial_point() const { return x0_; }
  const std::optional<KktPoint>& known_kkt() const { return known_kkt_; }

  /// Constant SQP Hessian approximation H used for every iteration.
  /// Identity unless the problem ships its own.
  const Matrix& hessian() const { return hessian_; }

  /// Throws DimensionMismatch for a wrong-sized x and EvaluationFailure
  /// when any returned quantity is not finite.
  Evaluation evaluate(const Vector& x) const;

  /// Convenience for the line search: only c(x), same checks as evaluate.
  Vector constraints(const Vector& x) const;

 private:
  std::string name_;
  int n_;
  int m_;
  Evaluator eval_;
  Vector x0_;
  std::optional<KktPoint> known_kkt_;
  Matrix hessian_;
};

/// Gaussian gradient noise g ~ N(grad f(x), epsilon I).
struct NoiseModel {
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  /// Trace of the noise covariance, E||g - grad f||^2 = n * epsilon.
  double variance_bound(int n) const { return n * epsilon; }
};

/// Returns grad f(x) + sqrt(epsilon) z with z standard normal from `stream`.
Vector sample_stochastic_gradient(const Problem& problem, const Vector& x,
                                  const NoiseModel& noise, RandomStream& stream);

/// Same perturbation applied to an already evaluated gradient.
Vector perturb_gradient(const Vector& grad, const NoiseModel& noise,
                        RandomStream& stream);

/// f = 1/2 x^T Q x + g0^T x, c = A x - b.
Problem make_quadratic_linear(std::string name, const Matrix& Q, const Vector& g0,
                              const Matrix& A, const Vector& b,
                              std::optional<Vector> initial_point = std::nullopt);

/// Names of the registry problems, sorted.
std::vector<std::string> builtin_problem_names();

/// Registry lookup; throws UnknownProblem.
Problem make_builtin_problem(std::string_view name);

/// Parses the JSON problem-file format. Throws ParseError.
Problem parse_problem_json(std::string_view text);

/// A registered name, or else a path to a problem file.
Problem load_problem(const std::string& source);

}  // namespace tssqp
