#include "tssqp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "tssqp/errors.hpp"

namespace tssqp {

namespace {

bool all_finite(const Evaluation& e) {
  return std::isfinite(e.f) && e.grad.allFinite() && e.c.allFinite() &&
         e.jac.allFinite();
}

std::optional<KktPoint> solve_quadratic_kkt(const Matrix& Q, const Vector& g0,
                                            const Matrix& A, const Vector& b) {
  const Eigen::Index n = Q.rows();
  const Eigen::Index m = A.rows();
  Matrix K = Matrix::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = Q;
  K.topRightCorner(n, m) = A.transpose();
  K.bottomLeftCorner(m, n) = A;
  Vector rhs(n + m);
  rhs << -g0, b;
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible()) return std::nullopt;
  const Vector sol = lu.solve(rhs);
  return KktPoint{sol.head(n), sol.tail(m)};
}

}  // namespace

Problem::Problem(std::string name, int n, int m, Evaluator eval, Vector initial_point,
                 std::optional<KktPoint> known_kkt, std::optional<Matrix> hessian)
    : name_(std::move(name)),
      n_(n),
      m_(m),
      eval_(std::move(eval)),
      x0_(std::move(initial_point)),
      known_kkt_(std::move(known_kkt)),
      hessian_(hessian ? std::move(*hessian) : Matrix::Identity(n, n)) {
  if (n_ <= 0 || m_ <= 0 || m_ > n_) {
    throw DimensionMismatch("problem '" + name_ + "': need 0 < m <= n, got n=" +
                            std::to_string(n_) + ", m=" + std::to_string(m_));
  }
  if (x0_.size() != n_) {
    throw DimensionMismatch("problem '" + name_ + "': initial point has wrong length");
  }
  if (hessian_.rows() != n_ || hessian_.cols() != n_) {
    throw DimensionMismatch("problem '" + name_ + "': Hessian must be n x n");
  }
}

Evaluation Problem::evaluate(const Vector& x) const {
  if (x.size() != n_) {
    throw DimensionMismatch("evaluate: expected x of length " + std::to_string(n_) +
                            ", got " + std::to_string(x.size()));
  }
  Evaluation e = eval_(x);
  if (e.grad.size() != n_ || e.c.size() != m_ || e.jac.rows() != m_ ||
      e.jac.cols() != n_) {
    throw DimensionMismatch("problem '" + name_ + "': oracle returned inconsistent sizes");
  }
  if (!x.allFinite() || !all_finite(e)) {
    throw EvaluationFailure("problem '" + name_ + "': non-finite value during evaluation");
  }
  return e;
}

Vector Problem::constraints(const Vector& x) const { return evaluate(x).c; }

Vector perturb_gradient(const Vector& grad, const NoiseModel& noise,
                        RandomStream& stream) {
  if (noise.epsilon == 0.0) return grad;
  const double scale = std::sqrt(noise.epsilon);
  Vector g = grad;
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] += scale * stream.normal();
  return g;
}

Vector sample_stochastic_gradient(const Problem& problem, const Vector& x,
                                  const NoiseModel& noise, RandomStream& stream) {
  return perturb_gradient(problem.evaluate(x).grad, noise, stream);
}

Problem make_quadratic_linear(std::string name, const Matrix& Q, const Vector& g0,
                              const Matrix& A, const Vector& b,
                              std::optional<Vector> initial_point) {
  const auto n = static_cast<int>(Q.rows());
  const auto m = static_cast<int>(A.rows());
  if (Q.cols() != n || g0.size() != n || A.cols() != n || b.size() != m) {
    throw DimensionMismatch("quadratic_linear '" + name + "': inconsistent data sizes");
  }
  auto kkt = solve_quadratic_kkt(Q, g0, A, b);
  Vector x0 = initial_point ? std::move(*initial_point) : Vector::Zero(n);
  Evaluator eval = [Q, g0, A, b](const Vector& x) {
    Evaluation e;
    const Vector Qx = Q * x;
    e.f = 0.5 * x.dot(Qx) + g0.dot(x);
    e.grad = Qx + g0;
    e.c = A * x - b;
    e.jac = A;
    return e;
  };
  return Problem(std::move(name), n, m, std::move(eval), std::move(x0), std::move(kkt));
}

namespace {

Problem make_qp2() {
  Evaluator eval = [](const Vector& x) {
    Evaluation e;
    e.f = 0.5 * x.squaredNorm();
    e.grad = x;
    e.c = Vector::Constant(1, x[0] - 1.0);
    e.jac = Matrix::Zero(1, 2);
    e.jac(0, 0) = 1.0;
    return e;
  };
  KktPoint kkt{Vector::Unit(2, 0), Vector::Constant(1, -1.0)};
  return Problem("qp2", 2, 1, std::move(eval), Vector::Zero(2), std::move(kkt));
}

Problem make_qplin5() {
  Matrix Q(5, 5);
  Q << 4, 1, 0, 0, 0,
       1, 5, 1, 0, 0,
       0, 1, 6, 1, 0,
       0, 0, 1, 5, 1,
       0, 0, 0, 1, 4;
  Vector g0(5);
  g0 << 1.0, -2.0, 0.5, 0.0, -1.0;
  Matrix A(2, 5);
  A << 1, 1, 1, 1, 1,
       1, -1, 0, 2, 0;
  Vector b(2);
  b << 1.0, 0.5;
  return make_quadratic_linear("qplin5", Q, g0, A, b);
}

Problem make_sphere3() {
  Evaluator eval = [](const Vector& x) {
    Evaluation e;
    e.f = x.sum();
    e.grad = Vector::Ones(3);
    e.c = Vector::Constant(1, x.squaredNorm() - 3.0);
    e.jac = 2.0 * x.transpose();
    return e;
  };
  Vector x0 = Vector::Zero(3);
  x0[0] = 2.0;
  KktPoint kkt{Vector::Constant(3, -1.0), Vector::Constant(1, 0.5)};
  return Problem("sphere3", 3, 1, std::move(eval), std::move(x0), std::move(kkt));
}

Problem make_rosenlin2() {
  Evaluator eval = [](const Vector& x) {
    Evaluation e;
    const double r = x[1] - x[0] * x[0];
    e.f = 100.0 * r * r + (1.0 - x[0]) * (1.0 - x[0]);
    e.grad = Vector(2);
    e.grad << -400.0 * x[0] * r - 2.0 * (1.0 - x[0]), 200.0 * r;
    e.c = Vector::Constant(1, x[0] + x[1] - 1.0);
    e.jac = Matrix::Ones(1, 2);
    return e;
  };
  // Minimiser of the Rosenbrock function along x1 + x2 = 1.
  Vector xs(2);
  xs << 0.61879561907502540132, 0.38120438092497459868;
  KktPoint kkt{xs, Vector::Constant(1, 0.34072745229386832701)};
  Vector x0(2);
  x0 << -0.5, 1.0;
  // The reduced curvature at the solution is about 500; scaling H keeps the
  // tangential step stable for stepsizes up to 2.
  return Problem("rosenlin2", 2, 1, std::move(eval), std::move(x0), std::move(kkt),
                 Matrix(100.0 * Matrix::Identity(2, 2)));
}

using Factory = Problem (*)();

const std::map<std::string, Factory, std::less<>>& registry() {
  static const std::map<std::string, Factory, std::less<>> table = {
      {"qp2", &make_qp2},
      {"qplin5", &make_qplin5},
      {"rosenlin2", &make_rosenlin2},
      {"sphere3", &make_sphere3},
  };
  return table;
}

// Line of the first occurrence of `"key"` in the text; 0 when absent.
int line_of_key(std::string_view text, const std::string& key) {
  const std::string quoted = "\"" + key + "\"";
  const auto pos = text.find(quoted);
  if (pos == std::string_view::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

int line_of_byte(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

class FieldReader {
 public:
  FieldReader(const nlohmann::json& doc, std::string_view text) : doc_(doc), text_(text) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    const int line = line_of_key(text_, field);
    std::ostringstream os;
    os << "problem file";
    if (line > 0) os << " line " << line;
    os << ", field '" << field << "': " << msg;
    throw ParseError(os.str(), line, field);
  }

  const nlohmann::json& require(const std::string& field) const {
    auto it = doc_.find(field);
    if (it == doc_.end()) fail(field, "missing");
    return *it;
  }

  int positive_int(const std::string& field) const {
    const auto& v = require(field);
    if (!v.is_number_integer() || v.get<long long>() <= 0) {
      fail(field, "expected a positive integer");
    }
    return static_cast<int>(v.get<long long>());
  }

  Vector vector(const std::string& field, int size) const {
    return vector(field, require(field), size);
  }

  Vector vector(const std::string& field, const nlohmann::json& v, int size) const {
    if (!v.is_array()) fail(field, "expected an array");
    if (static_cast<int>(v.size()) != size) {
      fail(field, "expected " + std::to_string(size) + " entries, got " +
                      std::to_string(v.size()));
    }
    Vector out(size);
    for (int i = 0; i < size; ++i) {
      if (!v[i].is_number()) fail(field, "entry " + std::to_string(i) + " is not a number");
      out[i] = v[i].get<double>();
    }
    return out;
  }

  /// Accepts a flat row-major array or an array of rows.
  Matrix matrix(const std::string& field, int rows, int cols) const {
    const auto& v = require(field);
    if (!v.is_array()) fail(field, "expected an array");
    Matrix out(rows, cols);
    if (!v.empty() && v[0].is_array()) {
      if (static_cast<int>(v.size()) != rows) {
        fail(field, "expected " + std::to_string(rows) + " rows, got " +
                        std::to_string(v.size()));
      }
      for (int r = 0; r < rows; ++r) {
        out.row(r) = vector(field + "[" + std::to_string(r) + "]", v[r], cols).transpose();
      }
      return out;
    }
    const Vector flat = vector(field, v, rows * cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) out(r, c) = flat[r * cols + c];
    }
    return out;
  }

 private:
  const nlohmann::json& doc_;
  std::string_view text_;
};

}  // namespace

std::vector<std::string> builtin_problem_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : registry()) names.push_back(name);
  return names;
}

Problem make_builtin_problem(std::string_view name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw UnknownProblem(std::string(name));
  return it->second();
}

Problem parse_problem_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const int line = line_of_byte(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("problem file line " + std::to_string(line) + ": " + e.what(), line, "");
  }
  if (!doc.is_object()) throw ParseError("problem file: top level must be an object", 1, "");

  FieldReader reader(doc, text);
  const auto& kind = reader.require("kind");
  if (!kind.is_string() || kind.get<std::string>() != "quadratic_linear") {
    reader.fail("kind", "only \"quadratic_linear\" problems can be loaded from a file");
  }
  const auto& name_field = reader.require("name");
  if (!name_field.is_string()) reader.fail("name", "expected a string");
  const int n = reader.positive_int("n");
  const int m = reader.positive_int("m");
  if (m > n) reader.fail("m", "must not exceed n");

  const Matrix Q = reader.matrix("Q", n, n);
  const Vector g0 = reader.vector("g0", n);
  const Matrix A = reader.matrix("A", m, n);
  const Vector b = reader.vector("b", m);
  std::optional<Vector> x0;
  if (doc.contains("x0")) x0 = reader.vector("x0", n);
  return make_quadratic_linear(name_field.get<std::string>(), Q, g0, A, b, std::move(x0));
}

Problem load_problem(const std::string& source) {
  if (registry().contains(source)) return make_builtin_problem(source);
  std::ifstream in(source);
  if (!in) throw UnknownProblem(source);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_json(buf.str());
}

}  // namespace tssqp
