#include "tssqp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "tssqp/errors.hpp"

namespace tssqp {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(Problem, Qp2AtKktPoint) {
  const Problem p = make_builtin_problem("qp2");
  const Evaluation e = p.evaluate(vec({1, 0}));
  EXPECT_EQ(e.f, 0.5);
  EXPECT_EQ(e.grad, vec({1, 0}));
  EXPECT_EQ(e.c, vec({0}));
  ASSERT_EQ(e.jac.rows(), 1);
  EXPECT_EQ(e.jac(0, 0), 1.0);
  EXPECT_EQ(e.jac(0, 1), 0.0);
}

TEST(Problem, Qp2AtOrigin) {
  const Problem p = make_builtin_problem("qp2");
  EXPECT_EQ(p.evaluate(vec({0, 0})).c, vec({-1}));
  EXPECT_EQ(p.constraints(vec({0, 0})), vec({-1}));
}

TEST(Problem, Sphere3OnSphere) {
  const Problem p = make_builtin_problem("sphere3");
  const Evaluation e = p.evaluate(vec({1, 1, 1}));
  EXPECT_EQ(e.f, 3.0);
  EXPECT_EQ(e.c, vec({0}));
  EXPECT_EQ(e.jac, Matrix::Constant(1, 3, 2.0));
}

TEST(Problem, WrongDimensionThrows) {
  const Problem p = make_builtin_problem("qp2");
  EXPECT_THROW(p.evaluate(vec({1, 0, 0})), DimensionMismatch);
  EXPECT_THROW(p.constraints(vec({1})), DimensionMismatch);
}

TEST(Problem, NonFiniteEvaluationThrows) {
  const Problem p = make_builtin_problem("qp2");
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(p.evaluate(vec({inf, 0})), EvaluationFailure);
}

TEST(Problem, ConstructorRejectsMoreConstraintsThanVariables) {
  auto eval = [](const Vector&) { return Evaluation{}; };
  EXPECT_THROW(Problem("bad", 1, 2, eval, Vector::Zero(1)), DimensionMismatch);
}

TEST(Problem, EvaluateIsBitwiseDeterministic) {
  for (const auto& name : builtin_problem_names()) {
    const Problem p = make_builtin_problem(name);
    const Vector x = p.initial_point() + Vector::Constant(p.n(), 0.123);
    const Evaluation a = p.evaluate(x);
    const Evaluation b = p.evaluate(x);
    EXPECT_EQ(std::memcmp(&a.f, &b.f, sizeof(double)), 0) << name;
    EXPECT_EQ(a.grad, b.grad) << name;
    EXPECT_EQ(a.c, b.c) << name;
    EXPECT_EQ(a.jac, b.jac) << name;
  }
}

TEST(Problem, BuiltinSuiteHasKnownKktPoints) {
  const auto names = builtin_problem_names();
  for (const char* required : {"qp2", "qplin5", "sphere3", "rosenlin2"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), required), names.end()) << required;
  }
  for (const auto& name : names) {
    const Problem p = make_builtin_problem(name);
    EXPECT_LE(p.m(), p.n());
    ASSERT_TRUE(p.known_kkt().has_value()) << name;
    const Evaluation e = p.evaluate(p.known_kkt()->x);
    const Vector r = e.grad + e.jac.transpose() * p.known_kkt()->y;
    EXPECT_LE(r.lpNorm<Eigen::Infinity>(), 1e-10) << name;
    EXPECT_LE(e.c.lpNorm<Eigen::Infinity>(), 1e-10) << name;
  }
}

TEST(Problem, Qp2KnownKkt) {
  const Problem p = make_builtin_problem("qp2");
  EXPECT_EQ(p.n(), 2);
  EXPECT_EQ(p.m(), 1);
  EXPECT_EQ(p.known_kkt()->x, vec({1, 0}));
  EXPECT_EQ(p.known_kkt()->y, vec({-1}));
}

TEST(Problem, RosenbrockGradientMatchesFiniteDifferences) {
  const Problem p = make_builtin_problem("rosenlin2");
  const Vector x = vec({0.3, -0.7});
  const Evaluation e = p.evaluate(x);
  for (int i = 0; i < 2; ++i) {
    Vector h = Vector::Zero(2);
    h[i] = 1e-6;
    const double fd = (p.evaluate(x + h).f - p.evaluate(x - h).f) / 2e-6;
    EXPECT_NEAR(e.grad[i], fd, 1e-5);
  }
}

TEST(Problem, UnknownName) {
  EXPECT_THROW(make_builtin_problem("nosuch"), UnknownProblem);
  EXPECT_THROW(load_problem("nosuch"), UnknownProblem);
}

class ProblemFile : public ::testing::Test {
 protected:
  std::filesystem::path write(const std::string& text) {
    path_ = std::filesystem::temp_directory_path() /
            ("tssqp_problem_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name() + ".json");
    std::ofstream(path_) << text;
    return path_;
  }
  void TearDown() override {
    if (!path_.empty()) std::filesystem::remove(path_);
  }
  std::filesystem::path path_;
};

TEST_F(ProblemFile, LoadsQuadraticLinear) {
  const auto path = write(R"({
  "name": "half",
  "n": 2,
  "m": 1,
  "kind": "quadratic_linear",
  "Q": [1, 0, 0, 1],
  "g0": [0, 0],
  "A": [[1, 1]],
  "b": [1]
})");
  const Problem p = load_problem(path.string());
  EXPECT_EQ(p.name(), "half");
  ASSERT_TRUE(p.known_kkt().has_value());
  EXPECT_NEAR(p.known_kkt()->x[0], 0.5, 1e-14);
  EXPECT_NEAR(p.known_kkt()->x[1], 0.5, 1e-14);
  EXPECT_NEAR(p.known_kkt()->y[0], -0.5, 1e-14);
  const Evaluation e = p.evaluate(vec({0.5, 0.5}));
  EXPECT_DOUBLE_EQ(e.f, 0.25);
  EXPECT_EQ(e.c, vec({0}));
}

TEST(ProblemJson, MissingFieldReportsLineAndField) {
  try {
    parse_problem_json("{\n  \"name\": \"x\",\n  \"n\": 2,\n  \"m\": 1,\n  \"kind\": \"quadratic_linear\",\n"
                       "  \"Q\": [1, 0, 0, 1],\n  \"g0\": [0, 0],\n  \"A\": [1, 1]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "b");
  }
}

TEST(ProblemJson, WrongSizeReportsLine) {
  try {
    parse_problem_json("{\n  \"name\": \"x\",\n  \"n\": 2,\n  \"m\": 1,\n  \"kind\": \"quadratic_linear\",\n"
                       "  \"Q\": [1, 0, 0],\n  \"g0\": [0, 0],\n  \"A\": [1, 1],\n  \"b\": [1]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "Q");
    EXPECT_EQ(e.line(), 6);
  }
}

TEST(ProblemJson, SyntaxErrorReportsLine) {
  try {
    parse_problem_json("{\n  \"name\": \"x\",\n  \"n\": 2,,\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(ProblemJson, RejectsOtherKinds) {
  EXPECT_THROW(parse_problem_json(R"({"name":"x","n":1,"m":1,"kind":"nonlinear"})"), ParseError);
}

TEST(Noise, ZeroEpsilonReturnsExactGradient) {
  const Problem p = make_builtin_problem("rosenlin2");
  RandomStream stream(7);
  const Vector x = vec({0.2, 0.4});
  EXPECT_EQ(sample_stochastic_gradient(p, x, NoiseModel{0.0, 7}, stream), p.evaluate(x).grad);
}

TEST(Noise, SameSeedSameSample) {
  const Problem p = make_builtin_problem("qp2");
  RandomStream a(42), b(42);
  const NoiseModel noise{0.1, 42};
  EXPECT_EQ(sample_stochastic_gradient(p, vec({1, 0}), noise, a),
            sample_stochastic_gradient(p, vec({1, 0}), noise, b));
}

TEST(Noise, VarianceBoundIsTraceOfCovariance) {
  EXPECT_DOUBLE_EQ((NoiseModel{0.1, 0}.variance_bound(3)), 0.3);
}

TEST(Noise, MonteCarloMeanAndVariance) {
  const Problem p = make_builtin_problem("qp2");
  const Vector x = vec({1, 0});
  const Vector grad = p.evaluate(x).grad;
  const NoiseModel noise{0.1, 2024};
  RandomStream stream(noise.seed);
  constexpr int N = 100000;
  Vector sum = Vector::Zero(2), sum_sq = Vector::Zero(2);
  double sq_err = 0.0;
  for (int i = 0; i < N; ++i) {
    const Vector g = sample_stochastic_gradient(p, x, noise, stream);
    sum += g;
    sum_sq += g.cwiseProduct(g);
    sq_err += (g - grad).squaredNorm();
  }
  const Vector mean = sum / N;
  const Vector var = (sum_sq / N - mean.cwiseProduct(mean)) * N / (N - 1.0);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(mean[j], grad[j], 0.01);
    // 3 standard errors of the mean: 3 sqrt(0.1 / N) ~ 3e-3.
    EXPECT_NEAR(mean[j], grad[j], 3.0 * std::sqrt(noise.epsilon / N));
    EXPECT_GE(var[j], 0.09);
    EXPECT_LE(var[j], 0.11);
  }
  EXPECT_NEAR(sq_err / N, noise.variance_bound(2), 0.05 * noise.variance_bound(2));
}

}  // namespace
}  // namespace tssqp
