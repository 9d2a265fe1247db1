#include "dense_oracle.hpp"

#include <algorithm>
#include <random>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace tssqp::testing {

DenseKkt dense_kkt_solve(const Matrix& H, const Matrix& J, const Vector& g, const Vector& c) {
  const Eigen::Index n = H.rows();
  const Eigen::Index m = J.rows();
  Matrix K = Matrix::Zero(n + m, n + m);
  K.topLeftCorner(n, n) = H;
  K.topRightCorner(n, m) = J.transpose();
  K.bottomLeftCorner(m, n) = J;
  Vector rhs(n + m);
  rhs << -g, -c;
  Vector sol = K.fullPivLu().solve(rhs);
  return {sol.head(n), sol.tail(m)};
}

RandomKktInstance random_kkt_instance(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> n_dist(2, 50);
  const int n = n_dist(gen);
  std::uniform_int_distribution<int> m_dist(1, std::min(20, n - 1));
  const int m = m_dist(gen);
  std::normal_distribution<double> normal;
  auto gaussian = [&](int rows, int cols) {
    Matrix A(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) A(i, j) = normal(gen);
    return A;
  };
  RandomKktInstance inst;
  Matrix B = gaussian(n, n);
  inst.H = B.transpose() * B / n + Matrix::Identity(n, n);
  // U diag(s) V^T with s in [0.5, 3] keeps J comfortably full rank.
  Eigen::JacobiSVD<Matrix> su(gaussian(m, m), Eigen::ComputeFullU);
  Eigen::JacobiSVD<Matrix> sv(gaussian(n, n), Eigen::ComputeFullV);
  std::uniform_real_distribution<double> s_dist(0.5, 3.0);
  Matrix S = Matrix::Zero(m, n);
  for (int i = 0; i < m; ++i) S(i, i) = s_dist(gen);
  inst.J = su.matrixU() * S * sv.matrixV().transpose();
  inst.g = gaussian(n, 1);
  inst.c = gaussian(m, 1);
  return inst;
}

double sigma_min_svd(const Matrix& J) {
  Eigen::JacobiSVD<Matrix> svd(J);
  return svd.singularValues().minCoeff();
}

}  // namespace tssqp::testing
