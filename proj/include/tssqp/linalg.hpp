#pragma once

#include <Eigen/Dense>

namespace tssqp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace tssqp
