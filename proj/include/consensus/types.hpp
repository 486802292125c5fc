#pragma once

#include <Eigen/Dense>

// Scalar and dense types used throughout. Everything runs in double; the
// aliases keep the linear-algebra surface in one place.
namespace consensus {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

}  // namespace consensus
