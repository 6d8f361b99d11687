#pragma once

#include <Eigen/Dense>

namespace kagome::detail {

/// Right eigenpairs of a general complex matrix. Returns false on failure.
bool eig(const Eigen::MatrixXcd& a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors);

} // namespace kagome::detail
