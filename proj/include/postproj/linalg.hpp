#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace postproj {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row-major storage; used where the flattening order is part of a contract.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.allFinite();
}

}  // namespace postproj
