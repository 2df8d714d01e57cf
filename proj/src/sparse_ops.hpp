#pragma once

#include <lichmp/domain.hpp>

#include <Eigen/Sparse>

#include <span>

namespace lichmp::detail {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Stiffness matrix plus diag(diagonal).
SparseMatrix assemble_operator(const Domain& d, std::span<const double> diagonal);

inline Eigen::Map<const Vector> view(std::span<const double> s) {
  return Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

inline Eigen::Map<Vector> view(std::span<double> s) {
  return Eigen::Map<Vector>(s.data(), static_cast<Eigen::Index>(s.size()));
}

}  // namespace lichmp::detail
