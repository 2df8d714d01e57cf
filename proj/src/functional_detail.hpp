#pragma once

#include <lichmp/coefficients.hpp>

#include "sparse_ops.hpp"

#include <span>

namespace lichmp::detail {

/// Stiffness plus diag(w V).
SparseMatrix v_operator(const CoefficientSet& c);

/// Jacobian of the dual gradient: v_op - diag(w f'_ε(u)).
SparseMatrix jacobian(const CoefficientSet& c, std::span<const double> u, double eps,
                      const SparseMatrix& v_op);

}  // namespace lichmp::detail
