#include "sparse_ops.hpp"

#include <vector>

namespace lichmp::detail {

SparseMatrix assemble_operator(const Domain& d, std::span<const double> diagonal) {
  const auto n = static_cast<Eigen::Index>(d.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(d.size() + 4 * d.couplings().size());
  const auto bnd = d.boundary_conductance();
  for (Eigen::Index i = 0; i < n; ++i) {
    trip.emplace_back(i, i, bnd[static_cast<std::size_t>(i)] + diagonal[static_cast<std::size_t>(i)]);
  }
  for (const auto& c : d.couplings()) {
    const auto i = static_cast<Eigen::Index>(c.i);
    const auto j = static_cast<Eigen::Index>(c.j);
    trip.emplace_back(i, i, c.conductance);
    trip.emplace_back(j, j, c.conductance);
    trip.emplace_back(i, j, -c.conductance);
    trip.emplace_back(j, i, -c.conductance);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace lichmp::detail
