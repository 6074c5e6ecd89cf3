#pragma once

#include <cstddef>
#include <vector>

namespace gfi::detail {

struct TransportSolution {
  std::vector<double> flow;  // row-major m x n
  std::vector<double> u, v;  // dual potentials
  std::size_t pivots = 0;
};

// Primal network simplex on the complete bipartite graph (transportation
// problem). cost is row-major m x n; supplies and demands must balance.
TransportSolution transportation_simplex(const std::vector<double>& supply,
                                         const std::vector<double>& demand,
                                         const std::vector<double>& cost);

}  // namespace gfi::detail
