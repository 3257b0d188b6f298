#pragma once

#include <Eigen/Dense>
#include <tuple>
#include <vector>

namespace fluxsim {

// Maximum-weight matching on a general graph (Galil's primal-dual blossom
// algorithm). Returns mate[v] (-1 when v is unmatched). With max_cardinality,
// maximizes cardinality first and weight second.
std::vector<int> max_weight_matching(int n_vertices,
                                     const std::vector<std::tuple<int, int, double>>& edges,
                                     bool max_cardinality);

// Minimum-weight perfect matching on a complete even graph given a symmetric
// weight matrix; returns the pair list. Throws when n is odd.
std::vector<std::pair<int, int>> min_weight_perfect_matching(const Eigen::MatrixXd& w);

}  // namespace fluxsim
