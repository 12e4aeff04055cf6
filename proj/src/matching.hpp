#pragma once

#include <Eigen/Dense>

namespace topodist::detail {

// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres with
// potentials, O(n^3)). Returns the optimal total cost.
double solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace topodist::detail
