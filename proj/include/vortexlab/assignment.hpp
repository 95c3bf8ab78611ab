#pragma once

#include <functional>
#include <vector>

namespace vtx {

/// Exact min-cost perfect matching on an n x n cost matrix (row-major).
/// Returns the assigned column per row; `cost_out`, when non-null, receives
/// the optimal value. O(n^3) shortest augmenting paths with potentials.
std::vector<int> min_cost_assignment(const std::vector<double>& cost, int n,
                                     double* cost_out = nullptr);

/// Dual potentials (u over rows, v over columns) of the optimal assignment,
/// satisfying u_i + v_j <= c_ij with equality on matched pairs.
struct AssignmentDuals {
    std::vector<int> match;  // column per row
    std::vector<double> row_potential;
    std::vector<double> col_potential;
    double cost;
};
AssignmentDuals min_cost_assignment_duals(const std::vector<double>& cost, int n);

/// Balanced transportation problem: supplies s_i > 0, demands d_j > 0 with
/// sum s = sum d (within `balance_tol`; supplies are rescaled to match
/// exactly). cost(i, j) must be >= 0. Exact up to floating-point roundoff
/// via successive shortest augmenting paths with node potentials.
struct TransportPlan {
    double cost;
    std::vector<std::vector<std::pair<int, double>>> shipments;  // per source: (sink, mass)
};
TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::function<double(int, int)>& cost,
                              double balance_tol = 1e-9);

}  // namespace vtx
