#pragma once

#include <vector>

namespace vtx {

/// Radial core profile on uniform nodes 0 = s_0 < ... < s_K; values in [0,1],
/// f(0) = 0, nondecreasing. Evaluation extends by 1 beyond the last node.
struct RadialProfile {
    std::vector<double> nodes;
    std::vector<double> values;

    double outer_radius() const { return nodes.back(); }
    double value_at(double s) const;

    /// Max-norm residual of the profile equation
    /// f'' + f'/s - f/s^2 + f (1 - f^2) at the interior nodes.
    double equation_residual() const;
};

/// Solve f'' + f'/s - f/s^2 + f(1-f^2) = 0 on (0,S), f(0) = 0 and the
/// asymptotic matching f(S) = 1 - 1/(2 S^2), by damped Newton on second-order
/// finite differences. Requires S >= 20, K >= 500.
RadialProfile model_vortex_profile(double S, int K);

/// I(s,1): minimal core energy in B_s with unit-degree boundary data,
/// 2 pi int_0^s [ (f'^2 + f^2/r^2)/2 + (1-f^2)^2/4 ] r dr over f(s)=1.
/// K = 0 picks the resolution automatically (400 nodes per unit radius).
double single_vortex_core_energy(double s, int K = 0);

struct GammaEstimate {
    double gamma;
    double error_bar;               // last dyadic difference
    std::vector<double> scales;     // s_k = 2^k s0
    std::vector<double> ladder;     // gamma_k = I(s_k,1) - pi ln s_k
    std::vector<double> energies;   // I(s_k,1)
};

/// Dyadic ladder estimate of the core-energy constant,
/// I(s,1) = pi ln s + gamma + O(1/s^2). Requires s0 >= 16.
GammaEstimate bbh_gamma_estimate(double s0 = 16.0, int levels = 5);

}  // namespace vtx
