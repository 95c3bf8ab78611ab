#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vortexlab/geometry.hpp"

namespace vtx {

struct SampleBatch {
    std::uint64_t seed = 0;
    int n = 0;
    double M = 0.0, R = 0.0;
    std::vector<VortexConfiguration> samples;
    long attempts = 0;
    long accepted = 0;

    double acceptance_rate() const {
        return attempts > 0 ? static_cast<double>(accepted) / attempts : 0.0;
    }
    std::string to_jsonl() const;  // one configuration per line
};

/// Uniform draw on the ball B^{2n}_{R sqrt n}: per-plane standard Gaussians
/// scaled to the sphere, radius by inverse CDF S = U^{1/2n}. Degrees all +1.
/// `stream` selects a disjoint counter stream of the same seed.
VortexConfiguration sample_uniform_ball(int n, double R, std::uint64_t seed,
                                        std::uint64_t stream = 0);

/// Rejection sampling of the admissible set: uniform-ball draws accepted iff
/// -sum_{i != j} ln|a_i - a_j| <= n(n-1) M. Draws `max_attempts` times, or
/// stops at `target_count` acceptances when positive; throws when nothing is
/// accepted.
SampleBatch sample_admissible(int n, double M, double R, std::uint64_t seed, long max_attempts,
                              long target_count = 0);

struct PairStatistic {
    double mc_mean = 0.0;
    double mc_std_error = 0.0;
    double exact_finite_n = 0.0;  // (1/R^2) int_0^{nR^2} f(sqrt(2t)) (1-t/nR^2)^{n-1} dt
    double limit = 0.0;           // (1/R^2) int_0^inf  f(sqrt(2t)) e^{-t/R^2} dt
};

/// Monte-Carlo mean of F_n(a) = (1/(n(n-1))) sum_{i != j} f(|a_i - a_j|)
/// over uniform-ball samples, against the closed finite-n form and its limit.
PairStatistic pair_statistic(const std::function<double(double)>& f, int n, double R, long samples,
                             std::uint64_t seed);

struct RhoGrowth {
    std::vector<int> n_values;
    std::vector<double> means;       // Monte-Carlo <rho_a^{-2}> per n
    std::vector<double> std_errors;
    double slope = 0.0;              // least squares of log mean vs log n
};

RhoGrowth rho_inverse_square_expectation(const std::vector<int>& n_values, double M, double R,
                                         long samples_per_n, std::uint64_t seed);

/// lambda(R) = -(1/R^2) int_0^inf ln(sqrt(2t)) e^{-t/R^2} dt
///           = (gamma_Euler - ln(2 R^2)) / 2.
double lambda_constant(double R);

/// Acceptance threshold M0(R) = 3 lambda(R) + 8 R^2.
double admissible_M0(double R);

/// Quadrature helper: integral of f over (0, b] with geometric panel
/// refinement toward 0 (handles integrable log-type endpoint singularities).
double integrate_to(const std::function<double(double)>& f, double b, int panels = 80);

}  // namespace vtx
