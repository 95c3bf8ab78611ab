#pragma once

#include <functional>

#include "vortexlab/measure.hpp"

namespace vtx {

/// Weight of the log-weighted norm, w(x) = 1 + ln^+ |x|.
double xlog_weight(const Vec2& x);

/// Cost of moving a unit mass along the straight segment [x, y] against the
/// weight, int_0^1 |y-x| / w(x + t(y-x)) dt. Upper-bounds the geodesic cost.
double xlog_segment_cost(const Vec2& x, const Vec2& y);

/// Exact homogeneous W^{-1,1} norm of a balanced measure with atoms of equal
/// |weight|: min over pairings of sum w |x_i - y_sigma(i)|, by exact
/// assignment. Throws if the measure is unbalanced (norm infinite) or the
/// positive/negative sides cannot be matched one-to-one.
double minimal_connection(const AtomicMeasure& mu);

/// W^{-1,1} norm for general balanced weights (exact transportation).
double weighted_minimal_connection(const AtomicMeasure& mu);

/// Certified bracket for the log-weighted dual norm of a balanced atomic
/// measure. Upper: optimal transport under the straight-line weighted cost.
/// Lower: best admissible test function from a fixed dictionary (weighted
/// radial ramps, capped ramps, and the retraction-composed Kantorovich
/// potential of the Euclidean matching).
NormBracket xlog_distance(const AtomicMeasure& mu);

/// Upper half of the bracket only (skips the dictionary and the Euclidean
/// matching); cheaper for sweeps that compare distances.
double xlog_transport_upper(const AtomicMeasure& mu);

/// Test function with caller-certified norm and gradient decay. The pairing
/// rejects functions without |D phi| <= C min(1, |x|^-p) decay.
struct TestFunction {
    std::function<double(const Vec2&)> value;
    double xln_norm = 1.0;
    bool has_gradient_decay = true;
};

double pair_with_test_function(const AtomicMeasure& mu, const TestFunction& phi);
double pair_with_test_function(const GridMeasure& mu, const TestFunction& phi);

struct Wminus2Options {
    int max_iterations = 60000;
    double relative_gap = 2e-3;
};

/// Bracket on sup { int phi dmu : |phi|, |grad phi|, |D^2 phi| <= 1 } via a
/// grid linear program (first-order primal-dual solve with certified primal
/// and dual values). Upper includes the h * mass discretization correction.
NormBracket wminus2_estimate(const AtomicMeasure& mu, double domain_radius, int grid_n,
                             const Wminus2Options& opt = {});

/// Default LP domain radius, 2 * (max atom norm + 1).
double wminus2_default_radius(const AtomicMeasure& mu);

}  // namespace vtx
