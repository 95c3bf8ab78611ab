#pragma once

#include <complex>
#include <string>
#include <vector>

#include "vortexlab/vec2.hpp"

namespace vtx {

/// Point vortices: positions plus degrees restricted to +-1.
/// Positions must be pairwise distinct; checked at construction.
class VortexConfiguration {
  public:
    VortexConfiguration(std::vector<Vec2> positions, std::vector<int> degrees);

    /// All degrees +1.
    static VortexConfiguration same_sign(std::vector<Vec2> positions);

    std::size_t size() const { return positions_.size(); }
    const std::vector<Vec2>& positions() const { return positions_; }
    const std::vector<int>& degrees() const { return degrees_; }
    int total_degree() const { return total_degree_; }

    double min_separation() const;

    std::string to_json() const;
    static VortexConfiguration from_json(const std::string& text);

  private:
    std::vector<Vec2> positions_;
    std::vector<int> degrees_;
    int total_degree_ = 0;
};

struct SeparationScales {
    double rho;  // quarter of (1 ^ min pairwise separation)
    double R;    // 4 times (1 v max norm)
};

struct EnergyReport {
    double W;              // pairwise log interaction energy, ordered pairs
    double W_eps;          // n(pi |ln eps| + gamma) + W
    double second_moment;  // (1/n) sum |a_j|^2
    double log_pair_avg;   // -(1/(n(n-1))) sum_{j!=k} ln|a_j - a_k|
};

struct MboundsReport {
    bool ok;
    double second_moment;
    double log_pair_avg;  // NaN when n == 1
};

/// K(x) = x^perp / (2 pi |x|^2). Throws std::domain_error at x = 0.
Vec2 biot_savart_kernel(const Vec2& x);

SeparationScales separation_scales(const VortexConfiguration& config);

/// Requires eps in (0,1). gamma is the core-energy constant supplied by the
/// caller (see bbh_gamma_estimate).
EnergyReport energies(const VortexConfiguration& config, double eps, double gamma);

/// Kirchhoff-Onsager energy alone, W = -pi sum_{j!=k} d_j d_k ln|a_j - a_k|.
double kirchhoff_onsager_energy(const VortexConfiguration& config);

/// u*(x) = prod_j ((x - a_j)/|x - a_j|)^{d_j}; unit modulus away from the
/// vortices, throws std::domain_error on a vortex.
std::complex<double> canonical_harmonic_map(const VortexConfiguration& config, const Vec2& x);

/// j(u*)(x) = sum_i d_i (x - a_i)^perp / |x - a_i|^2 = 2 pi sum_i d_i K(x - a_i).
Vec2 canonical_current(const VortexConfiguration& config, const Vec2& x);

/// Checks (1/n) sum |a_j|^2 <= M0 and -(1/(n(n-1))) sum ln|a_j-a_k| <= M0.
/// With n == 1 only the second moment is checked (the pair statistic is
/// undefined and reported as NaN).
MboundsReport mbounds_check(const VortexConfiguration& config, double M0);

}  // namespace vtx
