#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "vortexlab/geometry.hpp"
#include "vortexlab/measure.hpp"
#include "vortexlab/radial_profile.hpp"

namespace vtx {

/// Cell-centered uniform grid over [c - L, c + L]^2, spacing h = 2L/N.
struct GridSpec {
    Vec2 center{0.0, 0.0};
    double half_width = 1.0;
    int n = 32;

    double spacing() const { return 2.0 * half_width / n; }
    Vec2 node(int i, int j) const {
        double h = spacing();
        return {center.x - half_width + (i + 0.5) * h, center.y - half_width + (j + 0.5) * h};
    }
};

/// Complex field on a uniform grid with coupling eps and far-field degree D.
/// Construction enforces N >= 32 and h < eps/2 unless `allow_unresolved`.
class WaveField {
  public:
    WaveField(GridSpec spec, double eps, int degree_at_infinity, bool allow_unresolved = false);

    const GridSpec& grid() const { return spec_; }
    double eps() const { return eps_; }
    int degree_at_infinity() const { return degree_; }

    std::complex<double>& at(int i, int j) { return v_[static_cast<std::size_t>(j) * spec_.n + i]; }
    const std::complex<double>& at(int i, int j) const {
        return v_[static_cast<std::size_t>(j) * spec_.n + i];
    }
    std::vector<std::complex<double>>& data() { return v_; }
    const std::vector<std::complex<double>>& data() const { return v_; }

  private:
    GridSpec spec_;
    double eps_;
    int degree_;
    std::vector<std::complex<double>> v_;
};

struct DensityBundle {
    GridMeasure energy;    // e_eps(u)
    GridMeasure jx, jy;    // current (iu, grad u)
    GridMeasure jacobian;  // det grad u
};

struct LadderValue {
    double value = 0.0;
    double error_bar = 0.0;
    bool flagged = false;
    double ladder_radii[3] = {0, 0, 0};
    double ladder_values[3] = {0, 0, 0};
};

/// Product of translated model-vortex cores, prod_j f(|x-a_j|/eps) times the
/// canonical phase. The profile is extended by 1 beyond its outer radius.
WaveField assemble_initial_data(const VortexConfiguration& config, double eps, const GridSpec& grid,
                                const RadialProfile& profile, bool allow_unresolved = false);
WaveField assemble_initial_data(const VortexConfiguration& config, double eps, const GridSpec& grid,
                                bool allow_unresolved = false);

/// Central differences inside, one-sided at the boundary.
DensityBundle local_densities(const WaveField& field);

/// Limit of int_{B_R} e_eps - pi D^2 ln R over the radius ladder
/// {L/2, L/(2 sqrt 2), L/4}, Richardson-extrapolated in 1/R; the error bar is
/// the spread of the competing extrapolations.
LadderValue renormalized_energy(const WaveField& field);
LadderValue renormalized_energy(const WaveField& field, const DensityBundle& densities);

/// Sigma = E_eps(field) - [ n (pi |ln eps| + gamma) + W(config) ].
LadderValue surplus(const WaveField& field, const VortexConfiguration& config, double gamma);

/// Finds cells with +-2pi plaquette phase winding, clusters them and returns
/// Jacobian-weighted centroids. Throws (listing what was found) when the
/// cluster count differs from n_expected.
std::vector<Vec2> locate_vortices(const WaveField& field, int n_expected);
std::vector<Vec2> locate_vortices(const WaveField& field, int n_expected, const GridMeasure& jacobian);

/// eta = sum_j | int J(u) (x - a_j) chi(|x - a_j| / rho_a) dx | with a fixed
/// quintic C^2 cutoff (1 on B_1, 0 off B_2).
double eta(const WaveField& field, const VortexConfiguration& config);
double eta(const WaveField& field, const VortexConfiguration& config, const GridMeasure& jacobian);

/// Discrete phase unwinding along the grid loop nearest to the circle.
int loop_winding(const WaveField& field, const Vec2& center, double radius);

/// Jacobian density as atoms: cells below `mass_floor` dropped, optional
/// block coarsening, then rescaled to `target_mass` (the applied scale is
/// reported through `scale_out`).
AtomicMeasure jacobian_atoms(const GridMeasure& jacobian, double mass_floor, int coarsen_factor,
                             double target_mass, double* scale_out = nullptr);

std::uint64_t fnv1a64(const void* bytes, std::size_t n);

/// Flat little-endian re/im doubles plus a JSON sidecar with the grid spec,
/// eps, degree and a content hash.
void save_field(const WaveField& field, const std::string& binary_path,
                const std::string& sidecar_path);
WaveField load_field(const std::string& binary_path, const std::string& sidecar_path);

}  // namespace vtx
