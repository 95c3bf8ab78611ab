#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "vortexlab/measure.hpp"

namespace vtx {

/// Periodic vorticity grid on [0, L)^2, N a power of two >= 128.
struct EulerState {
    int n = 0;
    double box = 0.0;
    double time = 0.0;
    std::vector<double> omega;  // row-major [j*n + i]

    EulerState() = default;
    EulerState(int n_, double box_);
    double& at(int i, int j) { return omega[static_cast<std::size_t>(j) * n + i]; }
    double at(int i, int j) const { return omega[static_cast<std::size_t>(j) * n + i]; }
    double spacing() const { return box / n; }
    double mean() const;
    double enstrophy() const;  // int omega^2
    double integral() const;   // int omega
};

/// Pseudo-spectral vorticity-stream solver: RK4 in time, 2/3-rule dealiasing
/// of the advection product, spectral Poisson solve in the zero-mean gauge.
class EulerSolver {
  public:
    EulerSolver(int n, double box);
    ~EulerSolver();
    EulerSolver(const EulerSolver&) = delete;
    EulerSolver& operator=(const EulerSolver&) = delete;

    /// One RK4 step; throws when |v|_max dt > 0.5 h.
    void step(EulerState& state, double dt);

    double max_velocity(const EulerState& state);
    double kinetic_energy(const EulerState& state);
    /// Velocity at grid nodes (vx, vy interleaved per node).
    void velocity(const EulerState& state, std::vector<double>& vx, std::vector<double>& vy);
    /// Max-norm of Lap psi + omega for the computed stream function.
    double poisson_residual(const EulerState& state);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Maps a grid measure onto the periodic box [0, 2L)^2 (same N) and samples
/// the flow at `samples` uniformly spaced times ending at T. The initial
/// density must decay below 1e-12 on the box boundary.
std::vector<EulerState> run_euler(const GridMeasure& initial, double T, int samples,
                                  double cfl = 0.4);

/// Smooth compactly supported space-time test function; `time_support` must
/// sit strictly inside the sampled interval.
struct SpaceTimeTestFunction {
    std::function<double(double, const Vec2&)> dt_value;  // d zeta / dt
    std::function<Vec2(double, const Vec2&)> gradient;    // grad_x zeta
    double t_begin = 0.0, t_end = 0.0;                    // temporal support
};

/// Symmetrized pair interaction sum_{i != j} w_i w_j (1/2) K(x_i - x_j) .
/// (g(x_i) - g(x_j)) with the diagonal excluded.
double pair_interaction(const AtomicMeasure& omega, const std::function<Vec2(const Vec2&)>& grad);

/// Weak vorticity-formulation residual of a sampled measure trajectory:
/// int int dzeta/dt domega dt + int iint H_zeta domega domega dt with the
/// atomic diagonal excluded; time integrals by composite Simpson over the
/// sample times (uniformly spaced, odd count).
double weak_residual(const std::vector<double>& times, const std::vector<AtomicMeasure>& omegas,
                     const SpaceTimeTestFunction& zeta);

}  // namespace vtx
