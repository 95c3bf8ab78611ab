#pragma once

#include <memory>
#include <vector>

#include "vortexlab/point_vortex.hpp"
#include "vortexlab/wave_field.hpp"

namespace vtx {

struct EvolutionSettings {
    double dt = 0.0;  // 0 picks min(eps, h) / 4
    double inner_tol = 1e-10;
    int inner_max_iters = 600;
    bool disable_nonlinearity = false;  // linear test mode, potential term off
};

/// Crank-Nicolson stepper for i u_t = Lap u + (1/eps^2) u (1 - |u|^2) with
/// the cubic term carried by a two-level relaxation variable, so each step
/// costs one complex linear solve (BiCGStab preconditioned by the exact
/// constant-coefficient inverse via discrete sine transforms). Dirichlet
/// boundary values are frozen at the initial field's boundary ring.
class GpEvolver {
  public:
    GpEvolver(const WaveField& initial, const EvolutionSettings& settings);
    ~GpEvolver();
    GpEvolver(const GpEvolver&) = delete;
    GpEvolver& operator=(const GpEvolver&) = delete;

    void step();
    /// Conjugates the state (time reversal); the relaxation variable is real
    /// and is kept, so step-conjugate-step-conjugate returns the start.
    void conjugate();

    const WaveField& field() const { return u_; }
    double time() const { return t_; }
    double dt() const { return dt_; }
    int last_inner_iterations() const { return last_iters_; }

    /// Box integral of the energy density (diagnostic).
    double discrete_energy() const;
    /// Box integral of |u|^2 - 1 (mass-type functional, finite on [U^D]+H^1).
    double mass_functional() const;

  private:
    struct Impl;
    WaveField u_;
    EvolutionSettings settings_;
    double t_ = 0.0;
    double dt_;
    int last_iters_ = 0;
    std::unique_ptr<Impl> impl_;
};

struct TrackedSample {
    double t;
    std::vector<Vec2> xi;  // located vortex positions
    std::vector<Vec2> a;   // point-vortex ODE positions
    double eta;
    double surplus;        // Sigma(t) = E_eps(u(t)) - W_eps(a(t))
    double surplus_err;
    bool bracket_valid = false;
    NormBracket j_bracket;  // xlog bracket of J(u) - pi sum delta_{a(t)}
};

struct TrackingOptions {
    int n_samples = 41;       // tracking cadence over [0, T]
    int bracket_stride = 8;   // weak-norm bracket every this many samples
    int bracket_coarsen = 4;  // Jacobian coarsening for the bracket atoms
    double gamma = 0.0;       // core-energy constant for Sigma
};

struct TrackedEvolution {
    std::vector<TrackedSample> samples;
    bool vortex_lost = false;
    bool boundary_proximity = false;
    double sup_xi_err = 0.0;  // sup_t sum_j |xi_j - a_j|
};

/// Co-integrates the point-vortex flow (gp scaling) and the field; emits
/// located vortices, eta, surplus and the weak-norm bracket at the sampling
/// cadence. Stops early (flagged) if a vortex is lost or drifts within
/// 4 rho_a of the boundary.
TrackedEvolution run_tracked_evolution(const WaveField& initial, const VortexConfiguration& config,
                                       double T, const EvolutionSettings& settings,
                                       const TrackingOptions& tracking);

}  // namespace vtx
