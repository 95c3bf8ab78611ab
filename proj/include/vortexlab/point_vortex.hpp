#pragma once

#include <vector>

#include "vortexlab/geometry.hpp"
#include "vortexlab/measure.hpp"

namespace vtx {

/// gp: da_j/dt = 2 pi sum_{k != j} d_k K(a_j - a_k)
/// mean_field: db_j/dt = (1/n) sum_{k != j} d_k K(b_j - b_k)
enum class Scaling { gp, mean_field };

struct IntegratorSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    double collision_floor = 1e-6;
};

struct TrajectorySample {
    double t;
    std::vector<Vec2> positions;
    double W;               // Kirchhoff-Onsager energy
    double second_moment;   // sum |a_j|^2
    Vec2 center;            // sum a_j
    double rho;             // separation scale rho_a
    double rho_integral;    // int_0^t rho^{-2} ds
};

enum class TrajectoryStatus { ok, collision_floor_hit };

struct Trajectory {
    std::vector<int> degrees;
    Scaling scaling = Scaling::gp;
    TrajectoryStatus status = TrajectoryStatus::ok;
    std::vector<TrajectorySample> samples;

    VortexConfiguration configuration_at(std::size_t i) const;
};

struct DriftReport {
    double W;
    double second_moment;
    double center;
};

std::vector<Vec2> ode_velocity(const VortexConfiguration& config, Scaling scaling);

/// Adaptive Dormand-Prince 5(4) with dense output at `sample_times`
/// (monotone from 0 toward T; T < 0 integrates backward). Stops early with
/// a flagged status when the minimum pairwise separation drops below the
/// collision floor.
Trajectory integrate(const VortexConfiguration& config, double T, const IntegratorSettings& settings,
                     Scaling scaling, const std::vector<double>& sample_times);

/// Uniform sampling convenience, n_samples >= 2 points on [0, T].
Trajectory integrate(const VortexConfiguration& config, double T, const IntegratorSettings& settings,
                     Scaling scaling, int n_samples = 201);

/// Max relative drift over the trajectory, |q(t) - q(0)| / (1 + |q(0)|).
DriftReport conserved_drift(const Trajectory& traj);

/// tau* = sup { T : C n int_0^T rho^{-2} <= |ln eps| }, by inverting the
/// accumulated integral with linear interpolation; returns the final sample
/// time when the budget is never exhausted.
double tau_star(const Trajectory& traj, double eps, double C, int n);

enum class MeasureConvention { mean_field_unit, pi_degrees };

AtomicMeasure empirical_measure(const VortexConfiguration& config,
                                MeasureConvention convention = MeasureConvention::mean_field_unit);

}  // namespace vtx
