#include "vortexlab/point_vortex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vtx {

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using State = std::vector<Vec2>;

void rhs(const State& a, const std::vector<int>& deg, double prefactor, State& out) {
    const std::size_t n = a.size();
    for (auto& v : out) v = {0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            Vec2 rel = a[j] - a[k];
            double r2 = rel.norm2();
            Vec2 kern = rel.perp() * (1.0 / (2.0 * M_PI * r2));
            out[j] += kern * static_cast<double>(deg[k]);
            out[k] -= kern * static_cast<double>(deg[j]);  // K(-x) = -K(x)
        }
    }
    for (auto& v : out) v *= prefactor;
}

double min_sep2(const State& a) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t k = j + 1; k < a.size(); ++k) m = std::min(m, (a[j] - a[k]).norm2());
    return m;
}

double rho_of(const State& a) {
    if (a.size() < 2) return 0.25;
    return 0.25 * std::min(1.0, std::sqrt(min_sep2(a)));
}

struct Dense {
    // contd5 polynomials per component
    State r1, r2, r3, r4, r5;
    double t0, h;

    Vec2 eval(std::size_t i, double t) const {
        double th = (t - t0) / h;
        double th1 = 1.0 - th;
        return r1[i] +
               th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
    }
};

double gl4_rho_integral(const Dense& dense, std::size_t n, double ta, double tb) {
    static const double node[4] = {0.06943184420297371, 0.33000947820757187, 0.6699905217924281,
                                   0.9305681557970262};
    static const double wq[4] = {0.17392742256872693, 0.3260725774312731, 0.3260725774312731,
                                 0.17392742256872693};
    State a(n);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) {
        double t = ta + (tb - ta) * node[q];
        for (std::size_t i = 0; i < n; ++i) a[i] = dense.eval(i, t);
        double rho = rho_of(a);
        s += wq[q] / (rho * rho);
    }
    return s * (tb - ta);
}

}  // namespace

std::vector<Vec2> ode_velocity(const VortexConfiguration& config, Scaling scaling) {
    if (config.size() > 1 && config.min_separation() == 0.0)
        throw std::invalid_argument("ode_velocity: coincident positions");
    double pre = scaling == Scaling::gp ? 2.0 * M_PI : 1.0 / static_cast<double>(config.size());
    State out(config.size());
    rhs(config.positions(), config.degrees(), pre, out);
    return out;
}

VortexConfiguration Trajectory::configuration_at(std::size_t i) const {
    return VortexConfiguration(samples.at(i).positions, degrees);
}

Trajectory integrate(const VortexConfiguration& config, double T, const IntegratorSettings& settings,
                     Scaling scaling, const std::vector<double>& sample_times) {
    if (T == 0.0) throw std::invalid_argument("integrate: need T != 0");
    if (!(settings.rel_tol > 0.0 && settings.rel_tol <= 1e-2) ||
        !(settings.abs_tol > 0.0 && settings.abs_tol <= 1e-2))
        throw std::invalid_argument("integrate: tolerances must lie in (0, 1e-2]");
    if (settings.collision_floor <= 0.0 || settings.max_step <= 0.0)
        throw std::invalid_argument("integrate: collision_floor and max_step must be positive");
    const double dir = T > 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        double s = sample_times[i];
        if (s * dir < 0.0 || s * dir > T * dir + 1e-12 ||
            (i > 0 && (s - sample_times[i - 1]) * dir <= 0.0))
            throw std::invalid_argument("integrate: sample times must run monotonically from 0 to T");
    }

    const std::size_t n = config.size();
    const double pre = scaling == Scaling::gp ? 2.0 * M_PI : 1.0 / static_cast<double>(n);
    const double floor2 = settings.collision_floor * settings.collision_floor;

    Trajectory traj;
    traj.degrees = config.degrees();
    traj.scaling = scaling;

    State y = config.positions();
    State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    Dense dense;
    dense.r1.resize(n);
    dense.r2.resize(n);
    dense.r3.resize(n);
    dense.r4.resize(n);
    dense.r5.resize(n);

    double rho_acc = 0.0;
    std::size_t next_sample = 0;

    auto emit = [&](double t, const State& pos, double acc) {
        TrajectorySample s;
        s.t = t;
        s.positions = pos;
        VortexConfiguration c(pos, traj.degrees);
        s.W = kirchhoff_onsager_energy(c);
        s.second_moment = 0.0;
        s.center = {0.0, 0.0};
        for (const auto& p : pos) {
            s.second_moment += p.norm2();
            s.center += p;
        }
        s.rho = rho_of(pos);
        s.rho_integral = acc;
        traj.samples.push_back(std::move(s));
    };

    if (next_sample < sample_times.size() && sample_times[next_sample] == 0.0) {
        emit(0.0, y, 0.0);
        ++next_sample;
    }

    rhs(y, traj.degrees, pre, k1);
    double t = 0.0;
    // initial step: conservative scale from velocity magnitude
    double v0 = 0.0;
    for (const auto& v : k1) v0 = std::max(v0, v.norm());
    double h = dir * std::min(settings.max_step, 0.01 / std::max(v0, 1e-12));
    if (n == 1) h = dir * std::min(settings.max_step, std::fabs(T));

    const double safe = 0.9, facl = 0.2, facr = 10.0, beta = 0.04;
    double facold = 1e-4;
    long guard = 0;

    while ((T - t) * dir > 1e-14 * std::fabs(T)) {
        if (++guard > 100000000L) throw std::runtime_error("integrate: step cap exceeded");
        if ((t + 1.01 * h - T) * dir > 0.0) h = T - t;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(ytmp, traj.degrees, pre, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(ytmp, traj.degrees, pre, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(ytmp, traj.degrees, pre, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(ytmp, traj.degrees, pre, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(ytmp, traj.degrees, pre, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(ynew, traj.degrees, pre, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 ee = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sx = settings.abs_tol +
                        settings.rel_tol * std::max(std::fabs(y[i].x), std::fabs(ynew[i].x));
            double sy = settings.abs_tol +
                        settings.rel_tol * std::max(std::fabs(y[i].y), std::fabs(ynew[i].y));
            err += (ee.x / sx) * (ee.x / sx) + (ee.y / sy) * (ee.y / sy);
        }
        err = std::sqrt(err / (2.0 * n));

        double fac11 = std::pow(std::max(err, 1e-16), 0.2 - beta * 0.75);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(1.0 / facr, std::min(1.0 / facl, fac / safe));
        double hnew = h / fac;

        if (err > 1.0) {
            h /= std::min(1.0 / facl, fac11 / safe);
            continue;
        }

        // accepted: dense output coefficients
        dense.t0 = t;
        dense.h = h;
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 ydiff = ynew[i] - y[i];
            Vec2 bspl = h * k1[i] - ydiff;
            dense.r1[i] = y[i];
            dense.r2[i] = ydiff;
            dense.r3[i] = bspl;
            dense.r4[i] = ydiff - h * k7[i] - bspl;
            dense.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i]);
        }

        double t_next = t + h;
        double seg_start = t;
        while (next_sample < sample_times.size() &&
               (sample_times[next_sample] - t_next) * dir <= 1e-12 * std::max(1.0, std::fabs(t_next))) {
            double ts = sample_times[next_sample];
            double acc = rho_acc + (n > 1 ? gl4_rho_integral(dense, n, seg_start, ts) : 0.0);
            State pos(n);
            for (std::size_t i = 0; i < n; ++i) pos[i] = dense.eval(i, ts);
            emit(ts, pos, acc);
            rho_acc = acc;
            seg_start = ts;
            ++next_sample;
        }
        if (n > 1) rho_acc += gl4_rho_integral(dense, n, seg_start, t_next);

        y.swap(ynew);
        k1.swap(k7);  // FSAL
        t = t_next;
        h = dir * std::min(std::fabs(hnew), settings.max_step);

        if (n > 1 && min_sep2(y) < floor2) {
            traj.status = TrajectoryStatus::collision_floor_hit;
            break;
        }
        if (std::fabs(h) < 1e-15 * std::max(1.0, std::fabs(t)))
            throw std::runtime_error("integrate: step size underflow");
    }
    return traj;
}

Trajectory integrate(const VortexConfiguration& config, double T, const IntegratorSettings& settings,
                     Scaling scaling, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("integrate: need at least 2 samples");
    std::vector<double> ts(n_samples);
    for (int i = 0; i < n_samples; ++i) ts[i] = T * static_cast<double>(i) / (n_samples - 1);
    return integrate(config, T, settings, scaling, ts);
}

DriftReport conserved_drift(const Trajectory& traj) {
    if (traj.samples.size() < 2) throw std::invalid_argument("conserved_drift: need >= 2 samples");
    const auto& s0 = traj.samples.front();
    DriftReport r{0.0, 0.0, 0.0};
    for (const auto& s : traj.samples) {
        r.W = std::max(r.W, std::fabs(s.W - s0.W) / (1.0 + std::fabs(s0.W)));
        r.second_moment = std::max(r.second_moment, std::fabs(s.second_moment - s0.second_moment) /
                                                        (1.0 + std::fabs(s0.second_moment)));
        r.center = std::max(r.center, (s.center - s0.center).norm() / (1.0 + s0.center.norm()));
    }
    return r;
}

double tau_star(const Trajectory& traj, double eps, double C, int n) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("tau_star: need eps in (0,1)");
    if (C <= 0.0 || n < 1) throw std::invalid_argument("tau_star: need C > 0, n >= 1");
    double budget = std::fabs(std::log(eps)) / (C * static_cast<double>(n));
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& a = traj.samples[i - 1];
        const auto& b = traj.samples[i];
        if (b.rho_integral >= budget) {
            double span = b.rho_integral - a.rho_integral;
            double f = span > 0.0 ? (budget - a.rho_integral) / span : 0.0;
            return a.t + f * (b.t - a.t);
        }
    }
    return traj.samples.empty() ? 0.0 : traj.samples.back().t;
}

AtomicMeasure empirical_measure(const VortexConfiguration& config, MeasureConvention convention) {
    AtomicMeasure m;
    const double n = static_cast<double>(config.size());
    for (std::size_t i = 0; i < config.size(); ++i) {
        double w = convention == MeasureConvention::mean_field_unit
                       ? 1.0 / n
                       : M_PI * config.degrees()[i];
        m.add(config.positions()[i], w);
    }
    return m;
}

}  // namespace vtx
