#include "vortexlab/gp_evolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "vortexlab/weak_norms.hpp"

namespace vtx {

using cplx = std::complex<double>;

// Linear solves act on the interior (N-2)^2 nodes; the boundary ring is
// frozen Dirichlet data contributing to the right-hand side.
struct GpEvolver::Impl {
    int n = 0;   // full grid
    int m = 0;   // interior per axis
    double h = 0.0;
    double idt = 0.0;  // 1/dt
    std::vector<double> lam;      // 1-D Dirichlet Laplacian eigenvalues
    std::vector<double> phi;      // relaxation variable (interior)
    std::vector<cplx> rhs, x, r, rhat, p, v, s, t_, phat, shat;
    double* dst_in = nullptr;
    double* dst_out = nullptr;
    std::vector<double> dre, dim;
    fftw_plan plan = nullptr;

    ~Impl() {
        if (plan) fftw_destroy_plan(plan);
        if (dst_in) fftw_free(dst_in);
        if (dst_out) fftw_free(dst_out);
    }

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * m + i; }

    void init(int n_full, double spacing, double dt) {
        n = n_full;
        m = n - 2;
        h = spacing;
        idt = 1.0 / dt;
        lam.resize(m);
        for (int p_ = 1; p_ <= m; ++p_)
            lam[p_ - 1] = (2.0 - 2.0 * std::cos(M_PI * p_ / (m + 1))) / (h * h);
        std::size_t mm = static_cast<std::size_t>(m) * m;
        phi.assign(mm, 0.0);
        for (auto* vec : {&rhs, &x, &r, &rhat, &p, &v, &s, &t_, &phat, &shat}) vec->assign(mm, cplx{});
        dre.resize(mm);
        dim.resize(mm);
        dst_in = fftw_alloc_real(mm);
        dst_out = fftw_alloc_real(mm);
        plan = fftw_plan_r2r_2d(m, m, dst_in, dst_out, FFTW_RODFT00, FFTW_RODFT00, FFTW_MEASURE);
    }

    // w = (i/dt - L/2 - Phi/2) z with the interior 5-point Laplacian
    void apply_op(const std::vector<cplx>& z, std::vector<cplx>& w) const {
        const double ih2 = 1.0 / (h * h);
        const cplx iu(0.0, idt);
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                std::size_t id = idx(i, j);
                cplx lap = -4.0 * z[id];
                if (i > 0) lap += z[id - 1];
                if (i + 1 < m) lap += z[id + 1];
                if (j > 0) lap += z[id - m];
                if (j + 1 < m) lap += z[id + m];
                w[id] = iu * z[id] - 0.5 * ih2 * lap - 0.5 * phi[id] * z[id];
            }
        }
    }

    // z <- (i/dt - L/2)^{-1} z  by sine-transform diagonalization
    void precondition(std::vector<cplx>& z) {
        const std::size_t mm = static_cast<std::size_t>(m) * m;
        for (std::size_t k = 0; k < mm; ++k) {
            dst_in[k] = z[k].real();
        }
        fftw_execute_r2r(plan, dst_in, dst_out);
        std::memcpy(dre.data(), dst_out, mm * sizeof(double));
        for (std::size_t k = 0; k < mm; ++k) dst_in[k] = z[k].imag();
        fftw_execute_r2r(plan, dst_in, dst_out);
        std::memcpy(dim.data(), dst_out, mm * sizeof(double));
        const double scale = 1.0 / (4.0 * (m + 1.0) * (m + 1.0));
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                std::size_t id = idx(i, j);
                cplx denom(0.5 * (lam[i] + lam[j]), idt);
                cplx val = cplx(dre[id], dim[id]) / denom;
                dre[id] = val.real() * scale;
                dim[id] = val.imag() * scale;
            }
        }
        std::memcpy(dst_in, dre.data(), mm * sizeof(double));
        fftw_execute_r2r(plan, dst_in, dst_out);
        std::memcpy(dre.data(), dst_out, mm * sizeof(double));
        std::memcpy(dst_in, dim.data(), mm * sizeof(double));
        fftw_execute_r2r(plan, dst_in, dst_out);
        for (std::size_t k = 0; k < mm; ++k) z[k] = cplx(dre[k], dst_out[k]);
    }

    static cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx s{};
        for (std::size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
        return s;
    }
    static double nrm2(const std::vector<cplx>& a) {
        double s = 0.0;
        for (const auto& z : a) s += std::norm(z);
        return std::sqrt(s);
    }

    // Preconditioned BiCGStab, returns iterations; throws on stagnation.
    int solve(std::vector<cplx>& xio, const std::vector<cplx>& b, double tol, int maxit) {
        apply_op(xio, v);
        for (std::size_t k = 0; k < b.size(); ++k) r[k] = b[k] - v[k];
        double bn = nrm2(b);
        if (bn == 0.0) {
            std::fill(xio.begin(), xio.end(), cplx{});
            return 0;
        }
        rhat = r;
        cplx rho(1.0, 0.0), alpha(1.0, 0.0), omega(1.0, 0.0);
        std::fill(v.begin(), v.end(), cplx{});
        std::fill(p.begin(), p.end(), cplx{});
        for (int it = 1; it <= maxit; ++it) {
            cplx rho1 = dot(rhat, r);
            if (std::abs(rho1) < 1e-300) break;
            cplx beta = (rho1 / rho) * (alpha / omega);
            rho = rho1;
            for (std::size_t k = 0; k < p.size(); ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
            phat = p;
            precondition(phat);
            apply_op(phat, v);
            alpha = rho / dot(rhat, v);
            for (std::size_t k = 0; k < s.size(); ++k) s[k] = r[k] - alpha * v[k];
            if (nrm2(s) <= tol * bn) {
                for (std::size_t k = 0; k < xio.size(); ++k) xio[k] += alpha * phat[k];
                return it;
            }
            shat = s;
            precondition(shat);
            apply_op(shat, t_);
            omega = dot(t_, s) / dot(t_, t_);
            for (std::size_t k = 0; k < xio.size(); ++k)
                xio[k] += alpha * phat[k] + omega * shat[k];
            for (std::size_t k = 0; k < r.size(); ++k) r[k] = s[k] - omega * t_[k];
            if (nrm2(r) <= tol * bn) return it;
        }
        double res = nrm2(r) / bn;
        throw std::runtime_error("GpEvolver: inner solve stalled, relative residual " +
                                 std::to_string(res));
    }
};

GpEvolver::GpEvolver(const WaveField& initial, const EvolutionSettings& settings)
    : u_(initial), settings_(settings), impl_(new Impl) {
    const GridSpec& g = u_.grid();
    double h = g.spacing();
    dt_ = settings.dt > 0.0 ? settings.dt : 0.25 * std::min(u_.eps(), h);
    if (dt_ > u_.eps() + 1e-15)
        throw std::invalid_argument("GpEvolver: dt <= eps required for accuracy");
    if (settings_.inner_tol > 1e-8)
        throw std::invalid_argument("GpEvolver: inner_tol must be <= 1e-8");
    impl_->init(g.n, h, dt_);
    // relaxation variable starts at the nonlinearity of the initial state
    const double ie2 = 1.0 / (u_.eps() * u_.eps());
    for (int j = 0; j < impl_->m; ++j)
        for (int i = 0; i < impl_->m; ++i)
            impl_->phi[impl_->idx(i, j)] =
                settings_.disable_nonlinearity
                    ? 0.0
                    : ie2 * (1.0 - std::norm(u_.at(i + 1, j + 1)));
}

GpEvolver::~GpEvolver() = default;

void GpEvolver::step() {
    Impl& im = *impl_;
    const int m = im.m;
    const double ie2 = 1.0 / (u_.eps() * u_.eps());
    const double ih2 = 1.0 / (im.h * im.h);
    // relaxation update: phi_{n+1/2} = 2 f(u_n) - phi_{n-1/2}
    if (!settings_.disable_nonlinearity) {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                std::size_t id = im.idx(i, j);
                im.phi[id] = 2.0 * ie2 * (1.0 - std::norm(u_.at(i + 1, j + 1))) - im.phi[id];
            }
    }
    // rhs = (i/dt + L/2 + Phi/2) u_n + boundary couplings (same data both levels)
    const cplx iu(0.0, im.idt);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            std::size_t id = im.idx(i, j);
            cplx uc = u_.at(i + 1, j + 1);
            cplx lap = -4.0 * uc;
            if (i > 0) lap += u_.at(i, j + 1);
            if (i + 1 < m) lap += u_.at(i + 2, j + 1);
            if (j > 0) lap += u_.at(i + 1, j);
            if (j + 1 < m) lap += u_.at(i + 1, j + 2);
            cplx bnd{};
            if (i == 0) bnd += u_.at(0, j + 1);
            if (i + 1 == m) bnd += u_.at(m + 1, j + 1);
            if (j == 0) bnd += u_.at(i + 1, 0);
            if (j + 1 == m) bnd += u_.at(i + 1, m + 1);
            im.rhs[id] = iu * uc + 0.5 * ih2 * lap + 0.5 * im.phi[id] * uc + ih2 * bnd;
            im.x[id] = uc;  // warm start
        }
    }
    last_iters_ = im.solve(im.x, im.rhs, settings_.inner_tol, settings_.inner_max_iters);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) u_.at(i + 1, j + 1) = im.x[im.idx(i, j)];
    t_ += dt_;
}

void GpEvolver::conjugate() {
    for (auto& z : u_.data()) z = std::conj(z);
    t_ = -t_;
}

double GpEvolver::discrete_energy() const {
    DensityBundle b = local_densities(u_);
    return b.energy.integral();
}

double GpEvolver::mass_functional() const {
    double s = 0.0;
    for (const auto& z : u_.data()) s += std::norm(z) - 1.0;
    double h = u_.grid().spacing();
    return s * h * h;
}

TrackedEvolution run_tracked_evolution(const WaveField& initial, const VortexConfiguration& config,
                                       double T, const EvolutionSettings& settings,
                                       const TrackingOptions& tracking) {
    if (T < 0.0) throw std::invalid_argument("run_tracked_evolution: need T >= 0");
    const int n_samples = std::max(2, tracking.n_samples);

    GpEvolver evolver(initial, settings);
    double dt = evolver.dt();
    long total_steps = T > 0.0 ? static_cast<long>(std::ceil(T / dt - 1e-9)) : 0;
    long stride = std::max(1L, total_steps / (n_samples - 1));

    // samples fall on whole PDE steps; the run ends at total_steps * dt
    std::vector<double> sample_times;
    for (long k = 0; k * stride < total_steps; ++k)
        sample_times.push_back(static_cast<double>(k * stride) * dt);
    if (total_steps > 0) sample_times.push_back(static_cast<double>(total_steps) * dt);

    IntegratorSettings ode;
    ode.rel_tol = 1e-10;
    ode.abs_tol = 1e-12;
    Trajectory ode_traj;
    if (T > 0.0) {
        ode_traj = integrate(config, sample_times.back(), ode, Scaling::gp, sample_times);
    } else {
        ode_traj.degrees = config.degrees();
        TrajectorySample s0;
        s0.t = 0.0;
        s0.positions = config.positions();
        ode_traj.samples.push_back(s0);
    }

    const int nvort = static_cast<int>(config.size());
    const double target_mass = M_PI * config.total_degree();

    TrackedEvolution out;
    std::size_t next = 0;
    long step_count = 0;
    auto take_sample = [&](double t_now) {
        const VortexConfiguration a_cfg = ode_traj.configuration_at(next);
        DensityBundle dens = local_densities(evolver.field());
        TrackedSample smp;
        smp.t = t_now;
        smp.a = a_cfg.positions();
        try {
            smp.xi = locate_vortices(evolver.field(), nvort, dens.jacobian);
        } catch (const std::exception&) {
            out.vortex_lost = true;
            out.samples.push_back(smp);
            return false;
        }
        smp.eta = eta(evolver.field(), a_cfg, dens.jacobian);
        LadderValue sig = renormalized_energy(evolver.field(), dens);
        EnergyReport w = energies(a_cfg, evolver.field().eps(), tracking.gamma);
        smp.surplus = sig.value - w.W_eps;
        smp.surplus_err = sig.error_bar;
        if (tracking.bracket_stride > 0 &&
            (next % static_cast<std::size_t>(tracking.bracket_stride)) == 0) {
            AtomicMeasure ju = jacobian_atoms(dens.jacobian, 1e-10, tracking.bracket_coarsen,
                                              target_mass);
            AtomicMeasure target = empirical_measure(a_cfg, MeasureConvention::pi_degrees);
            smp.j_bracket = xlog_distance(ju - target);
            smp.bracket_valid = true;
        }
        double err = 0.0;
        SeparationScales sc = separation_scales(a_cfg);
        const GridSpec& g = evolver.field().grid();
        for (int v = 0; v < nvort; ++v) {
            err += dist(smp.xi[v], smp.a[v]);
            double edge = g.half_width - std::max(std::fabs(smp.xi[v].x - g.center.x),
                                                  std::fabs(smp.xi[v].y - g.center.y));
            if (edge < 4.0 * sc.rho) out.boundary_proximity = true;
        }
        out.sup_xi_err = std::max(out.sup_xi_err, err);
        out.samples.push_back(std::move(smp));
        return !out.boundary_proximity;
    };

    if (!take_sample(0.0)) return out;
    ++next;
    while (next < sample_times.size()) {
        double target_t = sample_times[next];
        while (evolver.time() < target_t - 0.5 * dt) {
            evolver.step();
            ++step_count;
        }
        if (!take_sample(evolver.time())) return out;
        ++next;
    }
    (void)step_count;
    return out;
}

}  // namespace vtx
