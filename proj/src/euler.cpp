#include "vortexlab/euler.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>

namespace vtx {

EulerState::EulerState(int n_, double box_) : n(n_), box(box_) {
    if (n < 128 || (n & (n - 1)) != 0)
        throw std::invalid_argument("EulerState: N must be a power of two >= 128");
    if (box <= 0.0) throw std::invalid_argument("EulerState: box length must be positive");
    omega.assign(static_cast<std::size_t>(n) * n, 0.0);
}

double EulerState::mean() const {
    double s = 0.0;
    for (double v : omega) s += v;
    return s / omega.size();
}

double EulerState::integral() const { return mean() * box * box; }

double EulerState::enstrophy() const {
    double s = 0.0;
    for (double v : omega) s += v * v;
    double h = spacing();
    return s * h * h;
}

struct EulerSolver::Impl {
    int n;
    double box;
    int nc;  // n/2 + 1 complex columns
    std::vector<double> kx, ky;
    std::vector<char> dealias;
    double* real_buf;
    fftw_complex* cplx_buf;
    fftw_plan fwd, bwd;
    // spectral scratch
    std::vector<std::complex<double>> what, psihat, tmp, k1, k2, k3, k4, stage;
    std::vector<double> vx, vy, wx, wy;

    Impl(int n_, double box_) : n(n_), box(box_), nc(n_ / 2 + 1) {
        real_buf = fftw_alloc_real(static_cast<std::size_t>(n) * n);
        cplx_buf = fftw_alloc_complex(static_cast<std::size_t>(n) * nc);
        fwd = fftw_plan_dft_r2c_2d(n, n, real_buf, cplx_buf, FFTW_MEASURE);
        bwd = fftw_plan_dft_c2r_2d(n, n, cplx_buf, real_buf, FFTW_MEASURE);
        kx.resize(nc);
        ky.resize(n);
        double base = 2.0 * M_PI / box;
        for (int i = 0; i < nc; ++i) kx[i] = base * i;
        for (int j = 0; j < n; ++j) ky[j] = base * (j <= n / 2 ? j : j - n);
        dealias.resize(static_cast<std::size_t>(n) * nc);
        int cut = n / 3;
        for (int j = 0; j < n; ++j) {
            int jj = j <= n / 2 ? j : j - n;
            for (int i = 0; i < nc; ++i)
                dealias[static_cast<std::size_t>(j) * nc + i] =
                    (std::abs(jj) <= cut && i <= cut) ? 1 : 0;
        }
        std::size_t sc = static_cast<std::size_t>(n) * nc;
        for (auto* v : {&what, &psihat, &tmp, &k1, &k2, &k3, &k4, &stage}) v->assign(sc, {});
        std::size_t sr = static_cast<std::size_t>(n) * n;
        for (auto* v : {&vx, &vy, &wx, &wy}) v->assign(sr, 0.0);
    }
    ~Impl() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real_buf);
        fftw_free(cplx_buf);
    }

    void to_spectral(const std::vector<double>& src, std::vector<std::complex<double>>& dst) {
        std::memcpy(real_buf, src.data(), src.size() * sizeof(double));
        fftw_execute(fwd);
        double scale = 1.0 / (static_cast<double>(n) * n);
        auto* c = reinterpret_cast<std::complex<double>*>(cplx_buf);
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = c[k] * scale;
    }

    void to_physical(const std::vector<std::complex<double>>& src, std::vector<double>& dst) {
        auto* c = reinterpret_cast<std::complex<double>*>(cplx_buf);
        std::memcpy(c, src.data(), src.size() * sizeof(std::complex<double>));
        fftw_execute(bwd);
        std::memcpy(dst.data(), real_buf, dst.size() * sizeof(double));
    }

    // velocity and vorticity gradient from spectral omega
    void fields_from(const std::vector<std::complex<double>>& w) {
        const std::complex<double> I(0.0, 1.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nc; ++i) {
                std::size_t id = static_cast<std::size_t>(j) * nc + i;
                double k2v = kx[i] * kx[i] + ky[j] * ky[j];
                // psi solves Lap psi = omega in the zero-mean gauge; the
                // velocity (-psi_y, psi_x) then matches the Biot-Savart sign.
                std::complex<double> psih = k2v > 0.0 ? w[id] / (-k2v) : 0.0;
                psihat[id] = psih;
                tmp[id] = -I * ky[j] * psih;  // vx
            }
        to_physical(tmp, vx);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nc; ++i) {
                std::size_t id = static_cast<std::size_t>(j) * nc + i;
                tmp[id] = I * kx[i] * psihat[id];  // vy
            }
        to_physical(tmp, vy);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nc; ++i) {
                std::size_t id = static_cast<std::size_t>(j) * nc + i;
                tmp[id] = I * kx[i] * w[id];
            }
        to_physical(tmp, wx);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < nc; ++i) {
                std::size_t id = static_cast<std::size_t>(j) * nc + i;
                tmp[id] = I * ky[j] * w[id];
            }
        to_physical(tmp, wy);
    }

    // rhs = - (v . grad omega), dealiased
    void rhs(const std::vector<std::complex<double>>& w, std::vector<std::complex<double>>& out) {
        fields_from(w);
        std::size_t sr = static_cast<std::size_t>(n) * n;
        std::vector<double>& adv = wx;  // reuse, careful with aliasing below
        for (std::size_t k = 0; k < sr; ++k) adv[k] = -(vx[k] * wx[k] + vy[k] * wy[k]);
        to_spectral(adv, out);
        for (std::size_t k = 0; k < out.size(); ++k)
            if (!dealias[k]) out[k] = 0.0;
    }
};

EulerSolver::EulerSolver(int n, double box) : impl_(new Impl(n, box)) {}
EulerSolver::~EulerSolver() = default;

double EulerSolver::max_velocity(const EulerState& state) {
    impl_->to_spectral(state.omega, impl_->what);
    impl_->fields_from(impl_->what);
    double m = 0.0;
    for (std::size_t k = 0; k < impl_->vx.size(); ++k)
        m = std::max(m, std::sqrt(impl_->vx[k] * impl_->vx[k] + impl_->vy[k] * impl_->vy[k]));
    return m;
}

double EulerSolver::kinetic_energy(const EulerState& state) {
    impl_->to_spectral(state.omega, impl_->what);
    impl_->fields_from(impl_->what);
    double s = 0.0;
    for (std::size_t k = 0; k < impl_->vx.size(); ++k)
        s += impl_->vx[k] * impl_->vx[k] + impl_->vy[k] * impl_->vy[k];
    double h = state.spacing();
    return 0.5 * s * h * h;
}

void EulerSolver::velocity(const EulerState& state, std::vector<double>& vx,
                           std::vector<double>& vy) {
    impl_->to_spectral(state.omega, impl_->what);
    impl_->fields_from(impl_->what);
    vx = impl_->vx;
    vy = impl_->vy;
}

double EulerSolver::poisson_residual(const EulerState& state) {
    Impl& im = *impl_;
    im.to_spectral(state.omega, im.what);
    for (int j = 0; j < im.n; ++j)
        for (int i = 0; i < im.nc; ++i) {
            std::size_t id = static_cast<std::size_t>(j) * im.nc + i;
            double k2v = im.kx[i] * im.kx[i] + im.ky[j] * im.ky[j];
            std::complex<double> psih = k2v > 0.0 ? im.what[id] / (-k2v) : 0.0;
            // Lap psi - omega, skipping the mean mode (gauge)
            im.tmp[id] = k2v > 0.0 ? (-k2v) * psih - im.what[id] : 0.0;
        }
    im.to_physical(im.tmp, im.vx);
    double m = 0.0, scale = 0.0;
    for (double v : state.omega) scale = std::max(scale, std::fabs(v));
    for (double v : im.vx) m = std::max(m, std::fabs(v));
    return scale > 0.0 ? m / scale : m;
}

void EulerSolver::step(EulerState& state, double dt) {
    Impl& im = *impl_;
    if (state.n != im.n || state.box != im.box)
        throw std::invalid_argument("EulerSolver: state/solver size mismatch");
    double vmax = max_velocity(state);
    if (vmax * dt > 0.5 * state.spacing() + 1e-15)
        throw std::invalid_argument("EulerSolver: CFL violation, |v| dt > h/2");

    im.to_spectral(state.omega, im.what);
    std::size_t sc = im.what.size();
    im.rhs(im.what, im.k1);
    for (std::size_t k = 0; k < sc; ++k) im.stage[k] = im.what[k] + 0.5 * dt * im.k1[k];
    im.rhs(im.stage, im.k2);
    for (std::size_t k = 0; k < sc; ++k) im.stage[k] = im.what[k] + 0.5 * dt * im.k2[k];
    im.rhs(im.stage, im.k3);
    for (std::size_t k = 0; k < sc; ++k) im.stage[k] = im.what[k] + dt * im.k3[k];
    im.rhs(im.stage, im.k4);
    for (std::size_t k = 0; k < sc; ++k)
        im.what[k] += dt / 6.0 * (im.k1[k] + 2.0 * im.k2[k] + 2.0 * im.k3[k] + im.k4[k]);
    im.to_physical(im.what, state.omega);
    state.time += dt;
}

std::vector<EulerState> run_euler(const GridMeasure& initial, double T, int samples, double cfl) {
    if (samples < 2) throw std::invalid_argument("run_euler: need >= 2 samples");
    int n = initial.n();
    EulerState state(n, 2.0 * initial.half_width());
    double edge_max = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j : {0, n - 1}) {
            edge_max = std::max(edge_max, std::fabs(initial.at(i, j)));
            edge_max = std::max(edge_max, std::fabs(initial.at(j, i)));
        }
    if (edge_max > 1e-12)
        throw std::invalid_argument("run_euler: initial vorticity does not decay at the boundary");
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) state.at(i, j) = initial.at(i, j);

    EulerSolver solver(n, state.box);
    std::vector<EulerState> out;
    out.push_back(state);
    double h = state.spacing();
    for (int s = 1; s < samples; ++s) {
        double target = T * static_cast<double>(s) / (samples - 1);
        while (state.time < target - 1e-12) {
            double vmax = solver.max_velocity(state);
            double dt = cfl * h / std::max(vmax, 1e-12);
            dt = std::min(dt, target - state.time);
            solver.step(state, dt);
        }
        out.push_back(state);
    }
    return out;
}

double pair_interaction(const AtomicMeasure& omega, const std::function<Vec2(const Vec2&)>& grad) {
    const auto& atoms = omega.atoms();
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        Vec2 gi = grad(atoms[i].pos);
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            Vec2 rel = atoms[i].pos - atoms[j].pos;
            double r2 = rel.norm2();
            if (r2 == 0.0) continue;  // diagonal convention: excluded
            Vec2 kern = rel.perp() * (1.0 / (2.0 * M_PI * r2));
            Vec2 gj = grad(atoms[j].pos);
            // the (i,j) and (j,i) terms agree, hence the factor 1 on i<j
            s += atoms[i].weight * atoms[j].weight * kern.dot(gi - gj);
        }
    }
    return s;
}

double weak_residual(const std::vector<double>& times, const std::vector<AtomicMeasure>& omegas,
                     const SpaceTimeTestFunction& zeta) {
    if (times.size() != omegas.size() || times.size() < 3 || times.size() % 2 == 0)
        throw std::invalid_argument("weak_residual: need an odd number (>= 3) of uniform samples");
    double dt = times[1] - times[0];
    for (std::size_t k = 1; k < times.size(); ++k)
        if (std::fabs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(1.0, std::fabs(dt)))
            throw std::invalid_argument("weak_residual: sample times must be uniform");
    if (zeta.t_begin <= times.front() || zeta.t_end >= times.back())
        throw std::invalid_argument("weak_residual: zeta support must sit inside the time interval");

    auto integrand = [&](std::size_t k) {
        double t = times[k];
        if (t < zeta.t_begin || t > zeta.t_end) return 0.0;
        const AtomicMeasure& om = omegas[k];
        double term1 = 0.0;
        for (const auto& a : om.atoms()) term1 += a.weight * zeta.dt_value(t, a.pos);
        double term2 = pair_interaction(om, [&](const Vec2& x) { return zeta.gradient(t, x); });
        return term1 + term2;
    };
    // composite Simpson
    double s = integrand(0) + integrand(times.size() - 1);
    for (std::size_t k = 1; k + 1 < times.size(); ++k) s += integrand(k) * (k % 2 == 1 ? 4.0 : 2.0);
    return s * dt / 3.0;
}

}  // namespace vtx
