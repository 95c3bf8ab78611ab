#include "vortexlab/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vtx {

namespace {

// Thomas solve of a tridiagonal system (lo, di, up), overwrites rhs.
void tridiag_solve(std::vector<double>& lo, std::vector<double>& di, std::vector<double>& up,
                   std::vector<double>& rhs) {
    const std::size_t n = di.size();
    for (std::size_t i = 1; i < n; ++i) {
        double m = lo[i] / di[i - 1];
        di[i] -= m * up[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= di[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / di[i];
}

// Damped Newton for the profile equation with Dirichlet data f(0)=0,
// f(S)=f_outer. Returns interior+boundary values on the uniform grid.
std::vector<double> solve_profile(double S, int K, double f_outer) {
    const double h = S / K;
    std::vector<double> f(K + 1);
    for (int i = 0; i <= K; ++i) {
        double s = i * h;
        f[i] = s / std::sqrt(s * s + 2.0);
    }
    f[0] = 0.0;
    f[K] = f_outer;

    auto residual = [&](const std::vector<double>& g, std::vector<double>& F) {
        for (int i = 1; i < K; ++i) {
            double s = i * h;
            F[i - 1] = (g[i + 1] - 2.0 * g[i] + g[i - 1]) / (h * h) +
                       (g[i + 1] - g[i - 1]) / (2.0 * h * s) - g[i] / (s * s) +
                       g[i] * (1.0 - g[i] * g[i]);
        }
    };

    std::vector<double> F(K - 1), lo(K - 1), di(K - 1), up(K - 1), delta(K - 1);
    double fnorm = 0.0;
    residual(f, F);
    for (double v : F) fnorm = std::max(fnorm, std::fabs(v));

    for (int iter = 0; iter < 100; ++iter) {
        if (fnorm < 1e-12) break;
        for (int i = 1; i < K; ++i) {
            double s = i * h;
            lo[i - 1] = 1.0 / (h * h) - 1.0 / (2.0 * h * s);
            di[i - 1] = -2.0 / (h * h) - 1.0 / (s * s) + 1.0 - 3.0 * f[i] * f[i];
            up[i - 1] = 1.0 / (h * h) + 1.0 / (2.0 * h * s);
        }
        delta = F;
        tridiag_solve(lo, di, up, delta);
        double lambda = 1.0;
        std::vector<double> trial(f);
        for (int back = 0; back < 40; ++back) {
            for (int i = 1; i < K; ++i) trial[i] = f[i] - lambda * delta[i - 1];
            residual(trial, F);
            double tn = 0.0;
            for (double v : F) tn = std::max(tn, std::fabs(v));
            if (tn < fnorm || tn < 1e-12) {
                f = trial;
                fnorm = tn;
                break;
            }
            lambda *= 0.5;
            if (back == 39)
                throw std::runtime_error("model_vortex_profile: Newton stalled at residual " +
                                         std::to_string(fnorm));
        }
    }
    if (fnorm > 1e-8)
        throw std::runtime_error("model_vortex_profile: residual " + std::to_string(fnorm) +
                                 " exceeds 1e-8");
    return f;
}

}  // namespace

double RadialProfile::value_at(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= nodes.back()) return 1.0;
    double h = nodes[1] - nodes[0];
    int i = std::min(static_cast<int>(s / h), static_cast<int>(nodes.size()) - 2);
    double t = (s - nodes[i]) / h;
    return values[i] * (1.0 - t) + values[i + 1] * t;
}

double RadialProfile::equation_residual() const {
    const int K = static_cast<int>(nodes.size()) - 1;
    const double h = nodes[1] - nodes[0];
    double worst = 0.0;
    for (int i = 1; i < K; ++i) {
        double s = nodes[i];
        double r = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h) +
                   (values[i + 1] - values[i - 1]) / (2.0 * h * s) - values[i] / (s * s) +
                   values[i] * (1.0 - values[i] * values[i]);
        worst = std::max(worst, std::fabs(r));
    }
    return worst;
}

RadialProfile model_vortex_profile(double S, int K) {
    if (S < 20.0) throw std::invalid_argument("model_vortex_profile: need S >= 20");
    if (K < 500) throw std::invalid_argument("model_vortex_profile: need K >= 500");
    RadialProfile p;
    p.values = solve_profile(S, K, 1.0 - 1.0 / (2.0 * S * S));
    p.nodes.resize(K + 1);
    for (int i = 0; i <= K; ++i) p.nodes[i] = S * static_cast<double>(i) / K;
    return p;
}

double single_vortex_core_energy(double s, int K) {
    if (s < 2.0) throw std::invalid_argument("single_vortex_core_energy: scale too small");
    if (K == 0) K = static_cast<int>(std::lround(400.0 * s));
    const double h = s / K;
    std::vector<double> f = solve_profile(s, K, 1.0);
    double e = 0.0;
    for (int i = 0; i < K; ++i) {
        double fm = 0.5 * (f[i] + f[i + 1]);
        double rm = (i + 0.5) * h;
        double fp = (f[i + 1] - f[i]) / h;
        e += (0.5 * (fp * fp + fm * fm / (rm * rm)) + 0.25 * (1.0 - fm * fm) * (1.0 - fm * fm)) *
             rm * h;
    }
    return 2.0 * M_PI * e;
}

GammaEstimate bbh_gamma_estimate(double s0, int levels) {
    if (s0 < 16.0) throw std::invalid_argument("bbh_gamma_estimate: need s0 >= 16");
    if (levels < 2) throw std::invalid_argument("bbh_gamma_estimate: need >= 2 ladder levels");
    GammaEstimate g;
    for (int k = 0; k < levels; ++k) {
        double s = s0 * std::pow(2.0, k);
        double I = single_vortex_core_energy(s);
        g.scales.push_back(s);
        g.energies.push_back(I);
        g.ladder.push_back(I - M_PI * std::log(s));
    }
    double last = g.ladder[levels - 1], prev = g.ladder[levels - 2];
    // gamma_k = gamma + C / s_k^2 and dyadic scales: remove the leading term
    g.gamma = last + (last - prev) / 3.0;
    g.error_bar = std::fabs(last - prev);
    return g;
}

}  // namespace vtx
