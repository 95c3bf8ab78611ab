#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "vortexlab/weak_norms.hpp"

namespace vtx {

namespace {

// Row blocks of the constraint operator A (all scaled so |A phi| <= 1):
//   0: node values
//   1: d/dx forward differences      2: d/dy
//   3: d2/dx2 second differences     4: d2/dy2
//   5: mixed second differences
struct LpGrid {
    int n;      // nodes per axis
    double h;
    int n_val, n_dx, n_dy, n_dxx, n_dyy, n_dxy;
    int rows() const { return n_val + n_dx + n_dy + n_dxx + n_dyy + n_dxy; }
};

void apply_A(const LpGrid& g, const std::vector<double>& phi, std::vector<double>& out) {
    const int n = g.n;
    const double ih = 1.0 / g.h, ih2 = ih * ih;
    int o = 0;
    for (int r = 0; r < g.n_val; ++r) out[o + r] = phi[r];
    o += g.n_val;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i) out[o++] = (phi[j * n + i + 1] - phi[j * n + i]) * ih;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) out[o++] = (phi[(j + 1) * n + i] - phi[j * n + i]) * ih;
    for (int j = 0; j < n; ++j)
        for (int i = 1; i + 1 < n; ++i)
            out[o++] = (phi[j * n + i + 1] - 2.0 * phi[j * n + i] + phi[j * n + i - 1]) * ih2;
    for (int j = 1; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i)
            out[o++] = (phi[(j + 1) * n + i] - 2.0 * phi[j * n + i] + phi[(j - 1) * n + i]) * ih2;
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i)
            out[o++] = (phi[(j + 1) * n + i + 1] - phi[(j + 1) * n + i] - phi[j * n + i + 1] +
                        phi[j * n + i]) *
                       ih2;
}

void apply_At(const LpGrid& g, const std::vector<double>& y, std::vector<double>& out) {
    const int n = g.n;
    const double ih = 1.0 / g.h, ih2 = ih * ih;
    std::fill(out.begin(), out.end(), 0.0);
    int o = 0;
    for (int r = 0; r < g.n_val; ++r) out[r] += y[o + r];
    o += g.n_val;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            double v = y[o++] * ih;
            out[j * n + i + 1] += v;
            out[j * n + i] -= v;
        }
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) {
            double v = y[o++] * ih;
            out[(j + 1) * n + i] += v;
            out[j * n + i] -= v;
        }
    for (int j = 0; j < n; ++j)
        for (int i = 1; i + 1 < n; ++i) {
            double v = y[o++] * ih2;
            out[j * n + i + 1] += v;
            out[j * n + i] -= 2.0 * v;
            out[j * n + i - 1] += v;
        }
    for (int j = 1; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i) {
            double v = y[o++] * ih2;
            out[(j + 1) * n + i] += v;
            out[j * n + i] -= 2.0 * v;
            out[(j - 1) * n + i] += v;
        }
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            double v = y[o++] * ih2;
            out[(j + 1) * n + i + 1] += v;
            out[(j + 1) * n + i] -= v;
            out[j * n + i + 1] -= v;
            out[j * n + i] += v;
        }
}

void row_abs_sums(const LpGrid& g, std::vector<double>& sigma) {
    const double ih = 1.0 / g.h, ih2 = ih * ih;
    int o = 0;
    for (int r = 0; r < g.n_val; ++r) sigma[o + r] = 1.0;
    o += g.n_val;
    for (int r = 0; r < g.n_dx + g.n_dy; ++r) sigma[o + r] = 2.0 * ih;
    o += g.n_dx + g.n_dy;
    for (int r = 0; r < g.n_dxx + g.n_dyy + g.n_dxy; ++r) sigma[o + r] = 4.0 * ih2;
}

void col_abs_sums(const LpGrid& g, std::vector<double>& tau) {
    const int n = g.n;
    const double ih = 1.0 / g.h, ih2 = ih * ih;
    std::fill(tau.begin(), tau.end(), 1.0);  // value rows
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            if (i > 0) s += ih;
            if (i + 1 < n) s += ih;
            if (j > 0) s += ih;
            if (j + 1 < n) s += ih;
            if (i > 0 && i + 1 < n) s += 2.0 * ih2;
            if (i > 1) s += ih2;
            if (i + 2 < n) s += ih2;
            if (j > 0 && j + 1 < n) s += 2.0 * ih2;
            if (j > 1) s += ih2;
            if (j + 2 < n) s += ih2;
            // mixed rows: node appears in up to 4 of them, coefficient ih2
            int mx = (i > 0 ? 1 : 0) + (i + 1 < n ? 1 : 0);
            int my = (j > 0 ? 1 : 0) + (j + 1 < n ? 1 : 0);
            s += ih2 * mx * my;
            tau[j * n + i] += s;
        }
}

}  // namespace

NormBracket wminus2_estimate(const AtomicMeasure& mu, double domain_radius, int grid_n,
                             const Wminus2Options& opt) {
    if (grid_n < 8 || grid_n > 192) throw std::invalid_argument("wminus2_estimate: grid N out of range");
    if (domain_radius <= 0.0) throw std::invalid_argument("wminus2_estimate: radius must be positive");
    double tv = mu.total_variation();
    if (tv > 0.0 && std::fabs(mu.total_mass()) > 1e-9 * tv)
        throw std::invalid_argument("wminus2_estimate: unbalanced measure");
    for (const auto& a : mu.atoms())
        if (std::max(std::fabs(a.pos.x), std::fabs(a.pos.y)) > domain_radius)
            throw std::invalid_argument("wminus2_estimate: atom outside the domain");

    LpGrid g;
    g.n = grid_n;
    g.h = 2.0 * domain_radius / (grid_n - 1);
    g.n_val = grid_n * grid_n;
    g.n_dx = (grid_n - 1) * grid_n;
    g.n_dy = grid_n * (grid_n - 1);
    g.n_dxx = (grid_n - 2) * grid_n;
    g.n_dyy = grid_n * (grid_n - 2);
    g.n_dxy = (grid_n - 1) * (grid_n - 1);

    NormBracket out;
    out.method = "grid-lp-pdhg";
    if (tv == 0.0) {
        out.parameters = "{}";
        return out;
    }

    // objective: bilinear spread of atom weights onto nodes
    std::vector<double> c(g.n_val, 0.0);
    for (const auto& a : mu.atoms()) {
        double fx = (a.pos.x + domain_radius) / g.h;
        double fy = (a.pos.y + domain_radius) / g.h;
        int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.n - 2);
        int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.n - 2);
        double tx = std::clamp(fx - i, 0.0, 1.0), ty = std::clamp(fy - j, 0.0, 1.0);
        c[j * g.n + i] += a.weight * (1.0 - tx) * (1.0 - ty);
        c[j * g.n + i + 1] += a.weight * tx * (1.0 - ty);
        c[(j + 1) * g.n + i] += a.weight * (1.0 - tx) * ty;
        c[(j + 1) * g.n + i + 1] += a.weight * tx * ty;
    }

    const int rows = g.rows();
    std::vector<double> phi(g.n_val, 0.0), phibar(g.n_val, 0.0), y(rows, 0.0);
    std::vector<double> sigma(rows), tau(g.n_val), arow(rows), atcol(g.n_val);
    row_abs_sums(g, sigma);
    col_abs_sums(g, tau);
    for (double& s : sigma) s = 0.95 / s;
    for (double& t : tau) t = 0.95 / t;

    double best_lower = 0.0, best_upper = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        apply_A(g, phibar, arow);
        for (int r = 0; r < rows; ++r) {
            double v = y[r] + sigma[r] * arow[r];
            // prox of sigma * | . |_1^* : soft shrinkage by sigma
            y[r] = v - std::clamp(v, -sigma[r], sigma[r]);
        }
        apply_At(g, y, atcol);
        for (int i = 0; i < g.n_val; ++i) {
            double nphi = phi[i] - tau[i] * (atcol[i] - c[i]);
            phibar[i] = 2.0 * nphi - phi[i];
            phi[i] = nphi;
        }
        if ((it + 1) % 250 == 0 || it + 1 == opt.max_iterations) {
            apply_A(g, phi, arow);
            double viol = 1.0;
            for (int r = 0; r < rows; ++r) viol = std::max(viol, std::fabs(arow[r]));
            double obj = 0.0;
            for (int i = 0; i < g.n_val; ++i) obj += c[i] * phi[i];
            double lower = obj / viol;
            apply_At(g, y, atcol);
            double dual = 0.0;
            for (int r = 0; r < rows; ++r) dual += std::fabs(y[r]);
            for (int i = 0; i < g.n_val; ++i) dual += std::fabs(c[i] - atcol[i]);
            best_lower = std::max(best_lower, lower);
            best_upper = std::min(best_upper, dual);
            if (best_upper - best_lower <= opt.relative_gap * std::max(1e-12, best_upper)) {
                ++it;
                break;
            }
        }
    }

    out.lower = std::max(0.0, best_lower);
    out.upper = best_upper + g.h * tv;
    nlohmann::json params{{"grid_n", grid_n},
                          {"radius", domain_radius},
                          {"iterations", it},
                          {"lp_gap", best_upper - best_lower},
                          {"correction", g.h * tv}};
    out.parameters = params.dump();
    return out;
}

}  // namespace vtx
