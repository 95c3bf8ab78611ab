#include "vortexlab/wave_field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace vtx {

WaveField::WaveField(GridSpec spec, double eps, int degree_at_infinity, bool allow_unresolved)
    : spec_(spec), eps_(eps), degree_(degree_at_infinity) {
    if (spec_.n < 32) throw std::invalid_argument("WaveField: need N >= 32");
    if (!(eps_ > 0.0)) throw std::invalid_argument("WaveField: need eps > 0");
    if (!allow_unresolved && !(spec_.spacing() < 0.5 * eps_))
        throw std::invalid_argument("WaveField: h < eps/2 required for resolved cores");
    v_.assign(static_cast<std::size_t>(spec_.n) * spec_.n, {0.0, 0.0});
}

WaveField assemble_initial_data(const VortexConfiguration& config, double eps, const GridSpec& grid,
                                const RadialProfile& profile, bool allow_unresolved) {
    SeparationScales sc = separation_scales(config);
    for (const auto& a : config.positions()) {
        double margin = grid.half_width - std::max(std::fabs(a.x - grid.center.x),
                                                   std::fabs(a.y - grid.center.y));
        if (margin < 4.0 * sc.rho)
            throw std::invalid_argument("assemble_initial_data: vortex too close to the box edge");
    }
    WaveField field(grid, eps, config.total_degree(), allow_unresolved);
    const int n = grid.n;
    const auto& pos = config.positions();
    const auto& deg = config.degrees();
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            Vec2 x = grid.node(i, j);
            std::complex<double> u(1.0, 0.0);
            for (std::size_t v = 0; v < pos.size(); ++v) {
                Vec2 rel = x - pos[v];
                double r = rel.norm();
                if (r == 0.0) {
                    u = {0.0, 0.0};
                    break;
                }
                std::complex<double> phase(rel.x / r, rel.y / r);
                if (deg[v] < 0) phase = std::conj(phase);
                u *= profile.value_at(r / eps) * phase;
            }
            field.at(i, j) = u;
        }
    }
    return field;
}

WaveField assemble_initial_data(const VortexConfiguration& config, double eps, const GridSpec& grid,
                                bool allow_unresolved) {
    static const RadialProfile default_profile = model_vortex_profile(20.0, 4000);
    return assemble_initial_data(config, eps, grid, default_profile, allow_unresolved);
}

DensityBundle local_densities(const WaveField& field) {
    const GridSpec& g = field.grid();
    const int n = g.n;
    const double h = g.spacing();
    const double ie2 = 1.0 / (4.0 * field.eps() * field.eps());
    DensityBundle b{GridMeasure(g.center, g.half_width, n), GridMeasure(g.center, g.half_width, n),
                    GridMeasure(g.center, g.half_width, n), GridMeasure(g.center, g.half_width, n)};
    auto u = [&](int i, int j) { return field.at(i, j); };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            std::complex<double> ux, uy;
            if (i == 0)
                ux = (u(1, j) - u(0, j)) / h;
            else if (i == n - 1)
                ux = (u(n - 1, j) - u(n - 2, j)) / h;
            else
                ux = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
            if (j == 0)
                uy = (u(i, 1) - u(i, 0)) / h;
            else if (j == n - 1)
                uy = (u(i, n - 1) - u(i, n - 2)) / h;
            else
                uy = (u(i, j + 1) - u(i, j - 1)) / (2.0 * h);
            std::complex<double> uc = u(i, j);
            double m2 = std::norm(uc);
            b.energy.at(i, j) =
                0.5 * (std::norm(ux) + std::norm(uy)) + ie2 * (m2 - 1.0) * (m2 - 1.0);
            b.jx.at(i, j) = std::imag(std::conj(uc) * ux);
            b.jy.at(i, j) = std::imag(std::conj(uc) * uy);
            // u as a planar map (p, q): J = p_x q_y - p_y q_x
            b.jacobian.at(i, j) = ux.real() * uy.imag() - uy.real() * ux.imag();
        }
    }
    return b;
}

namespace {

// Integral of a cell-sampled density over the disc B_R(center): full cells
// inside, linear area coverage across the boundary ring.
double disc_integral(const GridMeasure& f, const Vec2& center, double R) {
    double h = f.spacing();
    double cell = h * h;
    double s = 0.0;
    for (int j = 0; j < f.n(); ++j)
        for (int i = 0; i < f.n(); ++i) {
            double r = dist(f.cell_center(i, j), center);
            double cover = std::clamp((R - r) / h + 0.5, 0.0, 1.0);
            if (cover > 0.0) s += f.at(i, j) * cover * cell;
        }
    return s;
}

}  // namespace

LadderValue renormalized_energy(const WaveField& field, const DensityBundle& densities) {
    const GridSpec& g = field.grid();
    const double D2 = static_cast<double>(field.degree_at_infinity()) *
                      static_cast<double>(field.degree_at_infinity());
    LadderValue out;
    double radii[3] = {0.5 * g.half_width, 0.5 * g.half_width / std::sqrt(2.0),
                       0.25 * g.half_width};
    double gv[3];
    for (int k = 0; k < 3; ++k) {
        gv[k] = disc_integral(densities.energy, g.center, radii[k]) - M_PI * D2 * std::log(radii[k]);
        out.ladder_radii[k] = radii[k];
        out.ladder_values[k] = gv[k];
    }
    // three-point fit g(R) = E - a/R - b/R^2
    double r0 = radii[0], r1 = radii[1], r2 = radii[2];
    double det = (1.0 / r1 - 1.0 / r0) * (1.0 / (r2 * r2) - 1.0 / (r0 * r0)) -
                 (1.0 / r2 - 1.0 / r0) * (1.0 / (r1 * r1) - 1.0 / (r0 * r0));
    double d1 = gv[1] - gv[0], d2 = gv[2] - gv[0];
    double a = (d1 * (1.0 / (r2 * r2) - 1.0 / (r0 * r0)) - d2 * (1.0 / (r1 * r1) - 1.0 / (r0 * r0))) /
               -det;
    double bb = (d2 * (1.0 / r1 - 1.0 / r0) - d1 * (1.0 / r2 - 1.0 / r0)) / -det;
    double E3 = gv[0] + a / r0 + bb / (r0 * r0);
    // competing two-point extrapolations on the larger radii
    double E1 = (gv[0] * r0 - gv[1] * r1) / (r0 - r1);                          // pure 1/R
    double E2 = (gv[0] * r0 * r0 - gv[1] * r1 * r1) / (r0 * r0 - r1 * r1);      // pure 1/R^2
    out.value = E3;
    out.error_bar = std::max(std::fabs(E3 - E1), std::fabs(E3 - E2));
    out.flagged = out.error_bar > 0.2 * std::max(1.0, std::fabs(E3));
    return out;
}

LadderValue renormalized_energy(const WaveField& field) {
    return renormalized_energy(field, local_densities(field));
}

LadderValue surplus(const WaveField& field, const VortexConfiguration& config, double gamma) {
    LadderValue e = renormalized_energy(field);
    EnergyReport w = energies(config, field.eps(), gamma);
    e.value -= w.W_eps;
    for (double& lv : e.ladder_values) lv -= w.W_eps;
    return e;
}

namespace {

double principal_arg(std::complex<double> z) { return std::atan2(z.imag(), z.real()); }

struct Cluster {
    double sx = 0.0, sy = 0.0;
    int count = 0;
    Vec2 seed() const { return {sx / count, sy / count}; }
};

std::vector<Cluster> winding_clusters(const WaveField& field) {
    const GridSpec& g = field.grid();
    const int n = g.n;
    const double h = g.spacing();
    std::vector<std::pair<int, int>> hot;
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            std::complex<double> u00 = field.at(i, j), u10 = field.at(i + 1, j),
                                 u11 = field.at(i + 1, j + 1), u01 = field.at(i, j + 1);
            if (u00 == 0.0 || u10 == 0.0 || u11 == 0.0 || u01 == 0.0) {
                hot.push_back({i, j});
                continue;
            }
            double w = principal_arg(u10 / u00) + principal_arg(u11 / u10) +
                       principal_arg(u01 / u11) + principal_arg(u00 / u01);
            if (std::fabs(w) > M_PI) hot.push_back({i, j});
        }
    }
    // union by proximity (Chebyshev distance <= 2 cells)
    std::vector<int> label(hot.size(), -1);
    std::vector<Cluster> clusters;
    for (std::size_t a = 0; a < hot.size(); ++a) {
        if (label[a] >= 0) continue;
        int id = static_cast<int>(clusters.size());
        clusters.push_back({});
        std::vector<std::size_t> stack{a};
        label[a] = id;
        while (!stack.empty()) {
            std::size_t cur = stack.back();
            stack.pop_back();
            Vec2 c = g.node(hot[cur].first, hot[cur].second) + Vec2{0.5 * h, 0.5 * h};
            clusters[id].sx += c.x;
            clusters[id].sy += c.y;
            clusters[id].count += 1;
            for (std::size_t b = 0; b < hot.size(); ++b) {
                if (label[b] >= 0) continue;
                if (std::abs(hot[b].first - hot[cur].first) <= 2 &&
                    std::abs(hot[b].second - hot[cur].second) <= 2) {
                    label[b] = id;
                    stack.push_back(b);
                }
            }
        }
    }
    return clusters;
}

}  // namespace

std::vector<Vec2> locate_vortices(const WaveField& field, int n_expected,
                                  const GridMeasure& jacobian) {
    std::vector<Cluster> clusters = winding_clusters(field);
    if (static_cast<int>(clusters.size()) != n_expected) {
        std::ostringstream msg;
        msg << "locate_vortices: expected " << n_expected << " clusters, found " << clusters.size()
            << " at";
        for (const auto& c : clusters) msg << " (" << c.seed().x << "," << c.seed().y << ")";
        throw std::runtime_error(msg.str());
    }
    const GridSpec& g = field.grid();
    const double h = g.spacing();
    // rho of the detected seeds
    double minsep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < clusters.size(); ++a)
        for (std::size_t b = a + 1; b < clusters.size(); ++b)
            minsep = std::min(minsep, dist(clusters[a].seed(), clusters[b].seed()));
    double rho = 0.25 * std::min(1.0, minsep);
    std::vector<Vec2> out;
    for (const auto& c : clusters) {
        Vec2 seed = c.seed();
        double edge = g.half_width - std::max(std::fabs(seed.x - g.center.x),
                                              std::fabs(seed.y - g.center.y));
        double r = std::min(rho, edge - h);
        if (r < 2.0 * h) r = 2.0 * h;
        int i0 = std::max(0, static_cast<int>((seed.x - r - (g.center.x - g.half_width)) / h) - 1);
        int j0 = std::max(0, static_cast<int>((seed.y - r - (g.center.y - g.half_width)) / h) - 1);
        int i1 = std::min(g.n - 1, i0 + static_cast<int>(2.0 * r / h) + 3);
        int j1 = std::min(g.n - 1, j0 + static_cast<int>(2.0 * r / h) + 3);
        double mass = 0.0, mx = 0.0, my = 0.0;
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                Vec2 x = g.node(i, j);
                if (dist(x, seed) > r) continue;
                double m = jacobian.at(i, j);
                mass += m;
                mx += m * x.x;
                my += m * x.y;
            }
        if (mass == 0.0) throw std::runtime_error("locate_vortices: vanishing Jacobian mass");
        out.push_back({mx / mass, my / mass});
    }
    return out;
}

std::vector<Vec2> locate_vortices(const WaveField& field, int n_expected) {
    return locate_vortices(field, n_expected, local_densities(field).jacobian);
}

namespace {

double quintic_cutoff(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    double u = t - 1.0;
    return 1.0 - (10.0 - (15.0 - 6.0 * u) * u) * u * u * u;
}

}  // namespace

double eta(const WaveField& field, const VortexConfiguration& config, const GridMeasure& jacobian) {
    SeparationScales sc = separation_scales(config);
    const GridSpec& g = field.grid();
    const double h = g.spacing();
    for (const auto& a : config.positions()) {
        double edge = g.half_width -
                      std::max(std::fabs(a.x - g.center.x), std::fabs(a.y - g.center.y));
        if (edge < 4.0 * sc.rho)
            throw std::invalid_argument("eta: vortex closer than 4 rho_a to the boundary");
    }
    double total = 0.0;
    double cell = h * h;
    for (const auto& a : config.positions()) {
        int i0 = std::max(0, static_cast<int>((a.x - 2.0 * sc.rho - (g.center.x - g.half_width)) / h) - 1);
        int j0 = std::max(0, static_cast<int>((a.y - 2.0 * sc.rho - (g.center.y - g.half_width)) / h) - 1);
        int span = static_cast<int>(4.0 * sc.rho / h) + 3;
        int i1 = std::min(g.n - 1, i0 + span), j1 = std::min(g.n - 1, j0 + span);
        double ex = 0.0, ey = 0.0;
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                Vec2 rel = g.node(i, j) - a;
                double chi = quintic_cutoff(rel.norm() / sc.rho);
                if (chi == 0.0) continue;
                double m = jacobian.at(i, j) * cell * chi;
                ex += m * rel.x;
                ey += m * rel.y;
            }
        total += std::sqrt(ex * ex + ey * ey);
    }
    return total;
}

double eta(const WaveField& field, const VortexConfiguration& config) {
    return eta(field, config, local_densities(field).jacobian);
}

int loop_winding(const WaveField& field, const Vec2& center, double radius) {
    const GridSpec& g = field.grid();
    int steps = std::max(64, static_cast<int>(16.0 * radius / g.spacing()));
    double acc = 0.0;
    std::complex<double> prev;
    for (int k = 0; k <= steps; ++k) {
        double th = 2.0 * M_PI * k / steps;
        Vec2 x = center + Vec2{radius * std::cos(th), radius * std::sin(th)};
        int i = std::clamp(static_cast<int>((x.x - (g.center.x - g.half_width)) / g.spacing()), 0,
                           g.n - 1);
        int j = std::clamp(static_cast<int>((x.y - (g.center.y - g.half_width)) / g.spacing()), 0,
                           g.n - 1);
        std::complex<double> u = field.at(i, j);
        if (u == 0.0) throw std::runtime_error("loop_winding: zero field value on the loop");
        if (k > 0) acc += principal_arg(u / prev);
        prev = u;
    }
    return static_cast<int>(std::lround(acc / (2.0 * M_PI)));
}

AtomicMeasure jacobian_atoms(const GridMeasure& jacobian, double mass_floor, int coarsen_factor,
                             double target_mass, double* scale_out) {
    GridMeasure src = coarsen_factor > 1 ? jacobian.coarsened(coarsen_factor) : jacobian;
    AtomicMeasure atoms = src.to_atoms(mass_floor);
    double mass = atoms.total_mass();
    double scale = (mass != 0.0 && target_mass != 0.0) ? target_mass / mass : 1.0;
    if (scale_out) *scale_out = scale;
    return atoms.scaled(scale);
}

std::uint64_t fnv1a64(const void* bytes, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

void save_field(const WaveField& field, const std::string& binary_path,
                const std::string& sidecar_path) {
    const auto& v = field.data();
    std::ofstream bin(binary_path, std::ios::binary);
    if (!bin) throw std::runtime_error("save_field: cannot open " + binary_path);
    bin.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(std::complex<double>)));
    bin.close();

    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64(v.data(), v.size() * sizeof(std::complex<double>))));
    nlohmann::json j{{"n", field.grid().n},
                     {"half_width", field.grid().half_width},
                     {"center", {field.grid().center.x, field.grid().center.y}},
                     {"eps", field.eps()},
                     {"degree_at_infinity", field.degree_at_infinity()},
                     {"layout", "interleaved-re-im-float64-le-rowmajor"},
                     {"fnv1a64", std::string(hash)}};
    std::ofstream side(sidecar_path);
    if (!side) throw std::runtime_error("save_field: cannot open " + sidecar_path);
    side << j.dump(2) << "\n";
}

WaveField load_field(const std::string& binary_path, const std::string& sidecar_path) {
    std::ifstream side(sidecar_path);
    if (!side) throw std::runtime_error("load_field: cannot open " + sidecar_path);
    nlohmann::json j;
    side >> j;
    GridSpec g;
    g.n = j.at("n").get<int>();
    g.half_width = j.at("half_width").get<double>();
    g.center = {j.at("center").at(0).get<double>(), j.at("center").at(1).get<double>()};
    WaveField field(g, j.at("eps").get<double>(), j.at("degree_at_infinity").get<int>(), true);
    std::ifstream bin(binary_path, std::ios::binary);
    if (!bin) throw std::runtime_error("load_field: cannot open " + binary_path);
    bin.read(reinterpret_cast<char*>(field.data().data()),
             static_cast<std::streamsize>(field.data().size() * sizeof(std::complex<double>)));
    if (!bin) throw std::runtime_error("load_field: short read from " + binary_path);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(
                      field.data().data(), field.data().size() * sizeof(std::complex<double>))));
    if (j.contains("fnv1a64") && j.at("fnv1a64").get<std::string>() != hash)
        throw std::runtime_error("load_field: checksum mismatch");
    return field;
}

}  // namespace vtx
