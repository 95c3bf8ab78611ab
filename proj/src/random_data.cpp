#include "vortexlab/random_data.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vortexlab/rng.hpp"

namespace vtx {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

// 16-point Gauss-Legendre on [0,1]
constexpr double kN16[16] = {0.005299532504175031, 0.027712488463383712, 0.06718439880608412,
                             0.12229779582249845,  0.19106187779867811,  0.27099161117138633,
                             0.35919822461037054,  0.45249374508118123,  0.5475062549188188,
                             0.6408017753896295,   0.7290083888286136,   0.8089381222013219,
                             0.8777022017800016,   0.9328156011939159,   0.9722875115366162,
                             0.9947004674958249};
constexpr double kW16[16] = {0.013576229705877047, 0.03112676196932394, 0.04757925584124639,
                             0.06231448562776694,  0.07479799440828837, 0.08457825969750127,
                             0.09130170752246179,  0.0947253052275343,  0.0947253052275343,
                             0.09130170752246179,  0.08457825969750127, 0.07479799440828837,
                             0.06231448562776694,  0.04757925584124639, 0.03112676196932394,
                             0.013576229705877047};

double gl16(const std::function<double(double)>& f, double a, double b) {
    double s = 0.0;
    for (int q = 0; q < 16; ++q) s += kW16[q] * f(a + (b - a) * kN16[q]);
    return s * (b - a);
}

double log_pair_sum(const std::vector<Vec2>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) s += std::log(dist(a[i], a[j]));
    return 2.0 * s;  // ordered pairs
}

}  // namespace

double integrate_to(const std::function<double(double)>& f, double b, int panels) {
    if (b <= 0.0) return 0.0;
    // geometric refinement toward 0: [b 2^-k-1, b 2^-k]
    double s = 0.0;
    double hi = b;
    for (int k = 0; k < panels; ++k) {
        double lo = hi * 0.5;
        s += gl16(f, lo, hi);
        hi = lo;
    }
    // remaining sliver handled by one last panel down to ~b * 2^-panels
    s += gl16(f, 0.0, hi);
    return s;
}

VortexConfiguration sample_uniform_ball(int n, double R, std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw std::invalid_argument("sample_uniform_ball: need n >= 1");
    if (R <= 0.0) throw std::invalid_argument("sample_uniform_ball: need R > 0");
    CounterRng rng(seed, stream);
    std::vector<Vec2> z(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double g0, g1;
        rng.next_gaussian_pair(g0, g1);
        z[i] = {g0, g1};
        norm2 += g0 * g0 + g1 * g1;
    }
    double u = rng.next_double();
    double s = std::pow(u, 1.0 / (2.0 * n));
    double scale = R * std::sqrt(static_cast<double>(n)) * s / std::sqrt(norm2);
    for (auto& p : z) p *= scale;
    return VortexConfiguration::same_sign(std::move(z));
}

SampleBatch sample_admissible(int n, double M, double R, std::uint64_t seed, long max_attempts,
                              long target_count) {
    if (M <= 0.0 || R <= 0.0) throw std::invalid_argument("sample_admissible: need M, R > 0");
    SampleBatch batch;
    batch.seed = seed;
    batch.n = n;
    batch.M = M;
    batch.R = R;
    double bound = static_cast<double>(n) * (n - 1) * M;
    for (long attempt = 0; attempt < max_attempts; ++attempt) {
        VortexConfiguration cfg =
            sample_uniform_ball(n, R, seed, static_cast<std::uint64_t>(attempt) + 1);
        ++batch.attempts;
        if (n == 1 || -log_pair_sum(cfg.positions()) <= bound) {
            ++batch.accepted;
            batch.samples.push_back(std::move(cfg));
            if (target_count > 0 && batch.accepted >= target_count) break;
        }
    }
    if (batch.accepted == 0)
        throw std::runtime_error(
            "sample_admissible: no acceptances; the log-separation constraint is too tight, "
            "increase M");
    return batch;
}

std::string SampleBatch::to_jsonl() const {
    std::ostringstream os;
    for (const auto& c : samples) os << c.to_json() << "\n";
    return os.str();
}

PairStatistic pair_statistic(const std::function<double(double)>& f, int n, double R, long samples,
                             std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("pair_statistic: need n >= 2");
    if (samples < 2) throw std::invalid_argument("pair_statistic: need >= 2 samples");
    PairStatistic out;
    double sum = 0.0, sum2 = 0.0;
    double pairs = static_cast<double>(n) * (n - 1);
    for (long s = 0; s < samples; ++s) {
        VortexConfiguration cfg =
            sample_uniform_ball(n, R, seed, static_cast<std::uint64_t>(s) + 1);
        const auto& a = cfg.positions();
        double F = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j) F += f(dist(a[i], a[j]));
        F = 2.0 * F / pairs;
        sum += F;
        sum2 += F * F;
    }
    out.mc_mean = sum / samples;
    double var = std::max(0.0, sum2 / samples - out.mc_mean * out.mc_mean);
    out.mc_std_error = std::sqrt(var / samples);

    double nR2 = static_cast<double>(n) * R * R;
    auto finite_integrand = [&](double t) {
        return t > 0.0 ? f(std::sqrt(2.0 * t)) * std::pow(1.0 - t / nR2, n - 1) : 0.0;
    };
    out.exact_finite_n = integrate_to(finite_integrand, nR2) / (R * R);
    double cutoff = std::max(nR2, 60.0 * R * R);
    auto limit_integrand = [&](double t) {
        return t > 0.0 ? f(std::sqrt(2.0 * t)) * std::exp(-t / (R * R)) : 0.0;
    };
    out.limit = integrate_to(limit_integrand, cutoff) / (R * R);
    return out;
}

RhoGrowth rho_inverse_square_expectation(const std::vector<int>& n_values, double M, double R,
                                         long samples_per_n, std::uint64_t seed) {
    if (M < admissible_M0(R))
        throw std::invalid_argument("rho_inverse_square_expectation: M below M0(R)");
    RhoGrowth out;
    for (int n : n_values) {
        SampleBatch batch = sample_admissible(n, M, R, seed + static_cast<std::uint64_t>(n),
                                              samples_per_n * 4, samples_per_n);
        if (batch.accepted < samples_per_n / 2)
            throw std::runtime_error("rho_inverse_square_expectation: insufficient acceptances");
        double sum = 0.0, sum2 = 0.0;
        for (const auto& cfg : batch.samples) {
            SeparationScales sc = separation_scales(cfg);
            double v = 1.0 / (sc.rho * sc.rho);
            sum += v;
            sum2 += v * v;
        }
        double mean = sum / batch.accepted;
        double var = std::max(0.0, sum2 / batch.accepted - mean * mean);
        out.n_values.push_back(n);
        out.means.push_back(mean);
        out.std_errors.push_back(std::sqrt(var / batch.accepted));
    }
    // least squares slope of log mean vs log n
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int m = static_cast<int>(out.n_values.size());
    for (int k = 0; k < m; ++k) {
        double x = std::log(static_cast<double>(out.n_values[k]));
        double y = std::log(out.means[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return out;
}

double lambda_constant(double R) { return 0.5 * (kEulerGamma - std::log(2.0 * R * R)); }

double admissible_M0(double R) { return 3.0 * lambda_constant(R) + 8.0 * R * R; }

}  // namespace vtx
