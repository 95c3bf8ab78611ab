#include "vortexlab/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace vtx {

VortexConfiguration::VortexConfiguration(std::vector<Vec2> positions, std::vector<int> degrees)
    : positions_(std::move(positions)), degrees_(std::move(degrees)) {
    if (positions_.empty()) throw std::invalid_argument("VortexConfiguration: need n >= 1");
    if (positions_.size() != degrees_.size())
        throw std::invalid_argument("VortexConfiguration: positions/degrees size mismatch");
    for (int d : degrees_) {
        if (d != 1 && d != -1)
            throw std::invalid_argument("VortexConfiguration: degrees restricted to +-1");
        total_degree_ += d;
    }
    for (std::size_t i = 0; i < positions_.size(); ++i)
        for (std::size_t j = i + 1; j < positions_.size(); ++j)
            if (positions_[i].x == positions_[j].x && positions_[i].y == positions_[j].y)
                throw std::invalid_argument("VortexConfiguration: coincident positions");
}

VortexConfiguration VortexConfiguration::same_sign(std::vector<Vec2> positions) {
    std::vector<int> degrees(positions.size(), 1);
    return VortexConfiguration(std::move(positions), std::move(degrees));
}

double VortexConfiguration::min_separation() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < positions_.size(); ++i)
        for (std::size_t j = i + 1; j < positions_.size(); ++j)
            m = std::min(m, dist(positions_[i], positions_[j]));
    return m;
}

std::string VortexConfiguration::to_json() const {
    nlohmann::json j;
    j["positions"] = nlohmann::json::array();
    for (const auto& p : positions_) j["positions"].push_back({p.x, p.y});
    j["degrees"] = degrees_;
    return j.dump();
}

VortexConfiguration VortexConfiguration::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::vector<Vec2> pos;
    for (const auto& p : j.at("positions")) pos.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    std::vector<int> deg = j.at("degrees").get<std::vector<int>>();
    return VortexConfiguration(std::move(pos), std::move(deg));
}

Vec2 biot_savart_kernel(const Vec2& x) {
    double r2 = x.norm2();
    if (r2 == 0.0) throw std::domain_error("biot_savart_kernel: singular at x = 0");
    return x.perp() / (2.0 * M_PI * r2);
}

SeparationScales separation_scales(const VortexConfiguration& config) {
    double minsep = config.size() > 1 ? config.min_separation() : std::numeric_limits<double>::infinity();
    if (minsep <= 0.0) throw std::invalid_argument("separation_scales: coincident positions");
    double maxnorm = 0.0;
    for (const auto& p : config.positions()) maxnorm = std::max(maxnorm, p.norm());
    return {0.25 * std::min(1.0, minsep), 4.0 * std::max(1.0, maxnorm)};
}

double kirchhoff_onsager_energy(const VortexConfiguration& config) {
    const auto& a = config.positions();
    const auto& d = config.degrees();
    double w = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t k = j + 1; k < a.size(); ++k)
            w += d[j] * d[k] * std::log(dist(a[j], a[k]));
    return -2.0 * M_PI * w;  // ordered pairs: each unordered pair counted twice
}

EnergyReport energies(const VortexConfiguration& config, double eps, double gamma) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("energies: need eps in (0,1)");
    const auto& a = config.positions();
    const std::size_t n = a.size();
    EnergyReport r{};
    r.W = kirchhoff_onsager_energy(config);
    r.W_eps = static_cast<double>(n) * (M_PI * std::fabs(std::log(eps)) + gamma) + r.W;
    double m2 = 0.0;
    for (const auto& p : a) m2 += p.norm2();
    r.second_moment = m2 / static_cast<double>(n);
    if (n > 1) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) s += std::log(dist(a[j], a[k]));
        r.log_pair_avg = -2.0 * s / (static_cast<double>(n) * static_cast<double>(n - 1));
    } else {
        r.log_pair_avg = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

std::complex<double> canonical_harmonic_map(const VortexConfiguration& config, const Vec2& x) {
    std::complex<double> u(1.0, 0.0);
    const auto& a = config.positions();
    const auto& d = config.degrees();
    for (std::size_t j = 0; j < a.size(); ++j) {
        Vec2 rel = x - a[j];
        double r = rel.norm();
        if (r == 0.0) throw std::domain_error("canonical_harmonic_map: x at a vortex");
        std::complex<double> z(rel.x / r, rel.y / r);
        u *= (d[j] > 0) ? z : std::conj(z);
    }
    return u;
}

Vec2 canonical_current(const VortexConfiguration& config, const Vec2& x) {
    Vec2 j{0.0, 0.0};
    const auto& a = config.positions();
    const auto& d = config.degrees();
    for (std::size_t i = 0; i < a.size(); ++i) {
        Vec2 rel = x - a[i];
        double r2 = rel.norm2();
        if (r2 == 0.0) throw std::domain_error("canonical_current: x at a vortex");
        j += rel.perp() * (d[i] / r2);
    }
    return j;
}

MboundsReport mbounds_check(const VortexConfiguration& config, double M0) {
    if (M0 <= 0.0) throw std::invalid_argument("mbounds_check: need M0 > 0");
    EnergyReport e = energies(config, 0.5, 0.0);
    MboundsReport r{};
    r.second_moment = e.second_moment;
    r.log_pair_avg = e.log_pair_avg;
    r.ok = r.second_moment <= M0 && (config.size() == 1 || r.log_pair_avg <= M0);
    return r;
}

}  // namespace vtx
