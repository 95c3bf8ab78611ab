#include "vortexlab/measure.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace vtx {

double AtomicMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight;
    return s;
}

double AtomicMeasure::positive_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_)
        if (a.weight > 0.0) s += a.weight;
    return s;
}

double AtomicMeasure::negative_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_)
        if (a.weight < 0.0) s -= a.weight;
    return s;
}

double AtomicMeasure::total_variation() const { return positive_mass() + negative_mass(); }

double AtomicMeasure::max_norm() const {
    double m = 0.0;
    for (const auto& a : atoms_) m = std::max(m, a.pos.norm());
    return m;
}

void AtomicMeasure::normalize(double weight_floor) {
    std::vector<Atom> kept;
    kept.reserve(atoms_.size());
    for (const auto& a : atoms_)
        if (std::fabs(a.weight) > weight_floor) kept.push_back(a);
    atoms_ = std::move(kept);
}

AtomicMeasure AtomicMeasure::operator-(const AtomicMeasure& o) const {
    AtomicMeasure r = *this;
    for (const auto& a : o.atoms_) r.add(a.pos, -a.weight);
    return r;
}

AtomicMeasure AtomicMeasure::scaled(double s) const {
    AtomicMeasure r = *this;
    for (auto& a : r.atoms_) a.weight *= s;
    return r;
}

std::string AtomicMeasure::to_json() const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& a : atoms_) j.push_back({a.pos.x, a.pos.y, a.weight});
    return nlohmann::json{{"atoms", j}}.dump();
}

AtomicMeasure AtomicMeasure::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    AtomicMeasure m;
    for (const auto& a : j.at("atoms"))
        m.add({a.at(0).get<double>(), a.at(1).get<double>()}, a.at(2).get<double>());
    return m;
}

GridMeasure::GridMeasure(Vec2 center, double half_width, int n)
    : center_(center), half_width_(half_width), n_(n) {
    if (half_width <= 0.0) throw std::invalid_argument("GridMeasure: half_width must be positive");
    if (n < 8) throw std::invalid_argument("GridMeasure: need N >= 8");
    h_ = 2.0 * half_width / n;
    values_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

Vec2 GridMeasure::cell_center(int i, int j) const {
    return {center_.x - half_width_ + (i + 0.5) * h_, center_.y - half_width_ + (j + 0.5) * h_};
}

double GridMeasure::integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * h_ * h_;
}

AtomicMeasure GridMeasure::to_atoms(double mass_floor) const {
    AtomicMeasure m;
    double cell = h_ * h_;
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) {
            double mass = at(i, j) * cell;
            if (std::fabs(mass) > mass_floor) m.add(cell_center(i, j), mass);
        }
    return m;
}

GridMeasure GridMeasure::coarsened(int factor) const {
    if (factor < 1 || n_ % factor != 0)
        throw std::invalid_argument("GridMeasure::coarsened: factor must divide N");
    GridMeasure g(center_, half_width_, n_ / factor);
    double scale = 1.0 / (factor * factor);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < n_; ++i) g.at(i / factor, j / factor) += at(i, j) * scale;
    return g;
}

std::string NormBracket::to_json() const {
    nlohmann::json j{{"lower", lower}, {"upper", upper}, {"method", method}};
    j["parameters"] = parameters.empty() ? nlohmann::json::object() : nlohmann::json::parse(parameters);
    return j.dump();
}

}  // namespace vtx
