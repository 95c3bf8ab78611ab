#pragma once

#include <string>
#include <vector>

#include "vortexlab/vec2.hpp"

namespace vtx {

struct Atom {
    Vec2 pos;
    double weight;
};

/// Finite signed atomic measure. normalize() drops zero-weight atoms.
class AtomicMeasure {
  public:
    AtomicMeasure() = default;
    explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}

    void add(const Vec2& p, double w) { atoms_.push_back({p, w}); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double total_mass() const;
    double positive_mass() const;
    double negative_mass() const;  // returned >= 0
    double total_variation() const;
    double max_norm() const;  // max |atom position|

    void normalize(double weight_floor = 0.0);

    AtomicMeasure operator-(const AtomicMeasure& o) const;
    AtomicMeasure scaled(double s) const;

    std::string to_json() const;
    static AtomicMeasure from_json(const std::string& text);

  private:
    std::vector<Atom> atoms_;
};

/// Scalar density sampled on a uniform N x N grid of cell centers covering
/// the square [center - L, center + L]^2; value * h^2 is the cell mass.
class GridMeasure {
  public:
    GridMeasure(Vec2 center, double half_width, int n);

    int n() const { return n_; }
    double half_width() const { return half_width_; }
    double spacing() const { return h_; }
    Vec2 center() const { return center_; }
    Vec2 cell_center(int i, int j) const;

    double& at(int i, int j) { return values_[static_cast<std::size_t>(j) * n_ + i]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(j) * n_ + i]; }
    const std::vector<double>& values() const { return values_; }

    double integral() const;

    /// One atom per cell at the cell center; cells with |mass| below
    /// `mass_floor` are dropped. The caller accounts the O(h) * mass
    /// conversion error.
    AtomicMeasure to_atoms(double mass_floor = 0.0) const;

    /// Block-sums cells by `factor` in each direction; masses are preserved
    /// and positions move by at most h * factor / sqrt(2).
    GridMeasure coarsened(int factor) const;

  private:
    Vec2 center_;
    double half_width_;
    int n_;
    double h_;
    std::vector<double> values_;
};

struct NormBracket {
    double lower = 0.0;
    double upper = 0.0;
    std::string method;
    std::string parameters;  // JSON text

    std::string to_json() const;
};

}  // namespace vtx
