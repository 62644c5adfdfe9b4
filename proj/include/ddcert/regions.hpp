#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddcert {

using State = std::vector<double>;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed axis-aligned box or closed Euclidean ball in R^n.
///
/// Membership is exact: no tolerance is applied on the boundary.
class Region {
public:
    enum class Shape { Box, Ball };

    Region() = default;  ///< empty placeholder (dim 0); use box() or ball()
    static Region box(std::vector<double> low, std::vector<double> high);
    static Region ball(std::vector<double> center, double radius);

    Shape shape() const { return shape_; }
    std::size_t dim() const { return a_.size(); }

    // Box accessors.
    const std::vector<double>& low() const { return a_; }
    const std::vector<double>& high() const { return b_; }
    // Ball accessors.
    const std::vector<double>& center() const { return a_; }
    double radius() const { return radius_; }

    bool contains(std::span<const double> x) const;

    /// Componentwise bounding box (the box itself for boxes).
    std::vector<double> bbox_low() const;
    std::vector<double> bbox_high() const;

    /// True if every point of `inner` lies in this region.
    bool encloses(const Region& inner) const;

    std::string describe() const;

private:
    Shape shape_ = Shape::Box;
    std::vector<double> a_;
    std::vector<double> b_;
    double radius_ = 0.0;
};

bool contains(const Region& region, std::span<const double> x);

/// Which deterministic point set to generate.
enum class GridRole {
    Lattice,          ///< uniform lattice over the region (X_I, X_U)
    DomainMinusGoal,  ///< lattice over the domain with goal points removed
    DomainBoundary,   ///< lattice points on the faces of the domain box
};

/// Uniform lattice with `points_per_axis` points per coordinate over the
/// region's bounding box, filtered by membership. Ordering is lexicographic
/// with the last coordinate varying fastest.
std::vector<State> lattice(const Region& region, std::size_t points_per_axis);

/// Lattice over `domain` with every point inside `goal` removed.
/// Throws if the goal is not enclosed by the domain.
std::vector<State> lattice_outside(const Region& domain, const Region& goal,
                                   std::size_t points_per_axis);

/// Lattice points of a box lying on at least one face.
std::vector<State> boundary_lattice(const Region& domain, std::size_t points_per_axis);

/// Dispatches on role. `goal` is only consulted for DomainMinusGoal.
std::vector<State> grid(const Region& region, GridRole role, std::size_t points_per_axis,
                        const Region* goal = nullptr);

/// True iff no lattice probe point of `a` lies in `b`.
bool set_difference_nonempty(const Region& a, const Region& b, std::size_t probe_points_per_axis);

}  // namespace ddcert
