#include "ddcert/regions.hpp"

#include <cmath>
#include <sstream>

namespace ddcert {

namespace {

void require_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        std::ostringstream os;
        os << what << ": dimension mismatch (expected " << expected << ", got " << got << ")";
        throw DimensionError(os.str());
    }
}

// Visits every point of the full tensor lattice over [lo, hi] in
// lexicographic order, last coordinate fastest.
template <typename Visit>
void for_each_lattice_point(const std::vector<double>& lo, const std::vector<double>& hi,
                            std::size_t ppa, Visit&& visit) {
    const std::size_t n = lo.size();
    std::vector<std::size_t> idx(n, 0);
    State x(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(idx[i]) / static_cast<double>(ppa - 1);
            // Pin the end points exactly so that faces are hit bit-for-bit.
            x[i] = idx[i] == ppa - 1 ? hi[i] : lo[i] + t * (hi[i] - lo[i]);
        }
        visit(x, idx);
        std::size_t d = n;
        while (d > 0) {
            --d;
            if (++idx[d] < ppa) break;
            idx[d] = 0;
            if (d == 0) return;
        }
        if (n == 0) return;
    }
}

void require_ppa(std::size_t ppa) {
    if (ppa < 2) throw std::invalid_argument("grid: points_per_axis must be >= 2");
}

}  // namespace

Region Region::box(std::vector<double> low, std::vector<double> high) {
    if (low.empty()) throw std::invalid_argument("box: dimension must be positive");
    require_dim(low.size(), high.size(), "box");
    for (std::size_t i = 0; i < low.size(); ++i) {
        if (!(low[i] < high[i])) {
            throw std::invalid_argument("box: lower corner must be strictly below upper corner");
        }
    }
    Region r;
    r.shape_ = Shape::Box;
    r.a_ = std::move(low);
    r.b_ = std::move(high);
    return r;
}

Region Region::ball(std::vector<double> center, double radius) {
    if (center.empty()) throw std::invalid_argument("ball: dimension must be positive");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("ball: radius must be positive and finite");
    }
    Region r;
    r.shape_ = Shape::Ball;
    r.a_ = std::move(center);
    r.radius_ = radius;
    return r;
}

bool Region::contains(std::span<const double> x) const {
    require_dim(dim(), x.size(), "contains");
    if (shape_ == Shape::Box) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < a_[i] || x[i] > b_[i]) return false;
        }
        return true;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - a_[i];
        d2 += d * d;
    }
    return d2 <= radius_ * radius_;
}

std::vector<double> Region::bbox_low() const {
    if (shape_ == Shape::Box) return a_;
    std::vector<double> lo(a_);
    for (double& v : lo) v -= radius_;
    return lo;
}

std::vector<double> Region::bbox_high() const {
    if (shape_ == Shape::Box) return b_;
    std::vector<double> hi(a_);
    for (double& v : hi) v += radius_;
    return hi;
}

bool Region::encloses(const Region& inner) const {
    require_dim(dim(), inner.dim(), "encloses");
    if (shape_ == Shape::Box) {
        const auto lo = inner.bbox_low();
        const auto hi = inner.bbox_high();
        for (std::size_t i = 0; i < dim(); ++i) {
            if (lo[i] < a_[i] || hi[i] > b_[i]) return false;
        }
        return true;
    }
    // Ball domain: farthest point of the inner region from our center.
    double far2 = 0.0;
    if (inner.shape_ == Shape::Box) {
        for (std::size_t i = 0; i < dim(); ++i) {
            const double d = std::max(std::abs(inner.a_[i] - a_[i]), std::abs(inner.b_[i] - a_[i]));
            far2 += d * d;
        }
        return far2 <= radius_ * radius_;
    }
    double c2 = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double d = inner.a_[i] - a_[i];
        c2 += d * d;
    }
    return std::sqrt(c2) + inner.radius_ <= radius_;
}

std::string Region::describe() const {
    std::ostringstream os;
    auto vec = [&os](const std::vector<double>& v) {
        os << '[';
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
        os << ']';
    };
    if (shape_ == Shape::Box) {
        os << "box(";
        vec(a_);
        os << ", ";
        vec(b_);
        os << ')';
    } else {
        os << "ball(";
        vec(a_);
        os << ", " << radius_ << ')';
    }
    return os.str();
}

bool contains(const Region& region, std::span<const double> x) { return region.contains(x); }

std::vector<State> lattice(const Region& region, std::size_t points_per_axis) {
    require_ppa(points_per_axis);
    std::vector<State> out;
    for_each_lattice_point(region.bbox_low(), region.bbox_high(), points_per_axis,
                           [&](const State& x, const std::vector<std::size_t>&) {
                               if (region.contains(x)) out.push_back(x);
                           });
    return out;
}

std::vector<State> lattice_outside(const Region& domain, const Region& goal,
                                   std::size_t points_per_axis) {
    require_ppa(points_per_axis);
    if (!domain.encloses(goal)) {
        throw std::invalid_argument("grid: goal region " + goal.describe() +
                                    " is not contained in domain " + domain.describe());
    }
    std::vector<State> out;
    for_each_lattice_point(domain.bbox_low(), domain.bbox_high(), points_per_axis,
                           [&](const State& x, const std::vector<std::size_t>&) {
                               if (domain.contains(x) && !goal.contains(x)) out.push_back(x);
                           });
    return out;
}

std::vector<State> boundary_lattice(const Region& domain, std::size_t points_per_axis) {
    require_ppa(points_per_axis);
    if (domain.shape() != Region::Shape::Box) {
        throw std::invalid_argument("grid: boundary lattices are only defined for box domains");
    }
    std::vector<State> out;
    const std::size_t last = points_per_axis - 1;
    for_each_lattice_point(domain.low(), domain.high(), points_per_axis,
                           [&](const State& x, const std::vector<std::size_t>& idx) {
                               for (std::size_t i : idx) {
                                   if (i == 0 || i == last) {
                                       out.push_back(x);
                                       return;
                                   }
                               }
                           });
    return out;
}

std::vector<State> grid(const Region& region, GridRole role, std::size_t points_per_axis,
                        const Region* goal) {
    switch (role) {
        case GridRole::Lattice:
            return lattice(region, points_per_axis);
        case GridRole::DomainMinusGoal:
            if (goal == nullptr) throw std::invalid_argument("grid: DomainMinusGoal needs a goal region");
            return lattice_outside(region, *goal, points_per_axis);
        case GridRole::DomainBoundary:
            return boundary_lattice(region, points_per_axis);
    }
    throw std::logic_error("grid: unknown role");
}

bool set_difference_nonempty(const Region& a, const Region& b, std::size_t probe_points_per_axis) {
    require_dim(a.dim(), b.dim(), "set_difference_nonempty");
    bool disjoint = true;
    for_each_lattice_point(a.bbox_low(), a.bbox_high(), std::max<std::size_t>(probe_points_per_axis, 2),
                           [&](const State& x, const std::vector<std::size_t>&) {
                               if (disjoint && a.contains(x) && b.contains(x)) disjoint = false;
                           });
    return disjoint;
}

}  // namespace ddcert
