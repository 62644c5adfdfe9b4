#include "ddcert/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ddcert {

PropertyKind parse_property_kind(const std::string& s) {
    if (s == "reach") return PropertyKind::Reach;
    if (s == "safe") return PropertyKind::Safe;
    if (s == "rwa") return PropertyKind::Rwa;
    throw std::invalid_argument("unknown property kind '" + s + "' (expected reach, safe or rwa)");
}

std::string to_string(PropertyKind kind) {
    switch (kind) {
        case PropertyKind::Reach: return "reach";
        case PropertyKind::Safe: return "safe";
        case PropertyKind::Rwa: return "rwa";
    }
    return "?";
}

GridDensity GridDensity::defaults_for(std::size_t dim) {
    GridDensity g;
    if (dim <= 4) return g;
    const std::size_t shift = std::min<std::size_t>(dim - 4, 16);
    auto scaled = [shift](std::size_t base) { return std::max<std::size_t>(3, base >> shift); };
    g.initial = scaled(g.initial);
    g.goal_complement = scaled(g.goal_complement);
    g.boundary = scaled(g.boundary);
    g.unsafe = scaled(g.unsafe);
    return g;
}

namespace {

// Probe density for disjointness checks, capped near 1e5 lattice points.
std::size_t probe_density(std::size_t dim) {
    const double p = std::floor(std::pow(1e5, 1.0 / static_cast<double>(dim)));
    return std::clamp<std::size_t>(static_cast<std::size_t>(p), 2, 25);
}

}  // namespace

void PropertySpec::validate() const {
    const std::size_t n = domain.dim();
    if (n == 0) throw std::invalid_argument("property: domain X is missing");
    if (initial.dim() != n) throw DimensionError("property: X_I dimension differs from X");
    if (horizon < 1) throw std::invalid_argument("property: horizon T must be >= 1");
    if (!(delta > 0.0)) throw std::invalid_argument("property: delta must be > 0");
    if (!(tau >= 0.0)) throw std::invalid_argument("property: tau must be >= 0");
    if (needs_goal()) {
        if (!goal) throw std::invalid_argument("property: " + to_string(kind) + " needs a goal region X_G");
        if (goal->dim() != n) throw DimensionError("property: X_G dimension differs from X");
        if (!domain.encloses(*goal)) throw std::invalid_argument("property: X_G must be contained in X");
        if (domain.shape() != Region::Shape::Box) {
            throw std::invalid_argument("property: reach and rwa need a box domain X");
        }
    }
    if (needs_unsafe()) {
        if (!unsafe) throw std::invalid_argument("property: " + to_string(kind) + " needs an unsafe region X_U");
        if (unsafe->dim() != n) throw DimensionError("property: X_U dimension differs from X");
        const std::size_t probe = probe_density(n);
        if (!set_difference_nonempty(initial, *unsafe, probe)) {
            throw std::invalid_argument("property: X_I and X_U intersect");
        }
        if (kind == PropertyKind::Rwa && !set_difference_nonempty(*goal, *unsafe, probe)) {
            throw std::invalid_argument("property: X_G and X_U intersect");
        }
    }
    const auto check_ppa = [](std::size_t v, const char* what) {
        if (v < 2) throw std::invalid_argument(std::string("property: grid density for ") + what + " must be >= 2");
    };
    check_ppa(grids.initial, "X_I");
    if (needs_goal()) {
        check_ppa(grids.goal_complement, "X \\ X_G");
        check_ppa(grids.boundary, "border of X");
    }
    if (needs_unsafe()) check_ppa(grids.unsafe, "X_U");
}

LossGrids LossGrids::build(const PropertySpec& spec) {
    spec.validate();
    LossGrids g;
    g.initial = lattice(spec.initial, spec.grids.initial);
    if (spec.needs_goal()) {
        g.goal_complement = lattice_outside(spec.domain, *spec.goal, spec.grids.goal_complement);
        g.boundary = boundary_lattice(spec.domain, spec.grids.boundary);
    }
    if (spec.needs_unsafe()) g.unsafe = lattice(*spec.unsafe, spec.grids.unsafe);

    const auto nonempty = [](const std::vector<State>& v, const char* what) {
        if (v.empty()) throw std::invalid_argument(std::string("loss: empty grid for ") + what);
    };
    nonempty(g.initial, "X_I");
    if (spec.needs_goal()) {
        nonempty(g.goal_complement, "X \\ X_G");
        nonempty(g.boundary, "border of X");
    }
    if (spec.needs_unsafe()) nonempty(g.unsafe, "X_U");
    return g;
}

LossModel::LossModel(PropertySpec spec, NetworkSpec net)
    : spec_(std::move(spec)), cert_(std::move(net)), grids_(LossGrids::build(spec_)) {
    if (cert_.spec().input_dim != spec_.dim()) {
        throw DimensionError("loss: network input dimension differs from the state dimension");
    }
    values_.resize(spec_.horizon + 1);
}

double LossModel::state_loss(std::span<const double> theta, std::span<double> grad) {
    const bool want_grad = !grad.empty();
    // Accumulates mean over `pts` of max{0, sign * V + offset}.
    auto hinge_mean = [&](const std::vector<State>& pts, double sign, double offset) {
        if (pts.empty()) throw std::invalid_argument("loss: empty grid");
        const double w = 1.0 / static_cast<double>(pts.size());
        double sum = 0.0;
        for (const auto& x : pts) {
            const double v = cert_.eval(theta, x);
            const double h = sign * v + offset;
            if (h > 0.0) {
                sum += h;
                if (want_grad) cert_.accumulate_grad(theta, x, sign * w, grad);
            }
        }
        return sum * w;
    };

    double loss = 0.0;
    if (spec_.needs_goal()) {
        loss += hinge_mean(grids_.goal_complement, -1.0, -spec_.delta);  // V > -delta off the goal
    }
    loss += hinge_mean(grids_.initial, 1.0, 0.0);                         // V <= 0 on X_I
    if (spec_.needs_goal()) {
        loss += hinge_mean(grids_.boundary, -1.0, spec_.tau);            // V > 0 on the border
    }
    if (spec_.needs_unsafe()) {
        loss += hinge_mean(grids_.unsafe, -1.0, spec_.tau);              // V > 0 on X_U
    }
    return loss;
}

GridExtremes LossModel::extremes(std::span<const double> theta) {
    GridExtremes e;
    e.sup_initial = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grids_.initial.size(); ++i) {
        const double v = cert_.eval(theta, grids_.initial[i]);
        if (v > e.sup_initial) {
            e.sup_initial = v;
            e.sup_initial_at = i;
        }
    }
    if (spec_.needs_unsafe()) {
        e.inf_unsafe = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grids_.unsafe.size(); ++i) {
            const double v = cert_.eval(theta, grids_.unsafe[i]);
            if (v < e.inf_unsafe) {
                e.inf_unsafe = v;
                e.inf_unsafe_at = i;
            }
        }
    }
    return e;
}

void LossModel::require_horizon(const Trajectory& xi) const {
    if (xi.horizon != spec_.horizon) {
        throw std::invalid_argument("loss: trajectory horizon " + std::to_string(xi.horizon) +
                                    " differs from the property horizon " + std::to_string(spec_.horizon));
    }
    if (xi.dim != spec_.dim()) throw DimensionError("loss: trajectory dimension mismatch");
}

std::size_t LossModel::k_goal(std::span<const double> theta, const Trajectory& xi) {
    require_horizon(xi);
    for (std::size_t k = 0; k <= xi.horizon; ++k) {
        if (cert_.eval(theta, xi.state(k)) <= -spec_.delta) return k;
    }
    return xi.horizon;
}

double LossModel::traj_loss(std::span<const double> theta, const Trajectory& xi, const GridExtremes& ext,
                            TrajSelection* selection) {
    require_horizon(xi);
    const std::size_t T = xi.horizon;
    const double invT = 1.0 / static_cast<double>(T);
    for (std::size_t k = 0; k <= T; ++k) values_[k] = cert_.eval(theta, xi.state(k));

    // Largest one-step difference over [lo, hi), lowest index on ties.
    auto max_diff = [&](std::size_t lo, std::size_t hi, std::size_t& at) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = lo; k < hi; ++k) {
            const double d = values_[k + 1] - values_[k];
            if (d > best) {
                best = d;
                at = k;
            }
        }
        return best;
    };

    TrajSelection sel;
    double sup_i = ext.sup_initial;
    if (values_[0] > sup_i && spec_.initial.contains(xi.state(0))) {
        sup_i = values_[0];
        sel.sup_at_start = true;
    }
    double loss = 0.0;
    if (spec_.kind == PropertyKind::Safe) {
        sel.k_goal = T;
        const double d = max_diff(0, T, sel.first_k);
        const double h = d - invT * (ext.inf_unsafe - sup_i);
        if (h > 0.0) {
            sel.first_active = true;
            loss += h;
        }
    } else {
        std::size_t kg = T;
        for (std::size_t k = 0; k <= T; ++k) {
            if (values_[k] <= -spec_.delta) {
                kg = k;
                break;
            }
        }
        sel.k_goal = kg;
        if (kg > 0) {
            const double d = max_diff(0, kg, sel.first_k);
            const double h = d + invT * (sup_i + spec_.delta);
            if (h > 0.0) {
                sel.first_active = true;
                loss += h;
            }
        }
        if (spec_.kind == PropertyKind::Rwa && kg < T) {
            const double d = max_diff(kg, T, sel.second_k);
            const double h = d - invT * (ext.inf_unsafe + spec_.delta);
            if (h > 0.0) {
                sel.second_active = true;
                loss += h;
            }
        }
    }
    if (selection) *selection = sel;
    return loss;
}

double LossModel::traj_loss(std::span<const double> theta, const Trajectory& xi) {
    return traj_loss(theta, xi, extremes(theta));
}

void LossModel::traj_subgradient(std::span<const double> theta, const Trajectory& xi, const GridExtremes& ext,
                                 const TrajSelection& sel, std::span<double> grad) {
    const double invT = 1.0 / static_cast<double>(xi.horizon);
    if (sel.first_active) {
        cert_.accumulate_grad(theta, xi.state(sel.first_k + 1), 1.0, grad);
        cert_.accumulate_grad(theta, xi.state(sel.first_k), -1.0, grad);
        if (spec_.kind == PropertyKind::Safe) {
            cert_.accumulate_grad(theta, grids_.unsafe[ext.inf_unsafe_at], -invT, grad);
        }
        const std::span<const double> sup_point =
            sel.sup_at_start ? xi.state(0) : std::span<const double>(grids_.initial[ext.sup_initial_at]);
        cert_.accumulate_grad(theta, sup_point, invT, grad);
    }
    if (sel.second_active) {
        cert_.accumulate_grad(theta, xi.state(sel.second_k + 1), 1.0, grad);
        cert_.accumulate_grad(theta, xi.state(sel.second_k), -1.0, grad);
        cert_.accumulate_grad(theta, grids_.unsafe[ext.inf_unsafe_at], -invT, grad);
    }
}

LossBreakdown LossModel::total_loss(std::span<const double> theta, const Trajectory& xi, std::span<double> grad) {
    LossBreakdown out;
    const GridExtremes ext = extremes(theta);
    out.state_loss = state_loss(theta, grad);
    out.traj_loss = traj_loss(theta, xi, ext, &out.selection);
    out.worst_grid_point = ext.sup_initial_at;
    if (!grad.empty()) traj_subgradient(theta, xi, ext, out.selection, grad);
    return out;
}

bool LossModel::check_conditions(std::span<const double> theta, const Trajectory& xi) {
    return state_loss(theta) == 0.0 && traj_loss(theta, xi) == 0.0;
}

}  // namespace ddcert
