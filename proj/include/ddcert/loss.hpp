#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddcert/certificate.hpp"
#include "ddcert/dynamics.hpp"
#include "ddcert/regions.hpp"

namespace ddcert {

enum class PropertyKind { Reach, Safe, Rwa };

PropertyKind parse_property_kind(const std::string& s);
std::string to_string(PropertyKind kind);

/// Lattice densities (points per axis) for the deterministic loss grids.
struct GridDensity {
    std::size_t initial = 10;
    std::size_t goal_complement = 30;
    std::size_t boundary = 30;
    std::size_t unsafe = 10;

    /// Defaults above, halved per dimension beyond 4 with a floor of 3.
    static GridDensity defaults_for(std::size_t dim);
};

struct PropertySpec {
    PropertyKind kind = PropertyKind::Safe;
    Region domain;                  ///< X
    Region initial;                 ///< X_I
    std::optional<Region> goal;     ///< X_G (reach, rwa)
    std::optional<Region> unsafe;   ///< X_U (safe, rwa)
    std::size_t horizon = 100;      ///< T
    double delta = 0.1;             ///< goal level margin
    double tau = 0.01;              ///< margin standing in for strict inequalities
    GridDensity grids;

    std::size_t dim() const { return domain.dim(); }
    bool needs_goal() const { return kind != PropertyKind::Safe; }
    bool needs_unsafe() const { return kind != PropertyKind::Reach; }

    /// Checks region presence, dimensions, containment and disjointness.
    void validate() const;
};

/// The fixed point sets standing in for X \ X_G, X_I, the border of X and X_U.
struct LossGrids {
    std::vector<State> goal_complement;
    std::vector<State> initial;
    std::vector<State> boundary;
    std::vector<State> unsafe;

    static LossGrids build(const PropertySpec& spec);
};

/// Extremes of V over the initial and unsafe grids at a fixed theta.
struct GridExtremes {
    double sup_initial = 0.0;          ///< max over the X_I grid
    std::size_t sup_initial_at = 0;
    double inf_unsafe = 0.0;           ///< min over the X_U grid (safe, rwa)
    std::size_t inf_unsafe_at = 0;
};

/// Which terms of the trajectory loss are active and where.
struct TrajSelection {
    std::size_t k_goal = 0;
    /// x(0) lies in X_I and V(x(0)) exceeds the X_I grid maximum; it then
    /// stands in for the supremum.
    bool sup_at_start = false;
    bool first_active = false;   ///< reach decrease (reach, rwa) or safe increase (safe)
    std::size_t first_k = 0;
    bool second_active = false;  ///< post-goal bound (rwa only)
    std::size_t second_k = 0;
};

struct LossBreakdown {
    double state_loss = 0.0;
    double traj_loss = 0.0;
    double total() const { return state_loss + traj_loss; }
    TrajSelection selection;     ///< argmax info for the trajectory part
    std::size_t worst_grid_point = 0;  ///< index into the X_I grid of the sup term
};

/// Loss evaluator bound to one property and one network architecture.
/// Holds scratch buffers, so use one instance per thread.
class LossModel {
public:
    LossModel(PropertySpec spec, NetworkSpec net);

    const PropertySpec& property() const { return spec_; }
    const NetworkSpec& network() const { return cert_.spec(); }
    const LossGrids& grids() const { return grids_; }
    std::size_t param_count() const { return cert_.spec().param_count(); }
    Certificate& certificate() { return cert_; }

    double value(std::span<const double> theta, std::span<const double> x) { return cert_.eval(theta, x); }

    /// Sample-independent loss; adds its gradient into `grad` when given.
    double state_loss(std::span<const double> theta, std::span<double> grad = {});

    GridExtremes extremes(std::span<const double> theta);

    /// First k with V(x(k)) <= -delta, or T.
    std::size_t k_goal(std::span<const double> theta, const Trajectory& xi);

    /// Trajectory loss with grid extremes precomputed at the same theta.
    double traj_loss(std::span<const double> theta, const Trajectory& xi, const GridExtremes& ext,
                     TrajSelection* selection = nullptr);
    double traj_loss(std::span<const double> theta, const Trajectory& xi);

    /// Adds the subgradient of the trajectory loss selected by `sel` into `grad`.
    void traj_subgradient(std::span<const double> theta, const Trajectory& xi, const GridExtremes& ext,
                          const TrajSelection& sel, std::span<double> grad);

    LossBreakdown total_loss(std::span<const double> theta, const Trajectory& xi,
                             std::span<double> grad = {});

    /// True iff both loss parts vanish for this trajectory.
    bool check_conditions(std::span<const double> theta, const Trajectory& xi);

private:
    void require_horizon(const Trajectory& xi) const;

    PropertySpec spec_;
    Certificate cert_;
    LossGrids grids_;
    std::vector<double> values_;  // V along the current trajectory
};

}  // namespace ddcert
