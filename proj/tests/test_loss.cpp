#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ddcert/loss.hpp"
#include "ddcert/rng.hpp"

using namespace ddcert;

namespace {

// States double as certificate values under V(x) = x.
Trajectory line(std::vector<double> v) {
    Trajectory t;
    t.dim = 1;
    t.horizon = v.size() - 1;
    t.states = std::move(v);
    return t;
}

const NetworkSpec kIdentity{1, {}};
const ParamVector kIdentityTheta{1.0, 0.0};

PropertySpec reach_1d(std::size_t T) {
    PropertySpec p;
    p.kind = PropertyKind::Reach;
    p.domain = Region::box({-1}, {1});
    p.initial = Region::box({-0.5}, {-0.1});
    p.goal = Region::box({-1}, {-0.8});
    p.horizon = T;
    p.delta = 0.5;
    p.tau = 0.01;
    return p;
}

PropertySpec safe_1d(std::size_t T) {
    PropertySpec p;
    p.kind = PropertyKind::Safe;
    p.domain = Region::box({-1}, {1});
    p.initial = Region::box({-0.5}, {-0.1});
    p.unsafe = Region::box({0.1}, {0.5});
    p.horizon = T;
    return p;
}

PropertySpec spiral(PropertyKind kind, std::size_t T) {
    PropertySpec p;
    p.kind = kind;
    p.domain = Region::box({-3, -3}, {3, 3});
    p.initial = Region::box({-2.5, -0.5}, {-1.5, 0.5});
    if (kind != PropertyKind::Safe) p.goal = Region::ball({0, 0}, 1.0);
    if (kind != PropertyKind::Reach) p.unsafe = Region::box({-1.5, -2.5}, {0.5, -1.8});
    p.horizon = T;
    p.delta = 0.5;
    p.tau = 0.01;
    return p;
}

}  // namespace

TEST_CASE("state loss with V identically zero") {
    const ParamVector zero(51, 0.0);
    LossModel reach(spiral(PropertyKind::Reach, 10), NetworkSpec{2, {5, 5}});
    CHECK(reach.state_loss(zero) == doctest::Approx(0.01).epsilon(1e-12));
    LossModel safe(spiral(PropertyKind::Safe, 10), NetworkSpec{2, {5, 5}});
    CHECK(safe.state_loss(zero) == doctest::Approx(0.01).epsilon(1e-12));
    LossModel rwa(spiral(PropertyKind::Rwa, 10), NetworkSpec{2, {5, 5}});
    CHECK(rwa.state_loss(zero) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("state loss vanishes when every hinge is inactive") {
    PropertySpec p;
    p.kind = PropertyKind::Reach;
    p.domain = Region::box({-2}, {2});
    p.initial = Region::box({-0.5}, {0.5});
    p.goal = Region::box({-0.3}, {0.3});
    p.delta = 0.6;
    p.horizon = 5;
    // V = s(10(x-1)) + s(-10(x+1)) - 1/2: a well around the origin.
    const ParamVector theta{10, -10, -10, -10, 1, 1, -0.5};
    LossModel m(p, NetworkSpec{1, {2}});
    CHECK(m.value(theta, std::vector<double>{0.0}) < -0.49);
    CHECK(m.value(theta, std::vector<double>{2.0}) > 0.49);
    std::vector<double> g(7, 0.0);
    CHECK(m.state_loss(theta, g) == 0.0);
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("k_goal") {
    PropertySpec p = reach_1d(3);
    LossModel m(p, kIdentity);
    CHECK(m.k_goal(kIdentityTheta, line({0.3, 0.1, -0.6, -0.8})) == 2);
    CHECK(m.k_goal(kIdentityTheta, line({0.3, 0.1, -0.4, -0.2})) == 3);
    CHECK(m.k_goal(kIdentityTheta, line({-0.5, 0.1, 0.2, 0.3})) == 0);
    // Empty decrease range when the goal level is met at once.
    TrajSelection sel;
    CHECK(m.traj_loss(kIdentityTheta, line({-0.7, 0.9, 0.9, 0.9}), m.extremes(kIdentityTheta), &sel) == 0.0);
    CHECK(sel.k_goal == 0);
    CHECK_FALSE(sel.first_active);
}

TEST_CASE("reach trajectory loss by hand") {
    LossModel m(reach_1d(2), kIdentity);
    const GridExtremes e = m.extremes(kIdentityTheta);
    CHECK(e.sup_initial == doctest::Approx(-0.1).epsilon(1e-15));
    TrajSelection sel;
    CHECK(m.traj_loss(kIdentityTheta, line({0.3, 0.0, -0.6}), e, &sel) == 0.0);
    CHECK(sel.k_goal == 2);
    CHECK(m.traj_loss(kIdentityTheta, line({0.3, 0.2, -0.6}), e, &sel) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(sel.first_active);
    CHECK(sel.first_k == 0);
    CHECK_THROWS_AS(m.traj_loss(kIdentityTheta, line({0.3, 0.2, -0.6, 0.0})), std::invalid_argument);
}

TEST_CASE("a start inside X_I above the grid maximum raises the supremum") {
    PropertySpec p = reach_1d(4);
    p.grids.initial = 2;
    // Bumps centred at -0.3 (inside X_I, missed by a two-point grid) and 0.5.
    const NetworkSpec net{1, {4}};
    const ParamVector theta{20, 20, 20, 20, 7, 5, -9, -11, 1, -1, 1, -1, 0};
    LossModel m(p, net);
    const GridExtremes e = m.extremes(theta);
    const double peak = m.value(theta, std::vector<double>{-0.3});
    REQUIRE(peak > e.sup_initial + 0.3);

    TrajSelection sel;
    const double inside = m.traj_loss(theta, line({-0.3, -0.3, -0.3, -0.3, -0.3}), e, &sel);
    CHECK(sel.sup_at_start);
    CHECK(inside == doctest::Approx(0.25 * (peak + 0.5)));

    // Same values but x(0) outside X_I: the grid maximum is used.
    const double v0 = m.value(theta, std::vector<double>{0.5});
    const double outside = m.traj_loss(theta, line({0.5, 0.5, 0.5, 0.5, 0.5}), e, &sel);
    CHECK_FALSE(sel.sup_at_start);
    CHECK(v0 > e.sup_initial);
    CHECK(outside == doctest::Approx(0.25 * (e.sup_initial + 0.5)));
}

TEST_CASE("safe trajectory loss by hand") {
    LossModel m(safe_1d(100), kIdentity);
    const GridExtremes e = m.extremes(kIdentityTheta);
    CHECK(e.inf_unsafe - e.sup_initial == doctest::Approx(0.2));
    CHECK(m.traj_loss(kIdentityTheta, line(std::vector<double>(101, 0.3))) == 0.0);

    std::vector<double> up(101, 0.0);
    up[50] = 0.01;  // one step of +0.01 against a 0.002 allowance
    CHECK(m.traj_loss(kIdentityTheta, line(up)) == doctest::Approx(0.008).epsilon(1e-9));
    CHECK_FALSE(m.check_conditions(kIdentityTheta, line(up)));
}

TEST_CASE("rwa adds the post-goal term") {
    PropertySpec p = reach_1d(4);
    p.kind = PropertyKind::Rwa;
    p.unsafe = Region::box({0.6}, {1.0});
    LossModel m(p, kIdentity);
    // Goal level at k=1, then a climb of 0.5 per step after it.
    const GridExtremes e = m.extremes(kIdentityTheta);
    TrajSelection sel;
    const double l = m.traj_loss(kIdentityTheta, line({-0.4, -0.6, -0.1, -0.1, -0.1}), e, &sel);
    CHECK(sel.k_goal == 1);
    CHECK(sel.second_active);
    CHECK(sel.second_k == 1);
    // first: -0.2 + (1/4)(-0.1+0.5) = -0.1 -> 0; second: 0.5 - (1/4)(0.6+0.5)
    CHECK(l == doctest::Approx(0.5 - 0.275).epsilon(1e-12));
}

TEST_CASE("total loss adds both parts") {
    LossModel m(reach_1d(2), kIdentity);
    std::vector<double> g(2, 0.0);
    const LossBreakdown b = m.total_loss(kIdentityTheta, line({0.3, 0.0, -0.6}), g);
    CHECK(b.total() == doctest::Approx(b.state_loss + b.traj_loss));
    CHECK(b.traj_loss == 0.0);
}

TEST_CASE("subgradient matches one-sided differences") {
    const NetworkSpec net{2, {5, 5}};
    const System sys = System::builtin("spiral2d");
    for (PropertyKind kind : {PropertyKind::Safe, PropertyKind::Reach, PropertyKind::Rwa}) {
        LossModel m(spiral(kind, 20), net);
        const CounterRng rng(17, 3);
        for (std::uint64_t trial = 0; trial < 10; ++trial) {
            ParamVector theta = init_params(net, trial + 1);
            for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += 0.5 * (rng.uniform(trial, i) - 0.5);
            const Trajectory xi = unroll(sys, std::vector<double>{-2.0 + 0.1 * trial, 0.3}, 20);
            std::vector<double> d(theta.size());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.uniform(trial + 100, i) - 0.5;

            std::vector<double> g(theta.size(), 0.0);
            const double l0 = m.total_loss(theta, xi, g).total();
            const double h = 1e-6;
            ParamVector moved = theta;
            for (std::size_t i = 0; i < d.size(); ++i) moved[i] += h * d[i];
            const double fd = (m.total_loss(moved, xi).total() - l0) / h;
            double dir = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) dir += g[i] * d[i];
            if (std::abs(dir) < 1e-9) {
                CHECK(std::abs(fd) < 1e-5);
            } else {
                CHECK(std::abs(fd - dir) <= 1e-3 * std::abs(dir));
            }
        }
    }
}

TEST_CASE("grids and validation") {
    PropertySpec p = spiral(PropertyKind::Rwa, 10);
    const LossGrids g = LossGrids::build(p);
    CHECK(g.initial.size() == 100);
    CHECK(g.unsafe.size() == 100);
    CHECK(g.boundary.size() == 4 * 29);
    for (const auto& x : g.goal_complement) CHECK_FALSE(p.goal->contains(x));

    PropertySpec bad = p;
    bad.unsafe = Region::box({-2, -0.2}, {-1.8, 0.2});
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.goal.reset();
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.delta = 0.0;
    CHECK_THROWS(bad.validate());
    CHECK_THROWS_AS(LossModel(p, NetworkSpec{3, {5}}), DimensionError);
    CHECK(parse_property_kind("rwa") == PropertyKind::Rwa);
    CHECK_THROWS(parse_property_kind("ltl"));
}

TEST_CASE("grid densities shrink with dimension") {
    CHECK(GridDensity::defaults_for(2).initial == 10);
    CHECK(GridDensity::defaults_for(8).initial == 3);
    CHECK(GridDensity::defaults_for(5).goal_complement == 15);
}
