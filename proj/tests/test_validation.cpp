#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ddcert/rng.hpp"
#include "ddcert/validation.hpp"

using namespace ddcert;

namespace {

Trajectory path(std::vector<std::vector<double>> pts) {
    Trajectory t;
    t.dim = pts.front().size();
    t.horizon = pts.size() - 1;
    for (const auto& p : pts) t.states.insert(t.states.end(), p.begin(), p.end());
    return t;
}

PropertySpec base(PropertyKind kind) {
    PropertySpec p;
    p.kind = kind;
    p.domain = Region::box({-3, -3}, {3, 3});
    p.initial = Region::box({-2.5, -0.5}, {-1.5, 0.5});
    if (kind != PropertyKind::Safe) p.goal = Region::ball({0, 0}, 1.0);
    if (kind != PropertyKind::Reach) p.unsafe = Region::box({-1.5, -2.5}, {0.5, -1.8});
    p.horizon = 2;
    return p;
}

}  // namespace

TEST_CASE("property membership") {
    const auto safe = base(PropertyKind::Safe);
    CHECK(check_property(safe, path({{-2, 0}, {-1, 0}, {0, 0}})));
    CHECK_FALSE(check_property(safe, path({{-2, 0}, {-1, -2}, {0, 0}})));

    const auto reach = base(PropertyKind::Reach);
    CHECK(check_property(reach, path({{-2, 0}, {-1.5, 0}, {0.5, 0}})));
    CHECK(check_property(reach, path({{-2, 0}, {0, 0}, {5, 5}})));
    CHECK_FALSE(check_property(reach, path({{-2, 0}, {-1.5, 0}, {-1.2, 0}})));

    const auto rwa = base(PropertyKind::Rwa);
    CHECK(check_property(rwa, path({{-2, 0}, {-1.5, 0}, {0.5, 0}})));
    CHECK_FALSE(check_property(rwa, path({{-2, 0}, {-3.5, 0}, {0.5, 0}})));
    CHECK_FALSE(check_property(rwa, path({{-2, 0}, {-1, -2}, {0, 0}})));
    CHECK_FALSE(check_property(rwa, path({{-2, 0}, {-1.5, 0}, {-1.2, 0}})));

    CHECK_THROWS(check_property(safe, path({{-2, 0}, {-1, 0}})));
}

TEST_CASE("direct count") {
    const auto safe = base(PropertyKind::Safe);
    const std::vector<Trajectory> ok(5, path({{-2, 0}, {-1, 0}, {0, 0}}));
    CHECK(direct_discard_count(safe, ok) == 0);
    const std::vector<Trajectory> bad(7, path({{-2, 0}, {-1, -2}, {0, 0}}));
    CHECK(direct_discard_count(safe, bad) == 7);
}

TEST_CASE("risk counts on a zero certificate") {
    // V = 0 fails the unsafe-set margin, so every trajectory counts against it.
    const auto safe = base(PropertyKind::Safe);
    LossModel model(safe, NetworkSpec{2, {5}});
    const ParamVector zero(21, 0.0);
    const std::vector<Trajectory> trajs{path({{-2, 0}, {-1, 0}, {0, 0}}), path({{-2, 0}, {-1, -2}, {0, 0}})};
    const auto rep = evaluate_risks(model, zero, trajs);
    CHECK(rep.m == 2);
    CHECK(rep.cert_violations == 2);
    CHECK(rep.prop_violations == 1);
    CHECK(rep.prop_violation_ids == std::vector<std::size_t>{1});
    CHECK(rep.prop_rate() == 0.5);
}

TEST_CASE("fresh samples use the validation stream") {
    PropertySpec safe = base(PropertyKind::Safe);
    safe.horizon = 20;
    LossModel model(safe, NetworkSpec{2, {5}});
    const ParamVector zero(21, 0.0);
    const System sys = System::builtin("spiral2d");
    const auto a = empirical_risks(model, zero, sys, safe.initial, 50, 9);
    const auto b = empirical_risks(model, zero, sys, safe.initial, 50, 9);
    CHECK(a.m == 50);
    CHECK(a.seed == 9);
    CHECK(a.stream == streams::validation);
    CHECK(a.prop_violation_ids == b.prop_violation_ids);
    CHECK(a.cert_violations == 50);
}
