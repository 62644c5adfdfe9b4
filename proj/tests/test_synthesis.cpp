#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "ddcert/synthesis.hpp"
#include "ddcert/rng.hpp"

using namespace ddcert;

namespace {

PropertySpec spiral_safe() {
    PropertySpec p;
    p.kind = PropertyKind::Safe;
    p.domain = Region::box({-3, -3}, {3, 3});
    p.initial = Region::box({-2.5, -0.5}, {-1.5, 0.5});
    p.unsafe = Region::box({-1.5, -2.5}, {0.5, -1.8});
    p.horizon = 100;
    return p;
}

struct Fixture {
    NetworkSpec net{2, {5, 5}};
    System sys = System::builtin("spiral2d");
    PropertySpec prop = spiral_safe();
    HyperParams hp;
    std::vector<Trajectory> trajs;

    explicit Fixture(std::size_t n, std::uint64_t seed = 1) {
        hp.patience = 100;
        trajs = sample_trajectories(sys, SamplingDistribution{prop.initial, seed, streams::training}, n, prop.horizon);
    }
};

bool non_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return b > a; }) == v.end();
}

}  // namespace

TEST_CASE("misalignment test") {
    CHECK(misaligned(std::vector<double>{-1, 0.2}, std::vector<double>{1, 0}));
    CHECK_FALSE(misaligned(std::vector<double>{1, 0.2}, std::vector<double>{1, 0}));
    CHECK(misaligned(std::vector<double>{0, 1}, std::vector<double>{1, 0}));
    CHECK(misaligned(std::vector<double>{0.3, 1}, std::vector<double>{0, 0}));
    CHECK_FALSE(misaligned(std::vector<double>{0, 0}, std::vector<double>{1, 0}));
}

TEST_CASE("momentum step moves against the gradient") {
    HyperParams hp;
    MomentumStep opt(2, hp);
    std::vector<double> theta{0.0, 0.0};
    opt.apply(theta, std::vector<double>{3.0, -0.5});
    // First bias-corrected step has magnitude alpha per coordinate.
    CHECK(theta[0] == doctest::Approx(-hp.alpha).epsilon(1e-6));
    CHECK(theta[1] == doctest::Approx(hp.alpha).epsilon(1e-6));
}

TEST_CASE("hyperparameter validation") {
    HyperParams hp;
    hp.patience = 0;
    CHECK_THROWS(hp.validate());
    hp = HyperParams{};
    hp.beta1 = 1.0;
    CHECK_THROWS(hp.validate());
}

TEST_CASE("single sample is its own compression set") {
    Fixture f(1);
    LossModel model(f.prop, f.net);
    const auto r = algorithm1(init_params(f.net, 1), SampleSet::all(f.trajs), model, f.hp);
    REQUIRE(r.compression.size() == 1);
    CHECK(r.compression[0] == 0);
    CHECK(r.jumps <= 1);
}

TEST_CASE("warm start failure is reported") {
    Fixture f(3);
    f.hp.warm_start_max_iters = 1;
    LossModel model(f.prop, f.net);
    const ParamVector zero(f.net.param_count(), 0.0);
    CHECK_THROWS_AS(algorithm1(zero, SampleSet::all(f.trajs), model, f.hp), SynthesisError);
}

TEST_CASE("algorithm 1 reproduces itself on its compression set") {
    Fixture f(40);
    LossModel model(f.prop, f.net);
    const ParamVector theta0 = init_params(f.net, 1);
    const auto full = algorithm1(theta0, SampleSet::all(f.trajs), model, f.hp);
    CHECK(non_increasing(full.loss_trace));
    CHECK_FALSE(full.hit_cap);
    REQUIRE_FALSE(full.compression.empty());

    const auto again = algorithm1(theta0, SampleSet::subset(f.trajs, full.compression), model, f.hp);
    CHECK(again.theta == full.theta);
    CHECK(again.compression == full.compression);
    CHECK(again.loss_trace == full.loss_trace);
}

TEST_CASE("algorithm 2 reproduces itself on its discarded set") {
    Fixture f(40, 3);
    LossModel model(f.prop, f.net);
    const ParamVector theta0 = init_params(f.net, 3);
    const auto full = algorithm2(theta0, SampleSet::all(f.trajs), model, f.hp);
    CHECK(full.certified());

    const auto again = algorithm2(theta0, SampleSet::subset(f.trajs, full.discarded), model, f.hp);
    CHECK(again.theta == full.theta);
    CHECK(again.discarded == full.discarded);

    // Every sample that was kept satisfies the certificate conditions.
    for (std::size_t i = 0; i < f.trajs.size(); ++i) {
        if (std::find(full.discarded.begin(), full.discarded.end(), i) != full.discarded.end()) continue;
        CHECK(model.check_conditions(full.theta, f.trajs[i]));
    }
}

TEST_CASE("one call suffices when it already clears every sample") {
    Fixture f(20, 5);
    LossModel model(f.prop, f.net);
    const ParamVector theta0 = init_params(f.net, 5);
    const auto a2 = algorithm2(theta0, SampleSet::all(f.trajs), model, f.hp);
    const auto a1 = algorithm1(theta0, SampleSet::all(f.trajs), model, f.hp);
    if (a1.final_max_loss == 0.0) {
        REQUIRE(a2.calls.size() == 1);
        CHECK(a2.discarded == a1.compression);
        CHECK(a2.theta == a1.theta);
    } else {
        CHECK(a2.calls.size() > 1);
    }
}

TEST_CASE("iteration cap flags the result") {
    Fixture f(20);
    f.hp.max_iters = 3;
    LossModel model(f.prop, f.net);
    const auto r = algorithm1(init_params(f.net, 1), SampleSet::all(f.trajs), model, f.hp);
    CHECK(r.hit_cap);
    CHECK(r.iterations == 3);
}

TEST_CASE("subset sorts and checks ids") {
    Fixture f(5);
    const SampleSet s = SampleSet::subset(f.trajs, {3, 1, 3});
    CHECK(s.ids == std::vector<std::size_t>{1, 3});
    CHECK_THROWS_AS(SampleSet::subset(f.trajs, {7}), std::out_of_range);
}
