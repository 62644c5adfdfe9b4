#include "ddcert/validation.hpp"

#include "ddcert/rng.hpp"

namespace ddcert {

bool check_property(const PropertySpec& spec, const Trajectory& xi) {
    if (xi.horizon != spec.horizon) throw std::invalid_argument("check_property: horizon mismatch");
    if (xi.dim != spec.dim()) throw DimensionError("check_property: dimension mismatch");
    bool reached = false;
    for (std::size_t k = 0; k <= xi.horizon; ++k) {
        const auto x = xi.state(k);
        switch (spec.kind) {
            case PropertyKind::Reach:
                if (spec.goal->contains(x)) return true;
                break;
            case PropertyKind::Safe:
                if (spec.unsafe->contains(x)) return false;
                break;
            case PropertyKind::Rwa:
                if (spec.unsafe->contains(x) || !spec.domain.contains(x)) return false;
                if (spec.goal->contains(x)) reached = true;
                break;
        }
    }
    if (spec.kind == PropertyKind::Reach) return false;
    if (spec.kind == PropertyKind::Rwa) return reached;
    return true;
}

ValidationReport evaluate_risks(LossModel& model, std::span<const double> theta,
                                const std::vector<Trajectory>& trajs) {
    ValidationReport rep;
    rep.m = trajs.size();
    const bool state_ok = model.state_loss(theta) == 0.0;
    const GridExtremes ext = model.extremes(theta);
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        if (!state_ok || model.traj_loss(theta, trajs[i], ext) != 0.0) {
            ++rep.cert_violations;
            rep.cert_violation_ids.push_back(i);
        }
        if (!check_property(model.property(), trajs[i])) {
            ++rep.prop_violations;
            rep.prop_violation_ids.push_back(i);
        }
    }
    return rep;
}

ValidationReport empirical_risks(LossModel& model, std::span<const double> theta, const System& system,
                                 const Region& initial, std::size_t m, std::uint64_t seed) {
    const SamplingDistribution dist{initial, seed, streams::validation};
    const auto trajs = sample_trajectories(system, dist, m, model.property().horizon);
    ValidationReport rep = evaluate_risks(model, theta, trajs);
    rep.seed = seed;
    rep.stream = streams::validation;
    return rep;
}

std::size_t direct_discard_count(const PropertySpec& spec, const std::vector<Trajectory>& trajs) {
    std::size_t n = 0;
    for (const auto& xi : trajs) n += check_property(spec, xi) ? 0 : 1;
    return n;
}

}  // namespace ddcert
