#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ddcert/dynamics.hpp"
#include "ddcert/loss.hpp"

namespace ddcert {

/// Exact membership check of the temporal property along one trajectory.
bool check_property(const PropertySpec& spec, const Trajectory& xi);

struct ValidationReport {
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t cert_violations = 0;
    std::size_t prop_violations = 0;
    std::vector<std::size_t> cert_violation_ids;
    std::vector<std::size_t> prop_violation_ids;

    double cert_rate() const { return m ? static_cast<double>(cert_violations) / static_cast<double>(m) : 0.0; }
    double prop_rate() const { return m ? static_cast<double>(prop_violations) / static_cast<double>(m) : 0.0; }
};

/// Draws m fresh trajectories from the validation stream and counts both
/// certificate-condition failures and property violations.
ValidationReport empirical_risks(LossModel& model, std::span<const double> theta, const System& system,
                                 const Region& initial, std::size_t m, std::uint64_t seed);

/// Same counts on a given trajectory set.
ValidationReport evaluate_risks(LossModel& model, std::span<const double> theta,
                                const std::vector<Trajectory>& trajs);

/// Number of trajectories violating the property.
std::size_t direct_discard_count(const PropertySpec& spec, const std::vector<Trajectory>& trajs);

}  // namespace ddcert
