#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddcert/dynexpr.hpp"
#include "ddcert/regions.hpp"

namespace ddcert {

class DynamicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic discrete-time map x(k+1) = f(x(k)).
class System {
public:
    enum class Builtin { Spiral2d, Highdim8, Nonlinear4 };

    static System builtin(Builtin which);
    static System builtin(const std::string& name);
    /// One expression per coordinate; x1..xn refer to the current state.
    static System from_expressions(const std::vector<std::string>& sources);

    std::size_t dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& expressions() const { return sources_; }
    bool is_builtin() const { return builtin_.has_value(); }

    /// Writes f(x) into `out`. Throws DynamicsError on a non-finite state.
    void step_into(std::span<const double> x, std::span<double> out) const;
    State step(std::span<const double> x) const;

private:
    std::size_t dim_ = 0;
    std::string name_;
    std::optional<Builtin> builtin_;
    std::vector<std::string> sources_;
    std::vector<expr::Expr> exprs_;
};

/// Trajectory x(0..T), stored contiguously as (T+1) * n doubles.
struct Trajectory {
    std::size_t dim = 0;
    std::size_t horizon = 0;  ///< T; there are T+1 states
    std::vector<double> states;

    std::span<const double> state(std::size_t k) const {
        return {states.data() + k * dim, dim};
    }
    std::size_t length() const { return horizon + 1; }
};

State step(const System& system, std::span<const double> x);
Trajectory unroll(const System& system, std::span<const double> x0, std::size_t horizon);

/// Uniform distribution over the initial region (box or ball).
struct SamplingDistribution {
    Region support;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Initial state i; a pure function of (seed, stream, i).
    State draw(std::uint64_t i) const;
};

/// N trajectories from draws 0..N-1 (offset `first` shifts the window).
std::vector<Trajectory> sample_trajectories(const System& system, const SamplingDistribution& dist,
                                            std::size_t count, std::size_t horizon,
                                            std::uint64_t first = 0);

}  // namespace ddcert
