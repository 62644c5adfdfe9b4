#include "ddcert/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ddcert/rng.hpp"

namespace ddcert {

namespace {

// Sampling interval of the planar spiral benchmark.
constexpr double kSpiralTd = 0.1;

void spiral2d(std::span<const double> x, std::span<double> y) {
    constexpr double h = kSpiralTd / 2.0;
    y[0] = x[0] - h * x[1];
    y[1] = x[1] + h * (x[0] - x[1]);
}

void highdim8(std::span<const double> x, std::span<double> y) {
    static constexpr double gains[8] = {576, 2400, 4180, 3980, 2273, 800, 170, 20};
    double feedback = 0.0;
    for (int i = 0; i < 8; ++i) feedback += gains[i] * x[i];
    for (int i = 0; i < 7; ++i) y[i] = x[i] + 0.1 * x[i + 1];
    y[7] = x[7] - 0.1 * feedback;
}

void nonlinear4(std::span<const double> x, std::span<double> y) {
    y[0] = x[0] + 0.1 * (x[0] * x[1] / 5.0 - x[2] * x[3] / 2.0);
    y[1] = x[1] + 0.1 * std::cos(x[3]);
    y[2] = x[2] + 0.001 * std::sqrt(std::abs(x[0]));
    y[3] = x[3] + 0.1 * (-x[0] - x[1] * x[1] + std::sin(x[3]));
}

}  // namespace

System System::builtin(Builtin which) {
    System s;
    s.builtin_ = which;
    switch (which) {
        case Builtin::Spiral2d:
            s.dim_ = 2;
            s.name_ = "spiral2d";
            break;
        case Builtin::Highdim8:
            s.dim_ = 8;
            s.name_ = "highdim8";
            break;
        case Builtin::Nonlinear4:
            s.dim_ = 4;
            s.name_ = "nonlinear4";
            break;
    }
    return s;
}

System System::builtin(const std::string& name) {
    if (name == "spiral2d") return builtin(Builtin::Spiral2d);
    if (name == "highdim8") return builtin(Builtin::Highdim8);
    if (name == "nonlinear4") return builtin(Builtin::Nonlinear4);
    throw std::invalid_argument("unknown built-in system '" + name + "'");
}

System System::from_expressions(const std::vector<std::string>& sources) {
    if (sources.empty()) throw std::invalid_argument("dynamics: need one expression per coordinate");
    System s;
    s.dim_ = sources.size();
    s.name_ = "expressions";
    s.sources_ = sources;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        expr::Expr e = expr::parse(sources[i]);
        if (e.max_var() > s.dim_) {
            std::ostringstream os;
            os << "dynamics: expression " << i + 1 << " references x" << e.max_var()
               << " but the state has dimension " << s.dim_;
            throw std::invalid_argument(os.str());
        }
        s.exprs_.push_back(std::move(e));
    }
    return s;
}

void System::step_into(std::span<const double> x, std::span<double> out) const {
    if (x.size() != dim_ || out.size() != dim_) {
        throw DimensionError("step: state dimension does not match system dimension");
    }
    if (builtin_) {
        switch (*builtin_) {
            case Builtin::Spiral2d: spiral2d(x, out); break;
            case Builtin::Highdim8: highdim8(x, out); break;
            case Builtin::Nonlinear4: nonlinear4(x, out); break;
        }
    } else {
        try {
            for (std::size_t i = 0; i < dim_; ++i) out[i] = exprs_[i].eval(x);
        } catch (const expr::EvalError& e) {
            throw DynamicsError(std::string("step: ") + e.what());
        }
    }
    for (double v : out) {
        if (!std::isfinite(v)) throw DynamicsError("step: non-finite state produced by " + name_);
    }
}

State System::step(std::span<const double> x) const {
    State y(dim_);
    step_into(x, y);
    return y;
}

State step(const System& system, std::span<const double> x) { return system.step(x); }

Trajectory unroll(const System& system, std::span<const double> x0, std::size_t horizon) {
    if (horizon < 1) throw std::invalid_argument("unroll: horizon must be >= 1");
    if (x0.size() != system.dim()) throw DimensionError("unroll: initial state dimension mismatch");
    Trajectory t;
    t.dim = system.dim();
    t.horizon = horizon;
    t.states.resize((horizon + 1) * t.dim);
    std::copy(x0.begin(), x0.end(), t.states.begin());
    for (std::size_t k = 0; k < horizon; ++k) {
        std::span<const double> cur(t.states.data() + k * t.dim, t.dim);
        std::span<double> next(t.states.data() + (k + 1) * t.dim, t.dim);
        system.step_into(cur, next);
    }
    return t;
}

State SamplingDistribution::draw(std::uint64_t i) const {
    const CounterRng rng(seed, stream);
    const std::size_t n = support.dim();
    State x(n);
    if (support.shape() == Region::Shape::Box) {
        for (std::size_t d = 0; d < n; ++d) {
            const double u = rng.uniform(i, d);
            x[d] = support.low()[d] + u * (support.high()[d] - support.low()[d]);
        }
        return x;
    }
    // Ball: Gaussian direction (Box-Muller) and radius r * U^(1/n).
    double norm2 = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double u1 = rng.uniform_open_low(i, 2 * d);
        const double u2 = rng.uniform(i, 2 * d + 1);
        x[d] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        norm2 += x[d] * x[d];
    }
    const double radius = support.radius() * std::pow(rng.uniform(i, 2 * n), 1.0 / static_cast<double>(n));
    const double scale = norm2 > 0.0 ? radius / std::sqrt(norm2) : 0.0;
    for (std::size_t d = 0; d < n; ++d) x[d] = support.center()[d] + scale * x[d];
    return x;
}

std::vector<Trajectory> sample_trajectories(const System& system, const SamplingDistribution& dist,
                                            std::size_t count, std::size_t horizon, std::uint64_t first) {
    if (count < 1) throw std::invalid_argument("sample_trajectories: N must be >= 1");
    if (dist.support.dim() != system.dim()) {
        throw DimensionError("sample_trajectories: initial region dimension does not match system");
    }
    std::vector<Trajectory> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(unroll(system, dist.draw(first + i), horizon));
    return out;
}

}  // namespace ddcert
