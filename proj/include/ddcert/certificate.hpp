#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ddcert {

/// Fully connected sigmoid network R^n -> R with a linear output layer.
///
/// Parameter layout (frozen; reports and reproducibility checks depend on it):
/// for each layer in order, hidden layers first and the scalar output layer
/// last, the weight matrix in row-major order (one row per output unit, one
/// column per input) followed by that layer's biases.
struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden;

    std::size_t param_count() const;
    std::size_t depth() const { return hidden.size() + 1; }
    std::size_t width(std::size_t layer) const;    ///< outputs of `layer`
    std::size_t fan_in(std::size_t layer) const;   ///< inputs of `layer`
    std::size_t max_width() const;
    void validate() const;
};

using ParamVector = std::vector<double>;

/// Deterministic in (spec, seed): weights uniform in +-1/sqrt(fan_in),
/// biases zero.
ParamVector init_params(const NetworkSpec& spec, std::uint64_t seed);

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Evaluates V_theta and its parameter gradient, reusing scratch buffers.
/// One instance per thread.
class Certificate {
public:
    explicit Certificate(NetworkSpec spec);

    const NetworkSpec& spec() const { return spec_; }

    double eval(std::span<const double> theta, std::span<const double> x);

    /// Adds `scale * dV/dtheta` at x into `grad` and returns V(x).
    double accumulate_grad(std::span<const double> theta, std::span<const double> x, double scale,
                           std::span<double> grad);

    std::vector<double> grad_params(std::span<const double> theta, std::span<const double> x);

private:
    double forward(std::span<const double> theta, std::span<const double> x);

    NetworkSpec spec_;
    std::vector<std::size_t> offsets_;  // start of each layer's weights in theta
    // activations_[l] holds the outputs of hidden layer l.
    std::vector<std::vector<double>> activations_;
    std::vector<double> delta_;
    std::vector<double> delta_next_;
};

double eval(const NetworkSpec& spec, std::span<const double> theta, std::span<const double> x);
std::vector<double> grad_params(const NetworkSpec& spec, std::span<const double> theta,
                                std::span<const double> x);

}  // namespace ddcert
