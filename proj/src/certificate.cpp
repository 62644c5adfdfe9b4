#include "ddcert/certificate.hpp"

#include <cmath>
#include <stdexcept>

#include "ddcert/regions.hpp"
#include "ddcert/rng.hpp"

namespace ddcert {

std::size_t NetworkSpec::width(std::size_t layer) const {
    return layer < hidden.size() ? hidden[layer] : 1;
}

std::size_t NetworkSpec::fan_in(std::size_t layer) const {
    return layer == 0 ? input_dim : hidden[layer - 1];
}

std::size_t NetworkSpec::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < depth(); ++l) n += width(l) * fan_in(l) + width(l);
    return n;
}

std::size_t NetworkSpec::max_width() const {
    std::size_t m = 1;
    for (std::size_t w : hidden) m = std::max(m, w);
    return m;
}

void NetworkSpec::validate() const {
    if (input_dim == 0) throw std::invalid_argument("network: input dimension must be positive");
    for (std::size_t w : hidden) {
        if (w == 0) throw std::invalid_argument("network: hidden widths must be positive");
    }
}

ParamVector init_params(const NetworkSpec& spec, std::uint64_t seed) {
    spec.validate();
    ParamVector theta(spec.param_count(), 0.0);
    const CounterRng rng(seed, streams::parameters);
    std::size_t p = 0;
    for (std::size_t l = 0; l < spec.depth(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(spec.fan_in(l)));
        const std::size_t nw = spec.width(l) * spec.fan_in(l);
        for (std::size_t i = 0; i < nw; ++i, ++p) theta[p] = bound * (2.0 * rng.uniform(p, 0) - 1.0);
        p += spec.width(l);  // biases stay zero
    }
    return theta;
}

Certificate::Certificate(NetworkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::size_t off = 0;
    for (std::size_t l = 0; l < spec_.depth(); ++l) {
        offsets_.push_back(off);
        off += spec_.width(l) * spec_.fan_in(l) + spec_.width(l);
    }
    for (std::size_t w : spec_.hidden) activations_.emplace_back(w);
    delta_.resize(spec_.max_width());
    delta_next_.resize(spec_.max_width());
}

double Certificate::forward(std::span<const double> theta, std::span<const double> x) {
    if (x.size() != spec_.input_dim) throw DimensionError("certificate: state dimension mismatch");
    if (theta.size() != spec_.param_count()) {
        throw DimensionError("certificate: parameter vector has wrong length");
    }
    std::span<const double> in = x;
    for (std::size_t l = 0; l < spec_.hidden.size(); ++l) {
        const std::size_t rows = spec_.width(l);
        const std::size_t cols = in.size();
        const double* w = theta.data() + offsets_[l];
        const double* b = w + rows * cols;
        auto& out = activations_[l];
        for (std::size_t r = 0; r < rows; ++r) {
            double z = b[r];
            const double* wr = w + r * cols;
            for (std::size_t c = 0; c < cols; ++c) z += wr[c] * in[c];
            out[r] = sigmoid(z);
        }
        in = out;
    }
    const double* w = theta.data() + offsets_.back();
    double v = w[in.size()];
    for (std::size_t c = 0; c < in.size(); ++c) v += w[c] * in[c];
    return v;
}

double Certificate::eval(std::span<const double> theta, std::span<const double> x) {
    return forward(theta, x);
}

double Certificate::accumulate_grad(std::span<const double> theta, std::span<const double> x,
                                    double scale, std::span<double> grad) {
    const double v = forward(theta, x);
    if (grad.size() != theta.size()) throw DimensionError("certificate: gradient buffer has wrong length");

    const std::size_t L = spec_.hidden.size();
    // Output layer: dV/dw = a_{L-1}, dV/db = 1.
    {
        std::span<const double> in = L == 0 ? x : std::span<const double>(activations_[L - 1]);
        double* g = grad.data() + offsets_[L];
        for (std::size_t c = 0; c < in.size(); ++c) g[c] += scale * in[c];
        g[in.size()] += scale;
        const double* w = theta.data() + offsets_[L];
        // delta for the last hidden layer: dV/dz = w_out * s'(z)
        if (L > 0) {
            const auto& a = activations_[L - 1];
            for (std::size_t r = 0; r < a.size(); ++r) delta_[r] = scale * w[r] * a[r] * (1.0 - a[r]);
        }
    }
    for (std::size_t l = L; l-- > 0;) {
        const std::size_t rows = spec_.width(l);
        std::span<const double> in = l == 0 ? x : std::span<const double>(activations_[l - 1]);
        const std::size_t cols = in.size();
        double* gw = grad.data() + offsets_[l];
        double* gb = gw + rows * cols;
        for (std::size_t r = 0; r < rows; ++r) {
            const double d = delta_[r];
            double* gr = gw + r * cols;
            for (std::size_t c = 0; c < cols; ++c) gr[c] += d * in[c];
            gb[r] += d;
        }
        if (l > 0) {
            const double* w = theta.data() + offsets_[l];
            const auto& a = activations_[l - 1];
            for (std::size_t c = 0; c < cols; ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < rows; ++r) s += w[r * cols + c] * delta_[r];
                delta_next_[c] = s * a[c] * (1.0 - a[c]);
            }
            std::swap(delta_, delta_next_);
        }
    }
    return v;
}

std::vector<double> Certificate::grad_params(std::span<const double> theta, std::span<const double> x) {
    std::vector<double> g(theta.size(), 0.0);
    accumulate_grad(theta, x, 1.0, g);
    return g;
}

double eval(const NetworkSpec& spec, std::span<const double> theta, std::span<const double> x) {
    Certificate c(spec);
    return c.eval(theta, x);
}

std::vector<double> grad_params(const NetworkSpec& spec, std::span<const double> theta,
                                std::span<const double> x) {
    Certificate c(spec);
    return c.grad_params(theta, x);
}

}  // namespace ddcert
