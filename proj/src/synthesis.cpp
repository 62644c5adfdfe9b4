#include "ddcert/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ddcert {

void HyperParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("synth: alpha must be > 0");
    if (!(eta > 0.0)) throw std::invalid_argument("synth: eta must be > 0");
    if (patience < 1) throw std::invalid_argument("synth: patience must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("synth: max_iters must be >= 1");
    if (warm_start_max_iters < 1) throw std::invalid_argument("synth: warm_start_max_iters must be >= 1");
    if (!(beta1 > 0.0 && beta1 < 1.0)) throw std::invalid_argument("synth: beta1 must lie in (0,1)");
    if (!(beta2 > 0.0 && beta2 < 1.0)) throw std::invalid_argument("synth: beta2 must lie in (0,1)");
    if (!(eps > 0.0)) throw std::invalid_argument("synth: eps must be > 0");
}

MomentumStep::MomentumStep(std::size_t dim, const HyperParams& hp)
    : alpha_(hp.alpha), b1_(hp.beta1), b2_(hp.beta2), eps_(hp.eps), m_(dim, 0.0), v_(dim, 0.0) {}

void MomentumStep::reset() {
    std::fill(m_.begin(), m_.end(), 0.0);
    std::fill(v_.begin(), v_.end(), 0.0);
    b1t_ = b2t_ = 1.0;
}

void MomentumStep::apply(std::span<double> theta, std::span<const double> grad) {
    b1t_ *= b1_;
    b2t_ *= b2_;
    const double c1 = 1.0 / (1.0 - b1t_);
    const double c2 = 1.0 / (1.0 - b2t_);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        m_[i] = b1_ * m_[i] + (1.0 - b1_) * grad[i];
        v_[i] = b2_ * v_[i] + (1.0 - b2_) * grad[i] * grad[i];
        theta[i] -= alpha_ * (m_[i] * c1) / (std::sqrt(v_[i] * c2) + eps_);
    }
}

SampleSet SampleSet::all(const std::vector<Trajectory>& trajs) {
    SampleSet s;
    s.trajectories = &trajs;
    s.ids.resize(trajs.size());
    std::iota(s.ids.begin(), s.ids.end(), std::size_t{0});
    return s;
}

SampleSet SampleSet::subset(const std::vector<Trajectory>& trajs, std::vector<std::size_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) {
        if (id >= trajs.size()) throw std::out_of_range("sample id " + std::to_string(id) + " out of range");
    }
    SampleSet s;
    s.trajectories = &trajs;
    s.ids = std::move(ids);
    return s;
}

double LossSweep::max_total() const {
    double m = 0.0;
    for (double v : total) m = std::max(m, v);
    return m;
}

std::size_t LossSweep::argmax_position() const {
    std::size_t at = 0;
    for (std::size_t i = 1; i < total.size(); ++i) {
        if (total[i] > total[at]) at = i;
    }
    return at;
}

LossSweep sweep(LossModel& model, std::span<const double> theta, const SampleSet& samples) {
    LossSweep s;
    s.state_grad.assign(model.param_count(), 0.0);
    s.state_loss = model.state_loss(theta, s.state_grad);
    s.extremes = model.extremes(theta);
    s.total.resize(samples.size());
    s.selection.resize(samples.size());
    for (std::size_t p = 0; p < samples.size(); ++p) {
        s.total[p] = s.state_loss + model.traj_loss(theta, samples.at(samples.ids[p]), s.extremes, &s.selection[p]);
    }
    return s;
}

bool misaligned(std::span<const double> g, std::span<const double> g_comp) {
    if (g.size() != g_comp.size()) throw DimensionError("misaligned: size mismatch");
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) return false;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * g_comp[i];
    return acc <= 0.0;
}

namespace {

// Full subgradient of L(theta, xi) at the sweep's theta.
void sample_subgradient(LossModel& model, std::span<const double> theta, const SampleSet& samples,
                        const LossSweep& s, std::size_t pos, std::vector<double>& g) {
    g = s.state_grad;
    model.traj_subgradient(theta, samples.at(samples.ids[pos]), s.extremes, s.selection[pos], g);
}

std::size_t warm_start(ParamVector& theta, LossModel& model, const HyperParams& hp) {
    MomentumStep opt(theta.size(), hp);
    std::vector<double> g(theta.size());
    for (std::size_t it = 0;; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        const double ls = model.state_loss(theta, g);
        if (ls == 0.0) return it;
        if (it >= hp.warm_start_max_iters) {
            throw SynthesisError("warm start did not reach zero state loss after " +
                                 std::to_string(hp.warm_start_max_iters) + " iterations (state loss " +
                                 std::to_string(ls) + "); try a larger network or a higher warm-start cap");
        }
        opt.apply(theta, g);
    }
}

}  // namespace

Algorithm1Result algorithm1(std::span<const double> theta0, const SampleSet& samples, LossModel& model,
                            const HyperParams& hp) {
    hp.validate();
    if (samples.empty()) throw std::invalid_argument("algorithm1: empty sample set");
    if (theta0.size() != model.param_count()) throw DimensionError("algorithm1: parameter count mismatch");

    Algorithm1Result res;
    res.theta.assign(theta0.begin(), theta0.end());
    res.warm_start_iterations = warm_start(res.theta, model, hp);

    const std::size_t P = res.theta.size();
    MomentumStep opt(P, hp);
    std::vector<std::size_t> comp;         // positions into samples.ids, insertion order
    std::vector<char> in_comp(samples.size(), 0);
    std::vector<double> g_comp(P), g_cand(P);
    std::vector<std::size_t> order;
    double running = std::numeric_limits<double>::infinity();
    std::size_t stalled = 0;

    for (std::size_t it = 0;; ++it) {
        const LossSweep s = sweep(model, res.theta, samples);

        // Worst compression sample at the current theta, lowest id on ties.
        double comp_max = -std::numeric_limits<double>::infinity();
        std::size_t comp_worst = 0;
        for (auto p : comp) {
            if (s.total[p] > comp_max || (s.total[p] == comp_max && p < comp_worst)) {
                comp_max = s.total[p];
                comp_worst = p;
            }
        }

        if (it > 0) {
            const double now = std::min(running, comp.empty() ? 0.0 : comp_max);
            res.loss_trace.push_back(now);
            stalled = std::fabs(now - running) <= hp.eta ? stalled + 1 : 0;
            running = now;
            if (stalled >= hp.patience) {
                const std::size_t worst = s.argmax_position();
                if (!in_comp[worst]) comp.push_back(worst);
                res.final_max_loss = s.max_total();
                break;
            }
        }
        if (it >= hp.max_iters) {
            res.hit_cap = true;
            const std::size_t worst = s.argmax_position();
            if (!in_comp[worst]) comp.push_back(worst);
            res.final_max_loss = s.max_total();
            break;
        }

        if (comp.empty()) {
            std::fill(g_comp.begin(), g_comp.end(), 0.0);
        } else {
            sample_subgradient(model, res.theta, samples, s, comp_worst, g_comp);
        }

        // Candidates with loss >= compression loss, by decreasing loss then id.
        order.clear();
        for (std::size_t p = 0; p < samples.size(); ++p) {
            if (s.total[p] >= comp_max) order.push_back(p);
        }
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return s.total[a] > s.total[b]; });

        bool jumped = false;
        for (auto p : order) {
            sample_subgradient(model, res.theta, samples, s, p, g_cand);
            if (misaligned(g_cand, g_comp)) {
                opt.apply(res.theta, g_cand);
                if (!in_comp[p]) {
                    in_comp[p] = 1;
                    comp.push_back(p);
                }
                ++res.jumps;
                jumped = true;
                break;
            }
        }
        if (!jumped) opt.apply(res.theta, g_comp);
        ++res.iterations;
    }

    res.compression.reserve(comp.size());
    for (auto p : comp) res.compression.push_back(samples.ids[p]);
    return res;
}

Algorithm2Result algorithm2(std::span<const double> theta0, const SampleSet& samples, LossModel& model,
                            const HyperParams& hp) {
    hp.validate();
    if (samples.empty()) throw std::invalid_argument("algorithm2: empty sample set");

    Algorithm2Result res;
    res.theta.assign(theta0.begin(), theta0.end());
    SampleSet remaining = samples;

    auto worst_remaining = [&]() {
        if (remaining.empty()) return 0.0;
        return sweep(model, res.theta, remaining).max_total();
    };

    double worst = worst_remaining();
    while (worst > 0.0) {
        Algorithm1Result r = algorithm1(res.theta, remaining, model, hp);
        res.theta = std::move(r.theta);
        res.iterations += r.iterations;
        res.warm_start_iterations += r.warm_start_iterations;
        res.loss_trace.insert(res.loss_trace.end(), r.loss_trace.begin(), r.loss_trace.end());
        res.calls.push_back(r.compression.size());
        res.call_trace_lengths.push_back(r.loss_trace.size());
        res.hit_cap = res.hit_cap || r.hit_cap;

        std::vector<std::size_t> drop = r.compression;
        std::sort(drop.begin(), drop.end());
        std::vector<std::size_t> kept;
        kept.reserve(remaining.size());
        std::set_difference(remaining.ids.begin(), remaining.ids.end(), drop.begin(), drop.end(),
                            std::back_inserter(kept));
        remaining.ids = std::move(kept);
        res.discarded.insert(res.discarded.end(), r.compression.begin(), r.compression.end());
        worst = worst_remaining();
    }
    res.final_max_loss = worst;
    res.final_state_loss = model.state_loss(res.theta);
    return res;
}

}  // namespace ddcert
