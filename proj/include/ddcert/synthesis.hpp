#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ddcert/certificate.hpp"
#include "ddcert/dynamics.hpp"
#include "ddcert/loss.hpp"

namespace ddcert {

class SynthesisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HyperParams {
    double alpha = 1e-2;                        ///< step size
    double eta = 1e-6;                          ///< running-loss tolerance
    /// Consecutive iterations whose running-loss change is within eta before
    /// stopping. 1 stops at the first stalled step.
    std::size_t patience = 500;
    std::size_t max_iters = 200000;             ///< main-loop cap per Algorithm 1 call
    std::size_t warm_start_max_iters = 50000;   ///< state-loss descent cap
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    void validate() const;
};

/// Deterministic Adam-style update with constant step size.
class MomentumStep {
public:
    MomentumStep(std::size_t dim, const HyperParams& hp);
    void reset();
    void apply(std::span<double> theta, std::span<const double> grad);

private:
    double alpha_, b1_, b2_, eps_;
    double b1t_ = 1.0, b2t_ = 1.0;
    std::vector<double> m_, v_;
};

/// Training trajectories addressed by their original index.
struct SampleSet {
    const std::vector<Trajectory>* trajectories = nullptr;
    std::vector<std::size_t> ids;  ///< ascending

    static SampleSet all(const std::vector<Trajectory>& trajs);
    static SampleSet subset(const std::vector<Trajectory>& trajs, std::vector<std::size_t> ids);
    std::size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
    const Trajectory& at(std::size_t id) const { return (*trajectories)[id]; }
};

struct Algorithm1Result {
    ParamVector theta;
    std::vector<std::size_t> compression;  ///< sample ids in order of insertion
    std::vector<double> loss_trace;        ///< running loss L_1, L_2, ...
    std::size_t warm_start_iterations = 0;
    std::size_t iterations = 0;
    std::size_t jumps = 0;
    bool hit_cap = false;
    double final_max_loss = 0.0;           ///< max over the input samples at theta
};

struct Algorithm2Result {
    ParamVector theta;
    std::vector<std::size_t> discarded;    ///< R_N, in order of removal
    std::vector<double> loss_trace;        ///< concatenated Algorithm 1 traces
    std::vector<std::size_t> calls;        ///< |C| returned by each Algorithm 1 call
    std::vector<std::size_t> call_trace_lengths;
    std::size_t iterations = 0;
    std::size_t warm_start_iterations = 0;
    bool hit_cap = false;
    double final_max_loss = 0.0;           ///< max over the samples that remain
    double final_state_loss = 0.0;         ///< nonzero only if every sample was discarded
    bool certified() const { return !hit_cap && final_max_loss == 0.0 && final_state_loss == 0.0; }
};

/// Evaluated losses of every sample at one theta.
struct LossSweep {
    double state_loss = 0.0;
    std::vector<double> state_grad;
    GridExtremes extremes;
    std::vector<double> total;           ///< aligned with SampleSet::ids
    std::vector<TrajSelection> selection;

    double max_total() const;
    std::size_t argmax_position() const;  ///< lowest position among maxima
};

/// Jump test: `g` is nonzero and makes a nonpositive angle with `g_comp`.
bool misaligned(std::span<const double> g, std::span<const double> g_comp);

LossSweep sweep(LossModel& model, std::span<const double> theta, const SampleSet& samples);

/// Subgradient descent with misaligned-subgradient jumps; builds the
/// compression set as it goes.
Algorithm1Result algorithm1(std::span<const double> theta0, const SampleSet& samples, LossModel& model,
                            const HyperParams& hp);

/// Repeats Algorithm 1, discarding each returned compression set, until the
/// worst loss over the remaining samples is zero.
Algorithm2Result algorithm2(std::span<const double> theta0, const SampleSet& samples, LossModel& model,
                            const HyperParams& hp);

}  // namespace ddcert
