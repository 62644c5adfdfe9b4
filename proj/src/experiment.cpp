#include "ddcert/experiment.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>

#include "ddcert/bounds.hpp"
#include "ddcert/rng.hpp"

namespace ddcert {

namespace {

std::vector<double> filled(std::size_t n, double v) { return std::vector<double>(n, v); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

System ExperimentConfig::make_system() const {
    if (system == "expressions") return System::from_expressions(expressions);
    return System::builtin(system);
}

std::string ExperimentConfig::effective_output_dir() const {
    if (!output_dir.empty()) return output_dir;
    if (const char* env = std::getenv(kOutputRootEnv); env && *env) return env;
    return "runs";
}

void ExperimentConfig::validate() const {
    const System sys = make_system();
    if (sys.dim() != property.dim()) {
        throw ConfigError("config: system dimension " + std::to_string(sys.dim()) +
                          " differs from the property dimension " + std::to_string(property.dim()));
    }
    if (network.input_dim != property.dim()) throw ConfigError("config: network input dimension mismatch");
    network.validate();
    property.validate();
    synth.validate();
    if (n < 1) throw ConfigError("config: n must be >= 1");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("config: beta must lie in (0,1)");
    if (effective_validation_seed() == seed) throw ConfigError("config: validation seed must differ from the training seed");
}

json region_to_json(const Region& r) {
    if (r.shape() == Region::Shape::Box) return {{"type", "box"}, {"low", r.low()}, {"high", r.high()}};
    return {{"type", "ball"}, {"center", r.center()}, {"radius", r.radius()}};
}

Region region_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: region must be an object");
    const std::string type = get_or<std::string>(j, "type", "");
    try {
        if (type == "box") return Region::box(j.at("low").get<std::vector<double>>(), j.at("high").get<std::vector<double>>());
        if (type == "ball") return Region::ball(j.at("center").get<std::vector<double>>(), j.at("radius").get<double>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed ") + type + " region: " + e.what());
    }
    throw ConfigError("config: region type must be 'box' or 'ball', got '" + type + "'");
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["system"] = c.system;
    if (c.system == "expressions") j["expressions"] = c.expressions;
    const PropertySpec& p = c.property;
    json prop = {{"kind", to_string(p.kind)},
                 {"domain", region_to_json(p.domain)},
                 {"initial", region_to_json(p.initial)},
                 {"horizon", p.horizon},
                 {"delta", p.delta},
                 {"tau", p.tau},
                 {"grids",
                  {{"initial", p.grids.initial},
                   {"goal_complement", p.grids.goal_complement},
                   {"boundary", p.grids.boundary},
                   {"unsafe", p.grids.unsafe}}}};
    if (p.goal) prop["goal"] = region_to_json(*p.goal);
    if (p.unsafe) prop["unsafe"] = region_to_json(*p.unsafe);
    j["property"] = prop;
    j["network"] = {{"hidden", c.network.hidden}};
    const HyperParams& h = c.synth;
    j["synth"] = {{"alpha", h.alpha},
                  {"eta", h.eta},
                  {"patience", h.patience},
                  {"max_iters", h.max_iters},
                  {"warm_start_max_iters", h.warm_start_max_iters},
                  {"beta1", h.beta1},
                  {"beta2", h.beta2},
                  {"eps", h.eps},
                  {"seed", c.seed}};
    j["n"] = c.n;
    j["beta"] = c.beta;
    j["validation"] = {{"m", c.validation_m}, {"seed", c.effective_validation_seed()}};
    j["output_dir"] = c.output_dir;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig c;
    c.name = get_or<std::string>(j, "name", c.name);
    c.system = get_or<std::string>(j, "system", c.system);
    c.expressions = get_or<std::vector<std::string>>(j, "expressions", {});

    if (!j.contains("property")) throw ConfigError("config: missing 'property'");
    const json& pj = j.at("property");
    PropertySpec& p = c.property;
    try {
        p.kind = parse_property_kind(get_or<std::string>(pj, "kind", "safe"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!pj.contains("domain") || !pj.contains("initial")) throw ConfigError("config: property needs 'domain' and 'initial'");
    p.domain = region_from_json(pj.at("domain"));
    p.initial = region_from_json(pj.at("initial"));
    if (pj.contains("goal") && !pj.at("goal").is_null()) p.goal = region_from_json(pj.at("goal"));
    if (pj.contains("unsafe") && !pj.at("unsafe").is_null()) p.unsafe = region_from_json(pj.at("unsafe"));
    p.horizon = get_or<std::size_t>(pj, "horizon", p.horizon);
    p.delta = get_or<double>(pj, "delta", p.delta);
    p.tau = get_or<double>(pj, "tau", p.tau);
    p.grids = GridDensity::defaults_for(p.domain.dim());
    if (pj.contains("grids")) {
        const json& g = pj.at("grids");
        p.grids.initial = get_or<std::size_t>(g, "initial", p.grids.initial);
        p.grids.goal_complement = get_or<std::size_t>(g, "goal_complement", p.grids.goal_complement);
        p.grids.boundary = get_or<std::size_t>(g, "boundary", p.grids.boundary);
        p.grids.unsafe = get_or<std::size_t>(g, "unsafe", p.grids.unsafe);
    }

    c.network.input_dim = p.domain.dim();
    if (j.contains("network")) c.network.hidden = get_or<std::vector<std::size_t>>(j.at("network"), "hidden", {});
    if (c.network.hidden.empty()) c.network.hidden = {5, 5};

    if (j.contains("synth")) {
        const json& s = j.at("synth");
        HyperParams& h = c.synth;
        h.alpha = get_or<double>(s, "alpha", h.alpha);
        h.eta = get_or<double>(s, "eta", h.eta);
        h.patience = get_or<std::size_t>(s, "patience", h.patience);
        h.max_iters = get_or<std::size_t>(s, "max_iters", h.max_iters);
        h.warm_start_max_iters = get_or<std::size_t>(s, "warm_start_max_iters", h.warm_start_max_iters);
        h.beta1 = get_or<double>(s, "beta1", h.beta1);
        h.beta2 = get_or<double>(s, "beta2", h.beta2);
        h.eps = get_or<double>(s, "eps", h.eps);
        c.seed = get_or<std::uint64_t>(s, "seed", c.seed);
    }
    c.n = get_or<std::size_t>(j, "n", c.n);
    c.beta = get_or<double>(j, "beta", c.beta);
    if (j.contains("validation")) {
        const json& v = j.at("validation");
        c.validation_m = get_or<std::size_t>(v, "m", c.validation_m);
        if (v.contains("seed") && !v.at("seed").is_null()) c.validation_seed = v.at("seed").get<std::uint64_t>();
    }
    c.output_dir = get_or<std::string>(j, "output_dir", "");
    return c;
}

std::vector<std::string> preset_names() {
    return {"spiral-safe", "spiral-partial-unsafe", "spiral-reach", "spiral-rwa", "highdim8-safe", "nonlinear4-safe",
            "drift1d-reach"};
}

json preset_json(const std::string& name) {
    const Region spiral_x = Region::box({-3.0, -3.0}, {3.0, 3.0});
    const Region spiral_i = Region::box({-2.5, -0.5}, {-1.5, 0.5});
    const Region spiral_u = Region::box({-1.5, -2.5}, {0.5, -1.8});
    const Region spiral_g = Region::ball({0.0, 0.0}, 1.0);

    json j;
    j["name"] = name;
    j["n"] = 1000;
    j["beta"] = 1e-5;
    j["synth"] = {{"seed", 1}};
    json prop;
    if (name.rfind("spiral-", 0) == 0) {
        j["system"] = "spiral2d";
        j["network"] = {{"hidden", {5, 5}}};
        prop = {{"domain", region_to_json(spiral_x)}, {"initial", region_to_json(spiral_i)}, {"horizon", 100}};
        if (name == "spiral-safe") {
            prop["kind"] = "safe";
            prop["unsafe"] = region_to_json(spiral_u);
        } else if (name == "spiral-partial-unsafe") {
            // Reaches far enough down that about 1% of trajectories cross it.
            prop["kind"] = "safe";
            prop["unsafe"] = region_to_json(Region::box({-1.5, -2.5}, {0.5, -1.412}));
        } else if (name == "spiral-reach") {
            prop["kind"] = "reach";
            prop["goal"] = region_to_json(spiral_g);
        } else if (name == "spiral-rwa") {
            prop["kind"] = "rwa";
            prop["goal"] = region_to_json(spiral_g);
            prop["unsafe"] = region_to_json(spiral_u);
        } else {
            throw ConfigError("unknown preset '" + name + "'");
        }
    } else if (name == "highdim8-safe") {
        j["system"] = "highdim8";
        j["network"] = {{"hidden", {10, 10}}};
        prop = {{"kind", "safe"},
                {"domain", region_to_json(Region::box(filled(8, -2.2), filled(8, 2.2)))},
                {"initial", region_to_json(Region::box(filled(8, 0.9), filled(8, 1.1)))},
                {"unsafe", region_to_json(Region::box(filled(8, -2.2), filled(8, -1.8)))},
                {"horizon", 100}};
    } else if (name == "nonlinear4-safe") {
        j["system"] = "nonlinear4";
        j["network"] = {{"hidden", {10, 10}}};
        std::vector<double> ulo = filled(4, -3.0), uhi = filled(4, 3.0);
        ulo[0] = 2.2;
        prop = {{"kind", "safe"},
                {"domain", region_to_json(Region::box(filled(4, -3.0), filled(4, 3.0)))},
                {"initial", region_to_json(Region::box(filled(4, -0.5), filled(4, 0.5)))},
                {"unsafe", region_to_json(Region::box(ulo, uhi))},
                {"horizon", 20},
                {"grids", {{"initial", 6}, {"unsafe", 6}}}};
    } else if (name == "drift1d-reach") {
        // Constant drift: starts above 2.45 enter the goal exactly at T.
        j["system"] = "expressions";
        j["expressions"] = {"x1 - 0.05"};
        j["network"] = {{"hidden", {5}}};
        prop = {{"kind", "reach"},
                {"domain", region_to_json(Region::box({-1.0}, {3.0}))},
                {"initial", region_to_json(Region::box({2.0}, {2.5}))},
                {"goal", region_to_json(Region::box({-0.5}, {0.5}))},
                {"horizon", 40}};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    j["property"] = prop;
    return j;
}

void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) *node = json::object();
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

ExperimentConfig load_config(const std::optional<std::string>& preset, const std::optional<std::string>& file,
                             const std::vector<std::string>& overrides) {
    json j = preset ? preset_json(*preset) : json::object();
    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot open config file '" + *file + "'");
        json f = json::parse(in, nullptr, false);
        if (f.is_discarded()) throw ConfigError("config file '" + *file + "' is not valid JSON");
        j.merge_patch(f);
    }
    for (const auto& o : overrides) apply_override(j, o);
    ExperimentConfig c = config_from_json(j);
    c.validate();
    return c;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunReport r;
    r.config = cfg;
    const System sys = cfg.make_system();
    const SamplingDistribution dist{cfg.property.initial, cfg.seed, streams::training};
    const auto trajs = sample_trajectories(sys, dist, cfg.n, cfg.property.horizon);
    LossModel model(cfg.property, cfg.network);
    const ParamVector theta0 = init_params(cfg.network, cfg.seed);

    r.synthesis = algorithm2(theta0, SampleSet::all(trajs), model, cfg.synth);
    if (model.property().needs_goal()) {
        const double sup_i = model.extremes(r.synthesis.theta).sup_initial;
        if (!(cfg.property.delta > -sup_i)) {
            r.warnings.push_back("delta " + std::to_string(cfg.property.delta) +
                                 " does not exceed -sup V on the X_I grid (" + std::to_string(-sup_i) + ")");
        }
    }
    r.epsilon = epsilon_compression(r.synthesis.discarded.size(), cfg.beta, cfg.n);
    r.direct_count = direct_discard_count(cfg.property, trajs);
    r.epsilon_direct = epsilon_direct(r.direct_count, cfg.beta, cfg.n);
    if (cfg.validation_m > 0) {
        r.validation = empirical_risks(model, r.synthesis.theta, sys, cfg.property.initial, cfg.validation_m,
                                       cfg.effective_validation_seed());
    }
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<double> decimate(const std::vector<double>& trace, std::size_t max_points) {
    if (trace.size() <= max_points || max_points < 2) return trace;
    std::vector<double> out;
    out.reserve(max_points);
    const double step = static_cast<double>(trace.size() - 1) / static_cast<double>(max_points - 1);
    for (std::size_t i = 0; i < max_points; ++i) {
        out.push_back(trace[static_cast<std::size_t>(std::llround(step * static_cast<double>(i)))]);
    }
    return out;
}

json validation_to_json(const ValidationReport& v) {
    return {{"m", v.m},
            {"seed", v.seed},
            {"stream", v.stream},
            {"cert_violations", v.cert_violations},
            {"cert_rate", v.cert_rate()},
            {"prop_violations", v.prop_violations},
            {"prop_rate", v.prop_rate()},
            {"cert_violation_ids", v.cert_violation_ids},
            {"prop_violation_ids", v.prop_violation_ids}};
}

json report_to_json(const RunReport& r) {
    const Algorithm2Result& s = r.synthesis;
    return {{"config", config_to_json(r.config)},
            {"theta", s.theta},
            {"compression_indices", s.discarded},
            {"R_N", s.discarded.size()},
            {"calls", s.calls},
            {"call_trace_lengths", s.call_trace_lengths},
            {"loss_trace", decimate(s.loss_trace, 500)},
            {"loss_trace_length", s.loss_trace.size()},
            {"iterations", s.iterations},
            {"warm_start_iterations", s.warm_start_iterations},
            {"hit_cap", s.hit_cap},
            {"final_max_loss", s.final_max_loss},
            {"final_state_loss", s.final_state_loss},
            {"certified", r.certified()},
            {"epsilon", r.epsilon},
            {"direct_violations", r.direct_count},
            {"epsilon_direct", r.epsilon_direct},
            {"validation", validation_to_json(r.validation)},
            {"wall_time_s", r.wall_time_s},
            {"warnings", r.warnings}};
}

}  // namespace ddcert
