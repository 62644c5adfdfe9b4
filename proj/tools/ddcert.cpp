// Command-line driver: synthesis runs, bound queries, validation and exports.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ddcert/bounds.hpp"
#include "ddcert/experiment.hpp"
#include "ddcert/rng.hpp"

namespace fs = std::filesystem;
using namespace ddcert;

namespace {

constexpr int kExitNotCertified = 1;
constexpr int kExitError = 2;

struct ConfigArgs {
    std::string preset;
    std::string file;
    std::vector<std::string> sets;

    void attach(CLI::App* app) {
        app->add_option("--preset", preset, "built-in preset name");
        app->add_option("--config", file, "JSON config file");
        app->add_option("--set", sets, "override, key=value (dotted keys)")->take_all();
    }
    ExperimentConfig load() const {
        return load_config(preset.empty() ? std::nullopt : std::optional<std::string>(preset),
                           file.empty() ? std::nullopt : std::optional<std::string>(file), sets);
    }
};

void write_json(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw std::runtime_error(path + " is not valid JSON");
    return j;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    file.open(p);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

std::vector<std::size_t> parse_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoul(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list '" + s + "'");
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct MeanStd {
    double mean = 0.0, std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd m;
    if (v.empty()) return m;
    for (double x : v) m.mean += x;
    m.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - m.mean) * (x - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return m;
}

// ---- synth ----

int cmd_synth(const ConfigArgs& ca, std::size_t repeats, const std::string& out_override) {
    ExperimentConfig base = ca.load();
    if (!out_override.empty()) base.output_dir = out_override;
    const fs::path root = base.effective_output_dir();

    bool all_certified = true;
    std::vector<double> eps, rn, cert, prop, secs;
    json runs = json::array();
    for (std::size_t i = 0; i < repeats; ++i) {
        ExperimentConfig cfg = base;
        cfg.seed = base.seed + i;
        if (base.validation_seed) cfg.validation_seed = *base.validation_seed + i;
        std::cerr << "[synth] " << cfg.name << " seed " << cfg.seed << " N=" << cfg.n << '\n';
        const RunReport r = run_experiment(cfg);
        const fs::path dir = root / (cfg.name + "-seed" + std::to_string(cfg.seed));
        const json rep = report_to_json(r);
        write_json(dir / "report.json", rep);
        write_json(dir / "theta.json", json{{"network", cfg.network.hidden}, {"theta", r.synthesis.theta}});
        std::cerr << "[synth]   R_N=" << r.synthesis.discarded.size() << " eps=" << fmt(r.epsilon)
                  << " cert_risk=" << fmt(r.validation.cert_rate()) << " prop_risk=" << fmt(r.validation.prop_rate())
                  << " certified=" << (r.certified() ? "yes" : "no") << " time=" << fmt(r.wall_time_s) << "s\n";
        for (const auto& w : r.warnings) std::cerr << "[synth]   warning: " << w << '\n';
        all_certified = all_certified && r.certified();
        eps.push_back(r.epsilon);
        rn.push_back(static_cast<double>(r.synthesis.discarded.size()));
        cert.push_back(r.validation.cert_rate());
        prop.push_back(r.validation.prop_rate());
        secs.push_back(r.wall_time_s);
        runs.push_back({{"seed", cfg.seed}, {"report", (dir / "report.json").string()}, {"certified", r.certified()}});
    }
    auto ms = [](const std::vector<double>& v) {
        const MeanStd m = mean_std(v);
        return json{{"mean", m.mean}, {"std", m.std}};
    };
    const json summary = {{"name", base.name},
                          {"repeats", repeats},
                          {"runs", runs},
                          {"epsilon", ms(eps)},
                          {"R_N", ms(rn)},
                          {"cert_risk", ms(cert)},
                          {"prop_risk", ms(prop)},
                          {"wall_time_s", ms(secs)},
                          {"all_certified", all_certified}};
    if (repeats > 1) write_json(root / (base.name + "-summary.json"), summary);
    std::cout << summary.dump(2) << '\n';
    return all_certified ? 0 : kExitNotCertified;
}

// ---- bound ----

int cmd_bound(const std::string& kind, std::size_t k, double beta, std::size_t n) {
    double eps;
    if (kind == "compression") {
        eps = epsilon_compression(k, beta, n);
    } else if (kind == "direct") {
        eps = epsilon_direct(k, beta, n);
    } else {
        throw std::invalid_argument("--kind must be 'compression' or 'direct'");
    }
    std::cout << fmt(eps) << '\n';
    return 0;
}

int cmd_bound_table(const std::string& ns, std::size_t k, double beta, const std::string& out) {
    std::ofstream file;
    std::ostream& os = open_output(out, file);
    os << "N,eps_compression,eps_direct\n";
    for (const auto& row : bound_comparison_table(beta, parse_list(ns), k)) {
        os << row.n << ',' << fmt(row.eps_compression) << ',' << fmt(row.eps_direct) << '\n';
    }
    return 0;
}

// ---- validate ----

struct LoadedRun {
    ExperimentConfig config;
    ParamVector theta;
};

LoadedRun load_run(const std::string& path) {
    const json j = read_json(path);
    if (!j.contains("config") || !j.contains("theta")) throw std::runtime_error(path + " is not a run report");
    LoadedRun r;
    r.config = config_from_json(j.at("config"));
    r.theta = j.at("theta").get<ParamVector>();
    if (r.theta.size() != r.config.network.param_count()) throw std::runtime_error("theta size does not match the network");
    return r;
}

int cmd_validate(const std::string& run, std::size_t m, std::optional<std::uint64_t> seed) {
    LoadedRun r = load_run(run);
    const std::uint64_t s = seed.value_or(r.config.effective_validation_seed());
    if (s == r.config.seed) throw std::invalid_argument("validation seed must differ from the training seed");
    LossModel model(r.config.property, r.config.network);
    const ValidationReport v = empirical_risks(model, r.theta, r.config.make_system(), r.config.property.initial, m, s);
    std::cout << validation_to_json(v).dump(2) << '\n';
    return 0;
}

// ---- export-surface ----

int cmd_export_surface(const std::string& run, std::size_t res, const std::string& out, const std::string& markers) {
    LoadedRun r = load_run(run);
    const PropertySpec& p = r.config.property;
    if (p.dim() != 2) throw std::invalid_argument("export-surface needs a 2-dimensional system, got dimension " + std::to_string(p.dim()));
    if (res < 2) throw std::invalid_argument("--resolution must be >= 2");
    Certificate cert(r.config.network);
    const auto lo = p.domain.bbox_low(), hi = p.domain.bbox_high();
    auto coord = [&](std::size_t axis, std::size_t i) {
        return i + 1 == res ? hi[axis] : lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) / static_cast<double>(res - 1);
    };
    std::vector<double> v(res * res);
    std::ofstream file;
    std::ostream& os = open_output(out, file);
    os << "x1,x2,V\n";
    for (std::size_t i = 0; i < res; ++i) {
        for (std::size_t j = 0; j < res; ++j) {
            const double x[2] = {coord(0, i), coord(1, j)};
            v[i * res + j] = cert.eval(r.theta, x);
            os << fmt(x[0]) << ',' << fmt(x[1]) << ',' << fmt(v[i * res + j]) << '\n';
        }
    }
    if (!markers.empty()) {
        // Linear interpolation of level crossings along grid edges.
        std::ofstream mf;
        std::ostream& ms = open_output(markers, mf);
        ms << "level,x1,x2\n";
        for (double level : {0.0, -p.delta}) {
            for (std::size_t i = 0; i < res; ++i) {
                for (std::size_t j = 0; j < res; ++j) {
                    const double a = v[i * res + j] - level;
                    if (j + 1 < res) {
                        const double b = v[i * res + j + 1] - level;
                        if ((a < 0.0) != (b < 0.0)) {
                            const double t = a / (a - b);
                            ms << fmt(level) << ',' << fmt(coord(0, i)) << ','
                               << fmt(coord(1, j) + t * (coord(1, j + 1) - coord(1, j))) << '\n';
                        }
                    }
                    if (i + 1 < res) {
                        const double b = v[(i + 1) * res + j] - level;
                        if ((a < 0.0) != (b < 0.0)) {
                            const double t = a / (a - b);
                            ms << fmt(level) << ',' << fmt(coord(0, i) + t * (coord(0, i + 1) - coord(0, i))) << ','
                               << fmt(coord(1, j)) << '\n';
                        }
                    }
                }
            }
        }
    }
    return 0;
}

// ---- compare-bounds ----

int cmd_compare_bounds(const ConfigArgs& ca, const std::string& ns, const std::string& out) {
    ExperimentConfig base = ca.load();
    std::ofstream file;
    std::ostream& os = open_output(out, file);
    os << "N,R_N,eps_compression,direct_violations,eps_direct\n";
    bool all_certified = true;
    for (std::size_t n : parse_list(ns)) {
        ExperimentConfig cfg = base;
        cfg.n = n;
        cfg.validation_m = 0;
        std::cerr << "[compare-bounds] N=" << n << '\n';
        const RunReport r = run_experiment(cfg);
        all_certified = all_certified && r.certified();
        os << n << ',' << r.synthesis.discarded.size() << ',' << fmt(r.epsilon) << ',' << r.direct_count << ','
           << fmt(r.epsilon_direct) << '\n'
           << std::flush;
    }
    return all_certified ? 0 : kExitNotCertified;
}

// ---- simulate ----

int cmd_simulate(const ConfigArgs& ca, std::size_t count, std::optional<std::uint64_t> seed, const std::string& out) {
    const ExperimentConfig cfg = ca.load();
    const System sys = cfg.make_system();
    const SamplingDistribution dist{cfg.property.initial, seed.value_or(cfg.seed), streams::training};
    const auto trajs = sample_trajectories(sys, dist, count, cfg.property.horizon);
    std::ofstream file;
    std::ostream& os = open_output(out, file);
    os << "sample,k";
    for (std::size_t d = 0; d < sys.dim(); ++d) os << ",x" << d + 1;
    os << ",property\n";
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const int ok = check_property(cfg.property, trajs[i]) ? 1 : 0;
        for (std::size_t k = 0; k <= trajs[i].horizon; ++k) {
            os << i << ',' << k;
            for (double x : trajs[i].state(k)) os << ',' << fmt(x);
            os << ',' << ok << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Data-driven neural certificates with compression-based risk bounds"};
    app.require_subcommand(1);
    int rc = 0;

    ConfigArgs synth_cfg;
    std::size_t repeats = 1;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "synthesize a certificate and write a run report");
    synth_cfg.attach(synth);
    synth->add_option("--repeats", repeats, "independent runs with consecutive seeds")->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "output directory (default $DDCERT_OUT or ./runs)");

    std::string kind = "compression", ns, bound_out;
    std::size_t k = 0, n = 1000;
    double beta = 1e-5;
    bool table = false;
    auto* bound = app.add_subcommand("bound", "risk level for a compression size or discard count");
    bound->add_option("--kind", kind, "compression or direct");
    bound->add_option("--k", k, "compression cardinality or violation count");
    bound->add_option("--beta", beta, "confidence parameter");
    bound->add_option("--n", n, "sample count");
    bound->add_flag("--table", table, "emit N,eps_compression,eps_direct CSV over --ns");
    bound->add_option("--ns", ns, "comma-separated N values for --table")->default_val("100,250,500,1000,2000");
    bound->add_option("--out", bound_out, "CSV path (default stdout)");

    std::string run_path;
    std::size_t m = 1000;
    std::optional<std::uint64_t> val_seed;
    auto* validate = app.add_subcommand("validate", "empirical risks of a stored certificate on fresh samples");
    validate->add_option("--run", run_path, "run report JSON")->required();
    validate->add_option("--m", m, "number of fresh trajectories");
    validate->add_option("--seed", val_seed, "validation seed");

    std::string surf_run, surf_out, surf_markers;
    std::size_t res = 101;
    auto* surface = app.add_subcommand("export-surface", "CSV of V over a grid of a 2-D domain");
    surface->add_option("--run", surf_run, "run report JSON")->required();
    surface->add_option("--resolution", res, "points per axis");
    surface->add_option("--out", surf_out, "CSV path (default stdout)");
    surface->add_option("--markers", surf_markers, "CSV of level-set crossings at 0 and -delta");

    ConfigArgs cmp_cfg;
    std::string cmp_ns = "100,250,500,1000", cmp_out;
    auto* compare = app.add_subcommand("compare-bounds", "compression versus direct bound across N");
    cmp_cfg.attach(compare);
    compare->add_option("--ns", cmp_ns, "comma-separated N values");
    compare->add_option("--out", cmp_out, "CSV path (default stdout)");

    ConfigArgs sim_cfg;
    std::size_t count = 10;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "sample trajectories to CSV");
    sim_cfg.attach(simulate);
    simulate->add_option("--count", count, "number of trajectories");
    simulate->add_option("--seed", sim_seed, "sampling seed");
    simulate->add_option("--out", sim_out, "CSV path (default stdout)");

    auto* presets = app.add_subcommand("presets", "list presets or print one as JSON");
    std::string show;
    presets->add_option("name", show, "preset to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*synth) {
            if (synth_cfg.preset.empty() && synth_cfg.file.empty()) synth_cfg.preset = "spiral-safe";
            rc = cmd_synth(synth_cfg, repeats, synth_out);
        } else if (*bound) {
            rc = table ? cmd_bound_table(ns, k, beta, bound_out) : cmd_bound(kind, k, beta, n);
        } else if (*validate) {
            rc = cmd_validate(run_path, m, val_seed);
        } else if (*surface) {
            rc = cmd_export_surface(surf_run, res, surf_out, surf_markers);
        } else if (*compare) {
            if (cmp_cfg.preset.empty() && cmp_cfg.file.empty()) cmp_cfg.preset = "spiral-safe";
            rc = cmd_compare_bounds(cmp_cfg, cmp_ns, cmp_out);
        } else if (*simulate) {
            if (sim_cfg.preset.empty() && sim_cfg.file.empty()) sim_cfg.preset = "spiral-safe";
            rc = cmd_simulate(sim_cfg, count, sim_seed, sim_out);
        } else if (*presets) {
            if (show.empty()) {
                for (const auto& p : preset_names()) std::cout << p << '\n';
            } else {
                std::cout << preset_json(show).dump(2) << '\n';
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return rc;
}
