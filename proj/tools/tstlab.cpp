// Command-line front end: bound evaluation, tracking-error simulation,
// parameter sweeps, and the driftless tail check. Every command is
// deterministic given its full flag set; stochastic commands require an
// explicit --seed (seeds are never read from the environment). Exit
// codes: 0 success, 2 hypothesis or validation failure, 3 I/O failure,
// 4 invalid-censoring experiment.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tstlab/bounds.hpp"
#include "tstlab/core_model.hpp"
#include "tstlab/montecarlo.hpp"
#include "tstlab/path_engine.hpp"
#include "tstlab/serialize.hpp"

namespace {

using nlohmann::json;
using namespace tstlab;

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative output paths may be redirected by TSTLAB_OUT_DIR. Input
// paths and absolute paths are used as given.
std::filesystem::path resolve_output_path(const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) {
        if (const char* dir = std::getenv("TSTLAB_OUT_DIR")) {
            if (*dir != '\0') path = std::filesystem::path(dir) / path;
        }
    }
    return path;
}

std::ofstream open_output(const std::string& p) {
    const std::filesystem::path path = resolve_output_path(p);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open output file: " + path.string());
    return os;
}

void finish_output(std::ostream& os, const std::string& label) {
    os.flush();
    if (!os) throw io_error("write failed: " + label);
}

void emit_json(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        finish_output(std::cout, "standard output");
    } else {
        std::ofstream os = open_output(out_path);
        os << j.dump(2) << '\n';
        finish_output(os, out_path);
    }
}

json load_json_file(const std::string& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw io_error("cannot open file: " + p);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(p + ": " + e.what());
    }
}

double parse_c(const std::string& text, double eps) {
    if (text == "auto") return optimal_c(eps);
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("--c must be a number or \"auto\", got \"" + text + "\"");
    return v;
}

double field_number(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number())
        throw std::invalid_argument(where + ": field \"" + key + "\" must be a number");
    return v.get<double>();
}

// ---------------------------------------------------------------- bounds

struct BoundsOpts {
    double l = 0.0, s = 0.0, eps = 0.0;
    std::string mode = "discrete";
    std::string variant = "printed";
    double q = 0.0;
    bool has_q = false;
    std::int64_t n = 0;
    bool has_n = false;
    std::string out;
};

int cmd_bounds(const BoundsOpts& o) {
    WalkParams p;
    p.l = o.l;
    p.s = o.s;
    p.eps = o.eps;
    p.mode = time_mode_from_string(o.mode);
    p.validate();
    const LowerBoundVariant variant = lower_bound_variant_from_string(o.variant);

    const bool discrete = p.mode == TimeMode::discrete;
    const double upper = discrete ? upper_bound_discrete(p) : upper_bound_brownian(p);
    double lower = 0.0;
    std::int64_t used_n = 0;
    if (o.has_n) {
        lower = discrete ? lower_bound_discrete(p, o.n, variant)
                         : lower_bound_brownian(p, o.n, variant);
        used_n = o.n;
    } else {
        const BestN best = best_n(p, variant);
        lower = best.value;
        used_n = best.n;
    }

    json result = {
        {"mode", to_string(p.mode)},
        {"upper", upper},
        {"lower", lower},
        {"lower_n", used_n},
        {"lower_n_source", o.has_n ? "given" : "best"},
        {"main_term", main_term(p)},
        {"lower_bound_variant", to_string(variant)},
    };
    if (o.has_q) result["regime_check"] = to_json(regime_check(p, o.q));

    json config = {
        {"l", o.l},         {"s", o.s},
        {"eps", o.eps},     {"mode", o.mode},
        {"lower_bound_variant", o.variant},
    };
    if (o.has_n) config["n"] = o.n;
    if (o.has_q) config["q"] = o.q;

    emit_json(make_envelope("bounds", std::move(config), std::move(result)), o.out);
    return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string config_path;
    double l = 100.0, s = 1.0, eps = 1.0;
    std::string mode = "discrete";
    double dt = 0.01;
    std::int64_t t_max = 0;
    std::string c_text = "auto";
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int threads = 0;
    bool no_bridge = false;
    std::string variant = "printed";
    std::string per_trial;
    std::string out;
};

// Config-file fields mirror the flags; explicitly passed flags win.
void apply_config_file(const CLI::App& cmd, SimulateOpts& o) {
    const json cfg = load_json_file(o.config_path);
    if (!cfg.is_object())
        throw std::invalid_argument(o.config_path + ": top level must be an object");
    const std::string where = o.config_path;
    for (const auto& [key, value] : cfg.items()) {
        try {
            if (key == "l") {
                if (cmd.count("--l") == 0) o.l = value.get<double>();
            } else if (key == "s") {
                if (cmd.count("--s") == 0) o.s = value.get<double>();
            } else if (key == "eps") {
                if (cmd.count("--eps") == 0) o.eps = value.get<double>();
            } else if (key == "mode") {
                if (cmd.count("--mode") == 0) o.mode = value.get<std::string>();
            } else if (key == "dt") {
                if (cmd.count("--dt") == 0) o.dt = value.get<double>();
            } else if (key == "t_max") {
                if (cmd.count("--t-max") == 0) o.t_max = value.get<std::int64_t>();
            } else if (key == "c") {
                if (cmd.count("--c") == 0)
                    o.c_text = value.is_string() ? value.get<std::string>() : value.dump();
            } else if (key == "trials") {
                if (cmd.count("--trials") == 0) o.trials = value.get<std::int64_t>();
            } else if (key == "seed") {
                if (cmd.count("--seed") == 0) {
                    o.seed = value.get<std::uint64_t>();
                    o.has_seed = true;
                }
            } else if (key == "threads") {
                if (cmd.count("--threads") == 0) o.threads = value.get<int>();
            } else if (key == "bridge_correction") {
                if (cmd.count("--no-bridge-correction") == 0)
                    o.no_bridge = !value.get<bool>();
            } else if (key == "lower_bound_variant") {
                if (cmd.count("--lower-bound-variant") == 0)
                    o.variant = value.get<std::string>();
            } else if (key == "per_trial") {
                if (cmd.count("--per-trial") == 0) o.per_trial = value.get<std::string>();
            } else if (key == "out") {
                if (cmd.count("--out") == 0) o.out = value.get<std::string>();
            } else {
                throw std::invalid_argument(where + ": unknown field \"" + key + "\"");
            }
        } catch (const json::exception& e) {
            throw std::invalid_argument(where + ": field \"" + key + "\": " + e.what());
        }
    }
}

int cmd_simulate(const CLI::App& cmd, SimulateOpts o) {
    if (!o.config_path.empty()) apply_config_file(cmd, o);
    if (!o.has_seed)
        throw std::invalid_argument(
            "simulate: a seed is required (--seed or \"seed\" in the config file)");

    WalkParams params;
    params.l = o.l;
    params.s = o.s;
    params.eps = o.eps;
    params.mode = time_mode_from_string(o.mode);
    params.dt = o.dt;
    params.t_max = o.t_max;
    params.validate();
    const EstimatorConfig est{parse_c(o.c_text, o.eps)};
    est.validate();

    RunOptions ro;
    ro.threads = o.threads;
    ro.bridge_correction = !o.no_bridge;
    ro.lower_bound_variant = lower_bound_variant_from_string(o.variant);

    // Open outputs before the run so an unwritable path fails fast.
    std::optional<std::ofstream> per_trial_os;
    if (!o.per_trial.empty()) per_trial_os.emplace(open_output(o.per_trial));

    std::vector<TrialOutcome> trials;
    const ExperimentSummary summary = run_experiment_collect(
        params, est, o.trials, o.seed, ro, per_trial_os ? &trials : nullptr);

    if (per_trial_os) {
        write_trials_csv(*per_trial_os, trials);
        finish_output(*per_trial_os, o.per_trial);
    }

    // The thread count is deliberately not echoed: output bytes are
    // independent of --threads.
    json config = {
        {"params", to_json(params)},
        {"c", est.c},
        {"c_input", o.c_text},
        {"trials", o.trials},
        {"seed", o.seed},
        {"bridge_correction", ro.bridge_correction},
        {"lower_bound_variant", to_string(ro.lower_bound_variant)},
    };
    emit_json(make_envelope("simulate", std::move(config), to_json(summary)), o.out);
    return summary.verdict == Verdict::invalid_censoring ? 4 : 0;
}

// ----------------------------------------------------------------- sweep

struct SweepOpts {
    std::string grid_file;
    std::string mode = "discrete";
    double dt = 0.01;
    std::int64_t t_max = 0;
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
    int threads = 0;
    bool no_bridge = false;
    std::string variant = "printed";
    std::string out;
};

std::vector<SweepPoint> parse_grid(const std::string& path) {
    const json g = load_json_file(path);
    if (!g.is_object() || !g.contains("rows") || !g["rows"].is_array())
        throw std::invalid_argument(path + ": expected an object with a \"rows\" array");
    std::vector<SweepPoint> points;
    for (std::size_t i = 0; i < g["rows"].size(); ++i) {
        const json& row = g["rows"][i];
        const std::string where = path + ": row " + std::to_string(i);
        if (!row.is_object()) throw std::invalid_argument(where + ": must be an object");
        SweepPoint p;
        try {
            p.l = field_number(row, "l", where);
            p.s = field_number(row, "s", where);
            p.eps = field_number(row, "eps", where);
        } catch (const json::out_of_range&) {
            throw std::invalid_argument(where + ": fields l, s, eps are required");
        }
        if (row.contains("c")) {
            const json& c = row["c"];
            if (c.is_string() && c.get<std::string>() == "auto")
                p.c_auto = true;
            else if (c.is_number())
                p.c = c.get<double>();
            else
                throw std::invalid_argument(where + ": \"c\" must be a number or \"auto\"");
        } else {
            p.c_auto = true;
        }
        for (const auto& [key, value] : row.items()) {
            (void)value;
            if (key != "l" && key != "s" && key != "eps" && key != "c")
                throw std::invalid_argument(where + ": unknown field \"" + key + "\"");
        }
        points.push_back(p);
    }
    return points;
}

int cmd_sweep(const SweepOpts& o) {
    const std::vector<SweepPoint> points = parse_grid(o.grid_file);
    WalkParams shared;
    shared.mode = time_mode_from_string(o.mode);
    shared.dt = o.dt;
    shared.t_max = o.t_max;

    RunOptions ro;
    ro.threads = o.threads;
    ro.bridge_correction = !o.no_bridge;
    ro.lower_bound_variant = lower_bound_variant_from_string(o.variant);

    std::optional<std::ofstream> out_os;
    if (!o.out.empty()) out_os.emplace(open_output(o.out));

    const std::vector<SweepRow> rows = sweep(points, shared, o.trials, o.seed, ro);
    std::ostream& os = out_os ? *out_os : std::cout;
    write_sweep_csv(os, rows);
    finish_output(os, o.out.empty() ? "standard output" : o.out);
    return 0;
}

// -------------------------------------------------------------- tailcheck

struct TailOpts {
    double h = 1.0;
    double s = 0.0;
    std::int64_t trials = 10000;
    std::uint64_t seed = 0;
    std::vector<double> checkpoints;
    double t_max = 1e6;
    int points_per_decade = 4;
    double dt0 = 0.01;
    double growth = 1.02;
    std::vector<double> trunc = {1.0, 10.0, 100.0};
    int threads = 0;
    std::string out;
};

int cmd_tailcheck(const TailOpts& o) {
    if (o.s != 0.0)
        throw std::invalid_argument("tailcheck: the reflection tail law requires zero drift; "
                                    "--s must be 0");
    const std::vector<double> cps =
        o.checkpoints.empty() ? default_tail_checkpoints(o.t_max, o.points_per_decade)
                              : o.checkpoints;
    TailCheckOptions topt;
    topt.dt0 = o.dt0;
    topt.growth = o.growth;
    topt.trunc_horizons = o.trunc;
    topt.threads = o.threads;
    const TailCheckResult result = tail_exponent_estimate(o.h, o.trials, cps, o.seed, topt);

    json config = {
        {"h", o.h},       {"s", o.s},
        {"trials", o.trials}, {"seed", o.seed},
        {"dt0", o.dt0},   {"growth", o.growth},
        {"trunc_horizons", o.trunc},
    };
    emit_json(make_envelope("tailcheck", std::move(config), to_json(result)), o.out);
    return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const hypothesis_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tracking-stopping-time laboratory: closed-form bounds and seeded "
                 "Monte Carlo for first-passage tracking on correlated walks"};
    app.require_subcommand(1);
    // Long-form help only: tailcheck owns "--h" for the crossing level.
    app.set_help_flag("--help", "Print this help message and exit");

    BoundsOpts b;
    CLI::App* bounds_cmd =
        app.add_subcommand("bounds", "Evaluate the tracking-error bracket in closed form");
    bounds_cmd->add_option("--l", b.l, "Crossing level l")->required();
    bounds_cmd->add_option("--s", b.s, "Drift per step s")->required();
    bounds_cmd->add_option("--eps", b.eps, "Observation noise scale epsilon")->required();
    bounds_cmd->add_option("--mode", b.mode, "Time mode: discrete or brownian")
        ->capture_default_str();
    bounds_cmd->add_option("--n", b.n, "Lower-bound cutoff n (default: best over 1 <= n < l/s)");
    bounds_cmd->add_option("--q", b.q, "Also report the two-regime scales at exponent q");
    bounds_cmd->add_option("--lower-bound-variant", b.variant, "printed or variance")
        ->capture_default_str();
    bounds_cmd->add_option("--out", b.out, "Write JSON here instead of standard output");

    SimulateOpts sim;
    CLI::App* sim_cmd =
        app.add_subcommand("simulate", "Monte Carlo tracking-error experiment with verdict");
    sim_cmd->add_option("--config", sim.config_path, "JSON config file (flags override it)");
    sim_cmd->add_option("--l", sim.l, "Crossing level l")->capture_default_str();
    sim_cmd->add_option("--s", sim.s, "Drift per step s")->capture_default_str();
    sim_cmd->add_option("--eps", sim.eps, "Observation noise scale epsilon")
        ->capture_default_str();
    sim_cmd->add_option("--mode", sim.mode, "Time mode: discrete or brownian")
        ->capture_default_str();
    sim_cmd->add_option("--dt", sim.dt, "Grid step (brownian mode)")->capture_default_str();
    sim_cmd->add_option("--t-max", sim.t_max, "Horizon cap in steps (0 = default)");
    sim_cmd->add_option("--c", sim.c_text, "Tracking coefficient, a number or \"auto\"")
        ->capture_default_str();
    sim_cmd->add_option("--trials", sim.trials, "Number of trials")->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "Master seed (required)");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = hardware)");
    sim_cmd->add_flag("--no-bridge-correction", sim.no_bridge,
                      "Disable within-step crossing refinement (brownian mode)");
    sim_cmd->add_option("--lower-bound-variant", sim.variant, "printed or variance")
        ->capture_default_str();
    sim_cmd->add_option("--per-trial", sim.per_trial, "Write per-trial CSV to this path");
    sim_cmd->add_option("--out", sim.out, "Write JSON here instead of standard output");

    SweepOpts sw;
    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Run a parameter grid and emit a CSV trend table");
    sweep_cmd->add_option("--grid-file", sw.grid_file, "JSON file with a \"rows\" array")
        ->required();
    sweep_cmd->add_option("--mode", sw.mode, "Time mode: discrete or brownian")
        ->capture_default_str();
    sweep_cmd->add_option("--dt", sw.dt, "Grid step (brownian mode)")->capture_default_str();
    sweep_cmd->add_option("--t-max", sw.t_max, "Horizon cap in steps (0 = default)");
    sweep_cmd->add_option("--trials", sw.trials, "Trials per row")->capture_default_str();
    sweep_cmd->add_option("--seed", sw.seed, "Master seed (required)")->required();
    sweep_cmd->add_option("--threads", sw.threads, "Worker threads (0 = hardware)");
    sweep_cmd->add_flag("--no-bridge-correction", sw.no_bridge,
                        "Disable within-step crossing refinement (brownian mode)");
    sweep_cmd->add_option("--lower-bound-variant", sw.variant, "printed or variance")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sw.out, "Write CSV here instead of standard output");

    TailOpts tl;
    CLI::App* tail_cmd = app.add_subcommand(
        "tailcheck", "Estimate the driftless passage-time survival exponent");
    tail_cmd->add_option("--h", tl.h, "Crossing level h")->capture_default_str();
    tail_cmd->add_option("--s", tl.s, "Drift; must be 0")->capture_default_str();
    tail_cmd->add_option("--trials", tl.trials, "Number of trials")->capture_default_str();
    tail_cmd->add_option("--seed", tl.seed, "Master seed (required)")->required();
    tail_cmd->add_option("--checkpoints", tl.checkpoints,
                         "Comma-separated survival checkpoints (default: log grid)")
        ->delimiter(',');
    tail_cmd->add_option("--t-max", tl.t_max, "Last checkpoint of the default grid")
        ->capture_default_str();
    tail_cmd->add_option("--points-per-decade", tl.points_per_decade,
                         "Density of the default checkpoint grid")
        ->capture_default_str();
    tail_cmd->add_option("--dt0", tl.dt0, "Initial grid step")->capture_default_str();
    tail_cmd->add_option("--growth", tl.growth, "Geometric grid growth factor")
        ->capture_default_str();
    tail_cmd->add_option("--trunc-horizons", tl.trunc,
                         "Truncation horizons for E[sqrt(tau); tau <= T]")
        ->delimiter(',');
    tail_cmd->add_option("--threads", tl.threads, "Worker threads (0 = hardware)");
    tail_cmd->add_option("--out", tl.out, "Write JSON here instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*bounds_cmd) {
        b.has_n = bounds_cmd->count("--n") > 0;
        b.has_q = bounds_cmd->count("--q") > 0;
        return guarded([&] { return cmd_bounds(b); });
    }
    if (*sim_cmd) {
        sim.has_seed = sim_cmd->count("--seed") > 0;
        return guarded([&] { return cmd_simulate(*sim_cmd, sim); });
    }
    if (*sweep_cmd) return guarded([&] { return cmd_sweep(sw); });
    if (*tail_cmd) return guarded([&] { return cmd_tailcheck(tl); });
    return 2;
}
