// Command-line front end: reproducible experiments over the rewriting
// engine, the reference models, rule discovery, the operational-network
// simulator and the merger model.  Every run writes its outputs plus a
// manifest.json capturing the resolved configuration, so reruns are
// byte-for-byte identical.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gna/discovery.hpp"
#include "gna/engine.hpp"
#include "gna/errors.hpp"
#include "gna/graph_algorithms.hpp"
#include "gna/merger.hpp"
#include "gna/models.hpp"
#include "gna/opnet.hpp"
#include "gna/rng.hpp"
#include "gna/serialize.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";
constexpr int kUsageExit = 64;

// Command-line problems that are not config-file problems: wrong flag
// combinations, missing required values.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json number_or_label(double v) {
    if (std::isfinite(v)) return json(v);
    if (std::isnan(v)) return json("nan");
    return json(v > 0 ? "inf" : "-inf");
}

// Collects output files for one run and writes them (plus the manifest)
// atomically into the --out directory.
class OutputDir {
public:
    explicit OutputDir(const std::string& dir) : dir_(dir) {
        if (dir_.empty()) throw UsageError("--out is required");
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec)
            throw gna::IoError("cannot create output directory '" + dir_ +
                               "': " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        gna::write_file_atomic(dir_ + "/" + name, content);
        names_.push_back(name);
    }

    void write_manifest(const std::string& subcommand, const json& config,
                        const json& seed) {
        json manifest;
        manifest["tool"] = "gna";
        manifest["version"] = kVersion;
        manifest["subcommand"] = subcommand;
        manifest["seed"] = seed;
        manifest["config"] = config;
        names_.push_back("manifest.json");
        manifest["outputs"] = names_;
        gna::write_file_atomic(dir_ + "/manifest.json", manifest.dump(2) + "\n");
    }

private:
    std::string dir_;
    std::vector<std::string> names_;
};

// Merges a JSON config file under explicitly passed flags: a config value
// applies only when the flag was not given on the command line.  Every
// supported key must be probed through has() so finish() can reject typos.
class ConfigMerger {
public:
    ConfigMerger(CLI::App* cmd, const std::string& path) : cmd_(cmd) {
        if (path.empty()) return;
        loaded_ = json::parse(gna::read_file(path), nullptr, false);
        if (loaded_.is_discarded())
            throw gna::ParseError("config file '" + path + "' is not valid JSON");
        if (!loaded_.is_object())
            throw gna::ConfigError("config file '" + path +
                                   "' must hold a JSON object");
        active_ = true;
    }

    bool has(const std::string& key) {
        known_.insert(key);
        if (!active_ || !loaded_.contains(key)) return false;
        // Keys without a same-named flag (e.g. "params") always apply.
        const CLI::Option* flag = cmd_->get_option_no_throw("--" + key);
        return flag == nullptr || flag->count() == 0;
    }

    const json& at(const std::string& key) const { return loaded_.at(key); }

    template <typename T>
    T get(const std::string& key) const {
        try {
            return loaded_.at(key).get<T>();
        } catch (const json::exception& ex) {
            throw gna::ConfigError("config key '" + key + "': " + ex.what());
        }
    }

    void finish() const {
        if (!active_) return;
        for (const auto& item : loaded_.items())
            if (!known_.count(item.key()))
                throw gna::ConfigError("unknown config key '" + item.key() + "'");
    }

private:
    CLI::App* cmd_;
    json loaded_;
    bool active_ = false;
    std::set<std::string> known_;
};

std::uint64_t require_seed(CLI::App* cmd, ConfigMerger& merge,
                           std::uint64_t seed_flag) {
    if (merge.has("seed")) return merge.get<std::uint64_t>("seed");
    if (cmd->count("--seed") == 0)
        throw UsageError("--seed is required for a stochastic run");
    return seed_flag;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
    std::string model;
    std::vector<std::string> param_flags;  // key=value
    std::size_t steps = 1000;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
    std::string format = "snapshot";
};

int run_simulate(CLI::App* cmd, SimulateOpts& o) {
    ConfigMerger merge(cmd, o.config_path);
    if (merge.has("model")) o.model = merge.get<std::string>("model");
    if (merge.has("steps")) o.steps = merge.get<std::size_t>("steps");
    if (merge.has("format")) o.format = merge.get<std::string>("format");
    std::map<std::string, double> params;
    if (merge.has("params")) {
        if (!merge.at("params").is_object())
            throw gna::ConfigError("config key 'params' must be an object");
        for (const auto& item : merge.at("params").items())
            params[item.key()] = item.value().get<double>();
    }
    for (const auto& kv : o.param_flags) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--param expects key=value, got '" + kv + "'");
        double value = 0.0;
        try {
            value = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw UsageError("--param '" + kv + "' has a non-numeric value");
        }
        params[kv.substr(0, eq)] = value;  // explicit flags beat the config file
    }
    const std::uint64_t seed = require_seed(cmd, merge, o.seed);
    merge.finish();
    if (o.model.empty()) throw UsageError("--model is required");
    if (o.format != "snapshot" && o.format != "csv")
        throw UsageError("--format must be 'snapshot' or 'csv'");

    // Resolve the full parameter set for the manifest.
    json resolved = json::object();
    {
        bool found = false;
        for (const auto& info : gna::model_registry()) {
            if (info.name != o.model) continue;
            found = true;
            for (const auto& spec : info.params) {
                auto it = params.find(spec.name);
                resolved[spec.name] = it == params.end() ? spec.def : it->second;
            }
        }
        if (!found) throw gna::ConfigError("unknown model '" + o.model + "'");
    }

    gna::Rng rng(seed);
    gna::GnaModel model = gna::build_model(o.model, params, rng);
    gna::Trajectory traj =
        gna::run(model.initial, model.extraction, model.replacement, o.steps, rng);

    OutputDir out(o.out);
    out.write("trajectory.txt", gna::serialize_trajectory(traj));
    out.write("final.snapshot", gna::serialize_snapshot(traj.final_config));
    if (o.format == "csv") {
        std::ostringstream csv;
        csv << "step,nodes,links\n";
        gna::TrajectoryCursor cursor(traj);
        csv << 0 << ',' << cursor.current().node_count() << ','
            << cursor.current().link_count() << "\n";
        while (!cursor.at_end()) {
            cursor.advance();
            csv << cursor.position() << ',' << cursor.current().node_count()
                << ',' << cursor.current().link_count() << "\n";
        }
        out.write("series.csv", csv.str());
    }

    json config;
    config["model"] = o.model;
    config["params"] = resolved;
    config["steps"] = o.steps;
    config["format"] = o.format;
    config["quiescent"] = traj.quiescent;
    config["steps_run"] = traj.step_count();
    out.write_manifest("simulate", config, json(seed));
    return 0;
}

// ---------------------------------------------------------------------------
// discover
// ---------------------------------------------------------------------------

struct DiscoverOpts {
    std::string input;
    std::size_t max_core = 16;
    std::size_t reconstruct_steps = 0;
    bool stochastic_table = false;
    bool strict_table = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
};

json fit_to_json(const gna::FamilyFit& fit) {
    json j;
    j["family"] = fit.family;
    j["params"] = fit.params;
    j["log_likelihood"] = number_or_label(fit.log_likelihood);
    j["score"] = number_or_label(fit.score);
    return j;
}

int run_discover(CLI::App* cmd, DiscoverOpts& o) {
    ConfigMerger merge(cmd, o.config_path);
    if (merge.has("input")) o.input = merge.get<std::string>("input");
    if (merge.has("max-core")) o.max_core = merge.get<std::size_t>("max-core");
    if (merge.has("reconstruct-steps"))
        o.reconstruct_steps = merge.get<std::size_t>("reconstruct-steps");
    if (merge.has("stochastic-table"))
        o.stochastic_table = merge.get<bool>("stochastic-table");
    if (merge.has("strict-table")) o.strict_table = merge.get<bool>("strict-table");
    std::uint64_t seed = 0;
    bool with_seed = false;
    if (o.reconstruct_steps > 0) {
        seed = require_seed(cmd, merge, o.seed);
        with_seed = true;
    } else {
        merge.has("seed");  // accept (and ignore) a configured seed
        if (cmd->count("--seed")) {
            seed = o.seed;
            with_seed = true;
        }
    }
    merge.finish();
    if (o.input.empty()) throw UsageError("--input is required");

    gna::Trajectory traj = gna::parse_trajectory(gna::read_file(o.input));
    gna::FitOptions fit;
    fit.max_core_for_likelihood = o.max_core;
    gna::DiscoveryResult result = gna::discover(traj, fit);

    json report;
    report["input"] = o.input;
    report["steps"] = traj.step_count();
    json counts;
    counts["pairs"] = result.data.pairs;
    counts["noop_events"] = result.data.noop_events;
    counts["skipped_disconnected"] = result.data.skipped_disconnected;
    counts["skipped_cores"] = result.data.skipped_cores;
    counts["expanded_events"] = result.data.expanded_events;
    counts["likelihood_events"] = result.data.likelihood_events;
    report["counts"] = counts;
    report["alphabet"] = result.data.alphabet;
    json histogram = json::object();
    for (const auto& [size, count] : result.data.core_size_histogram)
        histogram[std::to_string(size)] = count;
    report["core_size_histogram"] = histogram;
    json candidates = json::array();
    for (const auto& fit_result : result.candidates)
        candidates.push_back(fit_to_json(fit_result));
    report["candidates"] = candidates;
    report["winner"] = fit_to_json(result.winner);
    json table;
    table["patterns"] = result.data.table.entries().size();
    table["recorded_events"] = result.data.table.total_events();
    report["table"] = table;

    OutputDir out(o.out);
    if (o.reconstruct_steps > 0) {
        gna::Rng rng(seed);
        gna::ReconstructionOptions ro;
        ro.stochastic_table = o.stochastic_table;
        ro.identity_on_miss = !o.strict_table;
        gna::ReconstructionRun rec =
            gna::reconstruct(result, traj.initial, o.reconstruct_steps, rng, ro);
        json recon;
        recon["steps_requested"] = o.reconstruct_steps;
        recon["steps_run"] = rec.trajectory.step_count();
        recon["table_misses"] = rec.table_misses;
        recon["quiescent"] = rec.trajectory.quiescent;
        recon["distance"] = number_or_label(gna::score_reconstruction(result, rec));
        report["reconstruction"] = recon;
        out.write("reconstruction.txt", gna::serialize_trajectory(rec.trajectory));
    }
    out.write("report.json", report.dump(2) + "\n");

    json config;
    config["input"] = o.input;
    config["max-core"] = o.max_core;
    config["reconstruct-steps"] = o.reconstruct_steps;
    config["stochastic-table"] = o.stochastic_table;
    config["strict-table"] = o.strict_table;
    out.write_manifest("discover", config, with_seed ? json(seed) : json());
    return 0;
}

// ---------------------------------------------------------------------------
// opnet
// ---------------------------------------------------------------------------

struct OpnetOpts {
    std::string scenario;
    long long max_ticks = 10000;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
};

int run_opnet(CLI::App* cmd, OpnetOpts& o) {
    ConfigMerger merge(cmd, o.config_path);
    if (merge.has("scenario")) o.scenario = merge.get<std::string>("scenario");
    if (merge.has("max-ticks")) o.max_ticks = merge.get<long long>("max-ticks");
    const std::uint64_t seed = require_seed(cmd, merge, o.seed);
    merge.finish();
    if (o.scenario.empty()) throw UsageError("--scenario is required");
    if (o.max_ticks < 0) throw UsageError("--max-ticks must be >= 0");

    gna::OpState state(gna::load_scenario(o.scenario));
    gna::Rng rng(seed);
    std::ostringstream csv;
    csv << gna::op_metrics_csv_header() << "\n";
    csv << gna::op_metrics_csv_row(0, gna::op_metrics(state)) << "\n";
    while (state.clock() < o.max_ticks && !state.quiescent()) {
        state.tick(rng);
        csv << gna::op_metrics_csv_row(state.clock(), gna::op_metrics(state)) << "\n";
    }

    OutputDir out(o.out);
    out.write("metrics.csv", csv.str());
    out.write("final_state.txt", gna::serialize_opstate(state));

    json config;
    config["scenario"] = o.scenario;
    config["max-ticks"] = o.max_ticks;
    config["ticks_run"] = state.clock();
    config["quiescent"] = state.quiescent();
    out.write_manifest("opnet", config, json(seed));
    return 0;
}

// ---------------------------------------------------------------------------
// merger
// ---------------------------------------------------------------------------

struct MergerOpts {
    std::vector<double> w{1.0};
    std::vector<double> b{0.1};
    std::size_t runs = 10;
    std::size_t iterations = 200;
    std::size_t n = 50;
    std::size_t dims = 10;
    std::size_t within = 490;
    std::size_t between = 50;
    double separation = 3.0;
    double noise = 0.1;
    double dc = 0.5;
    bool shuffle = false;
    bool final_only = false;
    bool snapshots = false;
    std::uint64_t seed = 0;
    std::string out;
    std::string config_path;
};

int run_merger_cmd(CLI::App* cmd, MergerOpts& o) {
    ConfigMerger merge(cmd, o.config_path);
    if (merge.has("w")) o.w = merge.get<std::vector<double>>("w");
    if (merge.has("b")) o.b = merge.get<std::vector<double>>("b");
    if (merge.has("runs")) o.runs = merge.get<std::size_t>("runs");
    if (merge.has("iterations")) o.iterations = merge.get<std::size_t>("iterations");
    if (merge.has("n")) o.n = merge.get<std::size_t>("n");
    if (merge.has("dims")) o.dims = merge.get<std::size_t>("dims");
    if (merge.has("within")) o.within = merge.get<std::size_t>("within");
    if (merge.has("between")) o.between = merge.get<std::size_t>("between");
    if (merge.has("separation")) o.separation = merge.get<double>("separation");
    if (merge.has("noise")) o.noise = merge.get<double>("noise");
    if (merge.has("dc")) o.dc = merge.get<double>("dc");
    if (merge.has("shuffle")) o.shuffle = merge.get<bool>("shuffle");
    if (merge.has("final-only")) o.final_only = merge.get<bool>("final-only");
    if (merge.has("snapshots")) o.snapshots = merge.get<bool>("snapshots");
    const std::uint64_t seed = require_seed(cmd, merge, o.seed);
    merge.finish();
    if (o.w.empty() || o.b.empty())
        throw UsageError("at least one --w and one --b value are required");
    if (o.runs == 0) throw UsageError("--runs must be >= 1");

    gna::SweepOptions sweep;
    sweep.base.n_per_firm = o.n;
    sweep.base.dims = o.dims;
    sweep.base.within_ties = o.within;
    sweep.base.between_ties = o.between;
    sweep.base.center_separation = o.separation;
    sweep.base.noise_sd = o.noise;
    sweep.base.d_c = o.dc;
    sweep.base.iterations = o.iterations;
    sweep.base.shuffle_order = o.shuffle;
    for (double w : o.w)
        for (double b : o.b) sweep.conditions.push_back({w, b});
    sweep.runs = o.runs;
    sweep.seed = seed;
    sweep.record_series = !o.final_only;
    sweep.keep_final_states = o.snapshots;

    gna::SweepResult result = gna::run_sweep(sweep);

    std::ostringstream csv;
    csv << gna::sweep_csv_header() << "\n";
    for (const auto& row : result.rows) csv << gna::sweep_csv_row(row) << "\n";

    OutputDir out(o.out);
    out.write("sweep.csv", csv.str());
    if (o.snapshots)
        for (std::size_t task = 0; task < result.final_states.size(); ++task) {
            const std::size_t cond = task / o.runs;
            const std::size_t run = task % o.runs;
            out.write("final_c" + std::to_string(cond) + "_r" +
                          std::to_string(run) + ".merger",
                      gna::serialize_merger_state(result.final_states[task]));
        }

    json config;
    config["w"] = o.w;
    config["b"] = o.b;
    config["runs"] = o.runs;
    config["iterations"] = o.iterations;
    config["n"] = o.n;
    config["dims"] = o.dims;
    config["within"] = o.within;
    config["between"] = o.between;
    config["separation"] = o.separation;
    config["noise"] = o.noise;
    config["dc"] = o.dc;
    config["shuffle"] = o.shuffle;
    config["final-only"] = o.final_only;
    config["snapshots"] = o.snapshots;
    out.write_manifest("merger", config, json(seed));
    return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeOpts {
    std::string input;
    std::size_t x_min = 1;
    std::string out;
    std::string config_path;
};

int run_analyze(CLI::App* cmd, AnalyzeOpts& o) {
    ConfigMerger merge(cmd, o.config_path);
    if (merge.has("input")) o.input = merge.get<std::string>("input");
    if (merge.has("x-min")) o.x_min = merge.get<std::size_t>("x-min");
    merge.finish();
    if (o.input.empty()) throw UsageError("--input is required");

    const std::string text = gna::read_file(o.input);
    const std::string header = text.substr(0, text.find('\n'));
    std::ostringstream csv;
    std::string kind;
    if (header == "gna-snapshot v1") {
        kind = "snapshot";
        gna::GnaConfig cfg = gna::parse_snapshot(text);
        gna::SimpleGraph g = gna::undirected_view(cfg);
        std::vector<std::size_t> degrees;
        std::size_t max_degree = 0;
        double degree_sum = 0.0;
        for (std::size_t v = 0; v < g.n; ++v) {
            degrees.push_back(g.adj[v].size());
            max_degree = std::max(max_degree, g.adj[v].size());
            degree_sum += static_cast<double>(g.adj[v].size());
        }
        std::size_t components = 0;
        for (std::size_t label : gna::connected_components(g))
            components = std::max(components, label + 1);
        std::string gamma = "nan";
        try {
            char buf[64];
            auto res = std::to_chars(
                buf, buf + sizeof buf,
                gna::powerlaw_exponent_mle(degrees, o.x_min));
            gamma.assign(buf, res.ptr);
        } catch (const gna::DomainError&) {
        }
        csv << "nodes,links,components,largest_component,max_degree,mean_degree,gamma\n";
        csv << g.n << ',' << g.edge_count() << ',' << components << ','
            << (g.n ? gna::largest_component(g).size() : 0) << ',' << max_degree
            << ',' << (g.n ? degree_sum / static_cast<double>(g.n) : 0.0) << ','
            << gamma << "\n";
    } else if (header == "merger-state v1") {
        kind = "merger";
        gna::MergerState state = gna::parse_merger_state(text);
        gna::MergerMetrics m = gna::merger_metrics(state);
        auto fmt = [](double v) {
            char buf[64];
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        };
        csv << "cross_distance,turnover,conflict,ineffectiveness\n";
        csv << fmt(m.avg_cross_distance) << ',' << fmt(m.turnover) << ','
            << fmt(m.conflict) << ',' << fmt(m.ineffectiveness) << "\n";
    } else {
        throw gna::ParseError("unrecognized input format '" + header + "'");
    }

    OutputDir out(o.out);
    out.write("analysis.csv", csv.str());

    json config;
    config["input"] = o.input;
    config["x-min"] = o.x_min;
    config["kind"] = kind;
    out.write_manifest("analyze", config, json());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive-network workbench: rewriting engine, reference "
                 "models, rule discovery, operational networks and the "
                 "merger model"};
    app.require_subcommand(1);

    SimulateOpts sim_opts;
    CLI::App* sim = app.add_subcommand("simulate", "run a reference model");
    sim->add_option("--model", sim_opts.model,
                    "model name (see --list for the registry)");
    sim->add_option("--param", sim_opts.param_flags,
                    "model parameter as key=value (repeatable)");
    sim->add_option("--steps", sim_opts.steps, "maximum rewriting steps");
    sim->add_option("--seed", sim_opts.seed, "random seed");
    sim->add_option("--out", sim_opts.out, "output directory");
    sim->add_option("--config", sim_opts.config_path, "JSON config file");
    sim->add_option("--format", sim_opts.format,
                    "extra outputs: snapshot (default) or csv");
    bool list_models = false;
    sim->add_flag("--list", list_models, "list models and parameters, then exit");

    DiscoverOpts disc_opts;
    CLI::App* disc = app.add_subcommand(
        "discover", "fit rewriting mechanisms to a recorded trajectory");
    disc->add_option("--input", disc_opts.input, "trajectory file");
    disc->add_option("--max-core", disc_opts.max_core,
                     "largest core entering the likelihood");
    disc->add_option("--reconstruct-steps", disc_opts.reconstruct_steps,
                     "also rebuild a trajectory of this many steps");
    disc->add_flag("--stochastic-table", disc_opts.stochastic_table,
                   "sample replacement variants by frequency");
    disc->add_flag("--strict-table", disc_opts.strict_table,
                   "fail on replacement-table misses instead of keeping state");
    disc->add_option("--seed", disc_opts.seed, "random seed (reconstruction)");
    disc->add_option("--out", disc_opts.out, "output directory");
    disc->add_option("--config", disc_opts.config_path, "JSON config file");

    OpnetOpts op_opts;
    CLI::App* opn = app.add_subcommand("opnet",
                                       "run an operational-network scenario");
    opn->add_option("--scenario", op_opts.scenario, "scenario file");
    opn->add_option("--max-ticks", op_opts.max_ticks, "tick budget");
    opn->add_option("--seed", op_opts.seed, "random seed");
    opn->add_option("--out", op_opts.out, "output directory");
    opn->add_option("--config", op_opts.config_path, "JSON config file");

    MergerOpts mg_opts;
    CLI::App* mg = app.add_subcommand("merger", "merger-integration sweep");
    mg->add_option("--w", mg_opts.w, "within-firm concentration values");
    mg->add_option("--b", mg_opts.b, "between-firm concentration values");
    mg->add_option("--runs", mg_opts.runs, "runs per condition");
    mg->add_option("--iterations", mg_opts.iterations, "iterations per run");
    mg->add_option("--n", mg_opts.n, "individuals per firm");
    mg->add_option("--dims", mg_opts.dims, "cultural dimensions");
    mg->add_option("--within", mg_opts.within, "within-firm ties per firm");
    mg->add_option("--between", mg_opts.between, "between-firm ties per direction");
    mg->add_option("--separation", mg_opts.separation, "firm-center separation");
    mg->add_option("--noise", mg_opts.noise, "cultural noise sd");
    mg->add_option("--dc", mg_opts.dc, "acceptance half-distance");
    mg->add_flag("--shuffle", mg_opts.shuffle, "shuffle action order per iteration");
    mg->add_flag("--final-only", mg_opts.final_only,
                 "record only initial and final metrics");
    mg->add_flag("--snapshots", mg_opts.snapshots, "write final network states");
    mg->add_option("--seed", mg_opts.seed, "random seed");
    mg->add_option("--out", mg_opts.out, "output directory");
    mg->add_option("--config", mg_opts.config_path, "JSON config file");

    AnalyzeOpts an_opts;
    CLI::App* an = app.add_subcommand("analyze", "metrics over a saved state");
    an->add_option("--input", an_opts.input, "snapshot or merger-state file");
    an->add_option("--x-min", an_opts.x_min, "degree cutoff for the exponent fit");
    an->add_option("--out", an_opts.out, "output directory");
    an->add_option("--config", an_opts.config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }

    try {
        if (sim->parsed()) {
            if (list_models) {
                for (const auto& info : gna::model_registry()) {
                    std::cout << info.name << ": " << info.summary << "\n";
                    for (const auto& p : info.params)
                        std::cout << "  " << p.name << " (" << p.kind
                                  << ", default " << p.def << ", range [" << p.lo
                                  << ", " << p.hi << "])\n";
                }
                return 0;
            }
            return run_simulate(sim, sim_opts);
        }
        if (disc->parsed()) return run_discover(disc, disc_opts);
        if (opn->parsed()) return run_opnet(opn, op_opts);
        if (mg->parsed()) return run_merger_cmd(mg, mg_opts);
        if (an->parsed()) return run_analyze(an, an_opts);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsageExit;
    } catch (const gna::GnaError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
