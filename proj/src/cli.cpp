#include "beamgraph/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"

#include "beamgraph/errors.hpp"
#include "beamgraph/matching.hpp"
#include "beamgraph/random_graph.hpp"
#include "beamgraph/scenario.hpp"
#include "beamgraph/text.hpp"

namespace beamgraph::cli {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static auto log = [] {
        auto l = spdlog::stderr_color_mt("beamsim");
        l->set_pattern("[%l] %v");
        l->set_level(spdlog::level::warn);
        if (const char* env = std::getenv("BEAMGRAPH_LOG")) {
            l->set_level(spdlog::level::from_str(env));
        }
        return l;
    }();
    return log;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory", dir);
    }
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing", path);
    }
    out << content;
    if (!out) {
        throw IoError("write failed", path);
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

Vec2 parse_area(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos) {
        throw ArgumentError("--area expects WIDTHxHEIGHT in metres, got '" + s + "'");
    }
    auto w = text::parse_double(std::string_view(s).substr(0, x));
    auto h = text::parse_double(std::string_view(s).substr(x + 1));
    if (!w || !h) {
        throw ArgumentError("--area expects WIDTHxHEIGHT in metres, got '" + s + "'");
    }
    return {*w, *h};
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

nlohmann::json optional_ratio(double num, double den) {
    if (den == 0.0) {
        return nullptr;
    }
    return num / den;
}

// Options shared by run/compare/sweep.
struct ScenarioArgs {
    std::string trace;
    std::string gnbs;
    std::string config;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;

    void attach(CLI::App* app) {
        app->add_option("--trace", trace, "Trace CSV (time_s,vehicle_id,x_m,y_m)")->required();
        app->add_option("--gnbs", gnbs, "gNB CSV (gnb_id,x_m,y_m)")->required();
        app->add_option("--config", config, "Flat key = value config file");
        app->add_option("--set", overrides, "Config override key=value (repeatable)");
        app->add_option("--seed", seed, "Channel seed");
    }

    Config load() const {
        Config c = config.empty() ? Config{} : load_config(config);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            }
            c.set(text::trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
        }
        c.validate();
        return c;
    }
};

struct LoadedScenario {
    Trace trace;
    std::vector<GnbSite> gnbs;
    ZoneGrid grid;
};

LoadedScenario load_scenario(const ScenarioArgs& args, const Config& config) {
    LoadedScenario s;
    s.trace = load_trace(args.trace, config.epoch);
    s.gnbs = load_gnbs(args.gnbs);
    s.grid = resolve_grid(config, s.trace, s.gnbs);
    return s;
}

struct TimedRun {
    RunMetrics metrics;
    double wall_time = 0.0;
};

TimedRun timed_run(const LoadedScenario& s, const Config& config, Method method, std::uint64_t seed,
                   const RunOptions& options = {}) {
    const auto start = std::chrono::steady_clock::now();
    TimedRun r;
    r.metrics = run(s.trace, s.gnbs, s.grid, config, method, seed, options);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    logger()->info("{} run: {} epochs, {:.6g} bits, {}/{} vehicles served, {:.3f} s", to_string(method),
                   r.metrics.epochs, r.metrics.total_data, r.metrics.served_vehicles, r.metrics.n_vehicles,
                   r.wall_time);
    return r;
}

nlohmann::json grid_to_json(const ZoneGrid& g) {
    return {{"origin", {g.origin.x, g.origin.y}}, {"zone_size", g.zone_size}, {"n_x", g.n_x}, {"n_y", g.n_y}};
}

void write_cdfs(const std::string& dir, const RunMetrics& m) {
    auto put = [&](const char* name, std::span<const double> v) {
        std::ostringstream os;
        write_cdf_csv(os, v);
        write_text(join(dir, name), os.str());
    };
    put("sinr_cdf.csv", m.sinr_db);
    put("rate_cdf.csv", m.effective_rate);
    put("beam_users_cdf.csv", m.beam_users);
    put("served_time_cdf.csv", m.served_time);
}

int cmd_gen(const std::string& area, const SyntheticParams& base, const std::string& out_dir, std::ostream& out) {
    SyntheticParams p = base;
    const Vec2 wh = parse_area(area);
    p.width = wh.x;
    p.height = wh.y;
    auto scenario = generate_synthetic(p);
    ensure_dir(out_dir);
    save_trace(join(out_dir, "trace.csv"), scenario.trace);
    save_gnbs(join(out_dir, "gnbs.csv"), scenario.gnbs);
    out << "wrote " << join(out_dir, "trace.csv") << " (" << scenario.trace.records.size() << " records) and "
        << join(out_dir, "gnbs.csv") << " (" << scenario.gnbs.size() << " gNBs)\n";
    return kOk;
}

int cmd_run(const ScenarioArgs& args, const std::string& method_name, const std::string& out_dir, bool slot_log,
            bool timing, std::ostream& out) {
    const Config config = args.load();
    const Method method = parse_method(method_name);
    const auto scenario = load_scenario(args, config);
    ensure_dir(out_dir);

    std::ofstream log_file;
    RunOptions options;
    if (slot_log) {
        const auto path = join(out_dir, "slot_log.csv");
        log_file.open(path, std::ios::binary | std::ios::trunc);
        if (!log_file) {
            throw IoError("cannot open file for writing", path);
        }
        options.slot_log = &log_file;
    }
    const auto r = timed_run(scenario, config, method, args.seed, options);

    auto report = run_report({args.trace, args.gnbs, config, method, args.seed}, scenario.grid, r.metrics);
    if (timing) {
        report["wall_time_s"] = r.wall_time;
    }
    write_json(join(out_dir, "report.json"), report);
    std::ostringstream echo;
    write_config(echo, config);
    write_text(join(out_dir, "config.echo"), echo.str());
    write_cdfs(out_dir, r.metrics);
    out << to_string(method) << ": total_data=" << text::format_double(r.metrics.total_data)
        << " bits, served=" << r.metrics.served_vehicles << "/" << r.metrics.n_vehicles << "\n";
    return kOk;
}

nlohmann::json compare_once(const ScenarioArgs& args, const Config& config, bool timing) {
    const auto scenario = load_scenario(args, config);
    const auto a = timed_run(scenario, config, Method::cawbm, args.seed);
    const auto b = timed_run(scenario, config, Method::dbscan, args.seed);
    auto ja = run_report({args.trace, args.gnbs, config, Method::cawbm, args.seed}, scenario.grid, a.metrics);
    auto jb = run_report({args.trace, args.gnbs, config, Method::dbscan, args.seed}, scenario.grid, b.metrics);
    if (timing) {
        ja["wall_time_s"] = a.wall_time;
        jb["wall_time_s"] = b.wall_time;
    }
    return compare_report(ja, jb, a.metrics, b.metrics);
}

int cmd_compare(const ScenarioArgs& args, const std::string& out_dir, bool timing, std::ostream& out) {
    const Config config = args.load();
    const auto j = compare_once(args, config, timing);
    ensure_dir(out_dir);
    write_json(join(out_dir, "compare.json"), j);
    out << "data_ratio=" << j["data_ratio"].dump() << " served_delta=" << j["served_delta"].dump() << "\n";
    return kOk;
}

int cmd_sweep(const ScenarioArgs& args, const std::string& key, const std::vector<std::string>& values,
              const std::string& out_dir, std::ostream& out) {
    const Config base = args.load();
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& v : values) {
        Config c = base;
        c.set(key, v);
        c.validate();
        auto j = compare_once(args, c, false);
        nlohmann::json cell;
        cell["value"] = v;
        cell["cawbm_total_data"] = j["cawbm"]["metrics"]["total_data"];
        cell["dbscan_total_data"] = j["dbscan"]["metrics"]["total_data"];
        cell["cawbm_served_fraction"] = j["cawbm"]["metrics"]["served_fraction"];
        cell["dbscan_served_fraction"] = j["dbscan"]["metrics"]["served_fraction"];
        cell["data_ratio"] = j["data_ratio"];
        cell["served_delta"] = j["served_delta"];
        cells.push_back(cell);
        out << key << "=" << v << " data_ratio=" << j["data_ratio"].dump() << "\n";
    }
    ensure_dir(out_dir);
    write_json(join(out_dir, "sweep.json"), {{"parameter", key}, {"seed", args.seed}, {"cells", cells}});
    return kOk;
}

int cmd_oracle(int instances, std::uint64_t seed, const RandomGraphParams& params, int limit,
               const std::string& out_dir, std::ostream& out) {
    if (params.max_candidates > limit) {
        throw SizeError("--max-candidates " + std::to_string(params.max_candidates) + " exceeds the exact limit " +
                        std::to_string(limit));
    }
    if (instances < 0) {
        throw ArgumentError("--instances must be >= 0");
    }
    nlohmann::json rows = nlohmann::json::array();
    int violations = 0;
    double min_ratio = 1.0;
    double min_ratio_cf = 1.0;
    int n_cf = 0;
    for (int i = 0; i < instances; ++i) {
        const std::uint64_t inst_seed = seed * 1000003ULL + static_cast<std::uint64_t>(i);
        const auto inst = random_instance(params, inst_seed);
        const auto g = greedy_match(inst.graph, inst.max_beams, inst.comp_limit);
        const auto e = exact_match(inst.graph, inst.max_beams, inst.comp_limit, limit);
        const bool g_ok = check_feasible(g, inst.graph, inst.max_beams, inst.comp_limit).ok();
        const bool e_ok = check_feasible(e, inst.graph, inst.max_beams, inst.comp_limit).ok();
        const bool maximal = addable_edges(g, inst.graph, inst.max_beams, inst.comp_limit).empty();
        const bool dominance = e.total_weight >= g.total_weight;
        const double ratio = e.total_weight > 0.0 ? g.total_weight / e.total_weight : 1.0;
        const bool cf = inst.conflict_free && inst.comp_limit == 1;
        if (!g_ok || !e_ok || !maximal || !dominance || (cf && ratio < 0.5)) {
            ++violations;
        }
        min_ratio = std::min(min_ratio, ratio);
        if (cf) {
            ++n_cf;
            min_ratio_cf = std::min(min_ratio_cf, ratio);
        }
        rows.push_back({{"seed", inst_seed},
                        {"candidates", inst.graph.candidates.size()},
                        {"zones", inst.graph.zones.size()},
                        {"edges", inst.graph.edges.size()},
                        {"max_beams", inst.max_beams},
                        {"comp_limit", inst.comp_limit},
                        {"conflict_free", inst.conflict_free},
                        {"greedy", g.total_weight},
                        {"exact", e.total_weight},
                        {"ratio", ratio},
                        {"greedy_feasible", g_ok},
                        {"exact_feasible", e_ok},
                        {"greedy_maximal", maximal}});
    }
    nlohmann::json j;
    j["instances"] = instances;
    j["seed"] = seed;
    j["violations"] = violations;
    j["min_ratio"] = min_ratio;
    j["conflict_free_l1_instances"] = n_cf;
    j["min_ratio_conflict_free_l1"] = n_cf > 0 ? nlohmann::json(min_ratio_cf) : nlohmann::json(nullptr);
    j["results"] = rows;
    ensure_dir(out_dir);
    write_json(join(out_dir, "oracle.json"), j);
    out << "instances=" << instances << " violations=" << violations << " min_ratio=" << text::format_double(min_ratio)
        << "\n";
    return kOk;
}

}  // namespace

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::vector<std::pair<double, double>> rows;
    const auto n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i + 1 < values.size() && values[i + 1] == values[i]) {
            continue;
        }
        rows.emplace_back(values[i], static_cast<double>(i + 1) / n);
    }
    return rows;
}

void write_cdf_csv(std::ostream& out, std::span<const double> values) {
    out << "value,cdf\n";
    for (auto [v, p] : empirical_cdf({values.begin(), values.end()})) {
        out << text::format_double(v) << ',' << text::format_double(p) << '\n';
    }
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
    nlohmann::json j;
    j["total_data"] = m.total_data;
    j["n_vehicles"] = m.n_vehicles;
    j["served_vehicles"] = m.served_vehicles;
    j["served_fraction"] = m.served_fraction;
    j["epochs"] = m.epochs;
    j["slots_per_epoch"] = m.slots_per_epoch;
    j["out_of_grid"] = m.out_of_grid;
    j["median_served_time"] = median(m.served_time);
    j["beam_samples"] = m.beam_users.size();
    j["vehicles"] = nlohmann::json::array();
    for (const auto& v : m.vehicles) {
        j["vehicles"].push_back({{"id", v.vehicle_id},
                                 {"data", v.data},
                                 {"served_time", v.served_time},
                                 {"sinr_samples", v.sinr_samples},
                                 {"mean_sinr_db", v.mean_sinr_db ? nlohmann::json(*v.mean_sinr_db) : nullptr}});
    }
    return j;
}

nlohmann::json run_report(const RunInputs& in, const ZoneGrid& grid, const RunMetrics& metrics) {
    nlohmann::json j;
    j["tool"] = {{"name", "beamsim"}, {"version", kVersion}};
    j["method"] = to_string(in.method);
    j["seed"] = in.seed;
    j["inputs"] = {{"trace", in.trace_path}, {"gnbs", in.gnbs_path}};
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : config_entries(in.config)) {
        cfg[k] = v;
    }
    j["config"] = cfg;
    j["grid"] = grid_to_json(grid);
    j["metrics"] = metrics_to_json(metrics);
    return j;
}

nlohmann::json compare_report(const nlohmann::json& cawbm, const nlohmann::json& dbscan, const RunMetrics& a,
                              const RunMetrics& b) {
    nlohmann::json j;
    j["cawbm"] = cawbm;
    j["dbscan"] = dbscan;
    j["data_ratio"] = optional_ratio(a.total_data, b.total_data);
    j["served_delta"] = (a.n_vehicles > 0 && b.n_vehicles > 0)
                            ? nlohmann::json(a.served_fraction - b.served_fraction)
                            : nlohmann::json(nullptr);
    return j;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Beam design and zone association for mmwave vehicular networks", "beamsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic Manhattan-grid scenario");
    std::string area = "1000x1000";
    SyntheticParams synth;
    std::string gen_out;
    gen->add_option("--area", area, "WIDTHxHEIGHT in metres");
    gen->add_option("--vehicles", synth.n_vehicles, "Number of vehicles");
    gen->add_option("--gnbs", synth.n_gnbs, "Number of gNBs");
    gen->add_option("--horizon", synth.horizon, "Horizon, s");
    gen->add_option("--step", synth.step, "Sampling step, s");
    gen->add_option("--speed", synth.speed, "Vehicle speed, m/s");
    gen->add_option("--block", synth.block_size, "Street spacing, m");
    gen->add_option("--seed", synth.seed, "Mobility seed");
    gen->add_option("-o,--out", gen_out, "Output directory")->required();

    // run
    auto* run_cmd = app.add_subcommand("run", "Simulate one beam-design method");
    ScenarioArgs run_args;
    run_args.attach(run_cmd);
    std::string method = "cawbm";
    std::string run_out;
    bool slot_log = false;
    bool run_timing = false;
    run_cmd->add_option("--method", method, "cawbm or dbscan");
    run_cmd->add_option("-o,--out", run_out, "Output directory")->required();
    run_cmd->add_flag("--slot-log", slot_log, "Write slot_log.csv");
    run_cmd->add_flag("--timing", run_timing, "Include wall time in the report");

    // compare
    auto* cmp = app.add_subcommand("compare", "Run CAWBM and DBSCAN on the same scenario");
    ScenarioArgs cmp_args;
    cmp_args.attach(cmp);
    std::string cmp_out;
    bool cmp_timing = false;
    cmp->add_option("-o,--out", cmp_out, "Output directory")->required();
    cmp->add_flag("--timing", cmp_timing, "Include wall times");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Compare both methods across values of one config key");
    ScenarioArgs sweep_args;
    sweep_args.attach(sweep);
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    std::string sweep_out;
    sweep->add_option("--param", sweep_key, "Config key")->required();
    sweep->add_option("--values", sweep_values, "Values")->required()->delimiter(';');
    sweep->add_option("-o,--out", sweep_out, "Output directory")->required();

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Validate greedy against the exhaustive matcher");
    int instances = 100;
    std::uint64_t oracle_seed = 0;
    RandomGraphParams rg;
    int limit = 20;
    std::string oracle_out;
    oracle->add_option("--instances", instances, "Number of random graphs");
    oracle->add_option("--seed", oracle_seed, "Base seed");
    oracle->add_option("--max-candidates", rg.max_candidates, "Candidates per graph (upper bound)");
    oracle->add_option("--max-zones", rg.max_zones, "Zones per graph (upper bound)");
    oracle->add_option("--limit", limit, "Exact matcher size cap");
    oracle->add_option("-o,--out", oracle_out, "Output directory")->required();

    std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream ee;
        const int code = app.exit(e, o, ee);
        out << o.str();
        err << ee.str();
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (gen->parsed()) {
            return cmd_gen(area, synth, gen_out, out);
        }
        if (run_cmd->parsed()) {
            return cmd_run(run_args, method, run_out, slot_log, run_timing, out);
        }
        if (cmp->parsed()) {
            return cmd_compare(cmp_args, cmp_out, cmp_timing, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_args, sweep_key, sweep_values, sweep_out, out);
        }
        if (oracle->parsed()) {
            return cmd_oracle(instances, oracle_seed, rg, limit, oracle_out, out);
        }
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIo;
    } catch (const SizeError& e) {
        err << "size error: " << e.what() << "\n";
        return kSize;
    } catch (const Error& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace beamgraph::cli
