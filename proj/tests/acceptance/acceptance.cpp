// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Tolerances are fixed here.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "beamgraph/channel.hpp"
#include "beamgraph/cli.hpp"
#include "beamgraph/matching.hpp"
#include "beamgraph/random_graph.hpp"
#include "beamgraph/simulator.hpp"
#include "beamgraph/text.hpp"

namespace fs = std::filesystem;
using namespace beamgraph;

namespace {

constexpr int kOracleInstances = 1000;
constexpr double kOracleSeconds = 60.0;
constexpr int kCertifiedRuns = 50;
constexpr int kScenarios = 10;
constexpr int kDataWinsNeeded = 8;
constexpr int kServedTimeWinsNeeded = 7;
constexpr double kPairSeconds = 120.0;
constexpr double kPathLossTol = 0.01;  // dB
constexpr double kNoiseTol = 0.01;     // dBm
constexpr double kConservationRel = 1e-9;
constexpr int kConservationRuns = 5;
constexpr int kRepeats = 3;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << id << " " << name << ": " << detail << std::endl;
    if (!ok) {
        ++failures;
    }
}

struct City {
    SyntheticScenario s;
    ZoneGrid grid;
    Config config;
};

City city(std::uint64_t seed, int vehicles = 100, int gnbs = 10, double horizon = 20) {
    SyntheticParams p;
    p.width = 1000;
    p.height = 1000;
    p.n_vehicles = vehicles;
    p.n_gnbs = gnbs;
    p.horizon = horizon;
    p.seed = seed;
    City c{generate_synthetic(p), {}, {}};
    c.grid = resolve_grid(c.config, c.s.trace, c.s.gnbs);
    return c;
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void solver_oracle() {
    const auto t0 = Clock::now();
    const RandomGraphParams params;  // <= 12 candidates, <= 8 zones, N in 1..4, L in 1..2
    int infeasible = 0;
    int not_maximal = 0;
    int exact_below = 0;
    int oversized = 0;
    int cf = 0;
    int cf_below_half = 0;
    double cf_min = 1.0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const auto inst = random_instance(params, 1000 + i);
        const auto& g = inst.graph;
        if (candidates_with_edges(g) > 12 || g.zones.size() > 8) {
            ++oversized;
        }
        const auto gr = greedy_match(g, inst.max_beams, inst.comp_limit);
        const auto ex = exact_match(g, inst.max_beams, inst.comp_limit);
        if (!check_feasible(gr, g, inst.max_beams, inst.comp_limit).ok() ||
            !check_feasible(ex, g, inst.max_beams, inst.comp_limit).ok()) {
            ++infeasible;
        }
        if (!addable_edges(gr, g, inst.max_beams, inst.comp_limit).empty()) {
            ++not_maximal;
        }
        if (ex.total_weight < gr.total_weight) {
            ++exact_below;
        }
        if (inst.conflict_free) {
            ++cf;
            const auto g1 = greedy_match(g, inst.max_beams, 1);
            const auto e1 = exact_match(g, inst.max_beams, 1);
            const double ratio = e1.total_weight > 0 ? g1.total_weight / e1.total_weight : 1.0;
            cf_min = std::min(cf_min, ratio);
            if (ratio < 0.5) {
                ++cf_below_half;
            }
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = oversized == 0 && infeasible == 0 && not_maximal == 0 && exact_below == 0 && cf > 0 &&
                    cf_below_half == 0 && secs < kOracleSeconds;
    std::ostringstream d;
    d << kOracleInstances << " graphs, infeasible " << infeasible << ", non-maximal " << not_maximal
      << ", exact<greedy " << exact_below << ", conflict-free L=1 instances " << cf << " min ratio " << cf_min
      << ", " << secs << " s (limit " << kOracleSeconds << " s)";
    report(1, "solver oracle equivalence", ok, d.str());
}

void certification() {
    int epochs = 0;
    int bad_solutions = 0;
    int bad_power = 0;
    for (int r = 0; r < kCertifiedRuns; ++r) {
        auto c = city(500 + r, 60 + 5 * (r % 9), 4 + r % 7, 20);
        c.config.radio.max_beams = 1 + r % 4;
        c.config.radio.comp_limit = 1 + (r / 4) % 2;
        const Method m = r % 2 == 0 ? Method::cawbm : Method::dbscan;
        RunOptions opt;
        opt.on_epoch = [&](const EpochView& v) {
            ++epochs;
            if (!check_feasible(v.solution, v.graph, c.config.radio.max_beams, c.config.radio.comp_limit).ok()) {
                ++bad_solutions;
            }
            if (!check_power(v.power, v.solution, v.graph, c.config.radio.tx_power_budget).empty()) {
                ++bad_power;
            }
        };
        run(c.s.trace, c.s.gnbs, c.grid, c.config, m, 900 + r, opt);
    }
    std::ostringstream d;
    d << kCertifiedRuns << " runs, " << epochs << " epochs, matching violations " << bad_solutions
      << ", power violations " << bad_power;
    report(2, "constraint certification", epochs > 0 && bad_solutions == 0 && bad_power == 0, d.str());
}

void directional() {
    int data_wins = 0;
    int time_wins = 0;
    double served_a = 0.0;
    double served_b = 0.0;
    double worst_pair = 0.0;
    std::ostringstream per_seed;
    for (int k = 1; k <= kScenarios; ++k) {
        auto c = city(k);
        c.config.radio.comp_limit = 1;
        const auto t0 = Clock::now();
        const auto a = run(c.s.trace, c.s.gnbs, c.grid, c.config, Method::cawbm, k);
        const auto b = run(c.s.trace, c.s.gnbs, c.grid, c.config, Method::dbscan, k);
        worst_pair = std::max(worst_pair, seconds_since(t0));
        data_wins += a.total_data >= b.total_data;
        time_wins += median(a.served_time) >= median(b.served_time);
        served_a += a.served_fraction;
        served_b += b.served_fraction;
        per_seed << " s" << k << ":" << a.total_data / std::max(b.total_data, 1.0);
    }
    served_a /= kScenarios;
    served_b /= kScenarios;

    std::ostringstream d3;
    d3 << "CAWBM data >= DBSCAN in " << data_wins << "/" << kScenarios << " (need " << kDataWinsNeeded
       << "), mean served " << served_a << " vs " << served_b << ", slowest pair " << worst_pair
       << " s; data ratios" << per_seed.str();
    report(3, "directional data and served fraction",
           data_wins >= kDataWinsNeeded && served_a >= served_b && worst_pair < kPairSeconds, d3.str());

    std::ostringstream d4;
    d4 << "median served time CAWBM >= DBSCAN in " << time_wins << "/" << kScenarios << " (need "
       << kServedTimeWinsNeeded << ")";
    report(4, "served-time ordering", time_wins >= kServedTimeWinsNeeded, d4.str());
}

void channel_checks() {
    const double pl = path_loss_db(100.0, true, 76.0);
    const double n = noise_power_dbm(400e6, 7.0);
    bool conserve = true;
    double worst = 0.0;
    for (double w : {5.0, 10.0, 15.0}) {
        const double a = w * std::numbers::pi / 180.0;
        const double total = a * tx_gain(w, true, 0.01) + (2 * std::numbers::pi - a) * 0.01;
        const double rel = std::abs(total - 2 * std::numbers::pi) / (2 * std::numbers::pi);
        worst = std::max(worst, rel);
        conserve = conserve && rel <= 1e-9;
    }
    const bool decreasing = tx_gain(5, true, 0.01) > tx_gain(10, true, 0.01) &&
                            tx_gain(10, true, 0.01) > tx_gain(15, true, 0.01);
    const bool ok = std::abs(pl - 112.02) <= kPathLossTol && std::abs(n - (-80.98)) <= kNoiseTol && conserve &&
                    decreasing;
    std::ostringstream d;
    d.precision(10);
    d << "PL(100 m, LoS) " << pl << " dB, noise " << n << " dBm, worst conservation error " << worst
      << ", gains 5/10/15 deg " << tx_gain(5, true, 0.01) << "/" << tx_gain(10, true, 0.01) << "/"
      << tx_gain(15, true, 0.01);
    report(5, "channel unit checks", ok, d.str());
}

void conservation() {
    double worst = 0.0;
    bool ok = true;
    for (int r = 0; r < kConservationRuns; ++r) {
        auto c = city(700 + r);
        c.config.radio.comp_limit = 1 + r % 2;
        std::stringstream log;
        RunOptions opt;
        opt.slot_log = &log;
        const auto m = run(c.s.trace, c.s.gnbs, c.grid, c.config, r % 2 ? Method::dbscan : Method::cawbm, r, opt);
        std::string line;
        std::getline(log, line);
        double total = 0.0;
        while (std::getline(log, line)) {
            const auto f = text::split(line, ',');
            total += *text::parse_double(f.at(6)) * c.config.scheduler.slot;
        }
        const double rel = m.total_data > 0 ? std::abs(total - m.total_data) / m.total_data : std::abs(total);
        worst = std::max(worst, rel);
        ok = ok && m.total_data > 0 && rel <= kConservationRel;
    }
    std::ostringstream d;
    d << kConservationRuns << " runs, worst relative gap " << worst << " (limit " << kConservationRel << ")";
    report(6, "conservation audit", ok, d.str());
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) {
            std::ifstream in(e.path(), std::ios::binary);
            std::ostringstream s;
            s << in.rdbuf();
            out[fs::relative(e.path(), dir).string()] = s.str();
        }
    }
    return out;
}

void determinism() {
    const fs::path root = fs::temp_directory_path() / ("beamsim_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string scn = (root / "scn").string();
    std::ostringstream sink;
    auto call = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "beamsim");
        return cli::run_cli(args, sink, sink);
    };
    if (call({"gen", "--area", "1000x1000", "--vehicles", "100", "--gnbs", "10", "--seed", "4", "-o", scn}) != 0) {
        report(7, "determinism", false, "scenario generation failed");
        return;
    }
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"gen", {"gen", "--area", "1000x1000", "--vehicles", "100", "--gnbs", "10", "--seed", "4"}},
        {"run", {"run", "--trace", scn + "/trace.csv", "--gnbs", scn + "/gnbs.csv", "--seed", "4", "--slot-log"}},
        {"compare", {"compare", "--trace", scn + "/trace.csv", "--gnbs", scn + "/gnbs.csv", "--seed", "4"}},
        {"oracle", {"oracle", "--instances", "100", "--seed", "4"}},
    };
    bool ok = true;
    std::ostringstream d;
    for (const auto& [name, base] : commands) {
        std::vector<std::map<std::string, std::string>> trees;
        for (int k = 0; k < kRepeats; ++k) {
            const auto out = root / (name + std::to_string(k));
            auto args = base;
            args.push_back("-o");
            args.push_back(out.string());
            if (call(args) != 0) {
                ok = false;
            }
            trees.push_back(read_tree(out));
        }
        const bool same = !trees[0].empty() && trees[1] == trees[0] && trees[2] == trees[0];
        ok = ok && same;
        d << name << " " << trees[0].size() << " files " << (same ? "identical" : "DIFFER") << "; ";
    }
    fs::remove_all(root);
    d << commands.size() << " commands x " << kRepeats << " repeats";
    report(7, "determinism", ok, d.str());
}

}  // namespace

int main() {
    solver_oracle();
    certification();
    directional();
    channel_checks();
    conservation();
    determinism();
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
