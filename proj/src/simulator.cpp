#include "beamgraph/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <unordered_map>

#include "beamgraph/baseline.hpp"
#include "beamgraph/channel.hpp"
#include "beamgraph/errors.hpp"
#include "beamgraph/text.hpp"

namespace beamgraph {

Method parse_method(std::string_view name) {
    if (name == "cawbm") {
        return Method::cawbm;
    }
    if (name == "dbscan") {
        return Method::dbscan;
    }
    throw ConfigError("unknown method '" + std::string(name) + "' (expected cawbm or dbscan)");
}

const char* to_string(Method m) {
    return m == Method::cawbm ? "cawbm" : "dbscan";
}

double PowerAllocation::power_of(int candidate) const {
    auto it = std::lower_bound(powers.begin(), powers.end(), std::pair(candidate, -HUGE_VAL));
    return (it != powers.end() && it->first == candidate) ? it->second : 0.0;
}

PowerAllocation allocate_power(const Solution& sol, const ConflictGraph& graph, double budget_dbm) {
    const double budget = dbm_to_watts(budget_dbm);
    std::map<int, int> per_gnb;
    for (int c : sol.active) {
        ++per_gnb[graph.candidates[c].gnb_id];
    }
    std::map<int, double> share;
    for (auto [gnb, n] : per_gnb) {
        double s = budget / n;
        auto total = [&] {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) {
                sum += s;
            }
            return sum;
        };
        while (total() > budget) {
            s = std::nextafter(s, 0.0);
        }
        share[gnb] = s;
    }
    PowerAllocation out;
    for (int c : sol.active) {
        out.powers.emplace_back(c, share[graph.candidates[c].gnb_id]);
    }
    std::sort(out.powers.begin(), out.powers.end());
    return out;
}

std::vector<std::string> check_power(const PowerAllocation& power, const Solution& sol, const ConflictGraph& graph,
                                     double budget_dbm) {
    const double budget = dbm_to_watts(budget_dbm);
    std::vector<std::string> problems;
    std::set<int> active(sol.active.begin(), sol.active.end());
    std::map<int, double> sums;
    for (auto [c, p] : power.powers) {
        if (c < 0 || c >= static_cast<int>(graph.candidates.size())) {
            problems.push_back("power entry for unknown candidate " + std::to_string(c));
            continue;
        }
        if (!(p >= 0.0)) {
            problems.push_back("negative power on candidate " + std::to_string(c));
        }
        if (!active.contains(c)) {
            problems.push_back("power allocated to inactive candidate " + std::to_string(c));
        }
        if (p > budget) {
            problems.push_back("candidate " + std::to_string(c) + " exceeds the gNB budget");
        }
        sums[graph.candidates[c].gnb_id] += p;
    }
    for (auto [gnb, total] : sums) {
        if (total > budget) {
            problems.push_back("gNB " + std::to_string(gnb) + " total power " + text::format_double(total) +
                               " W exceeds budget " + text::format_double(budget) + " W");
        }
    }
    return problems;
}

std::vector<VehicleRate> epoch_rates(const Solution& sol, const PowerAllocation& power, const VehicleSnapshot& snap,
                                     const ConflictGraph& graph, const ZoneGrid& grid,
                                     std::span<const GnbSite> gnbs, const Config& config, std::uint64_t seed,
                                     bool with_interference) {
    const ChannelParams channel = config.channel();
    const double noise = config.noise_watts();
    const double rx_main = rx_main_gain(channel);

    std::unordered_map<int, const GnbSite*> gnb_by_id;
    for (const auto& g : gnbs) {
        gnb_by_id.emplace(g.id, &g);
    }
    std::unordered_map<int, int> zone_index;
    for (std::size_t z = 0; z < graph.zones.size(); ++z) {
        zone_index.emplace(graph.zones[z].zone_id, static_cast<int>(z));
    }
    std::vector<std::vector<int>> serving(graph.zones.size());
    for (auto [c, z] : sol.assoc) {
        serving[z].push_back(c);
    }

    // Received-signal inputs for one zone: every active candidate covering
    // the zone centre, plus the serving ones.
    struct ZoneTerm {
        int candidate;
        int gnb_id;
        double power;
        double tx_strength;  // P * G_tx * 10^(-PL/10), receive gain excluded
    };
    std::map<int, std::pair<std::vector<ZoneTerm>, std::vector<int>>> zone_terms;  // zone id -> (terms, serving)
    auto terms_for = [&](int zone_id, int z) -> const std::pair<std::vector<ZoneTerm>, std::vector<int>>& {
        auto it = zone_terms.find(zone_id);
        if (it != zone_terms.end()) {
            return it->second;
        }
        std::vector<ZoneTerm> terms;
        const auto& srv = z >= 0 ? serving[z] : std::vector<int>{};
        std::unordered_map<int, std::optional<ZoneLink>> links;
        for (auto [c, p] : power.powers) {
            const auto& beam = graph.candidates[c];
            auto git = gnb_by_id.find(beam.gnb_id);
            if (git == gnb_by_id.end()) {
                throw ConsistencyError("active beam at unknown gNB " + std::to_string(beam.gnb_id));
            }
            auto lit = links.find(beam.gnb_id);
            if (lit == links.end()) {
                lit = links.emplace(beam.gnb_id, zone_link(*git->second, grid, zone_id, config, seed)).first;
            }
            const auto& zl = lit->second;
            const bool is_serving = std::find(srv.begin(), srv.end(), c) != srv.end();
            if (!zl || (!is_serving && !covers(beam, zl->theta))) {
                continue;
            }
            const double g = channel_gain(zl->link, beam, true, 1.0, channel);
            terms.push_back({c, beam.gnb_id, p, p * g});
        }
        return zone_terms.emplace(zone_id, std::pair(std::move(terms), srv)).first->second;
    };

    std::vector<VehicleRate> out;
    out.reserve(snap.entries.size());
    for (const auto& e : snap.entries) {
        VehicleRate vr;
        vr.vehicle_id = e.vehicle_id;
        auto zit = zone_index.find(e.zone_id);
        vr.zone = zit == zone_index.end() ? -1 : zit->second;
        if (vr.zone < 0 || serving[vr.zone].empty()) {
            out.push_back(std::move(vr));
            continue;
        }
        const auto& [terms, srv] = terms_for(e.zone_id, vr.zone);
        vr.serving = srv;

        // Receive beam follows the strongest serving gNB.
        int target_gnb = 0;
        double best = -1.0;
        for (const auto& t : terms) {
            const bool is_serving = std::find(srv.begin(), srv.end(), t.candidate) != srv.end();
            if (is_serving && (t.tx_strength > best || (t.tx_strength == best && t.gnb_id < target_gnb))) {
                best = t.tx_strength;
                target_gnb = t.gnb_id;
            }
        }

        std::vector<LinkTerm> signal;
        std::vector<LinkTerm> covering;
        for (const auto& t : terms) {
            const double rx = t.gnb_id == target_gnb ? rx_main : channel.sidelobe_gain;
            const LinkTerm lt{t.candidate, t.power, t.tx_strength / t.power * rx};
            covering.push_back(lt);
            if (std::find(srv.begin(), srv.end(), t.candidate) != srv.end()) {
                signal.push_back(lt);
            }
        }
        const double interf = with_interference ? interference(covering, srv) : 0.0;
        const double ratio = sinr(signal, noise, interf);
        vr.sinr_db = linear_to_db(ratio);
        vr.rate = cqi_rate(*vr.sinr_db, config.cqi, config.radio.bandwidth);
        out.push_back(std::move(vr));
    }
    return out;
}

VehicleSchedState& SchedulerState::at(int vehicle_id) {
    auto [it, inserted] = vehicles.try_emplace(vehicle_id);
    if (inserted) {
        it->second.avg_throughput = floor;
    }
    return it->second;
}

int pf_schedule(std::span<const int> vehicles, const std::map<int, double>& rates, SchedulerState& state) {
    if (vehicles.empty()) {
        throw ArgumentError("pf_schedule needs at least one vehicle");
    }
    int best_id = 0;
    double best_metric = -1.0;
    for (int v : vehicles) {
        auto rit = rates.find(v);
        const double rate = rit == rates.end() ? 0.0 : rit->second;
        const double metric = rate / std::max(state.at(v).avg_throughput, state.floor);
        if (metric > best_metric || (metric == best_metric && v < best_id)) {
            best_metric = metric;
            best_id = v;
        }
    }
    return best_id;
}

void pf_update(SchedulerState& state, const std::map<int, double>& rates, const std::vector<int>& scheduled) {
    const double a = 1.0 / state.time_constant;
    for (auto [v, rate] : rates) {
        auto& s = state.at(v);
        const bool got = std::find(scheduled.begin(), scheduled.end(), v) != scheduled.end();
        s.avg_throughput = std::max((1.0 - a) * s.avg_throughput + a * (got ? rate : 0.0), state.floor);
    }
}

void write_slot_log_header(std::ostream& out) {
    out << "epoch,slot,gnb,beam_dir,beam_width,vehicle,rate_bps\n";
}

namespace {

struct EpochDesign {
    ConflictGraph graph;
    Solution solution;
};

EpochDesign design_epoch(const VehicleSnapshot& snap, std::span<const GnbSite> gnbs, const ZoneGrid& grid,
                         const Config& config, Method method, std::uint64_t seed, bool prune) {
    EpochDesign d;
    if (method == Method::cawbm) {
        d.graph = build_graph(snap, grid, gnbs, config, seed);
        if (prune) {
            d.graph = prune_dominated(d.graph);
        }
        d.solution = greedy_match(d.graph, config.radio.max_beams, config.radio.comp_limit);
    } else {
        std::vector<std::vector<BeamCandidate>> beams;
        beams.reserve(gnbs.size());
        for (const auto& g : gnbs) {
            beams.push_back(dbscan_beam_design(snap, grid, g, config, seed));
        }
        auto base = dbscan_associate(beams, snap, grid, gnbs, config, seed);
        d.graph = std::move(base.graph);
        d.solution = std::move(base.solution);
    }
    return d;
}

}  // namespace

RunMetrics run(const Trace& trace, std::span<const GnbSite> gnbs, const ZoneGrid& grid, const Config& config,
               Method method, std::uint64_t seed, const RunOptions& options) {
    config.validate();
    grid.validate();

    RunMetrics m;
    m.epochs = static_cast<int>(std::llround(trace.horizon / config.epoch));
    m.slots_per_epoch = static_cast<int>(std::llround(config.epoch / config.scheduler.slot));
    const double tau = config.scheduler.slot;

    SchedulerState sched;
    sched.time_constant = config.scheduler.pf_time_constant;
    sched.floor = config.scheduler.pf_floor;

    std::map<int, VehicleMetrics> per_vehicle;
    std::map<int, double> sinr_sum;
    for (int id : trace.vehicle_ids()) {
        per_vehicle[id].vehicle_id = id;
    }

    if (options.slot_log) {
        write_slot_log_header(*options.slot_log);
    }

    for (int k = 0; k < m.epochs; ++k) {
        const double t = k * config.epoch;
        const VehicleSnapshot snap = snapshot(trace, grid, t);
        m.out_of_grid += snap.out_of_grid;

        EpochDesign d = design_epoch(snap, gnbs, grid, config, method, seed, options.prune);
        const PowerAllocation power = allocate_power(d.solution, d.graph, config.radio.tx_power_budget);
        const auto rates = epoch_rates(d.solution, power, snap, d.graph, grid, gnbs, config, seed);
        if (options.on_epoch) {
            options.on_epoch({k, t, snap, d.graph, d.solution, power, rates});
        }

        std::map<int, double> rate_of;
        std::vector<std::vector<int>> zone_vehicles(d.graph.zones.size());
        for (const auto& vr : rates) {
            rate_of[vr.vehicle_id] = vr.rate;
            if (vr.sinr_db) {
                sinr_sum[vr.vehicle_id] += *vr.sinr_db;
                ++per_vehicle[vr.vehicle_id].sinr_samples;
            }
            if (vr.zone >= 0 && vr.rate > 0.0) {
                zone_vehicles[vr.zone].push_back(vr.vehicle_id);
            }
        }
        // Schedulable vehicles per active beam, ascending id.
        std::vector<std::pair<int, std::vector<int>>> beam_queue;
        for (int c : d.solution.active) {
            std::vector<int> members;
            for (auto [ac, z] : d.solution.assoc) {
                if (ac == c) {
                    members.insert(members.end(), zone_vehicles[z].begin(), zone_vehicles[z].end());
                }
            }
            std::sort(members.begin(), members.end());
            beam_queue.emplace_back(c, std::move(members));
        }
        std::vector<std::set<int>> beam_served(beam_queue.size());

        for (int s = 0; s < m.slots_per_epoch; ++s) {
            std::vector<int> scheduled;
            for (std::size_t b = 0; b < beam_queue.size(); ++b) {
                const auto& [c, members] = beam_queue[b];
                if (members.empty()) {
                    continue;
                }
                const int v = pf_schedule(members, rate_of, sched);
                beam_served[b].insert(v);
                const bool first_copy = std::find(scheduled.begin(), scheduled.end(), v) == scheduled.end();
                const double credited = first_copy ? rate_of[v] : 0.0;
                if (first_copy) {
                    scheduled.push_back(v);
                    auto& vm = per_vehicle[v];
                    vm.data += credited * tau;
                    vm.served_time += tau;
                    m.total_data += credited * tau;
                }
                if (options.slot_log) {
                    const auto& beam = d.graph.candidates[c];
                    *options.slot_log << k << ',' << s << ',' << beam.gnb_id << ','
                                      << text::format_double(beam.direction) << ','
                                      << text::format_double(beam.width) << ',' << v << ','
                                      << text::format_double(credited) << '\n';
                }
            }
            pf_update(sched, rate_of, scheduled);
        }
        for (const auto& served : beam_served) {
            m.beam_users.push_back(static_cast<double>(served.size()));
        }
    }

    for (auto& [id, vm] : per_vehicle) {
        if (vm.sinr_samples > 0) {
            vm.mean_sinr_db = sinr_sum[id] / vm.sinr_samples;
            m.sinr_db.push_back(*vm.mean_sinr_db);
        }
        if (vm.served_time > 0.0) {
            ++m.served_vehicles;
            m.effective_rate.push_back(vm.data / vm.served_time);
        }
        m.served_time.push_back(vm.served_time);
        m.vehicles.push_back(vm);
    }
    m.n_vehicles = static_cast<int>(per_vehicle.size());
    m.served_fraction = m.n_vehicles > 0 ? static_cast<double>(m.served_vehicles) / m.n_vehicles : 0.0;
    return m;
}

}  // namespace beamgraph
