#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamgraph/config.hpp"
#include "beamgraph/graph.hpp"
#include "beamgraph/matching.hpp"

namespace beamgraph {

enum class Method { cawbm, dbscan };

Method parse_method(std::string_view name);
const char* to_string(Method m);

// Per-beam transmit power of the active candidates, sorted by candidate.
struct PowerAllocation {
    std::vector<std::pair<int, double>> powers;  // (candidate, W)

    double power_of(int candidate) const;
};

// Equal split of each gNB's budget over its active beams. The share is
// nudged down by an ulp where needed so the per-gNB sum never exceeds the
// budget in floating point.
PowerAllocation allocate_power(const Solution& sol, const ConflictGraph& graph, double budget_dbm);

// Per-gNB budget and power-on-inactive-beam constraints. Empty when satisfied.
std::vector<std::string> check_power(const PowerAllocation& power, const Solution& sol, const ConflictGraph& graph,
                                     double budget_dbm);

struct VehicleRate {
    int vehicle_id = 0;
    int zone = -1;                      // index into graph.zones
    std::vector<int> serving;           // candidates associated with the zone
    std::optional<double> sinr_db;      // absent when the zone is unassociated
    double rate = 0.0;                  // bits/s after CQI mapping
};

// Interference-inclusive rates for every vehicle in the snapshot. The
// vehicle's receive beam points at its strongest serving gNB (ties: lowest
// id); every other gNB is seen through the receive sidelobe.
std::vector<VehicleRate> epoch_rates(const Solution& sol, const PowerAllocation& power, const VehicleSnapshot& snap,
                                     const ConflictGraph& graph, const ZoneGrid& grid,
                                     std::span<const GnbSite> gnbs, const Config& config, std::uint64_t seed,
                                     bool with_interference = true);

struct VehicleSchedState {
    double avg_throughput = 0.0;  // bits/s, exponentially averaged
    double served_time = 0.0;     // s
    double data = 0.0;            // bits
};

struct SchedulerState {
    std::map<int, VehicleSchedState> vehicles;
    double time_constant = 100.0;  // slots
    double floor = 1.0;            // bits/s

    VehicleSchedState& at(int vehicle_id);
};

// Proportional-fair pick: argmax rate / T, ties to the lower vehicle id.
// `vehicles` must be non-empty; unknown vehicles start at the floor.
int pf_schedule(std::span<const int> vehicles, const std::map<int, double>& rates, SchedulerState& state);

// T <- (1 - 1/tc) T + (1/tc) * (rate if scheduled else 0), floored.
void pf_update(SchedulerState& state, const std::map<int, double>& rates, const std::vector<int>& scheduled);

struct VehicleMetrics {
    int vehicle_id = 0;
    double data = 0.0;         // bits
    double served_time = 0.0;  // s
    int sinr_samples = 0;
    std::optional<double> mean_sinr_db;
    friend bool operator==(const VehicleMetrics&, const VehicleMetrics&) = default;
};

struct RunMetrics {
    double total_data = 0.0;  // bits
    int n_vehicles = 0;
    int served_vehicles = 0;
    double served_fraction = 0.0;
    int epochs = 0;
    int slots_per_epoch = 0;
    long long out_of_grid = 0;  // vehicle-epochs outside the zone grid
    std::vector<VehicleMetrics> vehicles;   // every vehicle in the trace, by id
    std::vector<double> sinr_db;            // mean SINR of each vehicle with samples
    std::vector<double> effective_rate;     // data / served time of each served vehicle
    std::vector<double> beam_users;         // distinct scheduled vehicles per (epoch, active beam)
    std::vector<double> served_time;        // every vehicle in the trace

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct EpochView {
    int epoch = 0;
    double time = 0.0;
    const VehicleSnapshot& snapshot;
    const ConflictGraph& graph;
    const Solution& solution;
    const PowerAllocation& power;
    const std::vector<VehicleRate>& rates;
};

struct RunOptions {
    std::ostream* slot_log = nullptr;  // CSV epoch,slot,gnb,beam_dir,beam_width,vehicle,rate_bps
    std::function<void(const EpochView&)> on_epoch;
    bool prune = true;  // prune dominated candidates before greedy (output unchanged)
};

void write_slot_log_header(std::ostream& out);

// Re-solves the beam design every epoch, then schedules slot by slot with
// per-beam PF. A vehicle served by several CoMP tuples in the same slot is
// credited once; the log records the extra copies with rate 0.
RunMetrics run(const Trace& trace, std::span<const GnbSite> gnbs, const ZoneGrid& grid, const Config& config,
               Method method, std::uint64_t seed, const RunOptions& options = {});

}  // namespace beamgraph
