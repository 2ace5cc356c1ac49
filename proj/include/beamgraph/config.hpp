#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beamgraph/channel.hpp"
#include "beamgraph/scenario.hpp"

namespace beamgraph {

struct RadioConfig {
    double carrier_freq = 76.0;     // GHz
    double bandwidth = 400e6;       // Hz
    double tx_power_budget = 30.0;  // dBm, per gNB
    int max_beams = 4;              // beams per gNB
    int comp_limit = 1;             // tuples per zone
    std::vector<double> beamwidth_set{5.0, 10.0, 15.0};  // deg
    double direction_step = 5.0;    // deg
    double noise_figure = 7.0;      // dB
    double sidelobe_gain = 0.01;    // linear
    double rx_beamwidth = 15.0;     // deg
    std::optional<double> min_edge_rate;  // bits/s; derived from the CQI table when unset
};

struct DbscanParams {
    double eps = 5.0;  // deg
    int min_pts = 2;
};

struct SchedulerParams {
    double slot = 0.01;               // s
    double pf_time_constant = 100.0;  // slots
    double pf_floor = 1.0;            // bits/s
};

struct GridParams {
    double zone_size = 25.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    int n_x = 0;  // 0: derive from the scenario extent
    int n_y = 0;
};

// Everything a run depends on besides the scenario files and the seed.
// Serialised as a flat `key = value` file.
struct Config {
    RadioConfig radio;
    double los_distance = 100.0;
    double exponent_los = 2.1;
    double exponent_nlos = 3.19;
    std::string cqi_table;  // path; empty selects the built-in LTE table
    CqiTable cqi = CqiTable::lte_default();
    GridParams grid;
    DbscanParams dbscan;
    SchedulerParams scheduler;
    double epoch = 1.0;  // s, trace step and re-solve period
    int exact_limit = 20;

    double min_edge_rate() const;
    double per_beam_power() const;  // W, P^t / N
    double noise_watts() const;
    ChannelParams channel() const;

    // Applies one key. Unknown keys and malformed values throw ConfigError.
    void set(std::string_view key, std::string_view value);
    void validate() const;
};

Config parse_config(std::istream& in);
Config load_config(const std::string& path);

// Every key in canonical order; parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& out, const Config& config);
std::vector<std::pair<std::string, std::string>> config_entries(const Config& config);

// Grid from the config, or the smallest grid covering the trace and gNBs
// when n_x/n_y are zero.
ZoneGrid resolve_grid(const Config& config, const Trace& trace, const std::vector<GnbSite>& gnbs);

}  // namespace beamgraph
