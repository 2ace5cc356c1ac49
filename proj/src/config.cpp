#include "beamgraph/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "beamgraph/errors.hpp"
#include "beamgraph/text.hpp"

namespace beamgraph {

namespace {

double as_double(std::string_view key, std::string_view value) {
    auto v = text::parse_double(value);
    if (!v || !std::isfinite(*v)) {
        throw ConfigError("invalid value for '" + std::string(key) + "': '" + std::string(value) + "'");
    }
    return *v;
}

int as_int(std::string_view key, std::string_view value) {
    auto v = text::parse_int(value);
    if (!v || *v < INT32_MIN || *v > INT32_MAX) {
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(value) + "'");
    }
    return static_cast<int>(*v);
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) {
            s += ',';
        }
        s += text::format_double(xs[i]);
    }
    return s;
}

}  // namespace

double Config::min_edge_rate() const {
    return radio.min_edge_rate.value_or(cqi.rows.front().efficiency * radio.bandwidth * 0.01);
}

double Config::per_beam_power() const {
    return dbm_to_watts(radio.tx_power_budget) / radio.max_beams;
}

double Config::noise_watts() const {
    return noise_power(radio.bandwidth, radio.noise_figure);
}

ChannelParams Config::channel() const {
    return {radio.carrier_freq, los_distance, exponent_los, exponent_nlos, radio.sidelobe_gain, radio.rx_beamwidth};
}

void Config::set(std::string_view key, std::string_view value) {
    value = text::trim(value);
    if (key == "carrier_freq") {
        radio.carrier_freq = as_double(key, value);
    } else if (key == "bandwidth") {
        radio.bandwidth = as_double(key, value);
    } else if (key == "tx_power_budget") {
        radio.tx_power_budget = as_double(key, value);
    } else if (key == "max_beams") {
        radio.max_beams = as_int(key, value);
    } else if (key == "comp_limit") {
        radio.comp_limit = as_int(key, value);
    } else if (key == "beamwidth_set") {
        radio.beamwidth_set.clear();
        for (auto part : text::split(value, ',')) {
            radio.beamwidth_set.push_back(as_double(key, part));
        }
    } else if (key == "direction_step") {
        radio.direction_step = as_double(key, value);
    } else if (key == "noise_figure") {
        radio.noise_figure = as_double(key, value);
    } else if (key == "sidelobe_gain") {
        radio.sidelobe_gain = as_double(key, value);
    } else if (key == "rx_beamwidth") {
        radio.rx_beamwidth = as_double(key, value);
    } else if (key == "min_edge_rate") {
        if (value.empty() || value == "auto") {
            radio.min_edge_rate.reset();
        } else {
            radio.min_edge_rate = as_double(key, value);
        }
    } else if (key == "los_distance") {
        los_distance = as_double(key, value);
    } else if (key == "exponent_los") {
        exponent_los = as_double(key, value);
    } else if (key == "exponent_nlos") {
        exponent_nlos = as_double(key, value);
    } else if (key == "cqi_table") {
        cqi_table = std::string(value);
        cqi = cqi_table.empty() ? CqiTable::lte_default() : load_cqi_table(cqi_table);
    } else if (key == "zone_size") {
        grid.zone_size = as_double(key, value);
    } else if (key == "grid_origin_x") {
        grid.origin_x = as_double(key, value);
    } else if (key == "grid_origin_y") {
        grid.origin_y = as_double(key, value);
    } else if (key == "grid_nx") {
        grid.n_x = as_int(key, value);
    } else if (key == "grid_ny") {
        grid.n_y = as_int(key, value);
    } else if (key == "dbscan_eps") {
        dbscan.eps = as_double(key, value);
    } else if (key == "dbscan_min_pts") {
        dbscan.min_pts = as_int(key, value);
    } else if (key == "slot_duration") {
        scheduler.slot = as_double(key, value);
    } else if (key == "pf_time_constant") {
        scheduler.pf_time_constant = as_double(key, value);
    } else if (key == "pf_floor") {
        scheduler.pf_floor = as_double(key, value);
    } else if (key == "epoch") {
        epoch = as_double(key, value);
    } else if (key == "exact_limit") {
        exact_limit = as_int(key, value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

void Config::validate() const {
    const auto& r = radio;
    if (!(r.carrier_freq > 0.0) || !(r.bandwidth > 0.0)) {
        throw ConfigError("carrier_freq and bandwidth must be positive");
    }
    if (r.max_beams < 1) {
        throw ConfigError("max_beams must be >= 1");
    }
    if (r.comp_limit < 1) {
        throw ConfigError("comp_limit must be >= 1");
    }
    if (r.beamwidth_set.empty()) {
        throw ConfigError("beamwidth_set must not be empty");
    }
    for (double w : r.beamwidth_set) {
        if (!(w > 0.0 && w < 360.0)) {
            throw ConfigError("beamwidths must lie in (0, 360)");
        }
    }
    const double n_dirs = 360.0 / r.direction_step;
    if (!(r.direction_step > 0.0) || std::abs(n_dirs - std::round(n_dirs)) > 1e-9) {
        throw ConfigError("direction_step must divide 360");
    }
    if (!(r.sidelobe_gain >= 0.0) || !(r.rx_beamwidth > 0.0 && r.rx_beamwidth < 360.0)) {
        throw ConfigError("sidelobe_gain must be >= 0 and rx_beamwidth in (0, 360)");
    }
    if (r.min_edge_rate && !(*r.min_edge_rate >= 0.0)) {
        throw ConfigError("min_edge_rate must be >= 0");
    }
    if (!(los_distance > 0.0) || !(exponent_los > 0.0) || !(exponent_nlos > 0.0)) {
        throw ConfigError("channel model constants must be positive");
    }
    if (!(grid.zone_size > 0.0) || grid.n_x < 0 || grid.n_y < 0) {
        throw ConfigError("invalid zone grid parameters");
    }
    if (!(dbscan.eps > 0.0) || dbscan.min_pts < 1) {
        throw ConfigError("dbscan_eps must be > 0 and dbscan_min_pts >= 1");
    }
    if (!(epoch > 0.0) || !(scheduler.slot > 0.0) || scheduler.slot > epoch) {
        throw ConfigError("epoch and slot_duration must be positive with slot <= epoch");
    }
    if (!(scheduler.pf_time_constant >= 1.0) || !(scheduler.pf_floor > 0.0)) {
        throw ConfigError("pf_time_constant must be >= 1 and pf_floor > 0");
    }
    if (exact_limit < 0) {
        throw ConfigError("exact_limit must be >= 0");
    }
    cqi.validate();
}

Config parse_config(std::istream& in) {
    Config c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value' on line " + std::to_string(line_no));
        }
        c.set(text::trim(body.substr(0, eq)), body.substr(eq + 1));
    }
    c.validate();
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config", path);
    }
    return parse_config(in);
}

std::vector<std::pair<std::string, std::string>> config_entries(const Config& c) {
    using text::format_double;
    return {
        {"carrier_freq", format_double(c.radio.carrier_freq)},
        {"bandwidth", format_double(c.radio.bandwidth)},
        {"tx_power_budget", format_double(c.radio.tx_power_budget)},
        {"max_beams", std::to_string(c.radio.max_beams)},
        {"comp_limit", std::to_string(c.radio.comp_limit)},
        {"beamwidth_set", join_doubles(c.radio.beamwidth_set)},
        {"direction_step", format_double(c.radio.direction_step)},
        {"noise_figure", format_double(c.radio.noise_figure)},
        {"sidelobe_gain", format_double(c.radio.sidelobe_gain)},
        {"rx_beamwidth", format_double(c.radio.rx_beamwidth)},
        {"min_edge_rate", c.radio.min_edge_rate ? format_double(*c.radio.min_edge_rate) : "auto"},
        {"los_distance", format_double(c.los_distance)},
        {"exponent_los", format_double(c.exponent_los)},
        {"exponent_nlos", format_double(c.exponent_nlos)},
        {"cqi_table", c.cqi_table},
        {"zone_size", format_double(c.grid.zone_size)},
        {"grid_origin_x", format_double(c.grid.origin_x)},
        {"grid_origin_y", format_double(c.grid.origin_y)},
        {"grid_nx", std::to_string(c.grid.n_x)},
        {"grid_ny", std::to_string(c.grid.n_y)},
        {"dbscan_eps", format_double(c.dbscan.eps)},
        {"dbscan_min_pts", std::to_string(c.dbscan.min_pts)},
        {"slot_duration", format_double(c.scheduler.slot)},
        {"pf_time_constant", format_double(c.scheduler.pf_time_constant)},
        {"pf_floor", format_double(c.scheduler.pf_floor)},
        {"epoch", format_double(c.epoch)},
        {"exact_limit", std::to_string(c.exact_limit)},
    };
}

void write_config(std::ostream& out, const Config& config) {
    for (const auto& [k, v] : config_entries(config)) {
        out << k << " = " << v << '\n';
    }
}

ZoneGrid resolve_grid(const Config& config, const Trace& trace, const std::vector<GnbSite>& gnbs) {
    const auto& g = config.grid;
    if (g.n_x > 0 && g.n_y > 0) {
        ZoneGrid grid{{g.origin_x, g.origin_y}, g.zone_size, g.n_x, g.n_y};
        grid.validate();
        return grid;
    }
    double max_x = g.origin_x;
    double max_y = g.origin_y;
    for (const auto& r : trace.records) {
        max_x = std::max(max_x, r.position.x);
        max_y = std::max(max_y, r.position.y);
    }
    for (const auto& s : gnbs) {
        max_x = std::max(max_x, s.position.x);
        max_y = std::max(max_y, s.position.y);
    }
    // floor + 1 keeps points on the far edge inside the half-open cells.
    ZoneGrid grid{{g.origin_x, g.origin_y}, g.zone_size, 0, 0};
    grid.validate();
    grid.n_x = static_cast<int>(std::floor((max_x - g.origin_x) / g.zone_size)) + 1;
    grid.n_y = static_cast<int>(std::floor((max_y - g.origin_y) / g.zone_size)) + 1;
    if (g.n_x > 0) {
        grid.n_x = g.n_x;
    }
    if (g.n_y > 0) {
        grid.n_y = g.n_y;
    }
    return grid;
}

}  // namespace beamgraph
