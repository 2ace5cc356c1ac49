#include "beamgraph/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>

#include "beamgraph/errors.hpp"
#include "beamgraph/rng.hpp"
#include "beamgraph/text.hpp"

namespace beamgraph {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CqiTable CqiTable::lte_default() {
    CqiTable t;
    t.rows = {{{-6.7, 0.1523},
               {-4.7, 0.2344},
               {-2.3, 0.3770},
               {0.2, 0.6016},
               {2.4, 0.8770},
               {4.3, 1.1758},
               {5.9, 1.4766},
               {8.1, 1.9141},
               {10.3, 2.4063},
               {11.7, 2.7305},
               {14.1, 3.3223},
               {16.3, 3.9023},
               {18.7, 4.5234},
               {21.0, 5.1152},
               {22.7, 5.5547}}};
    return t;
}

void CqiTable::validate() const {
    for (std::size_t i = 0; i < kRows; ++i) {
        if (!std::isfinite(rows[i].threshold_db) || !(rows[i].efficiency > 0.0)) {
            throw ConfigError("CQI row " + std::to_string(i + 1) + " is not finite/positive");
        }
        if (i > 0 && !(rows[i].threshold_db > rows[i - 1].threshold_db)) {
            throw ConfigError("CQI thresholds must be strictly increasing (row " + std::to_string(i + 1) + ")");
        }
        if (i > 0 && !(rows[i].efficiency > rows[i - 1].efficiency)) {
            throw ConfigError("CQI efficiencies must be strictly increasing (row " + std::to_string(i + 1) + ")");
        }
    }
}

CqiTable parse_cqi_table(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != "cqi_index,threshold_db,efficiency") {
        throw ParseError("bad CQI table header", 1);
    }
    CqiTable t;
    std::size_t n = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        auto f = text::split(line, ',');
        if (f.size() != 3) {
            throw ParseError("expected 3 fields", line_no);
        }
        auto idx = text::parse_int(f[0]);
        auto thr = text::parse_double(f[1]);
        auto eff = text::parse_double(f[2]);
        if (!idx || !thr || !eff) {
            throw ParseError("invalid CQI row", line_no);
        }
        if (n >= CqiTable::kRows || *idx != static_cast<long long>(n + 1)) {
            throw ParseError("CQI indices must run 1..15 in order", line_no);
        }
        t.rows[n++] = {*thr, *eff};
    }
    if (n != CqiTable::kRows) {
        throw ParseError("CQI table must have 15 rows, found " + std::to_string(n));
    }
    t.validate();
    return t;
}

CqiTable load_cqi_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open CQI table", path);
    }
    return parse_cqi_table(in);
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double los_uniform(int gnb_id, int zone_id, std::uint64_t seed) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ static_cast<std::uint32_t>(gnb_id));
    h = mix64(h ^ (static_cast<std::uint64_t>(static_cast<std::uint32_t>(zone_id)) << 32));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

bool los_state(int gnb_id, int zone_id, double distance, std::uint64_t seed, double los_distance) {
    return los_uniform(gnb_id, zone_id, seed) < std::exp(-distance / los_distance);
}

double path_loss_db(double distance, bool los, double carrier_ghz, double exponent_los, double exponent_nlos) {
    const double d = std::max(distance, 1.0);
    const double n = los ? exponent_los : exponent_nlos;
    return 32.4 + 20.0 * std::log10(carrier_ghz) + 10.0 * n * std::log10(d);
}

double tx_gain(double width, bool aligned, double sidelobe) {
    if (!aligned) {
        return sidelobe;
    }
    const double a = width * std::numbers::pi / 180.0;
    return (kTwoPi - (kTwoPi - a) * sidelobe) / a;
}

double rx_main_gain(const ChannelParams& params) {
    return tx_gain(params.rx_beamwidth, true, params.sidelobe_gain);
}

double channel_gain(const LinkState& link, const BeamCandidate& beam, bool covered, double rx_gain_linear,
                    const ChannelParams& params) {
    const double pl = path_loss_db(link.distance, link.los, params.carrier_ghz, params.exponent_los,
                                   params.exponent_nlos);
    return tx_gain(beam.width, covered, params.sidelobe_gain) * rx_gain_linear * std::pow(10.0, -pl / 10.0);
}

double noise_power_dbm(double bandwidth, double noise_figure) {
    return -174.0 + 10.0 * std::log10(bandwidth) + noise_figure;
}

double noise_power(double bandwidth, double noise_figure) {
    return dbm_to_watts(noise_power_dbm(bandwidth, noise_figure));
}

double interference(std::span<const LinkTerm> covering, std::span<const int> serving) {
    double sum = 0.0;
    for (const auto& t : covering) {
        if (std::find(serving.begin(), serving.end(), t.candidate) == serving.end()) {
            sum += t.power * t.gain;
        }
    }
    return sum;
}

double sinr(std::span<const LinkTerm> signal, double noise, double interference) {
    double s = 0.0;
    for (const auto& t : signal) {
        s += t.power * t.gain;
    }
    return s / (noise + interference);
}

double shannon_rate(double sinr, double bandwidth) {
    return bandwidth * std::log2(1.0 + sinr);
}

double cqi_rate(double sinr_db, const CqiTable& table, double bandwidth) {
    double eff = 0.0;
    for (const auto& row : table.rows) {
        if (row.threshold_db <= sinr_db) {
            eff = row.efficiency;
        } else {
            break;
        }
    }
    return eff * bandwidth;
}

double noise_limited_rate(const LinkState& link, const BeamCandidate& beam, double power, int n_vehicles,
                          double noise, double bandwidth, const ChannelParams& params) {
    if (n_vehicles <= 0) {
        return 0.0;
    }
    const double gain = channel_gain(link, beam, true, rx_main_gain(params), params);
    return n_vehicles * shannon_rate(power * gain / noise, bandwidth);
}

}  // namespace beamgraph
