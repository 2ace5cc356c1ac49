#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

#include "beamgraph/geometry.hpp"

namespace beamgraph {

// Propagation constants of the close-in path-loss model and the
// exponential LoS-probability model.
struct ChannelParams {
    double carrier_ghz = 76.0;
    double los_distance = 100.0;  // m, decay length of p_LoS(d) = exp(-d / los_distance)
    double exponent_los = 2.1;
    double exponent_nlos = 3.19;
    double sidelobe_gain = 0.01;   // linear
    double rx_beamwidth = 15.0;    // deg
};

struct LinkState {
    int gnb_id = 0;
    int zone_id = 0;
    bool los = false;
    double distance = 1.0;  // m
};

struct CqiRow {
    double threshold_db = 0.0;
    double efficiency = 0.0;  // bits/s/Hz
    friend bool operator==(const CqiRow&, const CqiRow&) = default;
};

struct CqiTable {
    static constexpr std::size_t kRows = 15;
    std::array<CqiRow, kRows> rows{};

    // LTE 4-bit CQI efficiencies with the usual BLER-10% SINR switching points.
    static CqiTable lte_default();

    // Thresholds and efficiencies strictly increasing.
    void validate() const;

    friend bool operator==(const CqiTable&, const CqiTable&) = default;
};

// CSV `cqi_index,threshold_db,efficiency`, 15 rows, indices 1..15.
CqiTable parse_cqi_table(std::istream& in);
CqiTable load_cqi_table(const std::string& path);

double db_to_linear(double db);
double linear_to_db(double linear);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Static Bernoulli LoS draw keyed by (seed, gnb, zone).
bool los_state(int gnb_id, int zone_id, double distance, std::uint64_t seed, double los_distance);

// Uniform value in [0, 1) derived from (seed, gnb, zone); exposed for tests.
double los_uniform(int gnb_id, int zone_id, std::uint64_t seed);

// Close-in model: 32.4 + 20 log10(f_GHz) + 10 n log10(d). d is clamped to 1 m.
double path_loss_db(double distance, bool los, double carrier_ghz, double exponent_los = 2.1,
                    double exponent_nlos = 3.19);

// Sectored pattern: main-lobe gain over `width`, constant `sidelobe` elsewhere,
// normalised so the pattern integrates to 2*pi.
double tx_gain(double width, bool aligned, double sidelobe);

// |h|^2 including transmit and receive beamforming gains.
double channel_gain(const LinkState& link, const BeamCandidate& beam, bool covered, double rx_gain_linear,
                    const ChannelParams& params);

// Receive gain when the vehicle's beam points at the transmitting gNB.
double rx_main_gain(const ChannelParams& params);

double noise_power_dbm(double bandwidth, double noise_figure);
double noise_power(double bandwidth, double noise_figure);

// One received contribution P * |h|^2 from a transmitting (gNB, beam) tuple.
struct LinkTerm {
    int candidate = -1;
    double power = 0.0;  // W
    double gain = 0.0;   // |h|^2
};

// Sum of P*|h|^2 over covering tuples that are not serving the vehicle.
double interference(std::span<const LinkTerm> covering, std::span<const int> serving);

// Serving contributions add coherently (CoMP). Empty signal -> 0.
double sinr(std::span<const LinkTerm> signal, double noise, double interference);

double shannon_rate(double sinr, double bandwidth);

// Highest row whose threshold is <= sinr_db; below the first row -> 0.
double cqi_rate(double sinr_db, const CqiTable& table, double bandwidth);

// Interference-free edge weight of `n_vehicles` sharing zone `link.zone_id`.
double noise_limited_rate(const LinkState& link, const BeamCandidate& beam, double power, int n_vehicles,
                          double noise, double bandwidth, const ChannelParams& params);

}  // namespace beamgraph
