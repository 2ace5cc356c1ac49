#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beamgraph {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

double distance(Vec2 a, Vec2 b);

struct GnbSite {
    int id = 0;
    Vec2 position;

    friend bool operator==(const GnbSite&, const GnbSite&) = default;
};

struct TraceRecord {
    double time = 0.0;
    int vehicle_id = 0;
    Vec2 position;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Time-indexed vehicle positions. Records are sorted by (time, vehicle_id)
// and every time is a multiple of `step`.
struct Trace {
    std::vector<TraceRecord> records;
    double horizon = 0.0;
    double step = 1.0;

    // Index of the step grid point nearest to t; exact halves round up.
    std::int64_t step_index(double t) const;

    // Distinct vehicle ids, ascending.
    std::vector<int> vehicle_ids() const;

    friend bool operator==(const Trace&, const Trace&) = default;
};

// Square zones laid out row-major from `origin`. Cells are half-open
// [low, high) on both axes.
struct ZoneGrid {
    Vec2 origin;
    double zone_size = 25.0;
    int n_x = 0;
    int n_y = 0;

    int zone_count() const { return n_x * n_y; }
    std::optional<int> zone_of(Vec2 p) const;
    Vec2 center(int zone_id) const;
    void validate() const;
};

// Smallest grid anchored at `origin` that covers [origin, origin + extent).
ZoneGrid make_covering_grid(Vec2 origin, Vec2 extent, double zone_size);

struct VehicleEntry {
    int vehicle_id = 0;
    Vec2 position;
    int zone_id = 0;
};

struct VehicleSnapshot {
    double time = 0.0;
    std::vector<VehicleEntry> entries;  // ascending vehicle_id
    int out_of_grid = 0;
};

Trace load_trace(const std::string& path, double step);
Trace parse_trace(std::istream& in, double step);
void write_trace(std::ostream& out, const Trace& trace);
void save_trace(const std::string& path, const Trace& trace);

std::vector<GnbSite> load_gnbs(const std::string& path);
std::vector<GnbSite> parse_gnbs(std::istream& in);
void write_gnbs(std::ostream& out, const std::vector<GnbSite>& gnbs);
void save_gnbs(const std::string& path, const std::vector<GnbSite>& gnbs);

struct SyntheticParams {
    double width = 1000.0;   // m
    double height = 1000.0;  // m
    int n_vehicles = 0;
    int n_gnbs = 0;
    double horizon = 20.0;  // s
    double step = 1.0;      // s
    std::uint64_t seed = 0;
    double speed = 10.0;          // m/s
    double block_size = 100.0;    // street spacing, m
};

struct SyntheticScenario {
    Trace trace;
    std::vector<GnbSite> gnbs;
};

// Manhattan-grid mobility: streets run through the centres of the blocks,
// vehicles drive at constant speed and pick a random non-reversing direction
// at every intersection. gNBs sit on distinct intersections.
SyntheticScenario generate_synthetic(const SyntheticParams& params);

VehicleSnapshot snapshot(const Trace& trace, const ZoneGrid& grid, double t);

}  // namespace beamgraph
