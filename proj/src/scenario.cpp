#include "beamgraph/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "beamgraph/errors.hpp"
#include "beamgraph/rng.hpp"
#include "beamgraph/text.hpp"

namespace beamgraph {

namespace {

constexpr const char* kTraceHeader = "time_s,vehicle_id,x_m,y_m";
constexpr const char* kGnbHeader = "gnb_id,x_m,y_m";

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open file for reading", path);
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open file for writing", path);
    }
    return out;
}

std::vector<std::string_view> expect_fields(std::string_view line, std::size_t n, std::size_t line_no) {
    auto fields = text::split(line, ',');
    if (fields.size() != n) {
        throw ParseError("expected " + std::to_string(n) + " fields, got " + std::to_string(fields.size()),
                         line_no);
    }
    return fields;
}

double field_double(std::string_view f, const char* name, std::size_t line_no) {
    auto v = text::parse_double(f);
    if (!v || !std::isfinite(*v)) {
        throw ParseError(std::string("invalid ") + name + " '" + std::string(f) + "'", line_no);
    }
    return *v;
}

int field_int(std::string_view f, const char* name, std::size_t line_no) {
    auto v = text::parse_int(f);
    if (!v || *v < INT32_MIN || *v > INT32_MAX) {
        throw ParseError(std::string("invalid ") + name + " '" + std::string(f) + "'", line_no);
    }
    return static_cast<int>(*v);
}

void check_header(std::istream& in, const char* expected) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("missing header, expected '" + std::string(expected) + "'", 1);
    }
    auto h = text::trim(line);
    if (h.size() >= 3 && static_cast<unsigned char>(h[0]) == 0xEF) {
        h.remove_prefix(3);  // UTF-8 BOM
    }
    if (h != expected) {
        throw ParseError("bad header '" + std::string(h) + "', expected '" + expected + "'", 1);
    }
}

}  // namespace

double distance(Vec2 a, Vec2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::int64_t Trace::step_index(double t) const {
    return static_cast<std::int64_t>(std::floor(t / step + 0.5));
}

std::vector<int> Trace::vehicle_ids() const {
    std::set<int> ids;
    for (const auto& r : records) {
        ids.insert(r.vehicle_id);
    }
    return {ids.begin(), ids.end()};
}

std::optional<int> ZoneGrid::zone_of(Vec2 p) const {
    const double fx = std::floor((p.x - origin.x) / zone_size);
    const double fy = std::floor((p.y - origin.y) / zone_size);
    if (!(fx >= 0.0 && fy >= 0.0 && fx < n_x && fy < n_y)) {
        return std::nullopt;
    }
    return static_cast<int>(fy) * n_x + static_cast<int>(fx);
}

Vec2 ZoneGrid::center(int zone_id) const {
    const int ix = zone_id % n_x;
    const int iy = zone_id / n_x;
    return {origin.x + (ix + 0.5) * zone_size, origin.y + (iy + 0.5) * zone_size};
}

void ZoneGrid::validate() const {
    if (!(zone_size > 0.0) || !std::isfinite(zone_size)) {
        throw ConfigError("zone_size must be positive");
    }
    if (n_x < 0 || n_y < 0) {
        throw ConfigError("zone grid dimensions must be non-negative");
    }
    if (!std::isfinite(origin.x) || !std::isfinite(origin.y)) {
        throw ConfigError("zone grid origin must be finite");
    }
}

ZoneGrid make_covering_grid(Vec2 origin, Vec2 extent, double zone_size) {
    ZoneGrid grid{origin, zone_size, 0, 0};
    grid.validate();
    grid.n_x = std::max(1, static_cast<int>(std::ceil(extent.x / zone_size)));
    grid.n_y = std::max(1, static_cast<int>(std::ceil(extent.y / zone_size)));
    return grid;
}

Trace parse_trace(std::istream& in, double step) {
    if (!(step > 0.0)) {
        throw ArgumentError("trace step must be positive");
    }
    check_header(in, kTraceHeader);

    Trace trace;
    trace.step = step;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        auto f = expect_fields(line, 4, line_no);
        TraceRecord rec;
        const double raw_time = field_double(f[0], "time_s", line_no);
        rec.vehicle_id = field_int(f[1], "vehicle_id", line_no);
        rec.position = {field_double(f[2], "x_m", line_no), field_double(f[3], "y_m", line_no)};
        if (raw_time < 0.0) {
            throw ParseError("negative time", line_no);
        }
        rec.time = static_cast<double>(trace.step_index(raw_time)) * step;
        trace.records.push_back(rec);
    }

    std::stable_sort(trace.records.begin(), trace.records.end(), [](const auto& a, const auto& b) {
        return std::pair(a.time, a.vehicle_id) < std::pair(b.time, b.vehicle_id);
    });
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        const auto& a = trace.records[i - 1];
        const auto& b = trace.records[i];
        if (a.time == b.time && a.vehicle_id == b.vehicle_id) {
            throw DuplicateError("duplicate record for vehicle " + std::to_string(b.vehicle_id) + " at t=" +
                                 text::format_double(b.time));
        }
    }
    trace.horizon = trace.records.empty() ? 0.0 : trace.records.back().time;
    return trace;
}

Trace load_trace(const std::string& path, double step) {
    auto in = open_input(path);
    return parse_trace(in, step);
}

void write_trace(std::ostream& out, const Trace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& r : trace.records) {
        out << text::format_double(r.time) << ',' << r.vehicle_id << ',' << text::format_double(r.position.x)
            << ',' << text::format_double(r.position.y) << '\n';
    }
}

void save_trace(const std::string& path, const Trace& trace) {
    auto out = open_output(path);
    write_trace(out, trace);
    if (!out) {
        throw IoError("write failed", path);
    }
}

std::vector<GnbSite> parse_gnbs(std::istream& in) {
    check_header(in, kGnbHeader);
    std::vector<GnbSite> gnbs;
    std::set<int> seen;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) {
            continue;
        }
        auto f = expect_fields(line, 3, line_no);
        GnbSite g{field_int(f[0], "gnb_id", line_no),
                  {field_double(f[1], "x_m", line_no), field_double(f[2], "y_m", line_no)}};
        if (!seen.insert(g.id).second) {
            throw DuplicateError("duplicate gnb_id " + std::to_string(g.id) + " (line " +
                                 std::to_string(line_no) + ")");
        }
        gnbs.push_back(g);
    }
    return gnbs;
}

std::vector<GnbSite> load_gnbs(const std::string& path) {
    auto in = open_input(path);
    return parse_gnbs(in);
}

void write_gnbs(std::ostream& out, const std::vector<GnbSite>& gnbs) {
    out << kGnbHeader << '\n';
    for (const auto& g : gnbs) {
        out << g.id << ',' << text::format_double(g.position.x) << ',' << text::format_double(g.position.y)
            << '\n';
    }
}

void save_gnbs(const std::string& path, const std::vector<GnbSite>& gnbs) {
    auto out = open_output(path);
    write_gnbs(out, gnbs);
    if (!out) {
        throw IoError("write failed", path);
    }
}

namespace {

// Position on the street lattice: at intersection (ix, iy), heading `dir`,
// `progress` metres along the outgoing segment.
struct StreetWalker {
    int ix = 0;
    int iy = 0;
    int dir = -1;  // 0:+x 1:+y 2:-x 3:-y, -1 parked
    double progress = 0.0;
};

constexpr std::array<int, 4> kDx{1, 0, -1, 0};
constexpr std::array<int, 4> kDy{0, 1, 0, -1};

class StreetLattice {
  public:
    StreetLattice(double width, double height, double block) {
        nx_ = std::max(1, static_cast<int>(std::floor(width / block)));
        ny_ = std::max(1, static_cast<int>(std::floor(height / block)));
        sx_ = width / nx_;
        sy_ = height / ny_;
    }

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int intersections() const { return nx_ * ny_; }

    Vec2 intersection(int ix, int iy) const { return {(ix + 0.5) * sx_, (iy + 0.5) * sy_}; }

    double segment_length(int dir) const { return (dir % 2 == 0) ? sx_ : sy_; }

    bool can_leave(int ix, int iy, int dir) const {
        const int jx = ix + kDx[dir];
        const int jy = iy + kDy[dir];
        return jx >= 0 && jy >= 0 && jx < nx_ && jy < ny_;
    }

    // Uniform over exits, excluding a U-turn unless it is the only exit.
    int choose_exit(int ix, int iy, int arrived_dir, Rng& rng) const {
        std::vector<int> options;
        for (int d = 0; d < 4; ++d) {
            if (can_leave(ix, iy, d) && (arrived_dir < 0 || d != (arrived_dir + 2) % 4)) {
                options.push_back(d);
            }
        }
        if (options.empty()) {
            if (arrived_dir >= 0 && can_leave(ix, iy, (arrived_dir + 2) % 4)) {
                return (arrived_dir + 2) % 4;
            }
            return -1;
        }
        return options[rng.index(options.size())];
    }

    Vec2 position(const StreetWalker& w) const {
        Vec2 p = intersection(w.ix, w.iy);
        if (w.dir >= 0) {
            p.x += kDx[w.dir] * w.progress;
            p.y += kDy[w.dir] * w.progress;
        }
        return p;
    }

    void advance(StreetWalker& w, double dist, Rng& rng) const {
        while (w.dir >= 0) {
            const double left = segment_length(w.dir) - w.progress;
            if (dist < left) {
                w.progress += dist;
                return;
            }
            dist -= left;
            w.ix += kDx[w.dir];
            w.iy += kDy[w.dir];
            w.progress = 0.0;
            w.dir = choose_exit(w.ix, w.iy, w.dir, rng);
        }
    }

  private:
    int nx_ = 1;
    int ny_ = 1;
    double sx_ = 1.0;
    double sy_ = 1.0;
};

}  // namespace

SyntheticScenario generate_synthetic(const SyntheticParams& p) {
    if (!(p.width > 0.0) || !(p.height > 0.0)) {
        throw ConfigError("synthetic area must be positive");
    }
    if (p.n_vehicles < 0 || p.n_gnbs < 0) {
        throw ConfigError("vehicle and gNB counts must be non-negative");
    }
    if (!(p.step > 0.0) || !(p.horizon >= 0.0)) {
        throw ConfigError("horizon must be non-negative and step positive");
    }
    if (!(p.block_size > 0.0) || !(p.speed >= 0.0)) {
        throw ConfigError("block size must be positive and speed non-negative");
    }

    const StreetLattice lattice(p.width, p.height, p.block_size);
    if (p.n_gnbs > lattice.intersections()) {
        throw ConfigError("requested " + std::to_string(p.n_gnbs) + " gNBs but the street grid has only " +
                          std::to_string(lattice.intersections()) + " intersections");
    }

    Rng rng(p.seed);
    SyntheticScenario out;

    // Partial Fisher-Yates over intersection indices.
    std::vector<int> slots(static_cast<std::size_t>(lattice.intersections()));
    for (std::size_t i = 0; i < slots.size(); ++i) {
        slots[i] = static_cast<int>(i);
    }
    for (int g = 0; g < p.n_gnbs; ++g) {
        const auto j = g + static_cast<std::size_t>(rng.index(slots.size() - g));
        std::swap(slots[g], slots[j]);
        const int s = slots[g];
        out.gnbs.push_back({g, lattice.intersection(s % lattice.nx(), s / lattice.nx())});
    }

    std::vector<StreetWalker> walkers(static_cast<std::size_t>(p.n_vehicles));
    for (auto& w : walkers) {
        const auto s = static_cast<int>(rng.index(lattice.intersections()));
        w.ix = s % lattice.nx();
        w.iy = s / lattice.nx();
        w.dir = lattice.choose_exit(w.ix, w.iy, -1, rng);
        if (w.dir >= 0) {
            w.progress = rng.uniform() * lattice.segment_length(w.dir);
        }
    }

    out.trace.step = p.step;
    const auto n_steps = static_cast<std::int64_t>(std::floor(p.horizon / p.step + 0.5));
    out.trace.horizon = p.n_vehicles > 0 ? static_cast<double>(n_steps) * p.step : 0.0;
    for (std::int64_t k = 0; k <= n_steps && p.n_vehicles > 0; ++k) {
        const double t = static_cast<double>(k) * p.step;
        for (std::size_t v = 0; v < walkers.size(); ++v) {
            if (k > 0) {
                lattice.advance(walkers[v], p.speed * p.step, rng);
            }
            out.trace.records.push_back({t, static_cast<int>(v), lattice.position(walkers[v])});
        }
    }
    return out;
}

VehicleSnapshot snapshot(const Trace& trace, const ZoneGrid& grid, double t) {
    const auto k = trace.step_index(t);
    const double on_grid = static_cast<double>(k) * trace.step;
    if (std::abs(t - on_grid) > 1e-9 * std::max(1.0, std::abs(t)) || k < 0) {
        throw ArgumentError("snapshot time " + text::format_double(t) + " is not a multiple of the trace step");
    }
    if (t > trace.horizon + 1e-9 * std::max(1.0, trace.horizon)) {
        throw ArgumentError("snapshot time " + text::format_double(t) + " exceeds the trace horizon");
    }

    VehicleSnapshot snap;
    snap.time = on_grid;
    auto first = std::partition_point(trace.records.begin(), trace.records.end(),
                                      [&](const TraceRecord& r) { return trace.step_index(r.time) < k; });
    for (auto it = first; it != trace.records.end() && trace.step_index(it->time) == k; ++it) {
        if (auto zone = grid.zone_of(it->position)) {
            snap.entries.push_back({it->vehicle_id, it->position, *zone});
        } else {
            ++snap.out_of_grid;
        }
    }
    return snap;
}

}  // namespace beamgraph
