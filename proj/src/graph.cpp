#include "beamgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "beamgraph/channel.hpp"
#include "beamgraph/errors.hpp"

namespace beamgraph {

std::vector<BeamCandidate> enumerate_candidates(std::span<const GnbSite> gnbs, const RadioConfig& config) {
    const auto n_dirs = static_cast<int>(std::llround(360.0 / config.direction_step));
    std::vector<BeamCandidate> out;
    out.reserve(gnbs.size() * static_cast<std::size_t>(n_dirs) * config.beamwidth_set.size());
    for (const auto& g : gnbs) {
        for (int k = 0; k < n_dirs; ++k) {
            const double dir = k * config.direction_step;
            for (double w : config.beamwidth_set) {
                out.push_back({g.id, dir, w});
            }
        }
    }
    return out;
}

std::optional<ZoneLink> zone_link(const GnbSite& gnb, const ZoneGrid& grid, int zone_id, const Config& config,
                                  std::uint64_t seed) {
    const Vec2 c = grid.center(zone_id);
    if (c == gnb.position) {
        return std::nullopt;
    }
    ZoneLink zl;
    zl.theta = angle_of_departure(gnb, c);
    zl.link.gnb_id = gnb.id;
    zl.link.zone_id = zone_id;
    zl.link.distance = distance(gnb.position, c);
    zl.link.los = los_state(gnb.id, zone_id, zl.link.distance, seed, config.los_distance);
    return zl;
}

ConflictGraph build_graph_for(std::vector<BeamCandidate> candidates, const VehicleSnapshot& snap,
                              const ZoneGrid& grid, std::span<const GnbSite> gnbs, const Config& config,
                              std::uint64_t seed) {
    ConflictGraph graph;
    graph.candidates = std::move(candidates);

    std::map<int, int> occupancy;
    for (const auto& e : snap.entries) {
        ++occupancy[e.zone_id];
    }
    for (const auto& [zone, n] : occupancy) {
        graph.zones.push_back({zone, n});
    }

    std::unordered_map<int, std::size_t> gnb_index;
    for (std::size_t i = 0; i < gnbs.size(); ++i) {
        gnb_index.emplace(gnbs[i].id, i);
    }

    // Links are shared by every candidate of a gNB.
    const std::size_t n_zones = graph.zones.size();
    std::vector<std::optional<ZoneLink>> links(gnbs.size() * n_zones);
    for (std::size_t g = 0; g < gnbs.size(); ++g) {
        for (std::size_t z = 0; z < n_zones; ++z) {
            links[g * n_zones + z] = zone_link(gnbs[g], grid, graph.zones[z].zone_id, config, seed);
        }
    }

    const ChannelParams channel = config.channel();
    const double power = config.per_beam_power();
    const double noise = config.noise_watts();
    const double floor = config.min_edge_rate();

    std::vector<char> has_edge(graph.candidates.size(), 0);
    for (std::size_t c = 0; c < graph.candidates.size(); ++c) {
        const auto& beam = graph.candidates[c];
        auto it = gnb_index.find(beam.gnb_id);
        if (it == gnb_index.end()) {
            throw ConsistencyError("candidate references unknown gNB " + std::to_string(beam.gnb_id));
        }
        for (std::size_t z = 0; z < n_zones; ++z) {
            const auto& zl = links[it->second * n_zones + z];
            if (!zl || !covers(beam, zl->theta)) {
                continue;
            }
            const double w = noise_limited_rate(zl->link, beam, power, graph.zones[z].n_vehicles, noise,
                                                config.radio.bandwidth, channel);
            if (w > 0.0 && w >= floor) {
                graph.edges.push_back({static_cast<int>(c), static_cast<int>(z), w});
                has_edge[c] = 1;
            }
        }
    }

    std::map<int, std::vector<int>> by_gnb;
    for (std::size_t c = 0; c < graph.candidates.size(); ++c) {
        if (has_edge[c]) {
            by_gnb[graph.candidates[c].gnb_id].push_back(static_cast<int>(c));
        }
    }
    for (const auto& [gnb, members] : by_gnb) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                if (conflicts(graph.candidates[members[i]], graph.candidates[members[j]])) {
                    graph.conflict_pairs.emplace_back(members[i], members[j]);
                }
            }
        }
    }
    std::sort(graph.conflict_pairs.begin(), graph.conflict_pairs.end());
    return graph;
}

ConflictGraph build_graph(const VehicleSnapshot& snap, const ZoneGrid& grid, std::span<const GnbSite> gnbs,
                          const Config& config, std::uint64_t seed) {
    return build_graph_for(enumerate_candidates(gnbs, config.radio), snap, grid, gnbs, config, seed);
}

int candidates_with_edges(const ConflictGraph& graph) {
    std::vector<char> seen(graph.candidates.size(), 0);
    int n = 0;
    for (const auto& e : graph.edges) {
        if (!seen[e.candidate]) {
            seen[e.candidate] = 1;
            ++n;
        }
    }
    return n;
}

namespace {

// Zone-sorted (zone, weight) lists per candidate.
std::vector<std::vector<std::pair<int, double>>> edge_lists(const ConflictGraph& g) {
    std::vector<std::vector<std::pair<int, double>>> out(g.candidates.size());
    for (const auto& e : g.edges) {
        out[e.candidate].emplace_back(e.zone, e.weight);
    }
    return out;
}

std::vector<std::vector<int>> conflict_lists(const ConflictGraph& g) {
    std::vector<std::vector<int>> out(g.candidates.size());
    for (auto [a, b] : g.conflict_pairs) {
        out[a].push_back(b);
        out[b].push_back(a);
    }
    for (auto& l : out) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    return out;
}

}  // namespace

ConflictGraph prune_dominated(const ConflictGraph& graph) {
    const auto n = graph.candidates.size();
    const auto edges = edge_lists(graph);
    const auto nbrs = conflict_lists(graph);

    std::vector<char> alive(n, 1);
    for (std::size_t c = 0; c < n; ++c) {
        if (edges[c].empty()) {
            alive[c] = 0;
        }
    }

    // Does `by` dominate `c` among currently alive candidates?
    auto dominates = [&](int by, int c) {
        if (graph.candidates[by].gnb_id != graph.candidates[c].gnb_id) {
            return false;
        }
        // Every zone of c appears at by and is scanned at by first.
        const auto& ec = edges[c];
        const auto& eb = edges[by];
        std::size_t j = 0;
        for (const auto& [zone, w] : ec) {
            while (j < eb.size() && eb[j].first < zone) {
                ++j;
            }
            if (j == eb.size() || eb[j].first != zone) {
                return false;
            }
            const double wb = eb[j].second;
            if (!(wb > w || (wb == w && by < c))) {
                return false;
            }
        }
        // Alive conflict neighbours of `by` other than c are neighbours of c.
        for (int x : nbrs[by]) {
            if (x == c || !alive[x]) {
                continue;
            }
            if (!std::binary_search(nbrs[c].begin(), nbrs[c].end(), x)) {
                return false;
            }
        }
        return true;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t c = 0; c < n; ++c) {
            if (!alive[c]) {
                continue;
            }
            for (int by : nbrs[c]) {
                if (alive[by] && dominates(by, static_cast<int>(c))) {
                    alive[c] = 0;
                    changed = true;
                    break;
                }
            }
        }
    }

    std::vector<int> remap(n, -1);
    ConflictGraph out;
    out.zones = graph.zones;
    for (std::size_t c = 0; c < n; ++c) {
        if (alive[c]) {
            remap[c] = static_cast<int>(out.candidates.size());
            out.candidates.push_back(graph.candidates[c]);
        }
    }
    for (const auto& e : graph.edges) {
        if (remap[e.candidate] >= 0) {
            out.edges.push_back({remap[e.candidate], e.zone, e.weight});
        }
    }
    for (auto [a, b] : graph.conflict_pairs) {
        if (remap[a] >= 0 && remap[b] >= 0) {
            out.conflict_pairs.emplace_back(remap[a], remap[b]);
        }
    }
    return out;
}

void validate_graph(const ConflictGraph& g) {
    const auto nc = static_cast<int>(g.candidates.size());
    const auto nz = static_cast<int>(g.zones.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const auto& e = g.edges[i];
        if (e.candidate < 0 || e.candidate >= nc || e.zone < 0 || e.zone >= nz) {
            throw ConsistencyError("edge " + std::to_string(i) + " index out of range");
        }
        if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
            throw ConsistencyError("edge " + std::to_string(i) + " has non-positive weight");
        }
        if (i > 0) {
            const auto& p = g.edges[i - 1];
            if (std::pair(p.candidate, p.zone) >= std::pair(e.candidate, e.zone)) {
                throw ConsistencyError("edges must be sorted by (candidate, zone) without duplicates");
            }
        }
    }
    for (auto [a, b] : g.conflict_pairs) {
        if (a < 0 || b >= nc || a >= b) {
            throw ConsistencyError("conflict pair (" + std::to_string(a) + "," + std::to_string(b) +
                                   ") malformed");
        }
    }
}

nlohmann::json graph_to_json(const ConflictGraph& g) {
    nlohmann::json j;
    j["candidates"] = nlohmann::json::array();
    for (const auto& c : g.candidates) {
        j["candidates"].push_back({{"gnb", c.gnb_id}, {"direction", c.direction}, {"width", c.width}});
    }
    j["zones"] = nlohmann::json::array();
    for (const auto& z : g.zones) {
        j["zones"].push_back({{"zone", z.zone_id}, {"vehicles", z.n_vehicles}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : g.edges) {
        j["edges"].push_back({e.candidate, e.zone, e.weight});
    }
    j["conflicts"] = nlohmann::json::array();
    for (auto [a, b] : g.conflict_pairs) {
        j["conflicts"].push_back({a, b});
    }
    return j;
}

ConflictGraph graph_from_json(const nlohmann::json& j) {
    ConflictGraph g;
    try {
        for (const auto& c : j.at("candidates")) {
            g.candidates.push_back({c.at("gnb").get<int>(), c.at("direction").get<double>(),
                                    c.at("width").get<double>()});
        }
        for (const auto& z : j.at("zones")) {
            g.zones.push_back({z.at("zone").get<int>(), z.at("vehicles").get<int>()});
        }
        for (const auto& e : j.at("edges")) {
            g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
        }
        for (const auto& c : j.at("conflicts")) {
            auto a = c.at(0).get<int>();
            auto b = c.at(1).get<int>();
            g.conflict_pairs.emplace_back(std::min(a, b), std::max(a, b));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed graph JSON: ") + e.what());
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const auto& a, const auto& b) { return std::pair(a.candidate, a.zone) < std::pair(b.candidate, b.zone); });
    std::sort(g.conflict_pairs.begin(), g.conflict_pairs.end());
    validate_graph(g);
    return g;
}

}  // namespace beamgraph
