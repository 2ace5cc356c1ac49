#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"

#include "beamgraph/config.hpp"
#include "beamgraph/geometry.hpp"
#include "beamgraph/scenario.hpp"

namespace beamgraph {

struct ZoneVertex {
    int zone_id = 0;
    int n_vehicles = 0;

    friend bool operator==(const ZoneVertex&, const ZoneVertex&) = default;
};

struct GraphEdge {
    int candidate = 0;  // index into ConflictGraph::candidates
    int zone = 0;       // index into ConflictGraph::zones
    double weight = 0.0;  // bits/s

    friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Bipartite graph of beam candidates (left) and occupied zones (right),
// with conflict edges among left vertices.
//
// Edges are sorted by (candidate, zone) and unique. Conflict pairs are
// stored as (low, high) index pairs in ascending order.
struct ConflictGraph {
    std::vector<BeamCandidate> candidates;
    std::vector<ZoneVertex> zones;
    std::vector<GraphEdge> edges;
    std::vector<std::pair<int, int>> conflict_pairs;

    friend bool operator==(const ConflictGraph&, const ConflictGraph&) = default;
};

// Cartesian product directions x beamwidths per gNB, ordered by
// (gNB, direction, width).
std::vector<BeamCandidate> enumerate_candidates(std::span<const GnbSite> gnbs, const RadioConfig& config);

// Geometry of one gNB-zone link with its frozen LoS draw. nullopt when the
// zone centre coincides with the gNB (no departure angle).
struct ZoneLink {
    LinkState link;
    double theta = 0.0;
};
std::optional<ZoneLink> zone_link(const GnbSite& gnb, const ZoneGrid& grid, int zone_id, const Config& config,
                                  std::uint64_t seed);

// Graph over an explicit candidate list. Edges carry the noise-limited rate
// at P^t/N per beam and are kept when the candidate covers the zone centre
// and the weight reaches the configured floor.
ConflictGraph build_graph_for(std::vector<BeamCandidate> candidates, const VehicleSnapshot& snap,
                              const ZoneGrid& grid, std::span<const GnbSite> gnbs, const Config& config,
                              std::uint64_t seed);

ConflictGraph build_graph(const VehicleSnapshot& snap, const ZoneGrid& grid, std::span<const GnbSite> gnbs,
                          const Config& config, std::uint64_t seed);

// Drops candidates that the greedy matcher can never activate: edgeless
// candidates, and candidates c for which some same-gNB c' conflicting with c
// has a superset of c's zones, wins every shared zone in the greedy scan
// order, and conflicts with nothing that c does not also conflict with.
// Surviving candidates keep their relative order.
ConflictGraph prune_dominated(const ConflictGraph& graph);

// Structural checks: index ranges, edge order/uniqueness, positive weights,
// well-formed conflict pairs. Throws ConsistencyError.
void validate_graph(const ConflictGraph& graph);

int candidates_with_edges(const ConflictGraph& graph);

nlohmann::json graph_to_json(const ConflictGraph& graph);
ConflictGraph graph_from_json(const nlohmann::json& j);

}  // namespace beamgraph
