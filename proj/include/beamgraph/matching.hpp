#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "beamgraph/graph.hpp"

namespace beamgraph {

// Active beams and zone associations over a ConflictGraph.
// `active` and `assoc` are kept sorted.
struct Solution {
    std::vector<int> active;                  // candidate indices
    std::vector<std::pair<int, int>> assoc;   // (candidate, zone index)
    double total_weight = 0.0;                // bits/s

    friend bool operator==(const Solution&, const Solution&) = default;
};

enum class Constraint { beam_count, conflict, coverage, active_beam, comp_limit };

const char* to_string(Constraint c);

struct Violation {
    Constraint constraint;
    std::string details;
};

struct FeasibilityReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

// Certifies the beam-count, overlap, coverage, activity and CoMP
// constraints. Never throws; everything found is reported.
FeasibilityReport check_feasible(const Solution& sol, const ConflictGraph& graph, int max_beams, int comp_limit);

// Edges not in `sol` that could still be added without breaking any
// constraint. Empty for a maximal solution.
std::vector<GraphEdge> addable_edges(const Solution& sol, const ConflictGraph& graph, int max_beams, int comp_limit);

// Scans edges by descending weight (ties: lower candidate, then lower
// zone) and accepts an edge when its zone has fewer than `comp_limit`
// associations and its candidate is active already, or can be activated
// without exceeding `max_beams` at its gNB or overlapping an active beam.
Solution greedy_match(const ConflictGraph& graph, int max_beams, int comp_limit);

// Exhaustive optimum for small graphs.
//
// Enumerates every active set of edge-bearing candidates that respects the
// beam cap and the conflicts. Given the active set, zones do not interact
// (each zone's only constraint is its own CoMP cap), so taking each zone's
// `comp_limit` heaviest edges to active candidates is optimal for that set.
// Candidates left without associations are dropped from the result. Ties
// in total weight go to the lexicographically smallest active list.
//
// Throws SizeError when more than `limit` candidates carry edges.
Solution exact_match(const ConflictGraph& graph, int max_beams, int comp_limit, int limit = 20);

// Recomputes the objective from the graph. Throws ConsistencyError for
// associations that are not graph edges.
double solution_weight(const Solution& sol, const ConflictGraph& graph);

nlohmann::json solution_to_json(const Solution& sol);

}  // namespace beamgraph
