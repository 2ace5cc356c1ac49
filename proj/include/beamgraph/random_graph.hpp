#pragma once

#include <cstdint>

#include "beamgraph/graph.hpp"

namespace beamgraph {

struct RandomGraphParams {
    int max_candidates = 12;
    int max_zones = 8;
    int max_gnbs = 3;
    double edge_probability = 0.4;
    double conflict_probability = 0.35;  // per same-gNB pair
    double conflict_free_probability = 0.25;  // no conflicts and a slack beam cap
    double integer_weight_probability = 0.3;  // small integer weights produce ties
};

struct RandomInstance {
    ConflictGraph graph;
    int max_beams = 1;
    int comp_limit = 1;
    bool conflict_free = false;
};

// Small matching instances with abstract (non-geometric) conflicts, for
// checking the greedy matcher against the exhaustive one.
RandomInstance random_instance(const RandomGraphParams& params, std::uint64_t seed);

}  // namespace beamgraph
