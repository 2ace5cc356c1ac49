#include "beamgraph/random_graph.hpp"

#include <algorithm>

#include "beamgraph/errors.hpp"
#include "beamgraph/rng.hpp"

namespace beamgraph {

RandomInstance random_instance(const RandomGraphParams& p, std::uint64_t seed) {
    if (p.max_candidates < 1 || p.max_zones < 1 || p.max_gnbs < 1) {
        throw ConfigError("random graph bounds must be >= 1");
    }
    Rng rng(seed);
    RandomInstance inst;
    const int n_c = 1 + static_cast<int>(rng.index(p.max_candidates));
    const int n_z = 1 + static_cast<int>(rng.index(p.max_zones));
    inst.max_beams = 1 + static_cast<int>(rng.index(4));
    inst.comp_limit = 1 + static_cast<int>(rng.index(2));
    inst.conflict_free = rng.bernoulli(p.conflict_free_probability);
    const bool integer_weights = rng.bernoulli(p.integer_weight_probability);

    // Conflict-free instances also keep the beam cap slack: candidates are
    // dealt round-robin over enough gNBs that none holds more than max_beams.
    const int n_g = inst.conflict_free ? (n_c + inst.max_beams - 1) / inst.max_beams
                                       : 1 + static_cast<int>(rng.index(std::min(p.max_gnbs, n_c)));

    auto& g = inst.graph;
    for (int c = 0; c < n_c; ++c) {
        const int gnb = inst.conflict_free ? c % n_g : static_cast<int>(rng.index(n_g));
        g.candidates.push_back({gnb, static_cast<double>(rng.index(360)), 10.0});
    }
    for (int z = 0; z < n_z; ++z) {
        g.zones.push_back({z, 1 + static_cast<int>(rng.index(5))});
    }
    for (int c = 0; c < n_c; ++c) {
        for (int z = 0; z < n_z; ++z) {
            if (rng.bernoulli(p.edge_probability)) {
                const double w = integer_weights ? static_cast<double>(1 + rng.index(5)) : rng.uniform(1.0, 100.0);
                g.edges.push_back({c, z, w});
            }
        }
    }
    if (!inst.conflict_free) {
        for (int a = 0; a < n_c; ++a) {
            for (int b = a + 1; b < n_c; ++b) {
                if (g.candidates[a].gnb_id == g.candidates[b].gnb_id && rng.bernoulli(p.conflict_probability)) {
                    g.conflict_pairs.emplace_back(a, b);
                }
            }
        }
    }
    return inst;
}

}  // namespace beamgraph
