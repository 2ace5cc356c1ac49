#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beamgraph/config.hpp"
#include "beamgraph/graph.hpp"
#include "beamgraph/matching.hpp"

namespace beamgraph {

// Clustering benchmark: DBSCAN over departure angles decides beam count
// and directions, a width sweep picks each beam's width.

struct ClusterSet {
    std::vector<std::vector<double>> clusters;  // members in scan order
    std::vector<double> noise;
};

// DBSCAN with circular_distance as the metric. A point is core when at
// least `min_pts` points, itself included, lie within `eps`. Points are
// scanned by ascending normalised angle, then input order.
ClusterSet dbscan_circular(std::span<const double> angles, double eps, int min_pts);

// Vector-sum mean direction in [0, 360); falls back to the first angle
// when the resultant vanishes.
double circular_mean(std::span<const double> angles);

// Beams for one gNB from the vehicles it can reach at all (narrowest beam,
// P^t/N, rate floor). At most max_beams beams, largest clusters first,
// never overlapping.
std::vector<BeamCandidate> dbscan_beam_design(const VehicleSnapshot& snap, const ZoneGrid& grid,
                                              const GnbSite& gnb, const Config& config, std::uint64_t seed);

struct BaselineDesign {
    ConflictGraph graph;  // designed beams x occupied zones
    Solution solution;
};

// Every occupied zone takes its comp_limit best covering beams by
// noise-limited rate. Beams without associations stay inactive.
BaselineDesign dbscan_associate(std::span<const std::vector<BeamCandidate>> beams, const VehicleSnapshot& snap,
                                const ZoneGrid& grid, std::span<const GnbSite> gnbs, const Config& config,
                                std::uint64_t seed);

}  // namespace beamgraph
