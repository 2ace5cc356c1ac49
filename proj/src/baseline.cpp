#include "beamgraph/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "beamgraph/channel.hpp"
#include "beamgraph/errors.hpp"
#include "beamgraph/geometry.hpp"

namespace beamgraph {

ClusterSet dbscan_circular(std::span<const double> angles, double eps, int min_pts) {
    const std::size_t n = angles.size();
    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i) {
        norm[i] = normalize_angle(angles[i]);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return norm[a] < norm[b]; });

    auto region = [&](std::size_t p) {
        std::vector<std::size_t> out;
        for (std::size_t q : order) {
            if (circular_distance(norm[p], norm[q]) <= eps) {
                out.push_back(q);
            }
        }
        return out;
    };

    constexpr int kUnvisited = -2;
    constexpr int kNoise = -1;
    std::vector<int> label(n, kUnvisited);
    int n_clusters = 0;
    for (std::size_t p : order) {
        if (label[p] != kUnvisited) {
            continue;
        }
        auto seeds = region(p);
        if (static_cast<int>(seeds.size()) < min_pts) {
            label[p] = kNoise;
            continue;
        }
        const int cluster = n_clusters++;
        label[p] = cluster;
        for (std::size_t k = 0; k < seeds.size(); ++k) {
            const std::size_t q = seeds[k];
            if (label[q] == kNoise) {
                label[q] = cluster;  // border point
            }
            if (label[q] != kUnvisited) {
                continue;
            }
            label[q] = cluster;
            auto more = region(q);
            if (static_cast<int>(more.size()) >= min_pts) {
                seeds.insert(seeds.end(), more.begin(), more.end());
            }
        }
    }

    ClusterSet out;
    out.clusters.resize(static_cast<std::size_t>(n_clusters));
    for (std::size_t p : order) {
        if (label[p] == kNoise) {
            out.noise.push_back(angles[p]);
        } else {
            out.clusters[static_cast<std::size_t>(label[p])].push_back(angles[p]);
        }
    }
    return out;
}

double circular_mean(std::span<const double> angles) {
    if (angles.empty()) {
        return 0.0;
    }
    double s = 0.0;
    double c = 0.0;
    for (double a : angles) {
        const double r = a * std::numbers::pi / 180.0;
        s += std::sin(r);
        c += std::cos(r);
    }
    if (std::hypot(s, c) < 1e-9 * static_cast<double>(angles.size())) {
        return normalize_angle(angles.front());
    }
    return normalize_angle(std::atan2(s, c) * 180.0 / std::numbers::pi);
}

namespace {

// Summed edge weight the beam would collect over the snapshot's occupied zones.
double sweep_score(const BeamCandidate& beam, const std::vector<std::pair<ZoneLink, int>>& zones,
                   const Config& config, const ChannelParams& channel) {
    const double power = config.per_beam_power();
    const double noise = config.noise_watts();
    const double floor = config.min_edge_rate();
    double total = 0.0;
    for (const auto& [zl, n_vehicles] : zones) {
        if (!covers(beam, zl.theta)) {
            continue;
        }
        const double w =
            noise_limited_rate(zl.link, beam, power, n_vehicles, noise, config.radio.bandwidth, channel);
        if (w > 0.0 && w >= floor) {
            total += w;
        }
    }
    return total;
}

}  // namespace

std::vector<BeamCandidate> dbscan_beam_design(const VehicleSnapshot& snap, const ZoneGrid& grid,
                                              const GnbSite& gnb, const Config& config, std::uint64_t seed) {
    const ChannelParams channel = config.channel();
    const double power = config.per_beam_power();
    const double noise = config.noise_watts();
    const double floor = config.min_edge_rate();
    const double narrowest = *std::min_element(config.radio.beamwidth_set.begin(), config.radio.beamwidth_set.end());

    std::map<int, int> occupancy;
    for (const auto& e : snap.entries) {
        ++occupancy[e.zone_id];
    }
    std::vector<std::pair<ZoneLink, int>> zones;
    std::map<int, bool> reachable;
    for (const auto& [zone, n] : occupancy) {
        auto zl = zone_link(gnb, grid, zone, config, seed);
        bool ok = false;
        if (zl) {
            const BeamCandidate probe{gnb.id, zl->theta, narrowest};
            ok = noise_limited_rate(zl->link, probe, power, 1, noise, config.radio.bandwidth, channel) >= floor;
            zones.emplace_back(*zl, n);
        }
        reachable[zone] = ok;
    }

    std::vector<double> angles;
    for (const auto& e : snap.entries) {
        if (reachable[e.zone_id] && e.position != gnb.position) {
            angles.push_back(angle_of_departure(gnb, e.position));
        }
    }
    if (angles.empty()) {
        return {};
    }

    auto clusters = dbscan_circular(angles, config.dbscan.eps, config.dbscan.min_pts).clusters;
    struct Ranked {
        std::size_t size;
        double mean;
    };
    std::vector<Ranked> ranked;
    for (const auto& c : clusters) {
        ranked.push_back({c.size(), circular_mean(c)});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        return a.size != b.size ? a.size > b.size : a.mean < b.mean;
    });
    if (static_cast<int>(ranked.size()) > config.radio.max_beams) {
        ranked.resize(static_cast<std::size_t>(config.radio.max_beams));
    }

    const double step = config.radio.direction_step;
    std::vector<BeamCandidate> beams;
    for (const auto& r : ranked) {
        const double direction = normalize_angle(std::round(r.mean / step) * step);
        BeamCandidate best{gnb.id, direction, config.radio.beamwidth_set.front()};
        double best_score = -1.0;
        for (double w : config.radio.beamwidth_set) {
            const BeamCandidate beam{gnb.id, direction, w};
            const double score = sweep_score(beam, zones, config, channel);
            if (score > best_score) {
                best_score = score;
                best = beam;
            }
        }
        const bool overlaps = std::any_of(beams.begin(), beams.end(),
                                          [&](const BeamCandidate& kept) { return conflicts(kept, best); });
        if (!overlaps) {
            beams.push_back(best);
        }
    }
    return beams;
}

BaselineDesign dbscan_associate(std::span<const std::vector<BeamCandidate>> beams, const VehicleSnapshot& snap,
                                const ZoneGrid& grid, std::span<const GnbSite> gnbs, const Config& config,
                                std::uint64_t seed) {
    std::vector<BeamCandidate> all;
    for (const auto& per_gnb : beams) {
        for (std::size_t i = 0; i < per_gnb.size(); ++i) {
            for (std::size_t j = i + 1; j < per_gnb.size(); ++j) {
                if (conflicts(per_gnb[i], per_gnb[j])) {
                    throw ArgumentError("baseline beams overlap at gNB " + std::to_string(per_gnb[i].gnb_id));
                }
            }
        }
        all.insert(all.end(), per_gnb.begin(), per_gnb.end());
    }

    BaselineDesign out;
    out.graph = build_graph_for(std::move(all), snap, grid, gnbs, config, seed);

    std::vector<std::vector<GraphEdge>> by_zone(out.graph.zones.size());
    for (const auto& e : out.graph.edges) {
        by_zone[e.zone].push_back(e);
    }
    auto& sol = out.solution;
    for (auto& list : by_zone) {
        std::stable_sort(list.begin(), list.end(), [](const GraphEdge& a, const GraphEdge& b) {
            return a.weight != b.weight ? a.weight > b.weight : a.candidate < b.candidate;
        });
        const auto take = std::min<std::size_t>(list.size(), static_cast<std::size_t>(config.radio.comp_limit));
        for (std::size_t k = 0; k < take; ++k) {
            sol.assoc.emplace_back(list[k].candidate, list[k].zone);
        }
    }
    std::sort(sol.assoc.begin(), sol.assoc.end());
    for (auto [c, z] : sol.assoc) {
        if (sol.active.empty() || sol.active.back() != c) {
            sol.active.push_back(c);
        }
    }
    sol.total_weight = solution_weight(sol, out.graph);
    return out;
}

}  // namespace beamgraph
