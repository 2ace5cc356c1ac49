#include "beamgraph/matching.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "beamgraph/errors.hpp"

namespace beamgraph {

namespace {

class EdgeIndex {
  public:
    explicit EdgeIndex(const ConflictGraph& g) : n_zones_(static_cast<long long>(g.zones.size())) {
        map_.reserve(g.edges.size());
        for (const auto& e : g.edges) {
            map_.emplace(key(e.candidate, e.zone), e.weight);
        }
    }

    const double* find(int c, int z) const {
        auto it = map_.find(key(c, z));
        return it == map_.end() ? nullptr : &it->second;
    }

  private:
    long long key(int c, int z) const { return static_cast<long long>(c) * n_zones_ + z; }

    long long n_zones_;
    std::unordered_map<long long, double> map_;
};

std::vector<std::vector<int>> neighbours(const ConflictGraph& g) {
    std::vector<std::vector<int>> out(g.candidates.size());
    for (auto [a, b] : g.conflict_pairs) {
        out[a].push_back(b);
        out[b].push_back(a);
    }
    return out;
}

// Sum in (candidate, zone) order so that every path computing the
// objective produces the same bits.
double sum_weights(const std::vector<std::pair<int, int>>& assoc, const EdgeIndex& index) {
    double total = 0.0;
    for (auto [c, z] : assoc) {
        total += *index.find(c, z);
    }
    return total;
}

// Dense per-gNB counters keyed by position in the sorted id list.
std::vector<int> gnb_slots(const ConflictGraph& g, int& n_gnbs) {
    std::vector<int> ids;
    ids.reserve(g.candidates.size());
    for (const auto& c : g.candidates) {
        ids.push_back(c.gnb_id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    n_gnbs = static_cast<int>(ids.size());
    std::vector<int> slot(g.candidates.size());
    for (std::size_t c = 0; c < g.candidates.size(); ++c) {
        slot[c] = static_cast<int>(std::lower_bound(ids.begin(), ids.end(), g.candidates[c].gnb_id) - ids.begin());
    }
    return slot;
}

}  // namespace

const char* to_string(Constraint c) {
    switch (c) {
        case Constraint::beam_count:
            return "beam_count";
        case Constraint::conflict:
            return "conflict";
        case Constraint::coverage:
            return "coverage";
        case Constraint::active_beam:
            return "active_beam";
        case Constraint::comp_limit:
            return "comp_limit";
    }
    return "unknown";
}

FeasibilityReport check_feasible(const Solution& sol, const ConflictGraph& graph, int max_beams, int comp_limit) {
    FeasibilityReport report;
    auto add = [&](Constraint c, std::string d) { report.violations.push_back({c, std::move(d)}); };

    const auto nc = static_cast<int>(graph.candidates.size());
    const auto nz = static_cast<int>(graph.zones.size());
    const EdgeIndex index(graph);

    std::vector<char> active(graph.candidates.size(), 0);
    std::unordered_map<int, int> per_gnb;
    for (int c : sol.active) {
        if (c < 0 || c >= nc) {
            add(Constraint::active_beam, "active candidate " + std::to_string(c) + " out of range");
            continue;
        }
        if (!active[c]) {
            active[c] = 1;
            ++per_gnb[graph.candidates[c].gnb_id];
        }
    }
    std::vector<std::pair<int, int>> gnb_counts(per_gnb.begin(), per_gnb.end());
    std::sort(gnb_counts.begin(), gnb_counts.end());
    for (auto [gnb, n] : gnb_counts) {
        if (n > max_beams) {
            add(Constraint::beam_count,
                "gNB " + std::to_string(gnb) + " has " + std::to_string(n) + " active beams > " +
                    std::to_string(max_beams));
        }
    }

    for (auto [a, b] : graph.conflict_pairs) {
        if (active[a] && active[b]) {
            add(Constraint::conflict, "conflicting candidates " + std::to_string(a) + " and " + std::to_string(b) +
                                          " both active");
        }
    }

    std::vector<int> per_zone(graph.zones.size(), 0);
    for (auto [c, z] : sol.assoc) {
        const std::string tag = "(" + std::to_string(c) + "," + std::to_string(z) + ")";
        if (c < 0 || c >= nc || z < 0 || z >= nz) {
            add(Constraint::coverage, "association " + tag + " out of range");
            continue;
        }
        if (!index.find(c, z)) {
            add(Constraint::coverage, "association " + tag + " is not a coverage edge");
        }
        if (!active[c]) {
            add(Constraint::active_beam, "association " + tag + " uses an inactive beam");
        }
        ++per_zone[z];
    }
    for (int z = 0; z < nz; ++z) {
        if (per_zone[z] > comp_limit) {
            add(Constraint::comp_limit, "zone index " + std::to_string(z) + " has " + std::to_string(per_zone[z]) +
                                            " associations > " + std::to_string(comp_limit));
        }
    }
    return report;
}

std::vector<GraphEdge> addable_edges(const Solution& sol, const ConflictGraph& graph, int max_beams,
                                     int comp_limit) {
    int n_gnbs = 0;
    const auto slot = gnb_slots(graph, n_gnbs);
    std::vector<char> active(graph.candidates.size(), 0);
    std::vector<int> gnb_active(n_gnbs, 0);
    for (int c : sol.active) {
        if (!active[c]) {
            active[c] = 1;
            ++gnb_active[slot[c]];
        }
    }
    std::vector<int> blocked(graph.candidates.size(), 0);
    for (auto [a, b] : graph.conflict_pairs) {
        blocked[a] += active[b];
        blocked[b] += active[a];
    }
    std::vector<int> zone_count(graph.zones.size(), 0);
    for (auto [c, z] : sol.assoc) {
        ++zone_count[z];
    }

    std::vector<GraphEdge> out;
    for (const auto& e : graph.edges) {
        if (std::binary_search(sol.assoc.begin(), sol.assoc.end(), std::pair(e.candidate, e.zone))) {
            continue;
        }
        if (zone_count[e.zone] >= comp_limit) {
            continue;
        }
        const bool can_use = active[e.candidate] ||
                             (gnb_active[slot[e.candidate]] < max_beams && blocked[e.candidate] == 0);
        if (can_use) {
            out.push_back(e);
        }
    }
    return out;
}

Solution greedy_match(const ConflictGraph& graph, int max_beams, int comp_limit) {
    std::vector<std::size_t> order(graph.edges.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const auto& a = graph.edges[i];
        const auto& b = graph.edges[j];
        if (a.weight != b.weight) {
            return a.weight > b.weight;
        }
        return std::pair(a.candidate, a.zone) < std::pair(b.candidate, b.zone);
    });

    int n_gnbs = 0;
    const auto slot = gnb_slots(graph, n_gnbs);
    const auto nbrs = neighbours(graph);
    std::vector<char> active(graph.candidates.size(), 0);
    std::vector<int> blocked(graph.candidates.size(), 0);  // active conflict neighbours
    std::vector<int> gnb_active(n_gnbs, 0);
    std::vector<int> zone_count(graph.zones.size(), 0);

    Solution sol;
    for (std::size_t i : order) {
        const auto& e = graph.edges[i];
        if (zone_count[e.zone] >= comp_limit) {
            continue;
        }
        if (!active[e.candidate]) {
            if (gnb_active[slot[e.candidate]] >= max_beams || blocked[e.candidate] > 0) {
                continue;
            }
            active[e.candidate] = 1;
            ++gnb_active[slot[e.candidate]];
            for (int x : nbrs[e.candidate]) {
                ++blocked[x];
            }
            sol.active.push_back(e.candidate);
        }
        ++zone_count[e.zone];
        sol.assoc.emplace_back(e.candidate, e.zone);
    }
    std::sort(sol.active.begin(), sol.active.end());
    std::sort(sol.assoc.begin(), sol.assoc.end());
    sol.total_weight = sum_weights(sol.assoc, EdgeIndex(graph));
    return sol;
}

Solution exact_match(const ConflictGraph& graph, int max_beams, int comp_limit, int limit) {
    std::vector<int> pool;
    {
        std::vector<char> seen(graph.candidates.size(), 0);
        for (const auto& e : graph.edges) {
            seen[e.candidate] = 1;
        }
        for (std::size_t c = 0; c < seen.size(); ++c) {
            if (seen[c]) {
                pool.push_back(static_cast<int>(c));
            }
        }
    }
    if (static_cast<int>(pool.size()) > limit) {
        throw SizeError("exact matcher limited to " + std::to_string(limit) + " candidates with edges, got " +
                        std::to_string(pool.size()));
    }

    // Per zone: edges by descending weight, ties to lower candidate.
    std::vector<std::vector<GraphEdge>> by_zone(graph.zones.size());
    for (const auto& e : graph.edges) {
        by_zone[e.zone].push_back(e);
    }
    for (auto& list : by_zone) {
        std::sort(list.begin(), list.end(), [](const GraphEdge& a, const GraphEdge& b) {
            return a.weight != b.weight ? a.weight > b.weight : a.candidate < b.candidate;
        });
    }

    int n_gnbs = 0;
    const auto slot = gnb_slots(graph, n_gnbs);
    const auto nbrs = neighbours(graph);
    const EdgeIndex index(graph);

    std::vector<char> active(graph.candidates.size(), 0);
    std::vector<int> blocked(graph.candidates.size(), 0);
    std::vector<int> gnb_active(n_gnbs, 0);

    Solution best;
    bool have_best = false;

    auto evaluate = [&]() {
        Solution s;
        for (const auto& list : by_zone) {
            int taken = 0;
            for (const auto& e : list) {
                if (taken == comp_limit) {
                    break;
                }
                if (active[e.candidate]) {
                    s.assoc.emplace_back(e.candidate, e.zone);
                    ++taken;
                }
            }
        }
        std::sort(s.assoc.begin(), s.assoc.end());
        for (auto [c, z] : s.assoc) {
            if (s.active.empty() || s.active.back() != c) {
                s.active.push_back(c);
            }
        }
        s.total_weight = sum_weights(s.assoc, index);
        if (!have_best || s.total_weight > best.total_weight ||
            (s.total_weight == best.total_weight && s.active < best.active)) {
            best = std::move(s);
            have_best = true;
        }
    };

    auto search = [&](auto&& self, std::size_t i) -> void {
        if (i == pool.size()) {
            evaluate();
            return;
        }
        const int c = pool[i];
        self(self, i + 1);
        if (gnb_active[slot[c]] < max_beams && blocked[c] == 0) {
            active[c] = 1;
            ++gnb_active[slot[c]];
            for (int x : nbrs[c]) {
                ++blocked[x];
            }
            self(self, i + 1);
            for (int x : nbrs[c]) {
                --blocked[x];
            }
            --gnb_active[slot[c]];
            active[c] = 0;
        }
    };
    search(search, 0);
    return best;
}

double solution_weight(const Solution& sol, const ConflictGraph& graph) {
    const EdgeIndex index(graph);
    double total = 0.0;
    for (auto [c, z] : sol.assoc) {
        const double* w = index.find(c, z);
        if (!w) {
            throw ConsistencyError("association (" + std::to_string(c) + "," + std::to_string(z) +
                                   ") is not an edge of the graph");
        }
        total += *w;
    }
    return total;
}

nlohmann::json solution_to_json(const Solution& sol) {
    nlohmann::json j;
    j["active"] = sol.active;
    j["assoc"] = nlohmann::json::array();
    for (auto [c, z] : sol.assoc) {
        j["assoc"].push_back({c, z});
    }
    j["weight"] = sol.total_weight;
    return j;
}

}  // namespace beamgraph
