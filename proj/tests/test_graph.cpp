#include <algorithm>
#include <set>

#include "doctest.h"

#include "beamgraph/channel.hpp"
#include "beamgraph/errors.hpp"
#include "beamgraph/graph.hpp"
#include "beamgraph/matching.hpp"
#include "beamgraph/random_graph.hpp"
#include "beamgraph/scenario.hpp"

using namespace beamgraph;

namespace {

VehicleSnapshot snapshot_of(const ZoneGrid& grid, const std::vector<Vec2>& positions) {
    VehicleSnapshot s;
    int id = 0;
    for (const auto& p : positions) {
        s.entries.push_back({id++, p, *grid.zone_of(p)});
    }
    return s;
}

struct City {
    SyntheticScenario scenario;
    ZoneGrid grid;
    Config config;
};

City city(std::uint64_t seed, int vehicles = 100, int gnbs = 10) {
    SyntheticParams p;
    p.n_vehicles = vehicles;
    p.n_gnbs = gnbs;
    p.seed = seed;
    City c{generate_synthetic(p), {}, {}};
    c.grid = resolve_grid(c.config, c.scenario.trace, c.scenario.gnbs);
    return c;
}

}  // namespace

TEST_CASE("candidate enumeration") {
    RadioConfig rc;
    const std::vector<GnbSite> one{{0, {0, 0}}};
    const auto c = enumerate_candidates(one, rc);
    CHECK(c.size() == 216);
    CHECK(c[0] == BeamCandidate{0, 0, 5});
    CHECK(c[1] == BeamCandidate{0, 0, 10});
    CHECK(c[3] == BeamCandidate{0, 5, 5});
    CHECK(c.back() == BeamCandidate{0, 355, 15});

    rc.direction_step = 1.0;
    CHECK(enumerate_candidates(one, rc).size() == 1080);
    CHECK(enumerate_candidates(std::vector<GnbSite>{}, rc).empty());

    const std::vector<GnbSite> two{{4, {0, 0}}, {2, {50, 0}}};
    const auto c2 = enumerate_candidates(two, RadioConfig{});
    CHECK(c2.size() == 432);
    CHECK(c2[0].gnb_id == 4);
    CHECK(c2[216].gnb_id == 2);
}

TEST_CASE("graph with no vehicles") {
    const ZoneGrid grid{{0, 0}, 25, 4, 4};
    const std::vector<GnbSite> gnbs{{0, {-50, 10}}};
    const auto g = build_graph(VehicleSnapshot{}, grid, gnbs, Config{}, 1);
    CHECK(g.zones.empty());
    CHECK(g.edges.empty());
    CHECK(g.conflict_pairs.empty());
    CHECK(g.candidates.size() == 216);
}

TEST_CASE("single zone straight ahead of a gNB") {
    const ZoneGrid grid{{0, 0}, 25, 4, 4};
    const std::vector<GnbSite> gnbs{{0, {-87.5, 12.5}}};  // zone 0 centre at 100 m, theta = 0
    const auto snap = snapshot_of(grid, {{3, 4}, {20, 20}});
    const Config config;
    const auto g = build_graph(snap, grid, gnbs, config, 1);
    REQUIRE(g.zones.size() == 1);
    CHECK(g.zones[0] == ZoneVertex{0, 2});

    std::set<std::pair<double, double>> got;
    for (const auto& e : g.edges) {
        got.emplace(g.candidates[e.candidate].direction, g.candidates[e.candidate].width);
    }
    const std::set<std::pair<double, double>> want{{0, 5},    {0, 10},  {5, 10},   {355, 10},
                                                   {0, 15},   {5, 15},  {355, 15}};
    CHECK(got == want);

    // Seven candidates with edges, all on one gNB; the 5/355 pairs at
    // width 10/15 reach 10 deg apart, which overlaps for every width pair.
    for (auto [a, b] : g.conflict_pairs) {
        CHECK(conflicts(g.candidates[a], g.candidates[b]));
    }
    CHECK_NOTHROW(validate_graph(g));
}

TEST_CASE("edge weights equal the noise-limited rate") {
    auto c = city(3);
    const auto snap = snapshot(c.scenario.trace, c.grid, 5.0);
    const auto g = build_graph(snap, c.grid, c.scenario.gnbs, c.config, 3);
    REQUIRE(!g.edges.empty());
    for (const auto& e : g.edges) {
        const auto& beam = g.candidates[e.candidate];
        const auto site = std::find_if(c.scenario.gnbs.begin(), c.scenario.gnbs.end(),
                                       [&](const GnbSite& s) { return s.id == beam.gnb_id; });
        const auto zl = zone_link(*site, c.grid, g.zones[e.zone].zone_id, c.config, 3);
        REQUIRE(zl);
        const double w = noise_limited_rate(zl->link, beam, c.config.per_beam_power(), g.zones[e.zone].n_vehicles,
                                            c.config.noise_watts(), c.config.radio.bandwidth, c.config.channel());
        CHECK(e.weight == w);
    }
}

TEST_CASE("edges are sound and complete against an exhaustive rescan") {
    for (std::uint64_t seed : {1u, 2u}) {
        auto c = city(seed, 40, 4);
        const auto snap = snapshot(c.scenario.trace, c.grid, 0.0);
        const auto g = build_graph(snap, c.grid, c.scenario.gnbs, c.config, seed);
        CHECK_NOTHROW(validate_graph(g));
        CHECK(g.edges.size() <= g.candidates.size() * g.zones.size());

        std::set<std::pair<int, int>> present;
        for (const auto& e : g.edges) {
            present.emplace(e.candidate, e.zone);
            CHECK(e.weight > 0.0);
            CHECK(e.weight >= c.config.min_edge_rate());
        }
        for (std::size_t ci = 0; ci < g.candidates.size(); ++ci) {
            const auto& beam = g.candidates[ci];
            const auto& site = *std::find_if(c.scenario.gnbs.begin(), c.scenario.gnbs.end(),
                                             [&](const GnbSite& s) { return s.id == beam.gnb_id; });
            for (std::size_t zi = 0; zi < g.zones.size(); ++zi) {
                const Vec2 centre = c.grid.center(g.zones[zi].zone_id);
                const bool is_edge = present.count({static_cast<int>(ci), static_cast<int>(zi)}) > 0;
                if (centre == site.position) {
                    CHECK_FALSE(is_edge);
                    continue;
                }
                const bool cov = covers(beam, angle_of_departure(site, centre));
                if (is_edge) {
                    CHECK(cov);
                } else if (cov) {
                    // Must have been filtered by the floor.
                    const auto zl = zone_link(site, c.grid, g.zones[zi].zone_id, c.config, seed);
                    const double w =
                        noise_limited_rate(zl->link, beam, c.config.per_beam_power(), g.zones[zi].n_vehicles,
                                           c.config.noise_watts(), c.config.radio.bandwidth, c.config.channel());
                    CHECK(w < c.config.min_edge_rate());
                }
            }
        }

        // Conflict pairs over candidates with edges: listed iff conflicts().
        std::set<int> with_edges;
        for (const auto& e : g.edges) {
            with_edges.insert(e.candidate);
        }
        std::set<std::pair<int, int>> listed(g.conflict_pairs.begin(), g.conflict_pairs.end());
        CHECK(listed.size() == g.conflict_pairs.size());
        for (int a : with_edges) {
            for (int b : with_edges) {
                if (a < b) {
                    const bool want = g.candidates[a].gnb_id == g.candidates[b].gnb_id &&
                                      conflicts(g.candidates[a], g.candidates[b]);
                    CHECK(listed.count({a, b}) == static_cast<std::size_t>(want));
                }
            }
        }
        for (auto [a, b] : g.conflict_pairs) {
            CHECK(with_edges.count(a));
            CHECK(with_edges.count(b));
        }
    }
}

TEST_CASE("graph construction is deterministic") {
    auto c = city(9);
    const auto snap = snapshot(c.scenario.trace, c.grid, 7.0);
    const auto a = build_graph(snap, c.grid, c.scenario.gnbs, c.config, 9);
    const auto b = build_graph(snap, c.grid, c.scenario.gnbs, c.config, 9);
    CHECK(a == b);
}

TEST_CASE("weight floor filters edges") {
    const ZoneGrid grid{{0, 0}, 25, 4, 4};
    const std::vector<GnbSite> gnbs{{0, {-87.5, 12.5}}};
    const auto snap = snapshot_of(grid, {{3, 4}});
    Config config;
    config.radio.min_edge_rate = 1e15;
    CHECK(build_graph(snap, grid, gnbs, config, 1).edges.empty());
    config.radio.min_edge_rate = 0.0;
    CHECK(build_graph(snap, grid, gnbs, config, 1).edges.size() == 7);
}

TEST_CASE("prune drops duplicates and edgeless candidates") {
    ConflictGraph g;
    g.candidates = {{0, 10, 10}, {0, 10, 10}, {0, 200, 10}};
    g.zones = {{0, 1}};
    g.edges = {{0, 0, 5.0}, {1, 0, 5.0}};
    g.conflict_pairs = {{0, 1}};
    const auto p = prune_dominated(g);
    REQUIRE(p.candidates.size() == 1);
    CHECK(p.candidates[0] == BeamCandidate{0, 10, 10});
    CHECK(p.edges == std::vector<GraphEdge>{{0, 0, 5.0}});
    CHECK(p.conflict_pairs.empty());
}

TEST_CASE("prune leaves distinct useful candidates alone") {
    ConflictGraph g;
    g.candidates = {{0, 0, 10}, {0, 90, 10}, {1, 0, 10}};
    g.zones = {{0, 1}, {1, 1}, {2, 1}};
    g.edges = {{0, 0, 5.0}, {1, 1, 4.0}, {2, 2, 3.0}};
    CHECK(prune_dominated(g) == g);
}

TEST_CASE("prune keeps a dominated-looking candidate on another gNB") {
    ConflictGraph g;
    g.candidates = {{0, 0, 10}, {1, 0, 10}};
    g.zones = {{0, 1}};
    g.edges = {{0, 0, 5.0}, {1, 0, 3.0}};
    CHECK(prune_dominated(g) == g);
}

TEST_CASE("greedy is unchanged by pruning on random graphs") {
    RandomGraphParams params;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        const auto inst = random_instance(params, seed);
        const auto& g = inst.graph;
        const auto pruned = prune_dominated(g);
        CHECK_NOTHROW(validate_graph(pruned));
        const auto full = greedy_match(g, inst.max_beams, inst.comp_limit);
        const auto small = greedy_match(pruned, inst.max_beams, inst.comp_limit);
        CHECK(full.total_weight == small.total_weight);
        // Same beams, compared by identity rather than index.
        std::vector<BeamCandidate> a;
        std::vector<BeamCandidate> b;
        std::multiset<std::tuple<int, double, double, int>> ea;
        std::multiset<std::tuple<int, double, double, int>> eb;
        for (auto [c, z] : full.assoc) {
            ea.emplace(g.candidates[c].gnb_id, g.candidates[c].direction, g.candidates[c].width, g.zones[z].zone_id);
        }
        for (auto [c, z] : small.assoc) {
            eb.emplace(pruned.candidates[c].gnb_id, pruned.candidates[c].direction, pruned.candidates[c].width,
                       pruned.zones[z].zone_id);
        }
        CHECK(ea == eb);
    }
}

TEST_CASE("greedy is unchanged by pruning on city graphs") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto c = city(seed);
        for (double t : {0.0, 10.0}) {
            const auto snap = snapshot(c.scenario.trace, c.grid, t);
            const auto g = build_graph(snap, c.grid, c.scenario.gnbs, c.config, seed);
            const auto pruned = prune_dominated(g);
            CHECK(pruned.candidates.size() <= static_cast<std::size_t>(candidates_with_edges(g)));
            const int n = c.config.radio.max_beams;
            const int l = c.config.radio.comp_limit;
            const auto full = greedy_match(g, n, l);
            const auto small = greedy_match(pruned, n, l);
            CHECK(full.total_weight == small.total_weight);
            CHECK(full.assoc.size() == small.assoc.size());
        }
    }
}

TEST_CASE("graph JSON round-trip") {
    auto c = city(4, 30, 3);
    const auto snap = snapshot(c.scenario.trace, c.grid, 2.0);
    const auto g = build_graph(snap, c.grid, c.scenario.gnbs, c.config, 4);
    const auto j = graph_to_json(g);
    CHECK(j.contains("candidates"));
    CHECK(j.contains("zones"));
    CHECK(j.contains("edges"));
    CHECK(j.contains("conflicts"));
    CHECK(graph_from_json(nlohmann::json::parse(j.dump())) == g);
}

TEST_CASE("validate_graph rejects malformed graphs") {
    ConflictGraph g;
    g.candidates = {{0, 0, 10}, {0, 5, 10}};
    g.zones = {{0, 1}};
    g.edges = {{0, 0, 1.0}, {1, 0, 2.0}};
    CHECK_NOTHROW(validate_graph(g));

    auto bad = g;
    bad.edges = {{1, 0, 2.0}, {0, 0, 1.0}};
    CHECK_THROWS_AS(validate_graph(bad), ConsistencyError);
    bad = g;
    bad.edges[0].weight = 0.0;
    CHECK_THROWS_AS(validate_graph(bad), ConsistencyError);
    bad = g;
    bad.edges[1].zone = 3;
    CHECK_THROWS_AS(validate_graph(bad), ConsistencyError);
    bad = g;
    bad.conflict_pairs = {{1, 0}};
    CHECK_THROWS_AS(validate_graph(bad), ConsistencyError);
}
