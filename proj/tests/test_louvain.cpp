#include <doctest.h>

#include <set>

#include "hicode/base.hpp"
#include "hicode/metrics.hpp"
#include "hicode/rng.hpp"
#include "hicode/synth.hpp"
#include "oracles.hpp"

using namespace hicode;

namespace {

std::set<std::set<NodeId>> community_sets(const Layer& layer) {
    std::set<std::set<NodeId>> sets;
    for (const auto& c : layer.communities()) {
        sets.insert(std::set<NodeId>(c.members.begin(), c.members.end()));
    }
    return sets;
}

double singleton_modularity(const Graph& g) {
    std::vector<Community> singles;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        singles.push_back(Community{{u}});
    }
    return modularity(g, Layer::make_partition(g.node_count(), std::move(singles)));
}

}  // namespace

TEST_CASE("louvain finds the two triangles exactly") {
    const Graph g = oracle::make_graph(
        6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});

    // brute force confirms the two triangles are the unique optimum
    const double optimum = oracle::best_over_partitions(6, [&](const std::vector<int>& comm) {
        return oracle::dense_modularity(g, comm);
    });
    CHECK(optimum == doctest::Approx(0.5).epsilon(1e-12));

    for (std::uint64_t seed : {0ULL, 1ULL, 42ULL}) {
        const Layer layer = louvain_detect(g, seed);
        CHECK(community_sets(layer) ==
              std::set<std::set<NodeId>>{{0, 1, 2}, {3, 4, 5}});
        CHECK(modularity(g, layer) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("louvain merges the complete graph K5 into one community") {
    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    for (NodeId u = 0; u < 5; ++u) {
        for (NodeId v = u + 1; v < 5; ++v) {
            edges.emplace_back(u, v, 1.0);
        }
    }
    const Graph g = oracle::make_graph(5, std::move(edges));

    const double optimum = oracle::best_over_partitions(5, [&](const std::vector<int>& comm) {
        return oracle::dense_modularity(g, comm);
    });
    CHECK(optimum == doctest::Approx(0.0).epsilon(1e-12));  // any split is negative

    const Layer layer = louvain_detect(g, 3);
    CHECK(layer.communities().size() == 1);
    CHECK(modularity(g, layer) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("louvain output is a partition with modularity above singletons") {
    Rng rng(101);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 4 + rng.below(24);
        const Graph g = oracle::random_graph(n, 0.25, rng);
        const Layer layer = louvain_detect(g, rng.next());
        CHECK(layer.is_structural_partition());  // covers V exactly once
        CHECK(layer.node_count() == n);
        CHECK(modularity(g, layer) >= singleton_modularity(g));
    }
}

TEST_CASE("louvain is deterministic given (graph, seed)") {
    Rng rng(202);
    const Graph g = oracle::random_graph(40, 0.15, rng);
    const Layer a = louvain_detect(g, 9);
    const Layer b = louvain_detect(g, 9);
    CHECK(a == b);
}

TEST_CASE("louvain is invariant under exact weight scaling") {
    Rng rng(303);
    const Graph base = oracle::random_graph(30, 0.2, rng);
    for (double scale : {0.5, 2.0, 1024.0}) {
        std::vector<std::tuple<NodeId, NodeId, double>> edges;
        for (NodeId u = 0; u < base.node_count(); ++u) {
            for (const auto& nb : base.neighbors(u)) {
                if (nb.node > u) {
                    edges.emplace_back(u, nb.node, nb.weight * scale);
                }
            }
        }
        const Graph scaled = oracle::make_graph(base.node_count(), std::move(edges));
        CHECK(louvain_detect(base, 5) == louvain_detect(scaled, 5));
    }
}

TEST_CASE("louvain keeps isolated nodes as singletons") {
    // node 4 is isolated (registered via the isolated comment path)
    Graph g = Graph::from_edges(LabelTable::sequential(5),
                                {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}});
    const Layer layer = louvain_detect(g, 1);
    const auto sets = community_sets(layer);
    CHECK(sets.count({4}) == 1);
}

TEST_CASE("louvain rejects edgeless graphs") {
    CHECK_THROWS_AS(louvain_detect(oracle::make_graph(3, {}), 0), std::invalid_argument);
    CHECK_THROWS_AS(louvain_detect(Graph{}, 0), std::invalid_argument);
}

TEST_CASE("louvain stays close to the exact optimum on small graphs") {
    Rng rng(404);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 5 + rng.below(4);  // 5..8 nodes
        const Graph g = oracle::random_graph(n, 0.45, rng);
        const double optimum =
            oracle::best_over_partitions(n, [&](const std::vector<int>& comm) {
                return oracle::dense_modularity(g, comm);
            });
        const double got = modularity(g, louvain_detect(g, rng.next()));
        CHECK(got >= 0.95 * optimum - 1e-12);
    }
}

TEST_CASE("louvain locates one dominant SynL2 layer, not both") {
    // the base algorithm premise: a single run roughly finds one planted
    // layer and stays far from the other; the full pipeline is what lifts
    // both layers to high NMI
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const auto gen = generate(synl2_spec(), seed);
        const Layer detected = louvain_detect(gen.graph, seed);
        const double n1 = nmi(detected, gen.planted.layers[0]);
        const double n2 = nmi(detected, gen.planted.layers[1]);
        CHECK(std::max(n1, n2) >= 0.4);
        CHECK_FALSE((n1 >= 0.5 && n2 >= 0.5));
    }
}
