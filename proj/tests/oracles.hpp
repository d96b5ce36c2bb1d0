// Test-only reference implementations, independent of the library's
// computation paths: dense direct-sum modularity evaluators, exhaustive
// partition search, and random instance generators.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "hicode/graph.hpp"
#include "hicode/rng.hpp"

namespace oracle {

using hicode::Community;
using hicode::Graph;
using hicode::Layer;
using hicode::NodeId;

inline Graph make_graph(std::size_t n,
                        std::vector<std::tuple<NodeId, NodeId, double>> edges) {
    return Graph::from_edges(hicode::LabelTable::sequential(n), std::move(edges));
}

inline std::vector<std::vector<double>> dense_adjacency(const Graph& g) {
    std::vector<std::vector<double>> a(g.node_count(), std::vector<double>(g.node_count(), 0.0));
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (const auto& nb : g.neighbors(u)) {
            a[u][nb.node] = nb.weight;
        }
    }
    return a;
}

// Eq.-by-eq. evaluation of partition modularity from the dense adjacency
// matrix: for each community k sum e_kk and d_k, then Q_k = e_kk/e - (d_k/2e)^2.
inline double dense_modularity(const Graph& g, const std::vector<int>& comm) {
    const auto a = dense_adjacency(g);
    const std::size_t n = g.node_count();
    int k_count = 0;
    for (int c : comm) {
        k_count = std::max(k_count, c + 1);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            e += a[i][j];
        }
    }
    double q = 0.0;
    for (int k = 0; k < k_count; ++k) {
        double e_kk = 0.0;
        double d_k = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (comm[i] != k) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                d_k += a[i][j];
                if (j > i && comm[j] == k) {
                    e_kk += a[i][j];
                }
            }
        }
        q += e_kk / e - (d_k / (2.0 * e)) * (d_k / (2.0 * e));
    }
    return q;
}

// Direct double-sum evaluation of the overlapping modularity: intra mass
// (w_ik + w_jk)/2 over ordered pairs inside C_k halved, outgoing mass
// (w_ik + (1 - w_jk))/2 over ordered boundary pairs (both orientations)
// halved, d_k = 2 e_kk + e_k_out.
inline double dense_overlapping_modularity(const Graph& g, const Layer& layer) {
    const auto a = dense_adjacency(g);
    const std::size_t n = g.node_count();
    std::vector<std::vector<bool>> member(layer.communities().size(),
                                          std::vector<bool>(n, false));
    for (std::size_t k = 0; k < layer.communities().size(); ++k) {
        for (NodeId u : layer.communities()[k].members) {
            member[k][u] = true;
        }
    }
    auto w = [&](std::size_t k, std::size_t i) {
        return member[k][i] ? layer.belonging(static_cast<NodeId>(i)) : 0.0;
    };

    const double e = g.total_edge_weight();
    double q = 0.0;
    for (std::size_t k = 0; k < layer.communities().size(); ++k) {
        double e_kk = 0.0;
        double e_out = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (member[k][i] && member[k][j]) {
                    e_kk += 0.5 * ((w(k, i) + w(k, j)) / 2.0) * a[i][j];
                } else if (member[k][i] && !member[k][j]) {
                    // both orientations of a boundary pair contribute
                    e_out += 0.5 * ((w(k, i) + (1.0 - w(k, j))) / 2.0) * a[i][j];
                    e_out += 0.5 * ((w(k, i) + (1.0 - w(k, j))) / 2.0) * a[j][i];
                }
            }
        }
        const double d_k = 2.0 * e_kk + e_out;
        q += e_kk / e - (d_k / (2.0 * e)) * (d_k / (2.0 * e));
    }
    return q;
}

namespace detail {

// restricted growth strings: comm[0] = 0, comm[i] <= max(comm[0..i-1]) + 1
template <typename Fn>
void each_partition(std::vector<int>& comm, std::size_t i, int max_used, Fn&& fn) {
    if (i == comm.size()) {
        fn(const_cast<const std::vector<int>&>(comm));
        return;
    }
    for (int c = 0; c <= max_used + 1; ++c) {
        comm[i] = c;
        each_partition(comm, i + 1, std::max(max_used, c), fn);
    }
}

}  // namespace detail

// Visits every set partition of n elements.
template <typename Fn>
void for_each_partition(std::size_t n, Fn&& fn) {
    std::vector<int> comm(n, 0);
    if (n == 0) {
        return;
    }
    detail::each_partition(comm, 1, 0, fn);
}

// Exact maximum of fn over all set partitions of n elements.
template <typename Fn>
double best_over_partitions(std::size_t n, Fn&& fn) {
    double best = -1e300;
    for_each_partition(n, [&](const std::vector<int>& comm) {
        best = std::max(best, fn(comm));
    });
    return best;
}

inline Layer layer_from_assignment(std::size_t n, const std::vector<int>& comm) {
    int k = 0;
    for (int c : comm) {
        k = std::max(k, c + 1);
    }
    std::vector<Community> comms(k);
    for (NodeId u = 0; u < n; ++u) {
        comms[comm[u]].members.push_back(u);
    }
    comms.erase(std::remove_if(comms.begin(), comms.end(),
                               [](const Community& c) { return c.members.empty(); }),
                comms.end());
    return Layer::make_partition(n, std::move(comms));
}

// random connected-ish graph with unit weights
inline Graph random_graph(std::size_t n, double density, hicode::Rng& rng) {
    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            if (rng.uniform() < density) {
                edges.emplace_back(u, v, 1.0);
            }
        }
    }
    if (edges.empty()) {
        edges.emplace_back(0, 1, 1.0);
    }
    return make_graph(n, std::move(edges));
}

inline Layer random_partition(std::size_t n, std::size_t k_max, hicode::Rng& rng) {
    const std::size_t k = 1 + rng.below(k_max);
    std::vector<Community> comms(k);
    for (NodeId u = 0; u < n; ++u) {
        comms[rng.below(k)].members.push_back(u);
    }
    comms.erase(std::remove_if(comms.begin(), comms.end(),
                               [](const Community& c) { return c.members.empty(); }),
                comms.end());
    return Layer::make_partition(n, std::move(comms));
}

}  // namespace oracle
