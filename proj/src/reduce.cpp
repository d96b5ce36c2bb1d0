#include "hicode/reduce.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>

#include "hicode/check.hpp"

namespace hicode {

ReduceMethod effective_method(ReduceMethod method, const BaseAlgorithm& base) {
    if (method == ReduceMethod::reduce_weight && !base.supports_weights()) {
        return ReduceMethod::reduce_edge;
    }
    return method;
}

namespace {

// Mutable working copy used for a weakening sweep. Ordered adjacency maps
// keep edge iteration deterministic; degrees are maintained incrementally.
class GraphEditor {
public:
    explicit GraphEditor(const Graph& g)
        : labels_(g.labels()), adj_(g.node_count()), degree_(g.node_count(), 0.0) {
        for (NodeId u = 0; u < g.node_count(); ++u) {
            for (const Neighbor& nb : g.neighbors(u)) {
                adj_[u].emplace(nb.node, nb.weight);
            }
            degree_[u] = g.weighted_degree(u);
        }
    }

    double weight(NodeId u, NodeId v) const {
        auto it = adj_[u].find(v);
        return it == adj_[u].end() ? 0.0 : it->second;
    }

    double degree(NodeId u) const { return degree_[u]; }

    void erase_edge(NodeId u, NodeId v) {
        auto it = adj_[u].find(v);
        HICODE_CHECK(it != adj_[u].end());
        const double w = it->second;
        adj_[u].erase(it);
        adj_[v].erase(u);
        degree_[u] -= w;
        degree_[v] -= w;
    }

    void scale_edge(NodeId u, NodeId v, double factor) {
        auto it = adj_[u].find(v);
        HICODE_CHECK(it != adj_[u].end());
        const double old_w = it->second;
        const double new_w = old_w * factor;
        if (new_w <= 0.0) {
            erase_edge(u, v);
            return;
        }
        it->second = new_w;
        adj_[v][u] = new_w;
        degree_[u] += new_w - old_w;
        degree_[v] += new_w - old_w;
    }

    BlockStats stats(const Community& community, std::size_t node_count) const {
        BlockStats s;
        s.n_k = community.size();
        for (NodeId u : community.members) {
            s.d_k += degree_[u];
            for (const auto& [v, w] : adj_[u]) {
                if (v > u && community.contains(v)) {
                    s.e_kk += w;
                }
            }
        }
        if (s.n_k >= 2) {
            s.p_k = s.e_kk / (0.5 * static_cast<double>(s.n_k) *
                              static_cast<double>(s.n_k - 1));
        }
        if (s.n_k < node_count) {
            s.q_k = (s.d_k - 2.0 * s.e_kk) / (static_cast<double>(s.n_k) *
                                              static_cast<double>(node_count - s.n_k));
        }
        // p_k = 0 leaves q'_k at 1: there is nothing to weaken
        if (s.p_k > 0.0) {
            s.q_prime_k = std::clamp(s.q_k / s.p_k, 0.0, 1.0);
        }
        return s;
    }

    // intra-community edges (u < v) not yet frozen, in sorted order
    std::vector<std::pair<NodeId, NodeId>> intra_edges(const Community& community,
                                                       const EdgeSet& frozen) const {
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId u : community.members) {
            for (const auto& [v, w] : adj_[u]) {
                if (v > u && community.contains(v) && !frozen.contains(u, v)) {
                    edges.emplace_back(u, v);
                }
            }
        }
        return edges;
    }

    Graph freeze() const {
        std::vector<std::tuple<NodeId, NodeId, double>> edges;
        for (NodeId u = 0; u < adj_.size(); ++u) {
            for (const auto& [v, w] : adj_[u]) {
                if (v > u) {
                    edges.emplace_back(u, v, w);
                }
            }
        }
        return Graph::from_edges(labels_, std::move(edges));
    }

private:
    std::shared_ptr<const LabelTable> labels_;
    std::vector<std::map<NodeId, double>> adj_;
    std::vector<double> degree_;
};

void weaken_into(GraphEditor& editor, std::size_t node_count, const Community& community,
                 ReduceMethod method, Rng& rng, EdgeSet& frozen) {
    if (community.size() < 2) {
        return;
    }
    const auto edges = editor.intra_edges(community, frozen);
    if (edges.empty()) {
        return;
    }

    double q_prime = 0.0;
    if (method != ReduceMethod::remove_edge) {
        const BlockStats s = editor.stats(community, node_count);
        // no background estimate without intra edges; skip the block
        if (s.p_k <= 0.0) {
            return;
        }
        q_prime = s.q_prime_k;
    }

    for (const auto& [u, v] : edges) {
        HICODE_CHECK(!frozen.contains(u, v));
        frozen.insert(u, v);
        switch (method) {
            case ReduceMethod::remove_edge:
                editor.erase_edge(u, v);
                break;
            case ReduceMethod::reduce_edge:
                if (!(rng.uniform() < q_prime)) {
                    editor.erase_edge(u, v);
                }
                break;
            case ReduceMethod::reduce_weight:
                editor.scale_edge(u, v, q_prime);
                break;
        }
    }
}

}  // namespace

BlockStats block_stats(const Graph& graph, const Community& community) {
    BlockStats s;
    s.n_k = community.size();
    for (NodeId u : community.members) {
        s.d_k += graph.weighted_degree(u);
        for (const Neighbor& nb : graph.neighbors(u)) {
            if (nb.node > u && community.contains(nb.node)) {
                s.e_kk += nb.weight;
            }
        }
    }
    if (s.n_k >= 2) {
        s.p_k = s.e_kk / (0.5 * static_cast<double>(s.n_k) * static_cast<double>(s.n_k - 1));
    }
    if (s.n_k < graph.node_count()) {
        s.q_k = (s.d_k - 2.0 * s.e_kk) / (static_cast<double>(s.n_k) *
                                          static_cast<double>(graph.node_count() - s.n_k));
    }
    if (s.p_k > 0.0) {
        s.q_prime_k = std::clamp(s.q_k / s.p_k, 0.0, 1.0);
    }
    return s;
}

Graph weaken_community(const Graph& graph, const Community& community, ReduceMethod method,
                       Rng& rng, EdgeSet& frozen) {
    GraphEditor editor(graph);
    weaken_into(editor, graph.node_count(), community, method, rng, frozen);
    return editor.freeze();
}

Graph weaken_layer(const Graph& graph, const Layer& layer, ReduceMethod method, Rng& rng) {
    // larger communities first; ties by smaller minimum member id
    std::vector<std::size_t> order;
    for (std::size_t k = 0; k < layer.communities().size(); ++k) {
        if (!layer.is_filler(k)) {
            order.push_back(k);
        }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = layer.communities()[a];
        const auto& cb = layer.communities()[b];
        if (ca.size() != cb.size()) {
            return ca.size() > cb.size();
        }
        return ca.members.front() < cb.members.front();
    });

    GraphEditor editor(graph);
    EdgeSet frozen;
    for (std::size_t k : order) {
        weaken_into(editor, graph.node_count(), layer.communities()[k], method, rng, frozen);
    }
    return editor.freeze();
}

}  // namespace hicode
