#pragma once

#include <cstdint>
#include <unordered_set>

#include "hicode/base.hpp"
#include "hicode/graph.hpp"
#include "hicode/rng.hpp"

namespace hicode {

enum class ReduceMethod { remove_edge, reduce_edge, reduce_weight };

// reduce_weight degenerates to reduce_edge when the base algorithm does
// not support weighted graphs.
ReduceMethod effective_method(ReduceMethod method, const BaseAlgorithm& base);

// Block densities of a community: p_k the observed intra density, q_k the
// background (outgoing) density, q'_k = q_k / p_k the keep/scale factor,
// clamped to [0, 1]. Weighted sums throughout. Degenerate cases never
// fail: no intra edges or n_k < 2 give q'_k = 1 (nothing to weaken); a
// whole-graph community has q_k = 0.
struct BlockStats {
    std::size_t n_k = 0;
    double e_kk = 0.0;
    double d_k = 0.0;
    double p_k = 0.0;
    double q_k = 0.0;
    double q_prime_k = 1.0;
};

BlockStats block_stats(const Graph& graph, const Community& community);

// Set of normalized undirected edges, used to freeze edges already
// weakened by a larger community of the same layer.
class EdgeSet {
public:
    void insert(NodeId u, NodeId v) { set_.insert(key(u, v)); }
    bool contains(NodeId u, NodeId v) const { return set_.count(key(u, v)) != 0; }
    std::size_t size() const { return set_.size(); }

private:
    static std::uint64_t key(NodeId u, NodeId v) {
        if (u > v) {
            std::swap(u, v);
        }
        return (static_cast<std::uint64_t>(u) << 32) | v;
    }
    std::unordered_set<std::uint64_t> set_;
};

// Weakens one community block: intra-community edges not in *frozen* are
// removed (remove_edge), kept independently with probability q'_k
// (reduce_edge), or scaled by q'_k (reduce_weight). Every processed edge
// is added to *frozen*. Returns a new graph.
Graph weaken_community(const Graph& graph, const Community& community, ReduceMethod method,
                       Rng& rng, EdgeSet& frozen);

// Weakens a whole layer: communities in descending size order (ties:
// smaller minimum member id first), fillers skipped, block stats taken on
// the current partially weakened graph, overlapping portions weakened at
// most once via the frozen set.
Graph weaken_layer(const Graph& graph, const Layer& layer, ReduceMethod method, Rng& rng);

}  // namespace hicode
