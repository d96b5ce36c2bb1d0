#pragma once

#include <cstddef>
#include <vector>

#include "hicode/graph.hpp"

namespace hicode {

// Joint and marginal community-membership masses of two partitions,
// normalized by the node count so all masses sum to 1.
struct ContingencyTable {
    struct Cell {
        std::size_t x;
        std::size_t y;
        double mass;
    };
    std::size_t node_count = 0;
    std::vector<double> px;
    std::vector<double> py;
    std::vector<Cell> joint;  // sorted by (x, y), zero cells omitted
};

ContingencyTable contingency(const Layer& x, const Layer& y);

// Newman modularity Q = sum_k [e_kk/e - (d_k/2e)^2] with weighted sums.
// Requires a layer whose communities partition the nodes.
double modularity(const Graph& graph, const Layer& layer);

// Modularity of a cover, weighting intra and outgoing edge mass by the
// belonging coefficients w_ik = 1/m. Equals modularity() exactly when the
// layer is disjoint.
double overlapping_modularity(const Graph& graph, const Layer& layer);

// Q_k / |C_k|: the community's modularity contribution per node.
double community_modularity(const Graph& graph, const Layer& layer, std::size_t k);
double community_modularity(const Graph& graph, const Community& community);

// Normalized mutual information 2I/(H(X)+H(Y)) of two partitions over the
// same node set; natural log, 0·log0 = 0. Both entropies zero (two
// single-block partitions) is defined as 1.
double nmi(const Layer& x, const Layer& y);

struct JaccardReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // per-community best-match Jaccard scores, NaN at filler communities
    std::vector<double> per_detected;
    std::vector<double> per_truth;
};

// Best-match Jaccard precision/recall, size-weighted, F1 their harmonic
// mean. Filler singletons are excluded on both sides.
JaccardReport jaccard_scores(const Layer& detected, const Layer& truth);

struct HiddennessScore {
    double value = 0.0;
    std::size_t strong_set_size = 0;
};

// Fraction of C_k's members that also belong to a community with a
// strictly higher score.
HiddennessScore hiddenness(std::size_t k, const std::vector<Community>& all_comms,
                           const std::vector<double>& scores);

// Size-weighted mean hiddenness of the layer's communities; each community
// is matched to its entry in all_comms by member-set equality.
double layer_hiddenness(const Layer& layer, const std::vector<Community>& all_comms,
                        const std::vector<double>& scores);

// Default quality score F for hiddenness: community_modularity per entry.
std::vector<double> community_scores(const Graph& graph, const std::vector<Community>& comms);

// modularity() for structural partitions, overlapping_modularity() otherwise
double layer_quality(const Graph& graph, const Layer& layer);

}  // namespace hicode
