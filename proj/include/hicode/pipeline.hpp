#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hicode/base.hpp"
#include "hicode/graph.hpp"
#include "hicode/reduce.hpp"

namespace hicode {

struct HicodeConfig {
    std::shared_ptr<const BaseAlgorithm> base = std::make_shared<LouvainBase>();
    ReduceMethod method = ReduceMethod::reduce_weight;
    std::uint64_t seed = 0;
    std::size_t max_layers = 5;
    std::size_t tentative_T = 10;       // tentative refinement iterations per candidate
    std::size_t refine_iterations = 100;
    double weak_layer_threshold = 0.05;  // modularity floor for a significant layer
    unsigned jobs = 1;                   // parallel candidate evaluations in selection

    void validate() const;
};

// Identification stage: detect a layer, weaken it, repeat. Layer 1 comes
// from the original graph; layer i from the graph with layers 1..i-1
// weakened cumulatively. If an intermediate reduced graph loses all of its
// edges, the remaining layers are all-singleton fillers flagged degenerate.
LayerSet identify(const Graph& graph, std::size_t n_layers, const HicodeConfig& cfg);

struct RefineResult {
    LayerSet layers;                       // snapshot from the best iteration
    std::vector<double> modularity_history;  // [0] is Q_0, pre-refinement
    std::size_t best_iteration = 0;
    std::optional<std::size_t> converged_iteration;  // adjacent-iteration NMI >= 0.999
};

// Refinement stage: per iteration, re-detect each layer on the original
// graph with all other layers (most recent versions) weakened. Q_t is the
// mean layer quality on the original graph; the snapshot with max Q_t wins.
RefineResult refine(const Graph& graph, const LayerSet& layers, const HicodeConfig& cfg);

struct SelectionResult {
    std::size_t num_layers = 1;
    std::map<std::size_t, double> r_table;  // candidate n_L -> R_T
};

// Evaluates candidate layer counts n_L = 2, 3, ... by the average
// refinement improvement ratio R_T = sum_t Q_t / (T * Q_0); stops when the
// weakest identified layer falls under the threshold. Peak R_T wins, ties
// to the smaller n_L; returns n_L = 1 when even two layers are not
// significant.
SelectionResult select_num_layers(const Graph& graph, const HicodeConfig& cfg);

struct RunReport {
    std::size_t selected_n_L = 1;
    std::map<std::size_t, double> r_table;
    std::vector<double> modularity_history;
    std::size_t best_iteration = 0;
    std::optional<std::size_t> converged_iteration;
    LayerSet final_layers;

    // metrics on the original graph
    std::vector<double> layer_modularity;
    std::vector<std::vector<double>> pairwise_nmi;  // NaN when either side overlaps
    std::vector<std::vector<double>> pairwise_f1;

    ReduceMethod method_effective = ReduceMethod::reduce_weight;
    std::string base_name;
};

// Full pipeline: select the layer count, identify, refine, score. A pure
// function of (graph, cfg.seed).
RunReport run(const Graph& graph, const HicodeConfig& cfg);

std::string report_to_json(const RunReport& report);

const char* reduce_method_name(ReduceMethod method);

}  // namespace hicode
