#include "hicode/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "hicode/check.hpp"
#include "hicode/metrics.hpp"
#include "hicode/rng.hpp"

namespace hicode {

namespace {

constexpr std::uint64_t kDetectStream = 0xde7ec7ULL;
constexpr std::uint64_t kReduceStream = 0x4ed0ceULL;
constexpr double kConvergenceNmi = 0.999;

// Detection seeds are constant across refinement iterations so a stable
// layer set is a true fixed point (adjacent-iteration NMI reaches 1);
// the reduce stream keeps the iteration so ReduceEdge re-samples its edge
// removals every iteration. Candidate n_L evaluations stay independent.
std::uint64_t detect_seed(const HicodeConfig& cfg, std::size_t n_layers, std::size_t layer) {
    return mix_seed({cfg.seed, n_layers, layer, kDetectStream});
}

std::uint64_t reduce_seed(const HicodeConfig& cfg, std::size_t n_layers, std::size_t iteration,
                          std::size_t layer) {
    return mix_seed({cfg.seed, n_layers, iteration, layer, kReduceStream});
}

// adjacent-iteration similarity: NMI for partitions, Jaccard F1 otherwise
double layer_similarity(const Layer& a, const Layer& b) {
    if (a.is_structural_partition() && b.is_structural_partition()) {
        return nmi(a, b);
    }
    return jaccard_scores(a, b).f1;
}

double mean_quality(const Graph& graph, const LayerSet& layers) {
    double sum = 0.0;
    for (const Layer& layer : layers.layers) {
        sum += layer_quality(graph, layer);
    }
    return sum / static_cast<double>(layers.size());
}

// refinement loop shared by refine() and the tentative phase of selection
RefineResult refine_impl(const Graph& graph, const LayerSet& initial, const HicodeConfig& cfg,
                         std::size_t iterations, bool early_stop) {
    const ReduceMethod method = effective_method(cfg.method, *cfg.base);
    const std::size_t n_layers = initial.size();

    LayerSet layers = initial;
    RefineResult result;
    result.modularity_history.push_back(mean_quality(graph, layers));
    result.layers = layers;
    result.best_iteration = 0;
    double best_q = result.modularity_history.front();

    for (std::size_t t = 1; t <= iterations; ++t) {
        const LayerSet previous = layers;
        for (std::size_t i = 0; i < n_layers; ++i) {
            // reduced graph is rebuilt from the original every time, with
            // every other layer's most recent version weakened in order
            Graph reduced = graph;
            Rng reduce_rng(reduce_seed(cfg, n_layers, t, i));
            for (std::size_t j = 0; j < n_layers; ++j) {
                if (j != i) {
                    reduced = weaken_layer(reduced, layers.layers[j], method, reduce_rng);
                }
            }
            if (reduced.total_edge_weight() > 0.0) {
                layers.layers[i] = cfg.base->detect(reduced, detect_seed(cfg, n_layers, i));
            }
            // an edgeless reduction keeps the previous version of the layer
        }

        const double q = mean_quality(graph, layers);
        result.modularity_history.push_back(q);
        if (q > best_q) {
            best_q = q;
            result.best_iteration = t;
            result.layers = layers;
        }

        if (early_stop) {
            bool stable = true;
            for (std::size_t i = 0; i < n_layers && stable; ++i) {
                stable = layer_similarity(previous.layers[i], layers.layers[i]) >=
                         kConvergenceNmi;
            }
            if (stable) {
                result.converged_iteration = t;
                break;
            }
        }
    }

    const auto max_it = std::max_element(result.modularity_history.begin(),
                                         result.modularity_history.end());
    HICODE_CHECK(result.modularity_history[result.best_iteration] == *max_it);
    return result;
}

double weakest_layer_quality(const Graph& graph, const LayerSet& layers) {
    double weakest = std::numeric_limits<double>::infinity();
    for (const Layer& layer : layers.layers) {
        weakest = std::min(weakest, layer_quality(graph, layer));
    }
    return weakest;
}

struct Candidate {
    std::size_t n_layers = 0;
    bool significant = false;  // weakest identified layer above the threshold
    double r_t = 0.0;
    LayerSet identified;
};

Candidate evaluate_candidate(const Graph& graph, std::size_t n_layers,
                             const HicodeConfig& cfg) {
    Candidate cand;
    cand.n_layers = n_layers;
    cand.identified = identify(graph, n_layers, cfg);
    if (weakest_layer_quality(graph, cand.identified) < cfg.weak_layer_threshold) {
        return cand;
    }
    cand.significant = true;

    // T tentative refinement iterations, no early stop: R_T needs all Q_t
    const RefineResult rr = refine_impl(graph, cand.identified, cfg, cfg.tentative_T, false);
    const double q0 = rr.modularity_history.front();
    double sum = 0.0;
    for (std::size_t t = 1; t <= cfg.tentative_T; ++t) {
        sum += rr.modularity_history[t];
    }
    cand.r_t = sum / (static_cast<double>(cfg.tentative_T) * q0);
    return cand;
}

struct SelectionDetail {
    SelectionResult selection;
    std::optional<LayerSet> identified;  // identification of the winning candidate
};

SelectionDetail select_impl(const Graph& graph, const HicodeConfig& cfg) {
    std::vector<Candidate> candidates;
    if (cfg.jobs <= 1) {
        for (std::size_t n = 2; n <= cfg.max_layers; ++n) {
            candidates.push_back(evaluate_candidate(graph, n, cfg));
            if (!candidates.back().significant) {
                break;
            }
        }
    } else {
        // candidates are mutually independent (each owns its sub-seeds);
        // results are identical to the sequential scan
        candidates.resize(cfg.max_layers - 1);
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t idx = next.fetch_add(1);
                if (idx >= candidates.size()) {
                    return;
                }
                candidates[idx] = evaluate_candidate(graph, idx + 2, cfg);
            }
        };
        std::vector<std::thread> pool;
        const std::size_t threads = std::min<std::size_t>(cfg.jobs, candidates.size());
        pool.reserve(threads);
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    SelectionDetail detail;
    const Candidate* best = nullptr;
    for (const Candidate& cand : candidates) {
        if (!cand.significant) {
            break;  // no more significant layers past this point
        }
        detail.selection.r_table[cand.n_layers] = cand.r_t;
        if (best == nullptr || cand.r_t > best->r_t) {
            best = &cand;
        }
    }
    if (best == nullptr) {
        detail.selection.num_layers = 1;
        return detail;
    }
    detail.selection.num_layers = best->n_layers;
    detail.identified = best->identified;
    return detail;
}

}  // namespace

void HicodeConfig::validate() const {
    if (base == nullptr) {
        throw std::invalid_argument("config: base algorithm is required");
    }
    if (tentative_T < 1) {
        throw std::invalid_argument("config: tentative_T must be >= 1");
    }
    if (max_layers < 2) {
        throw std::invalid_argument("config: max_layers must be >= 2");
    }
    if (refine_iterations < tentative_T) {
        throw std::invalid_argument("config: refine_iterations must be >= tentative_T");
    }
}

LayerSet identify(const Graph& graph, std::size_t n_layers, const HicodeConfig& cfg) {
    cfg.validate();
    if (n_layers < 1) {
        throw std::invalid_argument("identify: need at least one layer");
    }
    if (graph.total_edge_weight() <= 0.0) {
        throw std::invalid_argument("identify: graph has no edges");
    }

    const ReduceMethod method = effective_method(cfg.method, *cfg.base);
    LayerSet layers;
    Graph current = graph;
    for (std::size_t i = 0; i < n_layers; ++i) {
        if (current.total_edge_weight() <= 0.0) {
            layers.layers.push_back(Layer::all_singletons(graph.node_count(), true));
            continue;
        }
        Layer layer = cfg.base->detect(current, detect_seed(cfg, n_layers, i));
        if (i + 1 < n_layers) {
            Rng rng(reduce_seed(cfg, n_layers, 0, i));
            current = weaken_layer(current, layer, method, rng);
        }
        layers.layers.push_back(std::move(layer));
    }
    return layers;
}

RefineResult refine(const Graph& graph, const LayerSet& layers, const HicodeConfig& cfg) {
    cfg.validate();
    if (layers.size() == 0) {
        throw std::invalid_argument("refine: empty layer set");
    }
    for (const Layer& layer : layers.layers) {
        if (layer.node_count() != graph.node_count()) {
            throw std::invalid_argument("refine: layer does not cover the graph's nodes");
        }
    }
    return refine_impl(graph, layers, cfg, cfg.refine_iterations, true);
}

SelectionResult select_num_layers(const Graph& graph, const HicodeConfig& cfg) {
    cfg.validate();
    return select_impl(graph, cfg).selection;
}

RunReport run(const Graph& graph, const HicodeConfig& cfg) {
    cfg.validate();

    SelectionDetail detail = select_impl(graph, cfg);
    LayerSet identified = detail.identified ? std::move(*detail.identified)
                                            : identify(graph, detail.selection.num_layers, cfg);
    RefineResult refined = refine_impl(graph, identified, cfg, cfg.refine_iterations, true);

    RunReport report;
    report.selected_n_L = detail.selection.num_layers;
    report.r_table = std::move(detail.selection.r_table);
    report.modularity_history = std::move(refined.modularity_history);
    report.best_iteration = refined.best_iteration;
    report.converged_iteration = refined.converged_iteration;
    report.final_layers = std::move(refined.layers);
    report.method_effective = effective_method(cfg.method, *cfg.base);
    report.base_name = cfg.base->name();

    const std::size_t n_layers = report.final_layers.size();
    for (const Layer& layer : report.final_layers.layers) {
        report.layer_modularity.push_back(layer_quality(graph, layer));
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    report.pairwise_nmi.assign(n_layers, std::vector<double>(n_layers, nan));
    report.pairwise_f1.assign(n_layers, std::vector<double>(n_layers, nan));
    auto scorable = [](const Layer& layer) {
        return layer.filler_count() < layer.communities().size();
    };
    for (std::size_t i = 0; i < n_layers; ++i) {
        for (std::size_t j = 0; j < n_layers; ++j) {
            const Layer& a = report.final_layers.layers[i];
            const Layer& b = report.final_layers.layers[j];
            if (a.is_structural_partition() && b.is_structural_partition()) {
                report.pairwise_nmi[i][j] = nmi(a, b);
            }
            if (scorable(a) && scorable(b)) {
                report.pairwise_f1[i][j] = jaccard_scores(a, b).f1;
            }
        }
    }
    return report;
}

const char* reduce_method_name(ReduceMethod method) {
    switch (method) {
        case ReduceMethod::remove_edge:
            return "remove-edge";
        case ReduceMethod::reduce_edge:
            return "reduce-edge";
        case ReduceMethod::reduce_weight:
            return "reduce-weight";
    }
    return "unknown";
}

std::string report_to_json(const RunReport& report) {
    nlohmann::json j;
    j["selected_n_L"] = report.selected_n_L;
    nlohmann::json table = nlohmann::json::object();
    for (const auto& [n, r] : report.r_table) {
        table[std::to_string(n)] = r;
    }
    j["r_table"] = table;
    j["modularity_history"] = report.modularity_history;
    j["best_iteration"] = report.best_iteration;
    if (report.converged_iteration) {
        j["converged_iteration"] = *report.converged_iteration;
    } else {
        j["converged_iteration"] = nullptr;
    }

    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t i = 0; i < report.final_layers.size(); ++i) {
        const Layer& layer = report.final_layers.layers[i];
        nlohmann::json entry;
        entry["file"] = "layer_" + std::to_string(i + 1) + ".cmty";
        entry["kind"] = layer.kind() == LayerKind::partition ? "partition" : "cover";
        entry["communities"] = layer.communities().size();
        entry["fillers"] = layer.filler_count();
        entry["degenerate"] = layer.degenerate();
        entry["modularity"] = report.layer_modularity[i];
        layers.push_back(entry);
    }
    j["layers"] = layers;

    auto matrix_json = [](const std::vector<std::vector<double>>& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : m) {
            nlohmann::json cells = nlohmann::json::array();
            for (double v : row) {
                if (std::isnan(v)) {
                    cells.push_back(nullptr);
                } else {
                    cells.push_back(v);
                }
            }
            rows.push_back(cells);
        }
        return rows;
    };
    nlohmann::json metrics;
    metrics["layer_modularity"] = report.layer_modularity;
    metrics["pairwise_nmi"] = matrix_json(report.pairwise_nmi);
    metrics["pairwise_f1"] = matrix_json(report.pairwise_f1);
    j["metrics"] = metrics;

    j["config"] = {{"base", report.base_name},
                   {"method_effective", reduce_method_name(report.method_effective)}};
    return j.dump(2) + "\n";
}

}  // namespace hicode
