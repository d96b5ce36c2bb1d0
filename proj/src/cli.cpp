#include "hicode/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "hicode/metrics.hpp"
#include "hicode/pipeline.hpp"
#include "hicode/synth.hpp"

namespace hicode {

namespace {

namespace fs = std::filesystem;

// Adapter for third-party detectors: runs `<exe> <edge-list> <out-cmty>`
// and parses the output as a community file. The seed is not forwarded;
// reproducibility then depends on the external tool.
class ExternalBase final : public BaseAlgorithm {
public:
    ExternalBase(std::string exe, bool supports_weights)
        : exe_(std::move(exe)), supports_weights_(supports_weights) {}

    Layer detect(const Graph& graph, std::uint64_t seed) const override {
        static std::atomic<unsigned> counter{0};
        const fs::path dir = fs::temp_directory_path() /
                             ("hicode_ext_" + std::to_string(::getpid()) + "_" +
                              std::to_string(counter.fetch_add(1)) + "_" +
                              std::to_string(seed & 0xffff));
        fs::create_directories(dir);
        const fs::path edges = dir / "graph.edges";
        const fs::path out = dir / "communities.cmty";
        write_edge_list(graph, edges);

        const std::string cmd =
            shell_quote(exe_) + " " + shell_quote(edges.string()) + " " +
            shell_quote(out.string());
        const int rc = std::system(cmd.c_str());
        if (rc != 0) {
            fs::remove_all(dir);
            throw std::runtime_error("external detector '" + exe_ + "' exited with status " +
                                     std::to_string(rc));
        }
        Layer layer = load_community_file(out, graph);
        fs::remove_all(dir);
        return layer;
    }

    bool supports_weights() const override { return supports_weights_; }
    bool produces_overlaps() const override { return true; }
    std::string name() const override { return "external:" + exe_; }

private:
    static std::string shell_quote(const std::string& s) {
        std::string quoted = "'";
        for (char c : s) {
            if (c == '\'') {
                quoted += "'\\''";
            } else {
                quoted += c;
            }
        }
        quoted += "'";
        return quoted;
    }

    std::string exe_;
    bool supports_weights_;
};

ReduceMethod parse_method(const std::string& name) {
    if (name == "remove-edge") {
        return ReduceMethod::remove_edge;
    }
    if (name == "reduce-edge") {
        return ReduceMethod::reduce_edge;
    }
    if (name == "reduce-weight") {
        return ReduceMethod::reduce_weight;
    }
    throw CLI::ValidationError("--method", "unknown reduce method '" + name + "'");
}

std::shared_ptr<const BaseAlgorithm> parse_base(const std::string& name, bool base_weights) {
    if (name == "louvain") {
        return std::make_shared<LouvainBase>();
    }
    if (name.rfind("external:", 0) == 0) {
        return std::make_shared<ExternalBase>(name.substr(9), base_weights);
    }
    throw CLI::ValidationError("--base", "expected 'louvain' or 'external:<path>'");
}

LayerSpec parse_layer_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError("--layer", "expected K:p, e.g. 5:0.12");
    }
    LayerSpec spec;
    try {
        spec.community_count = std::stoul(text.substr(0, colon));
        spec.intra_p = std::stod(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--layer", "expected K:p, e.g. 5:0.12");
    }
    return spec;
}

nlohmann::json double_or_null(double v) {
    if (std::isnan(v)) {
        return nullptr;
    }
    return v;
}

struct GenerateArgs {
    std::string spec_name;
    std::size_t nodes = 0;
    std::vector<std::string> layer_specs;
    std::uint64_t seed = 0;
    std::string out;
};

int run_generate(const GenerateArgs& args) {
    BlockmodelSpec spec;
    if (!args.spec_name.empty()) {
        if (args.spec_name != "synl2") {
            throw std::runtime_error("unknown named spec '" + args.spec_name + "'");
        }
        spec = synl2_spec();
    } else {
        spec.node_count = args.nodes;
        for (const auto& text : args.layer_specs) {
            spec.layers.push_back(parse_layer_spec(text));
        }
    }
    spec.validate();

    GenerateResult result = generate(spec, args.seed);
    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    write_edge_list(result.graph, out_dir / "edges.txt");
    for (std::size_t i = 0; i < result.planted.size(); ++i) {
        write_community_file(result.planted.layers[i], result.graph,
                             out_dir / ("truth_layer_" + std::to_string(i + 1) + ".cmty"));
    }

    nlohmann::json j;
    j["nodes"] = spec.node_count;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.layers.size(); ++i) {
        layers.push_back({{"communities", spec.layers[i].community_count},
                          {"p", spec.layers[i].intra_p},
                          {"file", "truth_layer_" + std::to_string(i + 1) + ".cmty"},
                          {"modularity", modularity(result.graph, result.planted.layers[i])}});
    }
    j["layers"] = layers;
    j["seed"] = args.seed;
    j["edges"] = result.graph.edge_count();
    j["collisions"] = result.collisions;
    std::ofstream json_out(out_dir / "generate.json", std::ios::trunc);
    json_out << j.dump(2) << '\n';
    if (!json_out) {
        throw std::runtime_error("failed writing generate.json");
    }
    std::cout << "wrote " << (out_dir / "edges.txt").string() << " (" << spec.node_count
              << " nodes, " << result.graph.edge_count() << " edges, "
              << result.planted.size() << " truth layers)\n";
    return 0;
}

struct DetectArgs {
    std::string graph;
    std::uint64_t seed = 0;
    std::string method = "reduce-weight";
    std::size_t max_layers = 5;
    std::size_t refine_iters = 100;
    double threshold = 0.05;
    std::string out;
    std::string base = "louvain";
    bool base_weights = false;
    unsigned jobs = 1;
};

int run_detect(const DetectArgs& args) {
    const Graph graph = load_edge_list(args.graph);

    HicodeConfig cfg;
    cfg.base = parse_base(args.base, args.base_weights);
    cfg.method = parse_method(args.method);
    cfg.seed = args.seed;
    cfg.max_layers = args.max_layers;
    cfg.refine_iterations = args.refine_iters;
    cfg.weak_layer_threshold = args.threshold;
    cfg.jobs = args.jobs;

    const RunReport report = run(graph, cfg);

    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    write_layers(report.final_layers, graph, out_dir);

    nlohmann::json j = nlohmann::json::parse(report_to_json(report));
    j["config"]["seed"] = args.seed;
    j["config"]["method"] = args.method;
    j["config"]["max_layers"] = args.max_layers;
    j["config"]["refine_iterations"] = args.refine_iters;
    j["config"]["weak_layer_threshold"] = args.threshold;
    std::ofstream json_out(out_dir / "report.json", std::ios::trunc);
    json_out << j.dump(2) << '\n';
    if (!json_out) {
        throw std::runtime_error("failed writing report.json");
    }
    std::cout << "detected " << report.selected_n_L << " layer(s), report in "
              << (out_dir / "report.json").string() << '\n';
    return 0;
}

struct EvaluateArgs {
    std::vector<std::string> detected;
    std::vector<std::string> truth;
    std::string graph;
    std::string metric = "modularity";
};

// layer with filler singletons stripped, for hiddenness scoring
Layer without_fillers(const Layer& layer) {
    std::vector<Community> comms;
    for (std::size_t k = 0; k < layer.communities().size(); ++k) {
        if (!layer.is_filler(k)) {
            comms.push_back(layer.communities()[k]);
        }
    }
    return Layer::make_cover(layer.node_count(), std::move(comms));
}

int run_evaluate(const EvaluateArgs& args) {
    if (args.metric != "modularity") {
        throw std::runtime_error("unsupported metric '" + args.metric +
                                 "' (only 'modularity' is built in)");
    }
    const Graph graph = load_edge_list(args.graph);

    auto load_side = [&](const std::vector<std::string>& paths) {
        std::vector<Layer> layers;
        for (const auto& p : paths) {
            layers.push_back(load_community_file(p, graph));
        }
        return layers;
    };
    const std::vector<Layer> detected = load_side(args.detected);
    const std::vector<Layer> truth = load_side(args.truth);

    // pool every non-filler community of every loaded layer; hiddenness of
    // a community is judged against all of them
    std::vector<Community> pool;
    for (const auto& layers : {std::cref(detected), std::cref(truth)}) {
        for (const Layer& layer : layers.get()) {
            for (std::size_t k = 0; k < layer.communities().size(); ++k) {
                if (!layer.is_filler(k)) {
                    pool.push_back(layer.communities()[k]);
                }
            }
        }
    }
    const std::vector<double> scores = community_scores(graph, pool);

    auto side_json = [&](const std::vector<Layer>& layers,
                         const std::vector<std::string>& paths) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < layers.size(); ++i) {
            nlohmann::json entry;
            entry["path"] = paths[i];
            entry["communities"] = layers[i].communities().size() - layers[i].filler_count();
            entry["fillers"] = layers[i].filler_count();
            entry["modularity"] = layer_quality(graph, layers[i]);
            entry["hiddenness"] =
                layer_hiddenness(without_fillers(layers[i]), pool, scores);
            arr.push_back(entry);
        }
        return arr;
    };

    nlohmann::json j;
    j["graph"] = {{"path", args.graph},
                  {"nodes", graph.node_count()},
                  {"edges", graph.edge_count()},
                  {"total_edge_weight", graph.total_edge_weight()}};
    j["metric"] = args.metric;
    j["detected"] = side_json(detected, args.detected);
    j["truth"] = side_json(truth, args.truth);

    nlohmann::json comparisons = nlohmann::json::array();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < detected.size(); ++i) {
        for (std::size_t t = 0; t < truth.size(); ++t) {
            const Layer& d = detected[i];
            const Layer& g = truth[t];
            double nmi_value = nan;
            if (d.is_structural_partition() && g.is_structural_partition()) {
                nmi_value = nmi(d, g);
            }
            const JaccardReport jr = jaccard_scores(d, g);
            comparisons.push_back({{"detected", i},
                                   {"truth", t},
                                   {"nmi", double_or_null(nmi_value)},
                                   {"precision", jr.precision},
                                   {"recall", jr.recall},
                                   {"f1", jr.f1}});
        }
    }
    j["comparisons"] = comparisons;
    std::cout << j.dump(2) << '\n';
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"HICODE: hidden community detection via iterative layer weakening"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate_cmd =
        app.add_subcommand("generate", "generate a multi-layer planted blockmodel");
    generate_cmd->add_option("--spec", gen.spec_name, "named instance: synl2");
    generate_cmd->add_option("--nodes", gen.nodes, "node count");
    generate_cmd->add_option("--layer", gen.layer_specs,
                             "layer as K:p (repeatable), e.g. --layer 5:0.12");
    generate_cmd->add_option("--seed", gen.seed, "random seed");
    generate_cmd->add_option("--out", gen.out, "output directory")->required();

    DetectArgs det;
    auto* detect_cmd = app.add_subcommand("detect", "run HICODE on an edge list");
    detect_cmd->add_option("--graph", det.graph, "edge list path")->required();
    detect_cmd->add_option("--seed", det.seed, "random seed");
    detect_cmd->add_option("--method", det.method,
                           "remove-edge | reduce-edge | reduce-weight");
    detect_cmd->add_option("--max-layers", det.max_layers, "largest candidate layer count");
    detect_cmd->add_option("--refine-iters", det.refine_iters, "refinement iterations");
    detect_cmd->add_option("--threshold", det.threshold, "weak layer modularity floor");
    detect_cmd->add_option("--out", det.out, "output directory")->required();
    detect_cmd->add_option("--base", det.base, "louvain | external:<path>");
    detect_cmd->add_option("--base-weights", det.base_weights,
                           "external base supports weighted graphs");
    detect_cmd->add_option("--jobs", det.jobs, "parallel candidate evaluations");

    EvaluateArgs eval;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "score detected layers against ground truth");
    evaluate_cmd->add_option("--detected", eval.detected, "detected community files")
        ->required();
    evaluate_cmd->add_option("--truth", eval.truth, "ground-truth community files")
        ->required();
    evaluate_cmd->add_option("--graph", eval.graph, "edge list path")->required();
    evaluate_cmd->add_option("--metric", eval.metric, "community quality metric");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 1;
    }

    try {
        if (generate_cmd->parsed()) {
            return run_generate(gen);
        }
        if (detect_cmd->parsed()) {
            return run_detect(det);
        }
        return run_evaluate(eval);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace hicode
