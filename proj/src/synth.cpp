#include "hicode/synth.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

#include "hicode/rng.hpp"

namespace hicode {

void BlockmodelSpec::validate() const {
    if (node_count < 2) {
        throw std::invalid_argument("blockmodel needs at least 2 nodes");
    }
    if (layers.empty()) {
        throw std::invalid_argument("blockmodel needs at least one layer");
    }
    for (const auto& layer : layers) {
        if (layer.community_count < 1) {
            throw std::invalid_argument("layer community count must be >= 1");
        }
        if (!(layer.intra_p > 0.0) || layer.intra_p > 1.0) {
            throw std::invalid_argument("layer edge probability must be in (0, 1]");
        }
    }
}

GenerateResult generate(const BlockmodelSpec& spec, std::uint64_t seed) {
    spec.validate();
    const std::size_t n = spec.node_count;
    Rng rng(mix_seed({seed, 0x5b10c5ULL}));

    GenerateResult result;
    std::map<std::pair<NodeId, NodeId>, double> edges;
    for (const LayerSpec& layer_spec : spec.layers) {
        const std::size_t k = layer_spec.community_count;
        std::vector<std::vector<NodeId>> blocks(k);
        for (NodeId u = 0; u < n; ++u) {
            blocks[rng.below(k)].push_back(u);
        }
        for (const auto& block : blocks) {
            for (std::size_t i = 0; i < block.size(); ++i) {
                for (std::size_t j = i + 1; j < block.size(); ++j) {
                    if (rng.uniform() < layer_spec.intra_p) {
                        auto [it, inserted] =
                            edges.emplace(std::make_pair(block[i], block[j]), 1.0);
                        if (!inserted) {
                            ++result.collisions;
                        }
                    }
                }
            }
        }
        std::vector<Community> comms;
        for (auto& block : blocks) {
            if (!block.empty()) {
                comms.push_back(Community{std::move(block)});
            }
        }
        result.planted.layers.push_back(Layer::make_partition(n, std::move(comms)));
    }

    std::vector<std::tuple<NodeId, NodeId, double>> triples;
    triples.reserve(edges.size());
    for (const auto& [key, w] : edges) {
        triples.emplace_back(key.first, key.second, w);
    }
    result.graph = Graph::from_edges(LabelTable::sequential(n), std::move(triples));
    return result;
}

BlockmodelSpec synl2_spec() {
    BlockmodelSpec spec;
    spec.node_count = 200;
    spec.layers = {{5, 0.12}, {4, 0.10}};
    return spec;
}

}  // namespace hicode
