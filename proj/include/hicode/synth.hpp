#pragma once

#include <cstdint>
#include <vector>

#include "hicode/graph.hpp"

namespace hicode {

// One planted layer: K roughly equal communities, each an Erdos-Renyi
// G(n_block, p) block.
struct LayerSpec {
    std::size_t community_count = 1;
    double intra_p = 0.1;
};

struct BlockmodelSpec {
    std::size_t node_count = 0;
    std::vector<LayerSpec> layers;

    void validate() const;
};

struct GenerateResult {
    Graph graph;
    LayerSet planted;          // one partition per layer spec
    std::size_t collisions = 0;  // duplicate pairs collapsed to weight 1
};

// Per layer: assign each node uniformly at random to one of K community
// ids, then sample each intra-block pair independently with probability p;
// superpose all layers, collapsing duplicate pairs to a single unit-weight
// edge. Deterministic per seed. Blocks left empty by the random
// assignment are dropped from the planted layer.
GenerateResult generate(const BlockmodelSpec& spec, std::uint64_t seed);

// The SynL2 reference instance: 200 nodes, a 5-community layer with
// p = 0.12 over a 4-community layer with p = 0.10.
BlockmodelSpec synl2_spec();

}  // namespace hicode
