#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "hicode/graph.hpp"

namespace hicode {

// Pluggable community detector. Implementations must return a layer that
// covers all nodes of the input graph and must be deterministic for a
// fixed (graph, seed).
class BaseAlgorithm {
public:
    virtual ~BaseAlgorithm() = default;

    virtual Layer detect(const Graph& graph, std::uint64_t seed) const = 0;
    virtual bool supports_weights() const = 0;
    virtual bool produces_overlaps() const = 0;
    virtual std::string name() const = 0;
};

// Greedy modularity maximization (two-phase Louvain): seeded-shuffle local
// moves followed by community aggregation, repeated until no gain remains.
// Throws when the graph is empty or has no edges.
Layer louvain_detect(const Graph& graph, std::uint64_t seed);

class LouvainBase final : public BaseAlgorithm {
public:
    Layer detect(const Graph& graph, std::uint64_t seed) const override {
        return louvain_detect(graph, seed);
    }
    bool supports_weights() const override { return true; }
    bool produces_overlaps() const override { return false; }
    std::string name() const override { return "louvain"; }
};

}  // namespace hicode
