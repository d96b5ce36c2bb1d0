#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace hicode {

using NodeId = std::uint32_t;

struct Neighbor {
    NodeId node;
    double weight;
};

// External node labels and their dense internal ids. Shared between a graph
// and everything derived from it (weakened copies keep the same node set).
struct LabelTable {
    std::vector<std::string> names;                    // internal id -> label
    std::unordered_map<std::string, NodeId> index;     // label -> internal id

    static std::shared_ptr<const LabelTable> sequential(std::size_t n);
    static std::shared_ptr<const LabelTable> from_names(std::vector<std::string> names);
};

// Weighted undirected graph. Immutable after construction: adjacency is
// symmetric, self-loops are absent and all stored weights are positive.
class Graph {
public:
    Graph() = default;

    // Merges duplicate undirected edges by summing weights and drops
    // self-loops (counted in *self_loops_dropped* when given). Throws on
    // non-positive weights or out-of-range endpoints.
    static Graph from_edges(std::shared_ptr<const LabelTable> labels,
                            std::vector<std::tuple<NodeId, NodeId, double>> edges,
                            std::size_t* self_loops_dropped = nullptr,
                            std::size_t* duplicates_merged = nullptr);

    std::size_t node_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    double total_edge_weight() const { return total_edge_weight_; }  // e

    const std::vector<Neighbor>& neighbors(NodeId u) const { return adjacency_[u]; }
    double weighted_degree(NodeId u) const { return degrees_[u]; }
    double edge_weight(NodeId u, NodeId v) const;  // 0 when absent

    const std::string& label(NodeId u) const { return labels_->names[u]; }
    std::optional<NodeId> find_label(const std::string& name) const;
    const std::shared_ptr<const LabelTable>& labels() const { return labels_; }

private:
    friend class GraphEditor;
    std::shared_ptr<const LabelTable> labels_;
    std::vector<std::vector<Neighbor>> adjacency_;  // sorted by neighbor id
    std::vector<double> degrees_;
    double total_edge_weight_ = 0.0;
    std::size_t edge_count_ = 0;
};

// A node set; members sorted ascending and unique.
struct Community {
    std::vector<NodeId> members;

    std::size_t size() const { return members.size(); }
    bool contains(NodeId u) const;

    friend bool operator==(const Community&, const Community&) = default;
};

enum class LayerKind { partition, cover };

// A set of communities covering (or exactly partitioning) the nodes.
// Uncovered nodes are wrapped as filler singleton communities at
// construction so every layer covers the node set.
class Layer {
public:
    static Layer make_partition(std::size_t node_count, std::vector<Community> comms);
    static Layer make_cover(std::size_t node_count, std::vector<Community> comms);
    static Layer all_singletons(std::size_t node_count, bool degenerate);

    std::size_t node_count() const { return node_count_; }
    LayerKind kind() const { return kind_; }
    const std::vector<Community>& communities() const { return comms_; }
    bool is_filler(std::size_t k) const { return filler_[k] != 0; }
    std::size_t filler_count() const;
    bool degenerate() const { return degenerate_; }

    // number of communities containing node i (m in w_ik = 1/m)
    std::uint32_t multiplicity(NodeId i) const { return multiplicity_[i]; }
    double belonging(NodeId i) const { return 1.0 / multiplicity_[i]; }

    // true when communities are pairwise disjoint and cover all nodes,
    // regardless of the declared kind
    bool is_structural_partition() const { return node_count_ == 0 || !comm_of_.empty(); }
    // node -> community index; only for structural partitions
    const std::vector<std::uint32_t>& community_of() const;

    friend bool operator==(const Layer&, const Layer&) = default;

private:
    Layer() = default;
    static Layer build(std::size_t node_count, LayerKind kind, std::vector<Community> comms,
                       std::vector<std::uint8_t> filler, bool degenerate);

    std::size_t node_count_ = 0;
    LayerKind kind_ = LayerKind::partition;
    std::vector<Community> comms_;
    std::vector<std::uint8_t> filler_;
    std::vector<std::uint32_t> multiplicity_;
    std::vector<std::uint32_t> comm_of_;  // empty unless structural partition
    bool degenerate_ = false;
};

// Ordered collection of layers, strongest (first-detected) first.
struct LayerSet {
    std::vector<Layer> layers;

    std::size_t size() const { return layers.size(); }
    friend bool operator==(const LayerSet&, const LayerSet&) = default;
};

struct LoadStats {
    std::size_t self_loops_dropped = 0;
    std::size_t duplicates_merged = 0;
};

// Text edge list: "u v" or "u v w" per line, '#' starts a comment, labels
// are arbitrary non-'#' tokens. A "# isolated: a b c" comment registers
// edgeless nodes so serialization round-trips exactly.
Graph load_edge_list(const std::filesystem::path& path, LoadStats* stats = nullptr);
void write_edge_list(const Graph& graph, const std::filesystem::path& path);

// Community file: one community per line, node labels whitespace-separated.
Layer load_community_file(const std::filesystem::path& path, const Graph& graph);
void write_community_file(const Layer& layer, const Graph& graph,
                          const std::filesystem::path& path);

// One file per layer, layer_<rank>.cmty, rank 1 = strongest.
void write_layers(const LayerSet& layers, const Graph& graph,
                  const std::filesystem::path& dir);

}  // namespace hicode
