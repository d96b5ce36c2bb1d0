#include "hicode/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hicode/check.hpp"

namespace hicode {

std::shared_ptr<const LabelTable> LabelTable::sequential(std::size_t n) {
    std::vector<std::string> names;
    names.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(std::to_string(i + 1));
    }
    return from_names(std::move(names));
}

std::shared_ptr<const LabelTable> LabelTable::from_names(std::vector<std::string> names) {
    auto table = std::make_shared<LabelTable>();
    table->names = std::move(names);
    table->index.reserve(table->names.size());
    for (std::size_t i = 0; i < table->names.size(); ++i) {
        auto [it, inserted] = table->index.emplace(table->names[i], static_cast<NodeId>(i));
        if (!inserted) {
            throw std::invalid_argument("duplicate node label '" + table->names[i] + "'");
        }
    }
    return table;
}

Graph Graph::from_edges(std::shared_ptr<const LabelTable> labels,
                        std::vector<std::tuple<NodeId, NodeId, double>> edges,
                        std::size_t* self_loops_dropped, std::size_t* duplicates_merged) {
    const std::size_t n = labels->names.size();
    std::size_t loops = 0;
    std::size_t merged = 0;

    // normalize to (min, max) and merge duplicates by weight sum
    std::map<std::pair<NodeId, NodeId>, double> merged_edges;
    for (auto& [u, v, w] : edges) {
        if (u >= n || v >= n) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (!(w > 0.0)) {
            throw std::invalid_argument("edge weight must be positive");
        }
        if (u == v) {
            ++loops;
            continue;
        }
        auto key = std::minmax(u, v);
        auto [it, inserted] = merged_edges.emplace(key, w);
        if (!inserted) {
            it->second += w;
            ++merged;
        }
    }

    Graph g;
    g.labels_ = std::move(labels);
    g.adjacency_.resize(n);
    g.degrees_.assign(n, 0.0);
    g.edge_count_ = merged_edges.size();
    for (const auto& [key, w] : merged_edges) {
        g.adjacency_[key.first].push_back({key.second, w});
        g.adjacency_[key.second].push_back({key.first, w});
        g.degrees_[key.first] += w;
        g.degrees_[key.second] += w;
        g.total_edge_weight_ += w;
    }
    for (auto& list : g.adjacency_) {
        std::sort(list.begin(), list.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
    }

    if (self_loops_dropped != nullptr) {
        *self_loops_dropped = loops;
    }
    if (duplicates_merged != nullptr) {
        *duplicates_merged = merged;
    }
    return g;
}

double Graph::edge_weight(NodeId u, NodeId v) const {
    const auto& list = adjacency_[u];
    auto it = std::lower_bound(list.begin(), list.end(), v,
                               [](const Neighbor& nb, NodeId x) { return nb.node < x; });
    if (it != list.end() && it->node == v) {
        return it->weight;
    }
    return 0.0;
}

std::optional<NodeId> Graph::find_label(const std::string& name) const {
    auto it = labels_->index.find(name);
    if (it == labels_->index.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool Community::contains(NodeId u) const {
    return std::binary_search(members.begin(), members.end(), u);
}

Layer Layer::build(std::size_t node_count, LayerKind kind, std::vector<Community> comms,
                   std::vector<std::uint8_t> filler, bool degenerate) {
    Layer layer;
    layer.node_count_ = node_count;
    layer.kind_ = kind;
    layer.comms_ = std::move(comms);
    layer.filler_ = std::move(filler);
    layer.degenerate_ = degenerate;

    layer.multiplicity_.assign(node_count, 0);
    for (auto& c : layer.comms_) {
        if (c.members.empty()) {
            throw std::invalid_argument("community must be nonempty");
        }
        std::sort(c.members.begin(), c.members.end());
        c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
        if (c.members.back() >= node_count) {
            throw std::invalid_argument("community member id out of range");
        }
        for (NodeId u : c.members) {
            ++layer.multiplicity_[u];
        }
    }
    for (std::size_t u = 0; u < node_count; ++u) {
        if (layer.multiplicity_[u] == 0) {
            throw std::invalid_argument("layer does not cover node " + std::to_string(u));
        }
    }

    bool disjoint = std::all_of(layer.multiplicity_.begin(), layer.multiplicity_.end(),
                                [](std::uint32_t m) { return m == 1; });
    if (kind == LayerKind::partition && !disjoint) {
        throw std::invalid_argument("partition layer has overlapping communities");
    }
    if (disjoint) {
        layer.comm_of_.assign(node_count, 0);
        for (std::size_t k = 0; k < layer.comms_.size(); ++k) {
            for (NodeId u : layer.comms_[k].members) {
                layer.comm_of_[u] = static_cast<std::uint32_t>(k);
            }
        }
    }
    return layer;
}

Layer Layer::make_partition(std::size_t node_count, std::vector<Community> comms) {
    std::vector<std::uint8_t> filler(comms.size(), 0);
    return build(node_count, LayerKind::partition, std::move(comms), std::move(filler), false);
}

Layer Layer::make_cover(std::size_t node_count, std::vector<Community> comms) {
    std::vector<std::uint8_t> filler(comms.size(), 0);
    std::vector<std::uint8_t> covered(node_count, 0);
    for (const auto& c : comms) {
        for (NodeId u : c.members) {
            if (u < node_count) {
                covered[u] = 1;
            }
        }
    }
    for (NodeId u = 0; u < node_count; ++u) {
        if (!covered[u]) {
            comms.push_back(Community{{u}});
            filler.push_back(1);
        }
    }
    return build(node_count, LayerKind::cover, std::move(comms), std::move(filler), false);
}

Layer Layer::all_singletons(std::size_t node_count, bool degenerate) {
    std::vector<Community> comms;
    comms.reserve(node_count);
    for (NodeId u = 0; u < node_count; ++u) {
        comms.push_back(Community{{u}});
    }
    return build(node_count, LayerKind::partition, std::move(comms),
                 std::vector<std::uint8_t>(node_count, 1), degenerate);
}

std::size_t Layer::filler_count() const {
    std::size_t n = 0;
    for (auto f : filler_) {
        n += f;
    }
    return n;
}

const std::vector<std::uint32_t>& Layer::community_of() const {
    if (node_count_ > 0 && comm_of_.empty()) {
        throw std::logic_error("community_of() requires a structural partition");
    }
    return comm_of_;
}

namespace {

constexpr const char* kIsolatedPrefix = "# isolated:";

std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

// strips trailing CR and '#' comments
std::string strip_line(const std::string& raw) {
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    auto hash = line.find('#');
    if (hash != std::string::npos) {
        line.erase(hash);
    }
    return line;
}

double parse_weight(const std::string& tok, std::size_t line_no) {
    std::size_t consumed = 0;
    double w = 0.0;
    try {
        w = std::stod(tok, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed != tok.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": bad edge weight '" +
                                 tok + "'");
    }
    if (!(w > 0.0)) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": edge weight must be > 0, got '" + tok + "'");
    }
    return w;
}

std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

}  // namespace

Graph load_edge_list(const std::filesystem::path& path, LoadStats* stats) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open edge list '" + path.string() + "'");
    }

    std::vector<std::string> names;
    std::unordered_map<std::string, NodeId> ids;
    auto intern = [&](const std::string& label) {
        auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(names.size()));
        if (inserted) {
            names.push_back(label);
        }
        return it->second;
    };

    std::vector<std::tuple<NodeId, NodeId, double>> edges;
    std::string raw;
    std::size_t line_no = 0;
    std::size_t loops = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (raw.rfind(kIsolatedPrefix, 0) == 0) {
            for (const auto& label : split_tokens(raw.substr(std::strlen(kIsolatedPrefix)))) {
                intern(label);
            }
            continue;
        }
        const std::string line = strip_line(raw);
        const auto tokens = split_tokens(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens.size() != 2 && tokens.size() != 3) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 'u v' or 'u v w', got '" + line + "'");
        }
        const NodeId u = intern(tokens[0]);
        const NodeId v = intern(tokens[1]);
        const double w = tokens.size() == 3 ? parse_weight(tokens[2], line_no) : 1.0;
        if (u == v) {
            ++loops;
            continue;
        }
        edges.emplace_back(u, v, w);
    }

    std::size_t merged = 0;
    Graph g = Graph::from_edges(LabelTable::from_names(std::move(names)), std::move(edges),
                                nullptr, &merged);
    if (stats != nullptr) {
        stats->self_loops_dropped = loops;
        stats->duplicates_merged = merged;
    }
    return g;
}

void write_edge_list(const Graph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write edge list '" + path.string() + "'");
    }
    std::vector<NodeId> isolated;
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        if (graph.neighbors(u).empty()) {
            isolated.push_back(u);
        }
    }
    if (!isolated.empty()) {
        out << kIsolatedPrefix;
        for (NodeId u : isolated) {
            out << ' ' << graph.label(u);
        }
        out << '\n';
    }
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        for (const Neighbor& nb : graph.neighbors(u)) {
            if (nb.node < u) {
                continue;
            }
            out << graph.label(u) << ' ' << graph.label(nb.node);
            if (nb.weight != 1.0) {
                out << ' ' << format_weight(nb.weight);
            }
            out << '\n';
        }
    }
    if (!out) {
        throw std::runtime_error("failed writing edge list '" + path.string() + "'");
    }
}

Layer load_community_file(const std::filesystem::path& path, const Graph& graph) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open community file '" + path.string() + "'");
    }
    std::vector<Community> comms;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto tokens = split_tokens(strip_line(raw));
        if (tokens.empty()) {
            continue;
        }
        Community c;
        for (const auto& label : tokens) {
            auto id = graph.find_label(label);
            if (!id) {
                throw std::runtime_error("line " + std::to_string(line_no) +
                                         ": unknown node label " + label);
            }
            c.members.push_back(*id);
        }
        comms.push_back(std::move(c));
    }
    if (comms.empty()) {
        throw std::runtime_error("community file '" + path.string() + "' is empty");
    }
    return Layer::make_cover(graph.node_count(), std::move(comms));
}

namespace {

// deterministic export order: communities by descending size, then by
// lexicographically smallest member label; members ascending by label
std::vector<std::vector<std::string>> export_order(const Layer& layer, const Graph& graph) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(layer.communities().size());
    for (const auto& c : layer.communities()) {
        std::vector<std::string> labels;
        labels.reserve(c.size());
        for (NodeId u : c.members) {
            labels.push_back(graph.label(u));
        }
        std::sort(labels.begin(), labels.end());
        rows.push_back(std::move(labels));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) {
            return a.size() > b.size();
        }
        return a.front() < b.front();
    });
    return rows;
}

}  // namespace

void write_community_file(const Layer& layer, const Graph& graph,
                          const std::filesystem::path& path) {
    HICODE_CHECK(layer.node_count() == graph.node_count());
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write community file '" + path.string() + "'");
    }
    for (const auto& row : export_order(layer, graph)) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? " " : "") << row[i];
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error("failed writing community file '" + path.string() + "'");
    }
}

void write_layers(const LayerSet& layers, const Graph& graph,
                  const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < layers.layers.size(); ++i) {
        write_community_file(layers.layers[i], graph,
                             dir / ("layer_" + std::to_string(i + 1) + ".cmty"));
    }
}

}  // namespace hicode
