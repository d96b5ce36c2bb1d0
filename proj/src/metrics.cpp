#include "hicode/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "hicode/check.hpp"

namespace hicode {

namespace {

void require_edges(const Graph& graph) {
    if (graph.total_edge_weight() <= 0.0) {
        throw std::invalid_argument("metric undefined on a graph with no edges");
    }
}

void require_partition(const Layer& layer, const char* what) {
    if (!layer.is_structural_partition()) {
        throw std::invalid_argument(std::string(what) + " requires a partition layer");
    }
}

std::size_t intersection_size(const Community& a, const Community& b) {
    std::size_t count = 0;
    auto ia = a.members.begin();
    auto ib = b.members.begin();
    while (ia != a.members.end() && ib != b.members.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

}  // namespace

double modularity(const Graph& graph, const Layer& layer) {
    require_edges(graph);
    if (layer.node_count() != graph.node_count()) {
        throw std::invalid_argument("layer node count does not match graph");
    }
    require_partition(layer, "modularity");

    const auto& comm_of = layer.community_of();
    const std::size_t k_count = layer.communities().size();
    std::vector<double> intra(k_count, 0.0);
    std::vector<double> degree(k_count, 0.0);
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        const auto c = comm_of[u];
        degree[c] += graph.weighted_degree(u);
        for (const Neighbor& nb : graph.neighbors(u)) {
            if (nb.node > u && comm_of[nb.node] == c) {
                intra[c] += nb.weight;
            }
        }
    }

    const double e = graph.total_edge_weight();
    double q = 0.0;
    for (std::size_t c = 0; c < k_count; ++c) {
        const double frac = degree[c] / (2.0 * e);
        q += intra[c] / e - frac * frac;
    }
    return q;
}

double overlapping_modularity(const Graph& graph, const Layer& layer) {
    require_edges(graph);
    if (layer.node_count() != graph.node_count()) {
        throw std::invalid_argument("layer node count does not match graph");
    }

    // node -> indices of containing communities
    std::vector<std::vector<std::uint32_t>> containing(graph.node_count());
    for (std::size_t k = 0; k < layer.communities().size(); ++k) {
        for (NodeId u : layer.communities()[k].members) {
            containing[u].push_back(static_cast<std::uint32_t>(k));
        }
    }

    const std::size_t k_count = layer.communities().size();
    std::vector<double> intra(k_count, 0.0);  // e_kk weighted by (w_ik + w_jk)/2
    std::vector<double> out(k_count, 0.0);    // e_k_out weighted by (w_ik + 1 - w_jk)/2
    for (NodeId u = 0; u < graph.node_count(); ++u) {
        const double wu = layer.belonging(u);
        for (const Neighbor& nb : graph.neighbors(u)) {
            const NodeId v = nb.node;
            if (v < u) {
                continue;  // each undirected edge once
            }
            const double wv = layer.belonging(v);
            for (std::uint32_t k : containing[u]) {
                if (layer.communities()[k].contains(v)) {
                    intra[k] += 0.5 * (wu + wv) * nb.weight;
                } else {
                    out[k] += 0.5 * (wu + 1.0) * nb.weight;
                }
            }
            for (std::uint32_t k : containing[v]) {
                if (!layer.communities()[k].contains(u)) {
                    out[k] += 0.5 * (wv + 1.0) * nb.weight;
                }
            }
        }
    }

    const double e = graph.total_edge_weight();
    double q = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
        const double d_k = 2.0 * intra[k] + out[k];
        const double frac = d_k / (2.0 * e);
        q += intra[k] / e - frac * frac;
    }
    return q;
}

double community_modularity(const Graph& graph, const Community& community) {
    require_edges(graph);
    double intra = 0.0;
    double degree = 0.0;
    for (NodeId u : community.members) {
        degree += graph.weighted_degree(u);
        for (const Neighbor& nb : graph.neighbors(u)) {
            if (nb.node > u && community.contains(nb.node)) {
                intra += nb.weight;
            }
        }
    }
    const double e = graph.total_edge_weight();
    const double frac = degree / (2.0 * e);
    const double q_k = intra / e - frac * frac;
    return q_k / static_cast<double>(community.size());
}

double community_modularity(const Graph& graph, const Layer& layer, std::size_t k) {
    if (k >= layer.communities().size()) {
        throw std::out_of_range("community index out of range");
    }
    return community_modularity(graph, layer.communities()[k]);
}

ContingencyTable contingency(const Layer& x, const Layer& y) {
    if (x.node_count() != y.node_count()) {
        throw std::invalid_argument("contingency requires layers over the same node set");
    }
    require_partition(x, "contingency");
    require_partition(y, "contingency");

    ContingencyTable table;
    table.node_count = x.node_count();
    const double inv_n = 1.0 / static_cast<double>(table.node_count);
    table.px.resize(x.communities().size());
    table.py.resize(y.communities().size());
    for (std::size_t i = 0; i < x.communities().size(); ++i) {
        table.px[i] = static_cast<double>(x.communities()[i].size()) * inv_n;
    }
    for (std::size_t j = 0; j < y.communities().size(); ++j) {
        table.py[j] = static_cast<double>(y.communities()[j].size()) * inv_n;
    }

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> cells;
    const auto& cx = x.community_of();
    const auto& cy = y.community_of();
    for (NodeId u = 0; u < x.node_count(); ++u) {
        ++cells[{cx[u], cy[u]}];
    }
    table.joint.reserve(cells.size());
    for (const auto& [key, count] : cells) {
        table.joint.push_back({key.first, key.second, static_cast<double>(count) * inv_n});
    }
    return table;
}

double nmi(const Layer& x, const Layer& y) {
    const ContingencyTable t = contingency(x, y);
    if (t.node_count == 0) {
        throw std::invalid_argument("nmi undefined on empty node set");
    }

    auto entropy = [](const std::vector<double>& p) {
        double h = 0.0;
        for (double v : p) {
            if (v > 0.0) {
                h -= v * std::log(v);
            }
        }
        return h;
    };
    const double hx = entropy(t.px);
    const double hy = entropy(t.py);
    if (hx + hy == 0.0) {
        return 1.0;  // both single-block: identical partitions
    }

    double mi = 0.0;
    for (const auto& cell : t.joint) {
        if (cell.mass > 0.0) {
            mi += cell.mass * std::log(cell.mass / (t.px[cell.x] * t.py[cell.y]));
        }
    }
    return 2.0 * mi / (hx + hy);
}

JaccardReport jaccard_scores(const Layer& detected, const Layer& truth) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    JaccardReport report;
    report.per_detected.assign(detected.communities().size(), nan);
    report.per_truth.assign(truth.communities().size(), nan);

    std::vector<std::size_t> d_idx;
    std::vector<std::size_t> t_idx;
    for (std::size_t i = 0; i < detected.communities().size(); ++i) {
        if (!detected.is_filler(i)) {
            d_idx.push_back(i);
        }
    }
    for (std::size_t j = 0; j < truth.communities().size(); ++j) {
        if (!truth.is_filler(j)) {
            t_idx.push_back(j);
        }
    }
    if (d_idx.empty() || t_idx.empty()) {
        throw std::invalid_argument("jaccard_scores requires non-filler communities on both sides");
    }

    auto jaccard = [](const Community& a, const Community& b) {
        const double inter = static_cast<double>(intersection_size(a, b));
        const double uni = static_cast<double>(a.size() + b.size()) - inter;
        return inter / uni;
    };

    double p_num = 0.0;
    double p_den = 0.0;
    for (std::size_t i : d_idx) {
        const Community& d = detected.communities()[i];
        double best = 0.0;
        for (std::size_t j : t_idx) {
            best = std::max(best, jaccard(d, truth.communities()[j]));
        }
        report.per_detected[i] = best;
        p_num += static_cast<double>(d.size()) * best;
        p_den += static_cast<double>(d.size());
    }
    double r_num = 0.0;
    double r_den = 0.0;
    for (std::size_t j : t_idx) {
        const Community& g = truth.communities()[j];
        double best = 0.0;
        for (std::size_t i : d_idx) {
            best = std::max(best, jaccard(g, detected.communities()[i]));
        }
        report.per_truth[j] = best;
        r_num += static_cast<double>(g.size()) * best;
        r_den += static_cast<double>(g.size());
    }

    report.precision = p_num / p_den;
    report.recall = r_num / r_den;
    report.f1 = report.precision + report.recall > 0.0
                    ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                    : 0.0;
    return report;
}

HiddennessScore hiddenness(std::size_t k, const std::vector<Community>& all_comms,
                           const std::vector<double>& scores) {
    if (all_comms.size() != scores.size()) {
        throw std::invalid_argument("hiddenness: scores length must match community count");
    }
    if (k >= all_comms.size()) {
        throw std::out_of_range("hiddenness: community index out of range");
    }
    for (const auto& c : all_comms) {
        if (c.members.empty()) {
            throw std::invalid_argument("hiddenness: empty community in pool");
        }
    }

    const Community& target = all_comms[k];
    HiddennessScore result;
    std::vector<std::uint8_t> in_stronger;  // indexed by node id, grown on demand
    for (std::size_t i = 0; i < all_comms.size(); ++i) {
        if (scores[i] > scores[k]) {
            ++result.strong_set_size;
            for (NodeId u : all_comms[i].members) {
                if (u >= in_stronger.size()) {
                    in_stronger.resize(u + 1, 0);
                }
                in_stronger[u] = 1;
            }
        }
    }
    std::size_t covered = 0;
    for (NodeId u : target.members) {
        if (u < in_stronger.size() && in_stronger[u]) {
            ++covered;
        }
    }
    result.value = static_cast<double>(covered) / static_cast<double>(target.size());
    return result;
}

double layer_hiddenness(const Layer& layer, const std::vector<Community>& all_comms,
                        const std::vector<double>& scores) {
    if (all_comms.size() != scores.size()) {
        throw std::invalid_argument("layer_hiddenness: scores length must match community count");
    }
    if (layer.communities().empty()) {
        throw std::invalid_argument("layer_hiddenness: empty layer");
    }
    for (const auto& c : all_comms) {
        if (c.members.empty()) {
            throw std::invalid_argument("layer_hiddenness: empty community in pool");
        }
    }

    // locate each layer community in the pool by member-set equality
    std::vector<std::size_t> pool_index;
    pool_index.reserve(layer.communities().size());
    for (const Community& c : layer.communities()) {
        std::size_t found = all_comms.size();
        for (std::size_t i = 0; i < all_comms.size(); ++i) {
            if (all_comms[i].members == c.members) {
                found = i;
                break;
            }
        }
        if (found == all_comms.size()) {
            throw std::invalid_argument("layer_hiddenness: layer community not in pool");
        }
        pool_index.push_back(found);
    }

    // sweep communities strongest first, adding members of each strictly
    // stronger score group before scoring the next group
    std::vector<std::size_t> order(all_comms.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        return a < b;
    });

    NodeId max_node = 0;
    for (const auto& c : all_comms) {
        max_node = std::max(max_node, c.members.back());
    }
    std::vector<std::uint8_t> in_stronger(static_cast<std::size_t>(max_node) + 1, 0);
    std::vector<double> h(all_comms.size(), 0.0);
    std::size_t group_start = 0;
    while (group_start < order.size()) {
        std::size_t group_end = group_start;
        while (group_end < order.size() &&
               scores[order[group_end]] == scores[order[group_start]]) {
            ++group_end;
        }
        for (std::size_t pos = group_start; pos < group_end; ++pos) {
            const Community& c = all_comms[order[pos]];
            std::size_t covered = 0;
            for (NodeId u : c.members) {
                covered += in_stronger[u];
            }
            h[order[pos]] = static_cast<double>(covered) / static_cast<double>(c.size());
        }
        for (std::size_t pos = group_start; pos < group_end; ++pos) {
            for (NodeId u : all_comms[order[pos]].members) {
                in_stronger[u] = 1;
            }
        }
        group_start = group_end;
    }

    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < layer.communities().size(); ++k) {
        const double size = static_cast<double>(layer.communities()[k].size());
        num += size * h[pool_index[k]];
        den += size;
    }
    return num / den;
}

std::vector<double> community_scores(const Graph& graph, const std::vector<Community>& comms) {
    std::vector<double> scores;
    scores.reserve(comms.size());
    for (const auto& c : comms) {
        scores.push_back(community_modularity(graph, c));
    }
    return scores;
}

double layer_quality(const Graph& graph, const Layer& layer) {
    if (layer.is_structural_partition()) {
        return modularity(graph, layer);
    }
    return overlapping_modularity(graph, layer);
}

}  // namespace hicode
