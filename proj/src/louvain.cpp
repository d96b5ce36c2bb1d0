#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hicode/base.hpp"
#include "hicode/check.hpp"
#include "hicode/rng.hpp"

namespace hicode {

namespace {

// Working graph for one aggregation level. Symmetric adjacency; a
// self-loop entry carries twice the collapsed intra-community weight, so
// degree_i = w_ii + sum_{j != i} w_ij and m = sum(degree) / 2.
struct LevelGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    std::vector<double> degree;
    std::vector<double> self_loop;
    double m = 0.0;

    std::size_t size() const { return adj.size(); }
};

LevelGraph level_from_graph(const Graph& g) {
    LevelGraph lg;
    lg.adj.resize(g.node_count());
    lg.degree.resize(g.node_count());
    lg.self_loop.assign(g.node_count(), 0.0);
    for (NodeId u = 0; u < g.node_count(); ++u) {
        lg.adj[u].reserve(g.neighbors(u).size());
        for (const Neighbor& nb : g.neighbors(u)) {
            lg.adj[u].emplace_back(nb.node, nb.weight);
        }
        lg.degree[u] = g.weighted_degree(u);
    }
    lg.m = g.total_edge_weight();
    return lg;
}

double level_modularity(const LevelGraph& lg, const std::vector<std::uint32_t>& comm) {
    std::uint32_t k = 0;
    for (auto c : comm) {
        k = std::max(k, c + 1);
    }
    std::vector<double> in(k, 0.0);
    std::vector<double> tot(k, 0.0);
    for (std::uint32_t u = 0; u < lg.size(); ++u) {
        tot[comm[u]] += lg.degree[u];
        in[comm[u]] += lg.self_loop[u];
        for (const auto& [v, w] : lg.adj[u]) {
            if (v != u && comm[v] == comm[u]) {
                in[comm[u]] += w;
            }
        }
    }
    const double two_m = 2.0 * lg.m;
    double q = 0.0;
    for (std::uint32_t c = 0; c < k; ++c) {
        q += in[c] / two_m - (tot[c] / two_m) * (tot[c] / two_m);
    }
    return q;
}

constexpr double kGainTolerance = 1e-12;

// One local-move phase: sweep nodes in seeded-shuffled order, moving each
// to the neighboring community with the best positive modularity gain.
// Ties in gain go to the lowest community id. Returns true if any node
// moved. comm ids stay within [0, n).
bool local_move_phase(const LevelGraph& lg, std::vector<std::uint32_t>& comm, Rng& rng) {
    const std::size_t n = lg.size();
    std::vector<double> tot(n, 0.0);
    for (std::uint32_t u = 0; u < n; ++u) {
        tot[comm[u]] += lg.degree[u];
    }

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<double> weight_to(n, 0.0);   // community -> edge weight from current node
    std::vector<std::uint32_t> touched;
    bool any_move = false;
    double last_q = level_modularity(lg, comm);

    bool moved_in_sweep = true;
    while (moved_in_sweep) {
        moved_in_sweep = false;
        rng.shuffle(order);
        for (std::uint32_t u : order) {
            const std::uint32_t from = comm[u];
            const double k_u = lg.degree[u];

            touched.clear();
            for (const auto& [v, w] : lg.adj[u]) {
                if (v == u) {
                    continue;
                }
                const std::uint32_t c = comm[v];
                if (weight_to[c] == 0.0) {
                    touched.push_back(c);
                }
                weight_to[c] += w;
            }
            if (std::find(touched.begin(), touched.end(), from) == touched.end()) {
                touched.push_back(from);
            }
            std::sort(touched.begin(), touched.end());

            // value of joining community c after removal from `from`;
            // ascending id scan makes the lowest id win exact ties
            auto join_value = [&](std::uint32_t c) {
                const double tot_c = tot[c] - (c == from ? k_u : 0.0);
                return weight_to[c] / lg.m - tot_c * k_u / (2.0 * lg.m * lg.m);
            };
            double stay_value = join_value(from);
            double best_value = stay_value;
            std::uint32_t best = from;
            for (std::uint32_t c : touched) {
                const double value = join_value(c);
                if (value > best_value) {
                    best_value = value;
                    best = c;
                }
            }

            if (best != from && best_value - stay_value > kGainTolerance) {
                tot[from] -= k_u;
                tot[best] += k_u;
                comm[u] = best;
                moved_in_sweep = true;
                any_move = true;
            }

            for (std::uint32_t c : touched) {
                weight_to[c] = 0.0;
            }
        }

        // modularity must not decrease across sweeps
        const double q = level_modularity(lg, comm);
        HICODE_CHECK(q >= last_q - 1e-9);
        last_q = q;
    }
    return any_move;
}

// renumber communities to 0..k-1 in ascending id order; returns k
std::uint32_t compact_labels(std::vector<std::uint32_t>& comm) {
    std::vector<std::uint32_t> present(comm.begin(), comm.end());
    std::sort(present.begin(), present.end());
    present.erase(std::unique(present.begin(), present.end()), present.end());
    std::vector<std::uint32_t> remap(present.back() + 1, 0);
    for (std::uint32_t i = 0; i < present.size(); ++i) {
        remap[present[i]] = i;
    }
    for (auto& c : comm) {
        c = remap[c];
    }
    return static_cast<std::uint32_t>(present.size());
}

LevelGraph aggregate(const LevelGraph& lg, const std::vector<std::uint32_t>& comm,
                     std::uint32_t k) {
    LevelGraph next;
    next.adj.resize(k);
    next.degree.assign(k, 0.0);
    next.self_loop.assign(k, 0.0);
    next.m = lg.m;

    // accumulate community-to-community weights; self entry collects the
    // doubled intra weight
    std::vector<double> row(k, 0.0);
    std::vector<std::vector<std::uint32_t>> members(k);
    for (std::uint32_t u = 0; u < lg.size(); ++u) {
        members[comm[u]].push_back(u);
    }
    std::vector<std::uint32_t> touched;
    for (std::uint32_t c = 0; c < k; ++c) {
        touched.clear();
        for (std::uint32_t u : members[c]) {
            for (const auto& [v, w] : lg.adj[u]) {
                const std::uint32_t d = (v == u) ? c : comm[v];
                if (row[d] == 0.0) {
                    touched.push_back(d);
                }
                // a self-loop entry already carries doubled weight; an
                // intra edge (u,v), u != v, is seen from both endpoints
                row[d] += w;
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::uint32_t d : touched) {
            if (d == c) {
                next.self_loop[c] = row[d];
                next.adj[c].emplace_back(c, row[d]);
            } else {
                next.adj[c].emplace_back(d, row[d]);
            }
            row[d] = 0.0;
        }
        next.degree[c] = 0.0;
        for (const auto& [d, w] : next.adj[c]) {
            next.degree[c] += w;
        }
    }
    return next;
}

}  // namespace

namespace {

// One bottom-up pass: local moves + aggregation until no level improves,
// starting level 0 from the communities in `assignment` (not necessarily
// singletons). Returns the final modularity; `assignment` is updated in
// place to the pass result.
double louvain_pass(const LevelGraph& base, std::vector<std::uint32_t>& assignment, Rng& rng) {
    LevelGraph level = base;
    std::vector<std::uint32_t> comm = assignment;  // level-node -> community
    compact_labels(comm);
    std::vector<std::uint32_t> node_of(base.size());  // original node -> level node
    std::iota(node_of.begin(), node_of.end(), 0);

    double last_level_q = level_modularity(level, comm);
    while (true) {
        const bool improved = local_move_phase(level, comm, rng);
        const std::uint32_t k = compact_labels(comm);
        for (auto& a : node_of) {
            a = comm[a];
        }
        if (!improved || k == level.size()) {
            break;
        }
        level = aggregate(level, comm, k);
        comm.resize(k);
        std::iota(comm.begin(), comm.end(), 0);

        // aggregation preserves modularity; levels must not regress
        const double q = level_modularity(level, comm);
        HICODE_CHECK(q >= last_level_q - 1e-9);
        last_level_q = q;
    }
    assignment = std::move(node_of);
    return level_modularity(level, comm);
}

}  // namespace

Layer louvain_detect(const Graph& graph, std::uint64_t seed) {
    if (graph.node_count() == 0) {
        throw std::invalid_argument("louvain_detect: empty graph");
    }
    if (graph.total_edge_weight() <= 0.0) {
        throw std::invalid_argument("louvain_detect: graph has no edges");
    }

    const LevelGraph base = level_from_graph(graph);

    // greedy moves are high-variance on small graphs, where full runs are
    // cheap; restart with derived seeds and keep the best modularity
    const std::size_t n = graph.node_count();
    const std::size_t restarts = n <= 32 ? 64 : (n <= 1000 ? 8 : 1);

    std::vector<std::uint32_t> assignment;
    double q = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(mix_seed({seed, r, 0x10f7a1eULL}));
        std::vector<std::uint32_t> current(base.size());
        std::iota(current.begin(), current.end(), 0);
        if (r % 2 == 1) {
            // diversify odd restarts with a random coarse start; local
            // moves can then reach basins unreachable from singletons
            const std::uint32_t k = 2 + static_cast<std::uint32_t>(rng.below(3));
            for (auto& c : current) {
                c = static_cast<std::uint32_t>(rng.below(k));
            }
        }

        // multilevel refinement: rerun the whole pass from the unfolded
        // partition until modularity stops improving
        double q_run = louvain_pass(base, current, rng);
        while (true) {
            std::vector<std::uint32_t> candidate = current;
            const double q_next = louvain_pass(base, candidate, rng);
            HICODE_CHECK(q_next >= q_run - 1e-9);
            if (q_next <= q_run + 1e-9) {
                break;
            }
            current = std::move(candidate);
            q_run = q_next;
        }
        if (q_run > q) {
            q = q_run;
            assignment = std::move(current);
        }
    }

    std::uint32_t k = 0;
    for (auto a : assignment) {
        k = std::max(k, a + 1);
    }
    std::vector<Community> comms(k);
    for (NodeId u = 0; u < assignment.size(); ++u) {
        comms[assignment[u]].members.push_back(u);
    }
    // deterministic order: by smallest member id
    std::sort(comms.begin(), comms.end(), [](const Community& a, const Community& b) {
        return a.members.front() < b.members.front();
    });
    return Layer::make_partition(graph.node_count(), std::move(comms));
}

}  // namespace hicode
