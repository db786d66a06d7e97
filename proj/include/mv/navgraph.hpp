#ifndef MV_NAVGRAPH_HPP
#define MV_NAVGRAPH_HPP

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mv/error.hpp"
#include "mv/geometry.hpp"
#include "mv/partition.hpp"
#include "mv/scenario.hpp"

namespace mv {

using VertexId = std::size_t;

/// One vertex per step, root first.
using Path = std::vector<VertexId>;

struct Edge {
    VertexId target{0};
    double cost{0.0};
};

/// Cost of moving from one cell into the next-step cell.
using EdgeWeight = std::function<double(Cell const& from, Cell const& to)>;

/// Directed layered graph over free space-time cells. Vertices are sorted by
/// (step, signature); each vertex's out-edges are sorted by target signature.
class NavGraph {
public:
    NavGraph() = default;

    [[nodiscard]] std::size_t vertex_count() const noexcept { return cells_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept {
        std::size_t n = 0;
        for (auto const& e : out_) n += e.size();
        return n;
    }
    [[nodiscard]] int steps() const noexcept { return static_cast<int>(layers_.size()) - 1; }

    [[nodiscard]] Cell const& cell(VertexId v) const { return cells_.at(v); }
    [[nodiscard]] std::vector<Cell> const& cells() const noexcept { return cells_; }
    [[nodiscard]] std::vector<VertexId> const& layer(int p) const { return layers_.at(static_cast<std::size_t>(p)); }
    [[nodiscard]] std::vector<Edge> const& out_edges(VertexId v) const { return out_.at(v); }

    [[nodiscard]] std::optional<VertexId> find(int p, Signature const& sig) const {
        if (p < 0 || p > steps()) return std::nullopt;
        auto const& l = layers_[static_cast<std::size_t>(p)];
        auto it = std::lower_bound(l.begin(), l.end(), sig,
                                   [&](VertexId v, Signature const& s) { return cells_[v].signature < s; });
        if (it != l.end() && cells_[*it].signature == sig) return *it;
        return std::nullopt;
    }

    [[nodiscard]] std::optional<double> edge_cost(VertexId from, VertexId to) const {
        for (auto const& e : out_.at(from)) {
            if (e.target == to) return e.cost;
        }
        return std::nullopt;
    }

    friend NavGraph build_graph(std::vector<std::vector<Cell>> cells, EdgeWeight const& weight);

private:
    std::vector<Cell> cells_;
    std::vector<std::vector<VertexId>> layers_;
    std::vector<std::vector<Edge>> out_;
};

/// Default weight: step / (1 + gap), where gap is the smallest s-distance between the
/// destination cell and any obstacle occupancy at the destination step. Zero without obstacles.
class TimeGapWeight {
public:
    explicit TimeGapWeight(Scenario const& sc) : step_(sc.step) {
        for (int p = 0; p <= sc.steps(); ++p) {
            std::vector<FrenetRect> boxes;
            for (auto const& o : sc.obstacles) boxes.push_back(occupancy_at_step(sc, o, p));
            boxes_.push_back(std::move(boxes));
        }
    }

    [[nodiscard]] double gap(Cell const& c) const {
        double g = std::numeric_limits<double>::infinity();
        for (auto const& box : boxes_.at(static_cast<std::size_t>(c.step))) g = std::min(g, s_distance(c.region, box));
        return g;
    }

    double operator()(Cell const& /*from*/, Cell const& to) const {
        double const g = gap(to);
        if (g == std::numeric_limits<double>::infinity()) return 0.0;
        return step_ / (1.0 + g);
    }

private:
    double step_;
    std::vector<std::vector<FrenetRect>> boxes_;
};

/// Edge (a at p) -> (b at p+1) exists iff the closures of a and b touch at step p and at
/// step p+1. A signature missing at either step contributes an empty region, so no edge.
[[nodiscard]] inline NavGraph build_graph(std::vector<std::vector<Cell>> cells, EdgeWeight const& weight) {
    NavGraph g;
    for (auto& layer : cells) {
        std::sort(layer.begin(), layer.end(), [](Cell const& a, Cell const& b) { return a.signature < b.signature; });
        std::vector<VertexId> ids;
        for (auto& c : layer) {
            ids.push_back(g.cells_.size());
            g.cells_.push_back(std::move(c));
        }
        g.layers_.push_back(std::move(ids));
    }
    g.out_.resize(g.cells_.size());

    for (int p = 0; p + 1 < static_cast<int>(g.layers_.size()); ++p) {
        for (VertexId a : g.layers_[static_cast<std::size_t>(p)]) {
            auto const& ca = g.cells_[a];
            auto const a_next = g.find(p + 1, ca.signature);
            if (!a_next) continue;
            for (VertexId b : g.layers_[static_cast<std::size_t>(p) + 1]) {
                auto const& cb = g.cells_[b];
                auto const b_prev = g.find(p, cb.signature);
                if (!b_prev) continue;
                if (!closures_touch(ca.region, g.cells_[*b_prev].region)) continue;
                if (!closures_touch(g.cells_[*a_next].region, cb.region)) continue;
                g.out_[a].push_back({b, weight(ca, cb)});
            }
        }
    }
    return g;
}

[[nodiscard]] inline NavGraph build_graph(Scenario const& sc, std::vector<std::vector<Cell>> cells) {
    return build_graph(std::move(cells), TimeGapWeight(sc));
}

/// Step-0 cell containing the ego seed; on shared boundaries the lowest signature wins.
[[nodiscard]] inline VertexId root_vertex(NavGraph const& g, double ego_s, double ego_d) {
    for (VertexId v : g.layer(0)) {
        if (g.cell(v).region.contains(ego_s, ego_d)) return v;
    }
    std::ostringstream msg;
    msg << "no step-0 cell contains the ego seed (" << ego_s << ", " << ego_d << ")";
    throw Error(msg.str());
}

[[nodiscard]] inline std::vector<VertexId> goal_candidates(NavGraph const& g) { return g.layer(g.steps()); }

struct TraceSet {
    std::vector<Path> paths;
    bool truncated{false};
};

inline constexpr std::size_t kDefaultTraceLimit = 100000;

/// All root -> goal paths, depth-first with children in signature order. Stops after
/// `limit` paths and sets the truncation flag.
[[nodiscard]] inline TraceSet enumerate_traces(NavGraph const& g, VertexId root, VertexId goal,
                                               std::size_t limit = kDefaultTraceLimit) {
    TraceSet out;
    int const last = g.steps();
    if (g.cell(root).step != 0 || g.cell(goal).step != last) return out;

    // Vertices from which the goal is reachable.
    std::vector<char> reaches(g.vertex_count(), 0);
    reaches[goal] = 1;
    for (int p = last - 1; p >= 0; --p) {
        for (VertexId v : g.layer(p)) {
            for (auto const& e : g.out_edges(v)) {
                if (reaches[e.target]) {
                    reaches[v] = 1;
                    break;
                }
            }
        }
    }
    if (!reaches[root]) return out;

    Path path{root};
    std::vector<std::size_t> cursor{0};
    while (!path.empty()) {
        VertexId const v = path.back();
        if (static_cast<int>(path.size()) == last + 1) {
            if (out.paths.size() >= limit) {
                out.truncated = true;
                return out;
            }
            out.paths.push_back(path);
            path.pop_back();
            cursor.pop_back();
            continue;
        }
        auto const& edges = g.out_edges(v);
        auto& i = cursor.back();
        while (i < edges.size() && !reaches[edges[i].target]) ++i;
        if (i == edges.size()) {
            path.pop_back();
            cursor.pop_back();
            continue;
        }
        path.push_back(edges[i].target);
        ++i;
        cursor.push_back(0);
    }
    return out;
}

/// Sum of edge costs along the path, accumulated from the root.
[[nodiscard]] inline double path_cost(NavGraph const& g, Path const& path) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        auto const c = g.edge_cost(path[k], path[k + 1]);
        if (!c) throw Error("path_cost: consecutive vertices are not connected");
        total += *c;
    }
    return total;
}

/// Lexicographic comparison of two paths by their signature sequences.
[[nodiscard]] inline bool signature_less(NavGraph const& g, Path const& a, Path const& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), [&](VertexId x, VertexId y) {
        return g.cell(x).signature < g.cell(y).signature;
    });
}

/// Minimum-cost root -> goal path. Equal costs resolve to the signature-lexicographically
/// smallest path.
[[nodiscard]] inline std::optional<Path> dijkstra(NavGraph const& g, VertexId root, VertexId goal) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::size_t const n = g.vertex_count();
    std::vector<double> dist(n, inf);
    std::vector<std::optional<VertexId>> pred(n);
    std::vector<char> settled(n, 0);

    auto const path_to = [&](VertexId v) {
        Path p{v};
        while (pred[p.back()]) p.push_back(*pred[p.back()]);
        std::reverse(p.begin(), p.end());
        return p;
    };

    using Item = std::pair<double, VertexId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[root] = 0.0;
    queue.push({0.0, root});
    while (!queue.empty()) {
        auto const [d, v] = queue.top();
        queue.pop();
        if (settled[v] || d > dist[v]) continue;
        settled[v] = 1;
        if (v == goal) break;
        for (auto const& e : g.out_edges(v)) {
            double const nd = d + e.cost;
            bool better = nd < dist[e.target];
            if (!better && nd == dist[e.target] && !settled[e.target]) {
                auto cand = path_to(v);
                cand.push_back(e.target);
                better = signature_less(g, cand, path_to(e.target));
            }
            if (better) {
                dist[e.target] = nd;
                pred[e.target] = v;
                queue.push({nd, e.target});
            }
        }
    }
    if (dist[goal] == inf) return std::nullopt;
    return path_to(goal);
}

/// Graph dump in DOT syntax. Vertex names are "p:signature"; edges carry their cost as label.
[[nodiscard]] inline std::string to_dot(NavGraph const& g) {
    std::ostringstream os;
    os.precision(6);
    auto const name = [&](VertexId v) { return std::to_string(g.cell(v).step) + ":" + g.cell(v).signature.str(); };
    os << "digraph navgraph {\n";
    for (int p = 0; p <= g.steps(); ++p) {
        os << "  { rank=same;";
        for (VertexId v : g.layer(p)) os << " \"" << name(v) << "\";";
        os << " }\n";
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
        for (auto const& e : g.out_edges(v)) {
            os << "  \"" << name(v) << "\" -> \"" << name(e.target) << "\" [label=\"" << e.cost << "\"];\n";
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace mv

#endif  // MV_NAVGRAPH_HPP
