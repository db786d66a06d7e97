// Independent reference implementations and generators shared by the unit tests and
// the acceptance suite. Nothing here calls into the code it is used to check, apart
// from the data types.
#ifndef MV_TESTS_ORACLES_HPP
#define MV_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "mv/mv.hpp"

namespace oracle {

inline std::string data_path(std::string const& name) { return std::string(MV_DATA_DIR) + "/" + name; }

inline mv::Scenario load(std::string const& name) { return mv::load_scenario_file(data_path(name)); }

inline std::vector<mv::Signature> sigs(std::vector<std::string> const& texts) {
    std::vector<mv::Signature> out;
    for (auto const& t : texts) out.push_back(mv::parse_signature(t));
    return out;
}

// ---------------------------------------------------------------------------
// Point labelling

inline bool open_inside(mv::FrenetRect const& r, double s, double d) {
    return r.s_lo < s && s < r.s_hi && r.d_lo < d && d < r.d_hi;
}

inline std::vector<mv::FrenetRect> boxes_at(mv::Scenario const& sc, int p) {
    std::vector<mv::FrenetRect> boxes;
    for (auto const& o : sc.obstacles) boxes.push_back(mv::occupancy_at_step(sc, o, p));
    return boxes;
}

/// Signature of a free point, worked out letter by letter from the obstacle boxes of its
/// step; nullopt when the point lies inside an obstacle.
inline std::optional<std::string> label_point(mv::RoadModel const& road, std::vector<mv::FrenetRect> const& boxes,
                                              double s, double d) {
    std::string type = "cw";
    for (auto const& iv : road.road_types) {
        if (iv.s_lo <= s && s < iv.s_hi) type = iv.type == mv::RoadType::pedestrian_crosswalk ? "pc" : "cw";
    }
    std::string rel;
    for (auto const& box : boxes) {
        if (open_inside(box, s, d)) return std::nullopt;
        if (s >= box.s_hi) rel += 'f';
        else if (s <= box.s_lo) rel += 'b';
        else if (d >= box.d_hi) rel += 'l';
        else rel += 'r';
    }
    return type + ":" + rel;
}

/// True when (s, d) is within tol of a line where labels may legitimately change.
inline bool near_boundary(mv::RoadModel const& road, std::vector<mv::FrenetRect> const& boxes, double s, double d,
                          double tol = 1e-6) {
    auto close = [&](double a, double b) { return std::abs(a - b) < tol; };
    for (auto const& iv : road.road_types) {
        if (close(s, iv.s_lo) || close(s, iv.s_hi)) return true;
    }
    for (auto const& box : boxes) {
        if (close(s, box.s_lo) || close(s, box.s_hi) || close(d, box.d_lo) || close(d, box.d_hi)) return true;
    }
    return false;
}

/// Area of the union of the boxes clipped to `clip`, by inclusion-exclusion.
inline double union_area(std::vector<mv::FrenetRect> const& boxes, mv::FrenetRect const& clip) {
    std::size_t const n = boxes.size();
    double total = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        mv::FrenetRect r = clip;
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                r = {std::max(r.s_lo, boxes[i].s_lo), std::min(r.s_hi, boxes[i].s_hi), std::max(r.d_lo, boxes[i].d_lo),
                     std::min(r.d_hi, boxes[i].d_hi)};
                ++bits;
            }
        }
        double const a = std::max(0.0, r.s_hi - r.s_lo) * std::max(0.0, r.d_hi - r.d_lo);
        total += (bits % 2 ? a : -a);
    }
    return total;
}

/// Checks the cells of every step against the scenario: disjoint from the obstacle boxes,
/// areas closing to the road area, a single road type per cell, and per-point agreement
/// with label_point on a grid of spacing `res` offset by 0.03 m. Returns an empty string
/// when everything agrees, otherwise a description of the first disagreement.
inline std::string partition_mismatch(mv::Scenario const& sc, double res = 0.1) {
    auto const& road = sc.road;
    for (int p = 0; p <= sc.steps(); ++p) {
        auto const cells = mv::build_cells(sc, p);
        auto const boxes = boxes_at(sc, p);
        std::string const at = "step " + std::to_string(p) + ": ";

        double cell_area = 0.0;
        for (auto const& c : cells) {
            if (c.region.empty()) return at + "empty cell " + c.signature.str();
            cell_area += c.region.area();
            for (auto const& b : boxes) {
                for (auto const& r : c.region.rects()) {
                    if (std::min(r.s_hi, b.s_hi) > std::max(r.s_lo, b.s_lo) &&
                        std::min(r.d_hi, b.d_hi) > std::max(r.d_lo, b.d_lo)) {
                        return at + "cell " + c.signature.str() + " overlaps an obstacle";
                    }
                }
            }
            for (auto const& r : c.region.rects()) {
                bool typed = false;
                for (auto const& iv : road.road_types) {
                    std::string const t = iv.type == mv::RoadType::pedestrian_crosswalk ? "pc" : "cw";
                    if (iv.s_lo <= r.s_lo && r.s_hi <= iv.s_hi && c.signature.str().rfind(t + ":", 0) == 0) typed = true;
                }
                if (!typed) return at + "cell " + c.signature.str() + " straddles a road-type boundary";
            }
        }
        double const occupied = union_area(boxes, road.extent());
        if (std::abs(cell_area + occupied - road.area()) > 1e-6) {
            return at + "areas do not close: cells " + std::to_string(cell_area) + " + obstacles " +
                   std::to_string(occupied) + " vs road " + std::to_string(road.area());
        }

        double const s0 = road.s_begin + 0.03;
        double const d0 = road.d_min + 0.03;
        auto const ns = static_cast<std::size_t>((road.s_end - s0) / res) + 1;
        auto const nd = static_cast<std::size_t>((road.d_max - d0) / res) + 1;
        auto const s_of = [&](std::size_t i) { return s0 + static_cast<double>(i) * res; };
        auto const d_of = [&](std::size_t j) { return d0 + static_cast<double>(j) * res; };
        std::vector<int> owner(ns * nd, -1);
        std::vector<int> hits(ns * nd, 0);
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            for (auto const& r : cells[ci].region.rects()) {
                auto const lo = static_cast<long>(std::floor((r.s_lo - s0) / res)) - 1;
                auto const hi = static_cast<long>(std::ceil((r.s_hi - s0) / res)) + 1;
                for (long i = std::max(0L, lo); i <= std::min<long>(hi, static_cast<long>(ns) - 1); ++i) {
                    for (std::size_t j = 0; j < nd; ++j) {
                        auto const k = static_cast<std::size_t>(i) * nd + j;
                        if (r.contains(s_of(static_cast<std::size_t>(i)), d_of(j))) {
                            owner[k] = static_cast<int>(ci);
                            ++hits[k];
                        }
                    }
                }
            }
        }
        for (std::size_t i = 0; i < ns; ++i) {
            double const s = s_of(i);
            if (s > road.s_end) continue;
            for (std::size_t j = 0; j < nd; ++j) {
                double const d = d_of(j);
                if (d > road.d_max || near_boundary(road, boxes, s, d)) continue;
                auto const k = i * nd + j;
                auto const expected = label_point(road, boxes, s, d);
                auto const where = [&] { return at + "(" + std::to_string(s) + ", " + std::to_string(d) + ") "; };
                if (!expected) {
                    if (hits[k] != 0) return where() + "inside an obstacle but covered by a cell";
                    continue;
                }
                if (hits[k] != 1) return where() + "covered by " + std::to_string(hits[k]) + " cells";
                auto const got = cells[static_cast<std::size_t>(owner[k])].signature.str();
                if (got != *expected) return where() + "labelled " + got + ", expected " + *expected;
            }
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// LTL by unrolling

/// Evaluates f at instant i of the stutter-extended trace by unrolling it to `horizon`
/// concrete states and scanning; memoised on (node, instant).
class Unroller {
public:
    Unroller(mv::ltl::SemanticTrace const& t, std::size_t horizon = 64) : t_(t), h_(horizon) {}

    bool eval(mv::ltl::Formula const& f, std::size_t i) {
        auto const key = std::make_pair(f.id(), i);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        bool const v = compute(f, i);
        memo_.emplace(key, v);
        return v;
    }

private:
    bool compute(mv::ltl::Formula const& f, std::size_t i) {
        using mv::ltl::Op;
        switch (f.op()) {
            case Op::constant: return f.value();
            case Op::atom: return t_.value(std::min(i, t_.size() - 1), f.name());
            case Op::negation: return !eval(f.operand(), i);
            case Op::conjunction: return eval(f.lhs(), i) && eval(f.rhs(), i);
            case Op::disjunction: return eval(f.lhs(), i) || eval(f.rhs(), i);
            case Op::implication: return !eval(f.lhs(), i) || eval(f.rhs(), i);
            case Op::next: return eval(f.operand(), std::min(i + 1, h_ - 1));
            case Op::globally:
                for (std::size_t k = i; k < h_; ++k) {
                    if (!eval(f.operand(), k)) return false;
                }
                return true;
            case Op::finally:
                for (std::size_t k = i; k < h_; ++k) {
                    if (eval(f.operand(), k)) return true;
                }
                return false;
            case Op::until:
                for (std::size_t j = i; j < h_; ++j) {
                    if (eval(f.rhs(), j)) return true;
                    if (!eval(f.lhs(), j)) return false;
                }
                return false;
        }
        return false;
    }

    mv::ltl::SemanticTrace const& t_;
    std::size_t h_;
    std::map<std::pair<void const*, std::size_t>, bool> memo_;
};

inline bool unrolled(mv::ltl::Formula const& f, mv::ltl::SemanticTrace const& t, std::size_t i = 0) {
    return Unroller(t).eval(f, i);
}

/// Truth-table trace from rows like {"TF", "FT"} over the given atoms.
inline mv::ltl::SemanticTrace table_trace(std::vector<std::string> const& atoms, std::vector<std::string> const& rows) {
    mv::ltl::SemanticTrace t(atoms);
    for (auto const& r : rows) {
        mv::ltl::SemanticTrace::Valuation v;
        for (char c : r) v.push_back(c == 'T');
        t.push_back(v);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Generators

inline mv::ltl::Formula random_formula(std::mt19937& rng, int depth) {
    using namespace mv::ltl;
    static char const* const names[] = {"a", "b", "c"};
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 3 : 12);
    int const k = pick(rng);
    switch (k) {
        case 0: return Formula::constant(rng() % 2 == 0);
        case 1:
        case 2:
        case 3: return atom(names[rng() % 3]);
        case 4: return !random_formula(rng, depth - 1);
        case 5: return next(random_formula(rng, depth - 1));
        case 6: return globally(random_formula(rng, depth - 1));
        case 7: return finally(random_formula(rng, depth - 1));
        case 8: return random_formula(rng, depth - 1) && random_formula(rng, depth - 1);
        case 9: return random_formula(rng, depth - 1) || random_formula(rng, depth - 1);
        case 10: return implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
        default: return until(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    }
}

inline mv::ltl::SemanticTrace random_trace(std::mt19937& rng, std::size_t max_len = 8) {
    mv::ltl::SemanticTrace t({"a", "b", "c"});
    std::size_t const n = 1 + rng() % max_len;
    for (std::size_t i = 0; i < n; ++i) t.push_back({rng() % 2 == 0, rng() % 2 == 0, rng() % 2 == 0});
    return t;
}

/// Random valid scenario: up to 3 obstacles, at most two road types, up to 5 steps.
/// Coordinates are multiples of 0.5 (ego seed offset by 0.25) so that the grid used by
/// the labelling checks rarely lands on a cell boundary.
inline mv::Scenario random_scenario(std::mt19937& rng) {
    auto half = [&](int lo, int hi) { return 0.5 * std::uniform_int_distribution<int>(lo, hi)(rng); };
    static mv::ObstacleKind const kinds[] = {mv::ObstacleKind::vehicle, mv::ObstacleKind::pedestrian,
                                             mv::ObstacleKind::cyclist, mv::ObstacleKind::railborne};
    for (;;) {
        mv::Scenario sc;
        double const len = 40.0 + 10.0 * static_cast<double>(rng() % 4);
        double const width = rng() % 2 ? 7.0 : 10.5;
        sc.road = {0.0, len, 0.0, width, {}};
        if (rng() % 2) {
            double const a = half(10, static_cast<int>(2 * len) - 20);
            double const b = a + half(4, 10);
            sc.road.road_types = {{0.0, a, mv::RoadType::carriageway},
                                  {a, b, mv::RoadType::pedestrian_crosswalk},
                                  {b, len, mv::RoadType::carriageway}};
        } else {
            sc.road.road_types = {{0.0, len, mv::RoadType::carriageway}};
        }
        sc.step = rng() % 2 ? 0.5 : 1.0;
        sc.horizon = sc.step * static_cast<double>(1 + rng() % 5);
        std::size_t const count = rng() % 4;
        for (std::size_t i = 0; i < count; ++i) {
            mv::Obstacle o;
            o.id = "o" + std::to_string(i);
            o.kind = kinds[rng() % 4];
            o.half_length = half(1, 6);
            o.half_width = half(1, 2);
            o.s0 = half(4, static_cast<int>(2 * len) - 4);
            o.d0 = half(2, static_cast<int>(2 * width) - 2);
            o.s_vel = half(-6, 24);
            o.s_acc = half(-4, 4);
            if (rng() % 3 == 0) {
                o.d_vel = half(-2, 2);
                o.d_acc = half(-1, 1);
            }
            sc.obstacles.push_back(o);
        }
        sc.ego_s0 = half(0, static_cast<int>(2 * len) - 1) + 0.25;
        sc.ego_d0 = half(0, static_cast<int>(2 * width) - 1) + 0.25;
        try {
            mv::validate(sc);
            (void)mv::build_cells(sc, 0);
            return sc;
        } catch (mv::Error const&) {
            continue;
        }
    }
}

/// Number of root-to-goal paths by forward dynamic programming over the layers.
inline std::size_t count_paths(mv::NavGraph const& g, mv::VertexId root, mv::VertexId goal) {
    std::vector<std::size_t> ways(g.vertex_count(), 0);
    ways[root] = 1;
    for (int p = 0; p < g.steps(); ++p) {
        for (auto v : g.layer(p)) {
            for (auto const& e : g.out_edges(v)) ways[e.target] += ways[v];
        }
    }
    return ways[goal];
}

}  // namespace oracle

#endif  // MV_TESTS_ORACLES_HPP
