#ifndef MV_PARTITION_HPP
#define MV_PARTITION_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mv/error.hpp"
#include "mv/geometry.hpp"
#include "mv/scenario.hpp"

namespace mv {

/// Position of the free space relative to one obstacle.
enum class Relation : char { front = 'f', behind = 'b', left = 'l', right = 'r' };

inline constexpr std::array<Relation, 4> kRelations{Relation::front, Relation::behind, Relation::left,
                                                    Relation::right};

[[nodiscard]] inline char letter(Relation r) noexcept { return static_cast<char>(r); }

/// Road type plus one relation letter per obstacle, in scenario obstacle order.
/// Printed as "cw:br"; ordering is the lexicographic order of that string.
struct Signature {
    RoadType road_type{RoadType::carriageway};
    std::string relations;

    [[nodiscard]] std::string str() const { return std::string(short_name(road_type)) + ":" + relations; }
    [[nodiscard]] Relation relation(std::size_t obstacle) const { return static_cast<Relation>(relations.at(obstacle)); }

    friend bool operator==(Signature const&, Signature const&) = default;
    friend std::strong_ordering operator<=>(Signature const& a, Signature const& b) {
        return a.str() <=> b.str();
    }
};

[[nodiscard]] inline Signature parse_signature(std::string const& text) {
    auto const colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("signature '" + text + "': expected '<road>:<letters>'");
    Signature sig;
    sig.road_type = detail::parse_road_type(text.substr(0, colon), "signature '" + text + "'");
    sig.relations = text.substr(colon + 1);
    for (char c : sig.relations) {
        if (c != 'f' && c != 'b' && c != 'l' && c != 'r') {
            throw ParseError("signature '" + text + "': unknown relation letter");
        }
    }
    return sig;
}

/// Free space-time cell: the region of one signature at one time step.
struct Cell {
    Signature signature;
    int step{0};
    Region region;
};

/// One region per road-type interval, each spanning the full road width.
[[nodiscard]] inline std::vector<std::pair<RoadType, Region>> partition_road_types(RoadModel const& road) {
    std::vector<std::pair<RoadType, Region>> out;
    out.reserve(road.road_types.size());
    for (auto const& iv : road.road_types) {
        out.emplace_back(iv.type, Region{FrenetRect{iv.s_lo, iv.s_hi, road.d_min, road.d_max}});
    }
    return out;
}

/// The four collision-free regions around one obstacle box, clipped to the road.
struct ObstacleSplit {
    Region front;
    Region behind;
    Region left;
    Region right;

    [[nodiscard]] Region const& operator[](Relation r) const noexcept {
        switch (r) {
            case Relation::front: return front;
            case Relation::behind: return behind;
            case Relation::left: return left;
            case Relation::right: return right;
        }
        return front;
    }
};

/// Front and behind take the full road width; left and right are limited to the box's s-span.
[[nodiscard]] inline ObstacleSplit partition_obstacle(FrenetRect const& box, RoadModel const& road) {
    auto const q = road.extent();
    auto const clip = [&](FrenetRect const& r) { return Region{r.intersection(q)}; };
    return {
        clip({box.s_hi, q.s_hi, q.d_lo, q.d_hi}),
        clip({q.s_lo, box.s_lo, q.d_lo, q.d_hi}),
        clip({box.s_lo, box.s_hi, box.d_hi, q.d_hi}),
        clip({box.s_lo, box.s_hi, q.d_lo, box.d_lo}),
    };
}

/// Cells of step p. Refines the road-type regions by every obstacle's four-way split
/// and drops empty results. Regions that end up with the same signature (for instance
/// carriageway stretches on both sides of a crosswalk) are merged into one cell, so
/// signatures are unique per step. Output is sorted by signature.
[[nodiscard]] inline std::vector<Cell> build_cells(Scenario const& sc, int p) {
    if (p < 0 || p > sc.steps()) throw Error("build_cells: step index " + std::to_string(p) + " out of range");

    struct Working {
        Signature sig;
        Region region;
    };
    std::vector<Working> work;
    for (auto& [type, region] : partition_road_types(sc.road)) work.push_back({{type, {}}, std::move(region)});

    for (auto const& o : sc.obstacles) {
        auto const split = partition_obstacle(occupancy_at_step(sc, o, p), sc.road);
        std::vector<Working> next;
        next.reserve(work.size() * 2);
        for (auto const& w : work) {
            for (auto rel : kRelations) {
                auto piece = intersect(w.region, split[rel]);
                if (piece.empty()) continue;
                Signature sig = w.sig;
                sig.relations.push_back(letter(rel));
                next.push_back({std::move(sig), std::move(piece)});
            }
        }
        work = std::move(next);
    }

    std::map<std::string, Cell> by_sig;
    for (auto& w : work) {
        auto key = w.sig.str();
        auto it = by_sig.find(key);
        if (it == by_sig.end()) {
            by_sig.emplace(std::move(key), Cell{std::move(w.sig), p, std::move(w.region)});
        } else {
            it->second.region = unite(it->second.region, w.region);
        }
    }

    std::vector<Cell> cells;
    cells.reserve(by_sig.size());
    for (auto& [_, c] : by_sig) cells.push_back(std::move(c));

    if (p == 0) {
        bool const seeded = std::any_of(cells.begin(), cells.end(),
                                        [&](Cell const& c) { return c.region.contains(sc.ego_s0, sc.ego_d0); });
        if (!seeded) throw ValidationError("ego seed is not inside any free-space cell at step 0");
    }
    return cells;
}

/// Cells for steps 0..n.
[[nodiscard]] inline std::vector<std::vector<Cell>> build_all_cells(Scenario const& sc) {
    std::vector<std::vector<Cell>> out;
    out.reserve(static_cast<std::size_t>(sc.steps()) + 1);
    for (int p = 0; p <= sc.steps(); ++p) out.push_back(build_cells(sc, p));
    return out;
}

[[nodiscard]] inline nlohmann::json to_json(FrenetRect const& r) {
    return {{"s_lo", r.s_lo}, {"s_hi", r.s_hi}, {"d_lo", r.d_lo}, {"d_hi", r.d_hi}};
}

[[nodiscard]] inline nlohmann::json to_json(Region const& region) {
    auto arr = nlohmann::json::array();
    for (auto const& r : region.rects()) arr.push_back(to_json(r));
    return arr;
}

/// Debug dump of the per-step cell listing.
[[nodiscard]] inline nlohmann::json partition_dump(Scenario const& sc, std::vector<std::vector<Cell>> const& steps) {
    nlohmann::json out = {{"steps", nlohmann::json::array()}};
    for (std::size_t p = 0; p < steps.size(); ++p) {
        nlohmann::json step = {{"step", p}, {"time", sc.time_at(static_cast<int>(p))}};
        auto obstacles = nlohmann::json::array();
        for (auto const& o : sc.obstacles) {
            obstacles.push_back({{"id", o.id}, {"box", to_json(occupancy_at_step(sc, o, static_cast<int>(p)))}});
        }
        step["obstacles"] = std::move(obstacles);
        auto cells = nlohmann::json::array();
        for (auto const& c : steps[p]) {
            cells.push_back({{"signature", c.signature.str()}, {"rects", to_json(c.region)}});
        }
        step["cells"] = std::move(cells);
        out["steps"].push_back(std::move(step));
    }
    return out;
}

}  // namespace mv

#endif  // MV_PARTITION_HPP
