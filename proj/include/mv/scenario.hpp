#ifndef MV_SCENARIO_HPP
#define MV_SCENARIO_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mv/error.hpp"
#include "mv/geometry.hpp"

namespace mv {

enum class RoadType { carriageway, pedestrian_crosswalk };

/// Short token used in signatures and atom names: "cw" / "pc".
[[nodiscard]] inline std::string_view short_name(RoadType t) noexcept {
    return t == RoadType::carriageway ? "cw" : "pc";
}

[[nodiscard]] inline std::string_view to_string(RoadType t) noexcept {
    return t == RoadType::carriageway ? "carriageway" : "pedestrian_crosswalk";
}

struct RoadTypeInterval {
    double s_lo{0.0};
    double s_hi{0.0};
    RoadType type{RoadType::carriageway};

    friend bool operator==(RoadTypeInterval const&, RoadTypeInterval const&) = default;
};

/// Straight road of constant width in Frenet coordinates, tiled along s by road types.
struct RoadModel {
    double s_begin{0.0};
    double s_end{0.0};
    double d_min{0.0};
    double d_max{0.0};
    std::vector<RoadTypeInterval> road_types;

    [[nodiscard]] FrenetRect extent() const noexcept { return {s_begin, s_end, d_min, d_max}; }
    [[nodiscard]] double area() const noexcept { return extent().area(); }
};

enum class ObstacleKind { vehicle, pedestrian, cyclist, railborne };

[[nodiscard]] inline std::string_view to_string(ObstacleKind k) noexcept {
    switch (k) {
        case ObstacleKind::vehicle: return "vehicle";
        case ObstacleKind::pedestrian: return "pedestrian";
        case ObstacleKind::cyclist: return "cyclist";
        case ObstacleKind::railborne: return "railborne";
    }
    return "vehicle";
}

/// Box-shaped traffic participant with a constant-acceleration prediction.
struct Obstacle {
    std::string id;
    ObstacleKind kind{ObstacleKind::vehicle};
    double half_length{0.0};
    double half_width{0.0};
    double s0{0.0};
    double d0{0.0};
    double s_vel{0.0};
    double d_vel{0.0};
    double s_acc{0.0};
    double d_acc{0.0};

    [[nodiscard]] double s_at(double t) const noexcept { return s0 + s_vel * t + 0.5 * s_acc * t * t; }
    [[nodiscard]] double d_at(double t) const noexcept { return d0 + d_vel * t + 0.5 * d_acc * t * t; }

    /// Footprint at time instant t.
    [[nodiscard]] FrenetRect footprint_at(double t) const noexcept {
        double const s = s_at(t);
        double const d = d_at(t);
        return {s - half_length, s + half_length, d - half_width, d + half_width};
    }
};

struct Scenario {
    RoadModel road;
    std::vector<Obstacle> obstacles;
    double ego_s0{0.0};
    double ego_d0{0.0};
    double horizon{0.0};
    double step{0.0};
    bool congested{false};

    /// Number of planning intervals n; time points are theta_0..theta_n.
    [[nodiscard]] int steps() const noexcept { return static_cast<int>(std::lround(horizon / step)); }
    [[nodiscard]] double time_at(int p) const noexcept { return p * step; }
};

namespace detail {

// Range of x(t) = x0 + v t + a t^2 / 2 over [t0, t1], including the parabola vertex.
inline std::pair<double, double> kinematic_range(double x0, double v, double a, double t0, double t1) {
    auto const at = [&](double t) { return x0 + v * t + 0.5 * a * t * t; };
    double lo = std::min(at(t0), at(t1));
    double hi = std::max(at(t0), at(t1));
    if (a != 0.0) {
        double const tv = -v / a;
        if (t0 < tv && tv < t1) {
            lo = std::min(lo, at(tv));
            hi = std::max(hi, at(tv));
        }
    }
    return {lo, hi};
}

}  // namespace detail

/// Bounding box of the footprint swept over [p*step, (p+1)*step].
[[nodiscard]] inline FrenetRect predict_occupancy(Obstacle const& o, int p, double step) {
    double const t0 = p * step;
    double const t1 = (p + 1) * step;
    auto const [s_lo, s_hi] = detail::kinematic_range(o.s0, o.s_vel, o.s_acc, t0, t1);
    auto const [d_lo, d_hi] = detail::kinematic_range(o.d0, o.d_vel, o.d_acc, t0, t1);
    return {s_lo - o.half_length, s_hi + o.half_length, d_lo - o.half_width, d_hi + o.half_width};
}

/// Occupancy used to partition step p: the swept box for p < n, the instantaneous
/// footprint at the final time point (no interval follows it).
[[nodiscard]] inline FrenetRect occupancy_at_step(Scenario const& sc, Obstacle const& o, int p) {
    if (p >= sc.steps()) return o.footprint_at(sc.time_at(p));
    return predict_occupancy(o, p, sc.step);
}

/// Throws ValidationError naming the first violated invariant.
inline void validate(Scenario const& sc) {
    auto const& road = sc.road;
    if (!(road.s_begin < road.s_end)) throw ValidationError("road: s_begin must be less than s_end");
    if (!(road.d_min < road.d_max)) throw ValidationError("road: d_min must be less than d_max");
    if (road.road_types.empty()) throw ValidationError("road_type_intervals empty");
    for (auto const& iv : road.road_types) {
        if (!(iv.s_lo < iv.s_hi)) throw ValidationError("road_type_intervals: interval with s_lo >= s_hi");
    }
    for (std::size_t i = 1; i < road.road_types.size(); ++i) {
        auto const& prev = road.road_types[i - 1];
        auto const& cur = road.road_types[i];
        if (cur.s_lo < prev.s_hi) throw ValidationError("road_type_intervals overlap");
        if (cur.s_lo > prev.s_hi) throw ValidationError("road_type_intervals leave a gap");
    }
    if (road.road_types.front().s_lo != road.s_begin || road.road_types.back().s_hi != road.s_end) {
        throw ValidationError("road_type_intervals do not tile [s_begin, s_end]");
    }

    if (!(sc.step > 0.0) || !std::isfinite(sc.step)) throw ValidationError("step must be positive");
    if (!(sc.horizon > 0.0) || !std::isfinite(sc.horizon)) throw ValidationError("horizon must be positive");
    double const ratio = sc.horizon / sc.step;
    if (std::lround(ratio) < 1 || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        throw ValidationError("horizon / step must be a positive integer");
    }

    int const n = sc.steps();
    for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
        auto const& o = sc.obstacles[i];
        std::string const where = "obstacles[" + std::to_string(i) + "] '" + o.id + "': ";
        if (o.id.empty()) throw ValidationError(where + "id must not be empty");
        // Ids become part of atom names such as "b_<id>".
        if (!std::all_of(o.id.begin(), o.id.end(),
                         [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; })) {
            throw ValidationError(where + "id may only contain letters, digits and '_'");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (sc.obstacles[j].id == o.id) throw ValidationError(where + "duplicate id");
        }
        if (!(o.half_length > 0.0)) throw ValidationError(where + "half_length must be positive");
        if (!(o.half_width > 0.0)) throw ValidationError(where + "half_width must be positive");
        for (int p = 0; p < n; ++p) {
            auto const box = predict_occupancy(o, p, sc.step);
            if (box.d_lo < road.d_min - 1e-9 || box.d_hi > road.d_max + 1e-9) {
                throw ValidationError(where + "footprint leaves d_extent during step " + std::to_string(p));
            }
        }
    }

    if (!road.extent().contains(sc.ego_s0, sc.ego_d0)) throw ValidationError("ego seed outside the road");
    for (auto const& o : sc.obstacles) {
        if (occupancy_at_step(sc, o, 0).contains(sc.ego_s0, sc.ego_d0)) {
            throw ValidationError("ego seed inside the occupancy of obstacle '" + o.id + "'");
        }
    }
}

namespace detail {

using nlohmann::json;

class Reader {
public:
    static json const& field(json const& obj, std::string const& key, std::string const& path) {
        if (!obj.is_object()) throw ParseError(path + ": expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) throw ParseError(path + "." + key + ": missing field");
        return *it;
    }
    static double number(json const& obj, std::string const& key, std::string const& path) {
        auto const& v = field(obj, key, path);
        if (!v.is_number()) throw ParseError(path + "." + key + ": expected a number");
        return v.get<double>();
    }
    static double number_or(json const& obj, std::string const& key, std::string const& path, double dflt) {
        if (!obj.contains(key)) return dflt;
        return number(obj, key, path);
    }
    static std::string string(json const& obj, std::string const& key, std::string const& path) {
        auto const& v = field(obj, key, path);
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number_integer()) return std::to_string(v.get<long long>());
        throw ParseError(path + "." + key + ": expected a string");
    }
};

inline RoadType parse_road_type(std::string const& s, std::string const& path) {
    if (s == "carriageway" || s == "cw") return RoadType::carriageway;
    if (s == "pedestrian_crosswalk" || s == "pc") return RoadType::pedestrian_crosswalk;
    throw ParseError(path + ": unknown road type '" + s + "'");
}

inline ObstacleKind parse_kind(std::string const& s, std::string const& path) {
    if (s == "vehicle") return ObstacleKind::vehicle;
    if (s == "pedestrian") return ObstacleKind::pedestrian;
    if (s == "cyclist") return ObstacleKind::cyclist;
    if (s == "railborne") return ObstacleKind::railborne;
    throw ParseError(path + ": unknown obstacle kind '" + s + "'");
}

// Listed intervals are sorted; uncovered stretches of [s_begin, s_end] become carriageway.
inline std::vector<RoadTypeInterval> complete_tiling(std::vector<RoadTypeInterval> listed, double s_begin,
                                                     double s_end) {
    std::stable_sort(listed.begin(), listed.end(),
                     [](auto const& a, auto const& b) { return a.s_lo < b.s_lo; });
    for (auto const& iv : listed) {
        if (!(iv.s_lo < iv.s_hi)) throw ValidationError("road_type_intervals: interval with s_lo >= s_hi");
        if (iv.s_lo < s_begin || iv.s_hi > s_end) {
            throw ValidationError("road_type_intervals exceed [s_begin, s_end]");
        }
    }
    for (std::size_t i = 1; i < listed.size(); ++i) {
        if (listed[i].s_lo < listed[i - 1].s_hi) throw ValidationError("road_type_intervals overlap");
    }
    std::vector<RoadTypeInterval> out;
    double cursor = s_begin;
    for (auto const& iv : listed) {
        if (cursor < iv.s_lo) out.push_back({cursor, iv.s_lo, RoadType::carriageway});
        out.push_back(iv);
        cursor = iv.s_hi;
    }
    if (cursor < s_end) out.push_back({cursor, s_end, RoadType::carriageway});
    return out;
}

}  // namespace detail

/// Parses a scenario document (JSON) and validates it.
[[nodiscard]] inline Scenario load_scenario(std::string_view text) {
    using detail::Reader;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (nlohmann::json::parse_error const& e) {
        std::size_t const pos = std::min<std::size_t>(e.byte, text.size());
        std::size_t const line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
        throw ParseError("line " + std::to_string(line) + ": " + e.what());
    }

    Scenario sc;
    try {
        auto const& road = Reader::field(doc, "road", "$");
        sc.road.s_begin = Reader::number(road, "s_begin", "$.road");
        sc.road.s_end = Reader::number(road, "s_end", "$.road");
        sc.road.d_min = Reader::number(road, "d_min", "$.road");
        sc.road.d_max = Reader::number(road, "d_max", "$.road");

        std::vector<RoadTypeInterval> listed;
        if (road.contains("road_types")) {
            auto const& types = road.at("road_types");
            if (!types.is_array()) throw ParseError("$.road.road_types: expected a list");
            for (std::size_t i = 0; i < types.size(); ++i) {
                std::string const path = "$.road.road_types[" + std::to_string(i) + "]";
                listed.push_back({Reader::number(types[i], "s_lo", path), Reader::number(types[i], "s_hi", path),
                                  detail::parse_road_type(Reader::string(types[i], "type", path), path + ".type")});
            }
        }
        sc.road.road_types = detail::complete_tiling(std::move(listed), sc.road.s_begin, sc.road.s_end);

        if (doc.contains("obstacles")) {
            auto const& obs = doc.at("obstacles");
            if (!obs.is_array()) throw ParseError("$.obstacles: expected a list");
            for (std::size_t i = 0; i < obs.size(); ++i) {
                std::string const path = "$.obstacles[" + std::to_string(i) + "]";
                auto const& j = obs[i];
                Obstacle o;
                o.id = Reader::string(j, "id", path);
                o.kind = detail::parse_kind(Reader::string(j, "kind", path), path + ".kind");
                o.half_length = Reader::number(j, "half_length", path);
                o.half_width = Reader::number(j, "half_width", path);
                o.s0 = Reader::number(j, "s0", path);
                o.d0 = Reader::number(j, "d0", path);
                o.s_vel = Reader::number_or(j, "s_vel", path, 0.0);
                o.d_vel = Reader::number_or(j, "d_vel", path, 0.0);
                o.s_acc = Reader::number_or(j, "s_acc", path, 0.0);
                o.d_acc = Reader::number_or(j, "d_acc", path, 0.0);
                sc.obstacles.push_back(std::move(o));
            }
        }

        auto const& ego = Reader::field(doc, "ego", "$");
        sc.ego_s0 = Reader::number(ego, "s0", "$.ego");
        sc.ego_d0 = Reader::number(ego, "d0", "$.ego");
        sc.horizon = Reader::number(doc, "horizon", "$");
        sc.step = Reader::number(doc, "step", "$");
        if (doc.contains("congested")) {
            if (!doc.at("congested").is_boolean()) throw ParseError("$.congested: expected a boolean");
            sc.congested = doc.at("congested").get<bool>();
        }
    } catch (nlohmann::json::exception const& e) {
        throw ParseError(e.what());
    }

    validate(sc);
    return sc;
}

[[nodiscard]] inline Scenario load_scenario_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

/// Serializes back to the scenario document schema.
[[nodiscard]] inline nlohmann::json to_json(Scenario const& sc) {
    nlohmann::json road = {{"s_begin", sc.road.s_begin},
                           {"s_end", sc.road.s_end},
                           {"d_min", sc.road.d_min},
                           {"d_max", sc.road.d_max},
                           {"road_types", nlohmann::json::array()}};
    for (auto const& iv : sc.road.road_types) {
        road["road_types"].push_back({{"s_lo", iv.s_lo}, {"s_hi", iv.s_hi}, {"type", std::string(to_string(iv.type))}});
    }
    nlohmann::json obs = nlohmann::json::array();
    for (auto const& o : sc.obstacles) {
        obs.push_back({{"id", o.id},
                       {"kind", std::string(to_string(o.kind))},
                       {"half_length", o.half_length},
                       {"half_width", o.half_width},
                       {"s0", o.s0},
                       {"d0", o.d0},
                       {"s_vel", o.s_vel},
                       {"d_vel", o.d_vel},
                       {"s_acc", o.s_acc},
                       {"d_acc", o.d_acc}});
    }
    return {{"road", road},
            {"obstacles", obs},
            {"ego", {{"s0", sc.ego_s0}, {"d0", sc.ego_d0}}},
            {"horizon", sc.horizon},
            {"step", sc.step},
            {"congested", sc.congested}};
}

}  // namespace mv

#endif  // MV_SCENARIO_HPP
