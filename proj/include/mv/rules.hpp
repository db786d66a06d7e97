#ifndef MV_RULES_HPP
#define MV_RULES_HPP

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mv/error.hpp"
#include "mv/ltl.hpp"
#include "mv/partition.hpp"
#include "mv/scenario.hpp"

namespace mv {

inline constexpr char const* kAtomCrosswalk = "R_pc";
inline constexpr char const* kAtomCarriageway = "R_cw";
inline constexpr char const* kAtomCongested = "CONGESTED";

/// Name of the position atom of relation r towards obstacle `id`, e.g. "b_v".
[[nodiscard]] inline std::string position_atom(Relation r, std::string const& id) {
    return std::string(1, letter(r)) + "_" + id;
}

/// Atomic propositions of a scenario: f/b/l/r per obstacle (in obstacle order), then
/// R_pc, R_cw and CONGESTED.
class PropositionSet {
public:
    explicit PropositionSet(std::vector<std::string> obstacle_ids) : ids_(std::move(obstacle_ids)) {
        for (auto const& id : ids_) {
            for (auto r : kRelations) atoms_.push_back(position_atom(r, id));
        }
        atoms_.emplace_back(kAtomCrosswalk);
        atoms_.emplace_back(kAtomCarriageway);
        atoms_.emplace_back(kAtomCongested);
    }

    explicit PropositionSet(Scenario const& sc) : PropositionSet(ids_of(sc)) {}

    [[nodiscard]] std::vector<std::string> const& atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::vector<std::string> const& obstacle_ids() const noexcept { return ids_; }

    /// Valuation of one cell: exactly one position atom per obstacle, exactly one road atom.
    [[nodiscard]] ltl::SemanticTrace::Valuation valuation_of(Signature const& sig, bool congested) const {
        if (sig.relations.size() != ids_.size()) {
            throw Error("signature '" + sig.str() + "' does not match the obstacle count " +
                        std::to_string(ids_.size()));
        }
        ltl::SemanticTrace::Valuation v(atoms_.size(), false);
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            std::size_t k = 0;
            while (letter(kRelations[k]) != sig.relations[i]) ++k;
            v[i * 4 + k] = true;
        }
        std::size_t const road = ids_.size() * 4;
        v[road] = sig.road_type == RoadType::pedestrian_crosswalk;
        v[road + 1] = sig.road_type == RoadType::carriageway;
        v[road + 2] = congested;
        return v;
    }

    [[nodiscard]] ltl::SemanticTrace trace_of(std::vector<Signature> const& sigs, bool congested) const {
        ltl::SemanticTrace t(atoms_);
        for (auto const& s : sigs) t.push_back(valuation_of(s, congested));
        return t;
    }

private:
    static std::vector<std::string> ids_of(Scenario const& sc) {
        std::vector<std::string> ids;
        for (auto const& o : sc.obstacles) ids.push_back(o.id);
        return ids;
    }

    std::vector<std::string> ids_;
    std::vector<std::string> atoms_;
};

[[nodiscard]] inline ltl::SemanticTrace::Valuation valuation_of(Cell const& cell, bool congested,
                                                                PropositionSet const& props) {
    return props.valuation_of(cell.signature, congested);
}

/// Rule pattern over the placeholder atoms f_o, b_o, l_o, r_o of a single obstacle plus
/// the road and congestion atoms. `applies_to` empty means every obstacle kind.
struct RuleTemplate {
    std::string name;
    std::optional<ObstacleKind> applies_to;
    ltl::Formula pattern;
};

/// A rule instantiated for one obstacle.
struct RuleSpec {
    std::string name;  ///< e.g. "R1(v)"
    std::string rule;  ///< template name, e.g. "R1"
    std::string obstacle_id;
    std::optional<ObstacleKind> applies_to;
    ltl::Formula formula;
};

inline constexpr char const* kPlaceholderId = "o";

[[nodiscard]] inline RuleSpec instantiate(RuleTemplate const& tpl, Obstacle const& o) {
    if (tpl.applies_to && *tpl.applies_to != o.kind) {
        throw Error("rule " + tpl.name + " applies to " + std::string(to_string(*tpl.applies_to)) + ", but '" + o.id +
                    "' is a " + std::string(to_string(o.kind)));
    }
    std::map<std::string, std::string> names;
    for (auto r : kRelations) names[position_atom(r, kPlaceholderId)] = position_atom(r, o.id);
    return {tpl.name + "(" + o.id + ")", tpl.name, o.id, tpl.applies_to, ltl::rename_atoms(tpl.pattern, names)};
}

/// No overtaking on the right unless congested:
/// !CONGESTED -> G !(b & X(b U (r U f))).
[[nodiscard]] inline RuleTemplate rule_r1_template() {
    using namespace ltl;
    auto const b = atom("b_o");
    auto const r = atom("r_o");
    auto const f = atom("f_o");
    return {"R1", ObstacleKind::vehicle,
            implies(!atom(kAtomCongested), globally(!(b && next(until(b, until(r, f))))))};
}

/// No overtaking a vehicle right in front of a crosswalk:
/// G !(b & X(b U (l U (f & R_pc)))).
[[nodiscard]] inline RuleTemplate rule_r2_template() {
    using namespace ltl;
    auto const b = atom("b_o");
    auto const l = atom("l_o");
    auto const f = atom("f_o");
    return {"R2", ObstacleKind::vehicle, globally(!(b && next(until(b, until(l, f && atom(kAtomCrosswalk))))))};
}

/// Never be on a crosswalk in front of a pedestrian: G !(R_pc & f).
[[nodiscard]] inline RuleTemplate rule_r3_template() {
    using namespace ltl;
    return {"R3", ObstacleKind::pedestrian, globally(!(atom(kAtomCrosswalk) && atom("f_o")))};
}

[[nodiscard]] inline RuleSpec rule_r1(Obstacle const& v) { return instantiate(rule_r1_template(), v); }
[[nodiscard]] inline RuleSpec rule_r2(Obstacle const& v) { return instantiate(rule_r2_template(), v); }
[[nodiscard]] inline RuleSpec rule_r3(Obstacle const& p) { return instantiate(rule_r3_template(), p); }

/// Ordered set of rule templates; R1, R2, R3 by default, extensible by registration.
class RuleRegistry {
public:
    [[nodiscard]] static RuleRegistry builtin() {
        RuleRegistry r;
        r.add(rule_r1_template());
        r.add(rule_r2_template());
        r.add(rule_r3_template());
        return r;
    }

    void add(RuleTemplate tpl) {
        for (auto const& t : templates_) {
            if (t.name == tpl.name) throw Error("rule '" + tpl.name + "' registered twice");
        }
        templates_.push_back(std::move(tpl));
    }

    [[nodiscard]] std::vector<RuleTemplate> const& templates() const noexcept { return templates_; }

private:
    std::vector<RuleTemplate> templates_;
};

/// Instantiates every applicable template for every obstacle, ordered by obstacle index
/// and then by registration order.
[[nodiscard]] inline std::vector<RuleSpec> rules_for(Scenario const& sc,
                                                     RuleRegistry const& registry = RuleRegistry::builtin()) {
    std::vector<RuleSpec> out;
    for (auto const& o : sc.obstacles) {
        for (auto const& tpl : registry.templates()) {
            if (!tpl.applies_to || *tpl.applies_to == o.kind) out.push_back(instantiate(tpl, o));
        }
    }
    return out;
}

/// Reads a rules file: a JSON list of {name, applies_to, formula}. Position atoms of the
/// constrained obstacle are written f_o, b_o, l_o, r_o; applies_to may be "any".
[[nodiscard]] inline std::vector<RuleTemplate> load_rule_templates(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (nlohmann::json::parse_error const& e) {
        throw ParseError(std::string("rules file: ") + e.what());
    }
    if (doc.is_object() && doc.contains("rules")) doc = doc.at("rules");
    if (!doc.is_array()) throw ParseError("rules file: expected a list of rules");
    std::vector<RuleTemplate> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        std::string const path = "$[" + std::to_string(i) + "]";
        auto const& j = doc[i];
        auto name = detail::Reader::string(j, "name", path);
        std::optional<ObstacleKind> applies_to;
        auto const kind = detail::Reader::string(j, "applies_to", path);
        if (kind != "any") applies_to = detail::parse_kind(kind, path + ".applies_to");
        auto const text_formula = detail::Reader::string(j, "formula", path);
        try {
            out.push_back({std::move(name), applies_to, ltl::parse(text_formula)});
        } catch (ParseError const& e) {
            throw ParseError(path + ".formula: " + e.what());
        }
    }
    return out;
}

[[nodiscard]] inline std::vector<RuleTemplate> load_rule_templates_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open rules file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_rule_templates(buf.str());
}

}  // namespace mv

#endif  // MV_RULES_HPP
