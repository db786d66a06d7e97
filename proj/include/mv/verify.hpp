#ifndef MV_VERIFY_HPP
#define MV_VERIFY_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "mv/error.hpp"
#include "mv/ltl.hpp"
#include "mv/navgraph.hpp"
#include "mv/partition.hpp"
#include "mv/rules.hpp"
#include "mv/scenario.hpp"

namespace mv {

struct RuleVerdict {
    std::string rule;
    bool satisfied{true};
    /// 0-based instant at which the body of the rule's outermost G first fails.
    std::optional<std::size_t> first_failure;
};

/// Evaluates every rule at instant 0 of the trace built from the given signatures.
[[nodiscard]] inline std::vector<RuleVerdict> verify_signatures(std::vector<Signature> const& sigs,
                                                                std::vector<RuleSpec> const& rules, bool congested,
                                                                PropositionSet const& props) {
    auto const trace = props.trace_of(sigs, congested);
    std::vector<RuleVerdict> out;
    out.reserve(rules.size());
    for (auto const& rule : rules) {
        ltl::Evaluation ev(rule.formula, trace);
        RuleVerdict v{rule.name, ev.at(0), std::nullopt};
        if (!v.satisfied) v.first_failure = ltl::first_globally_failure(rule.formula, trace);
        out.push_back(std::move(v));
    }
    return out;
}

[[nodiscard]] inline std::vector<Signature> signatures_of(NavGraph const& g, Path const& path) {
    std::vector<Signature> sigs;
    sigs.reserve(path.size());
    for (VertexId v : path) sigs.push_back(g.cell(v).signature);
    return sigs;
}

[[nodiscard]] inline std::vector<RuleVerdict> verify_trace(NavGraph const& g, Path const& path,
                                                           std::vector<RuleSpec> const& rules, bool congested,
                                                           PropositionSet const& props) {
    return verify_signatures(signatures_of(g, path), rules, congested, props);
}

// ---------------------------------------------------------------------------
// Maneuver envelopes

struct EnvelopeSample {
    double s{0.0};
    double d_right{0.0};
    double d_left{0.0};
};

/// Drivable bounds of one step: s-extent plus lateral bounds sampled along s.
struct ManeuverEnvelope {
    int step{0};
    double s_min{0.0};
    double s_max{0.0};
    std::vector<EnvelopeSample> samples;
};

inline constexpr double kDefaultEnvelopeDs = 0.5;

/// Samples each cell's lateral extent at s_min + k*ds, closing with s_max. Arc lengths
/// where the cell has no cross-section (a merged cell split by a crosswalk) are skipped.
[[nodiscard]] inline ManeuverEnvelope envelope_of(Cell const& cell, double ds) {
    if (!(ds > 0.0)) throw Error("envelope sampling distance must be positive");
    auto const b = cell.region.bounds();
    if (!b) throw Error("envelope of an empty cell");
    ManeuverEnvelope env{cell.step, b->s_lo, b->s_hi, {}};
    double const tol = 1e-9 * std::max(1.0, std::abs(b->s_hi));
    auto const sample = [&](double s) {
        if (auto ext = cell.region.lateral_extent(s)) env.samples.push_back({s, ext->first, ext->second});
    };
    for (std::size_t k = 0;; ++k) {
        double const s = b->s_lo + static_cast<double>(k) * ds;
        if (s >= b->s_hi - tol) break;
        sample(s);
    }
    sample(b->s_hi);
    return env;
}

[[nodiscard]] inline std::vector<ManeuverEnvelope> envelope_of(NavGraph const& g, Path const& path, double ds) {
    std::vector<ManeuverEnvelope> out;
    out.reserve(path.size());
    for (VertexId v : path) out.push_back(envelope_of(g.cell(v), ds));
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline

enum class EnvelopeMode { none, satisfying, all };

struct PipelineOptions {
    std::size_t trace_limit{kDefaultTraceLimit};
    /// Verify only the first k traces in cost order.
    std::optional<std::size_t> max_checked;
    double ds{kDefaultEnvelopeDs};
    /// Verification workers; 0 picks the hardware concurrency.
    unsigned threads{1};
    RuleRegistry registry{RuleRegistry::builtin()};
    EnvelopeMode envelopes{EnvelopeMode::satisfying};
};

struct TraceRecord {
    Path path;
    std::vector<Signature> signatures;
    double cost{0.0};
    bool checked{false};
    std::vector<RuleVerdict> verdicts;
    bool satisfied{false};
    std::vector<ManeuverEnvelope> envelopes;

    [[nodiscard]] std::optional<std::string> first_violated() const {
        for (auto const& v : verdicts) {
            if (!v.satisfied) return v.rule;
        }
        return std::nullopt;
    }
};

/// Wall-clock seconds per stage.
struct StageTimings {
    double partitioning{0.0};
    double graph_generation{0.0};
    double dijkstra_search{0.0};
    double calculating_costs{0.0};
    double verification{0.0};
};

struct VerificationReport {
    Scenario scenario;
    NavGraph graph;
    std::vector<RuleSpec> rules;
    VertexId root{0};
    std::vector<VertexId> goals;
    /// Sorted by cost, ties by signature sequence.
    std::vector<TraceRecord> traces;
    bool truncated{false};
    std::optional<Path> best;
    StageTimings timings;

    [[nodiscard]] std::size_t satisfying_count() const {
        return static_cast<std::size_t>(std::count_if(traces.begin(), traces.end(),
                                                      [](TraceRecord const& t) { return t.satisfied; }));
    }
    [[nodiscard]] std::size_t checked_count() const {
        return static_cast<std::size_t>(std::count_if(traces.begin(), traces.end(),
                                                      [](TraceRecord const& t) { return t.checked; }));
    }
};

namespace detail {

class Stopwatch {
public:
    double lap() {
        auto const now = std::chrono::steady_clock::now();
        double const s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }

private:
    std::chrono::steady_clock::time_point last_{std::chrono::steady_clock::now()};
};

// Runs fn(i) for i in [0, n) on up to `threads` workers; each index is handled exactly once.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += threads) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto const& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace detail

/// Partition, graph, root and goals, all traces per goal, costs, cost-ordered
/// verification against every applicable rule.
[[nodiscard]] inline VerificationReport run_pipeline(Scenario const& sc, PipelineOptions const& opt = {}) {
    VerificationReport rep;
    rep.scenario = sc;
    detail::Stopwatch clock;

    auto cells = build_all_cells(sc);
    rep.timings.partitioning = clock.lap();

    rep.graph = build_graph(sc, std::move(cells));
    rep.timings.graph_generation = clock.lap();

    auto const& g = rep.graph;
    rep.root = root_vertex(g, sc.ego_s0, sc.ego_d0);
    rep.goals = goal_candidates(g);

    clock.lap();
    std::optional<double> best_cost;
    for (VertexId goal : rep.goals) {
        auto p = dijkstra(g, rep.root, goal);
        if (!p) continue;
        double const c = path_cost(g, *p);
        if (!best_cost || c < *best_cost || (c == *best_cost && signature_less(g, *p, *rep.best))) {
            best_cost = c;
            rep.best = std::move(p);
        }
    }
    rep.timings.dijkstra_search = clock.lap();

    std::vector<Path> paths;
    for (VertexId goal : rep.goals) {
        // With no room left this only probes whether the goal has a path at all.
        auto set = enumerate_traces(g, rep.root, goal, opt.trace_limit - paths.size());
        rep.truncated = rep.truncated || set.truncated;
        for (auto& p : set.paths) paths.push_back(std::move(p));
    }

    clock.lap();
    rep.traces.reserve(paths.size());
    for (auto& p : paths) {
        TraceRecord t;
        t.cost = path_cost(g, p);
        t.signatures = signatures_of(g, p);
        t.path = std::move(p);
        rep.traces.push_back(std::move(t));
    }
    rep.timings.calculating_costs = clock.lap();

    std::stable_sort(rep.traces.begin(), rep.traces.end(), [](TraceRecord const& a, TraceRecord const& b) {
        if (a.cost != b.cost) return a.cost < b.cost;
        return std::lexicographical_compare(a.signatures.begin(), a.signatures.end(), b.signatures.begin(),
                                            b.signatures.end());
    });

    rep.rules = rules_for(sc, opt.registry);
    PropositionSet const props(sc);
    std::size_t const to_check = std::min(rep.traces.size(), opt.max_checked.value_or(rep.traces.size()));
    clock.lap();
    detail::parallel_for(to_check, opt.threads, [&](std::size_t i) {
        auto& t = rep.traces[i];
        t.verdicts = verify_signatures(t.signatures, rep.rules, sc.congested, props);
        t.checked = true;
        t.satisfied = std::all_of(t.verdicts.begin(), t.verdicts.end(), [](auto const& v) { return v.satisfied; });
    });
    rep.timings.verification = clock.lap();

    if (opt.envelopes != EnvelopeMode::none) {
        for (auto& t : rep.traces) {
            if (opt.envelopes == EnvelopeMode::all || t.satisfied) t.envelopes = envelope_of(g, t.path, opt.ds);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization

[[nodiscard]] inline nlohmann::json to_json(ManeuverEnvelope const& e) {
    auto samples = nlohmann::json::array();
    for (auto const& s : e.samples) samples.push_back({s.s, s.d_right, s.d_left});
    return {{"step", e.step}, {"s_min", e.s_min}, {"s_max", e.s_max}, {"samples", samples}};
}

[[nodiscard]] inline double round_millis(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

/// Report document. Instants in diagnostics are 1-based.
[[nodiscard]] inline nlohmann::json to_json(VerificationReport const& rep, bool with_timings = true) {
    auto const& g = rep.graph;
    nlohmann::json cells_per_step = nlohmann::json::array();
    for (int p = 0; p <= g.steps(); ++p) cells_per_step.push_back(g.layer(p).size());

    nlohmann::json out;
    out["scenario"] = {{"obstacles", rep.scenario.obstacles.size()},
                       {"road_types", rep.scenario.road.road_types.size()},
                       {"horizon", rep.scenario.horizon},
                       {"step", rep.scenario.step},
                       {"time_points", rep.scenario.steps() + 1},
                       {"congested", rep.scenario.congested}};
    out["graph"] = {{"nodes", g.vertex_count()},
                    {"edges", g.edge_count()},
                    {"cells_per_step", cells_per_step},
                    {"root", g.cell(rep.root).signature.str()}};
    nlohmann::json rules = nlohmann::json::array();
    for (auto const& r : rep.rules) rules.push_back({{"name", r.name}, {"formula", ltl::print(r.formula)}});
    out["rules"] = rules;
    if (with_timings) {
        out["timings"] = {{"partitioning", round_millis(rep.timings.partitioning)},
                          {"graph_generation", round_millis(rep.timings.graph_generation)},
                          {"dijkstra_search", round_millis(rep.timings.dijkstra_search)},
                          {"calculating_costs", round_millis(rep.timings.calculating_costs)},
                          {"verification", round_millis(rep.timings.verification)}};
    }
    out["trace_count"] = rep.traces.size();
    out["checked_count"] = rep.checked_count();
    out["satisfying_count"] = rep.satisfying_count();
    out["truncated"] = rep.truncated;
    if (rep.best) {
        nlohmann::json best = nlohmann::json::array();
        for (auto const& s : signatures_of(g, *rep.best)) best.push_back(s.str());
        out["dijkstra"] = {{"trace", best}, {"cost", path_cost(g, *rep.best)}};
    }

    nlohmann::json traces = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.traces.size(); ++i) {
        auto const& t = rep.traces[i];
        nlohmann::json sigs = nlohmann::json::array();
        for (auto const& s : t.signatures) sigs.push_back(s.str());
        nlohmann::json rec = {{"index", i}, {"trace", sigs}, {"cost", t.cost}, {"checked", t.checked}};
        if (t.checked) {
            nlohmann::json verdicts = nlohmann::json::object();
            for (auto const& v : t.verdicts) verdicts[v.rule] = v.satisfied;
            rec["verdicts"] = verdicts;
            rec["satisfied"] = t.satisfied;
            for (auto const& v : t.verdicts) {
                if (v.satisfied) continue;
                rec["violation"] = {{"rule", v.rule}};
                if (v.first_failure) rec["violation"]["instant"] = *v.first_failure + 1;
                break;
            }
        }
        if (!t.envelopes.empty()) {
            nlohmann::json envs = nlohmann::json::array();
            for (auto const& e : t.envelopes) envs.push_back(to_json(e));
            rec["envelopes"] = envs;
        }
        traces.push_back(std::move(rec));
    }
    out["traces"] = std::move(traces);
    return out;
}

}  // namespace mv

#endif  // MV_VERIFY_HPP
