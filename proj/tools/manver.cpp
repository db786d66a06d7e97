// Command-line front end: scenario in, partition dumps, graphs, reports, plots and SMV models out.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mv/mv.hpp"

namespace {

struct Config {
    std::string command;
    std::string input;
    std::string output{"-"};
    std::optional<double> step;
    double ds{mv::kDefaultEnvelopeDs};
    std::optional<std::size_t> max_checked;
    std::optional<std::string> congested;
    std::optional<std::size_t> trace;
    std::optional<std::string> rules;
    std::size_t trace_limit{mv::kDefaultTraceLimit};
    bool no_timings{false};
};

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUnsatisfied = 3;

// Writes next to the target and renames, so readers never see a partial file.
void write_output(std::string const& path, std::string const& content) {
    if (path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::filesystem::path const target(path);
    auto tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw mv::Error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw mv::Error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, target);
}

unsigned threads_from_env() {
    char const* env = std::getenv("MV_THREADS");
    if (!env || !*env) return 0;
    try {
        return static_cast<unsigned>(std::stoul(env));
    } catch (std::exception const&) {
        throw mv::Error(std::string("MV_THREADS must be a non-negative integer, got '") + env + "'");
    }
}

mv::Scenario load(Config const& cfg) {
    auto sc = mv::load_scenario_file(cfg.input);
    if (cfg.step) sc.step = *cfg.step;
    if (cfg.congested) sc.congested = (*cfg.congested == "true");
    mv::validate(sc);
    return sc;
}

mv::PipelineOptions pipeline_options(Config const& cfg) {
    mv::PipelineOptions opt;
    opt.trace_limit = cfg.trace_limit;
    opt.max_checked = cfg.max_checked;
    opt.ds = cfg.ds;
    opt.threads = threads_from_env();
    if (cfg.rules) {
        for (auto& tpl : mv::load_rule_templates_file(*cfg.rules)) opt.registry.add(std::move(tpl));
    }
    return opt;
}

mv::TraceRecord const& pick_trace(mv::VerificationReport const& rep, std::optional<std::size_t> index) {
    std::size_t const i = index.value_or(0);
    if (i >= rep.traces.size()) {
        throw mv::Error("trace index " + std::to_string(i) + " out of range (" + std::to_string(rep.traces.size()) +
                        " traces)");
    }
    return rep.traces[i];
}

int run(Config const& cfg) {
    auto const sc = load(cfg);
    auto opt = pipeline_options(cfg);

    if (cfg.command == "partition") {
        write_output(cfg.output, mv::partition_dump(sc, mv::build_all_cells(sc)).dump(2) + "\n");
        return kExitOk;
    }
    if (cfg.command == "graph") {
        write_output(cfg.output, mv::to_dot(mv::build_graph(sc, mv::build_all_cells(sc))));
        return kExitOk;
    }
    if (cfg.command == "enumerate") {
        opt.max_checked = 0;
        opt.envelopes = mv::EnvelopeMode::none;
        auto const rep = mv::run_pipeline(sc, opt);
        nlohmann::json out = {{"trace_count", rep.traces.size()}, {"truncated", rep.truncated}};
        auto traces = nlohmann::json::array();
        for (std::size_t i = 0; i < rep.traces.size(); ++i) {
            auto sigs = nlohmann::json::array();
            for (auto const& s : rep.traces[i].signatures) sigs.push_back(s.str());
            traces.push_back({{"index", i}, {"trace", sigs}, {"cost", rep.traces[i].cost}});
        }
        out["traces"] = std::move(traces);
        write_output(cfg.output, out.dump(2) + "\n");
        return kExitOk;
    }
    if (cfg.command == "verify") {
        auto const rep = mv::run_pipeline(sc, opt);
        write_output(cfg.output, mv::to_json(rep, !cfg.no_timings).dump(2) + "\n");
        return rep.satisfying_count() > 0 ? kExitOk : kExitUnsatisfied;
    }
    if (cfg.command == "envelope") {
        opt.envelopes = mv::EnvelopeMode::none;
        auto const rep = mv::run_pipeline(sc, opt);
        auto const& t = pick_trace(rep, cfg.trace);
        auto envs = nlohmann::json::array();
        for (auto const& e : mv::envelope_of(rep.graph, t.path, cfg.ds)) envs.push_back(mv::to_json(e));
        auto sigs = nlohmann::json::array();
        for (auto const& s : t.signatures) sigs.push_back(s.str());
        nlohmann::json out = {{"index", cfg.trace.value_or(0)}, {"trace", sigs}, {"ds", cfg.ds}, {"envelopes", envs}};
        write_output(cfg.output, out.dump(2) + "\n");
        return kExitOk;
    }
    if (cfg.command == "plot") {
        if (!cfg.trace) {
            write_output(cfg.output, mv::plot_svg(sc, mv::build_graph(sc, mv::build_all_cells(sc))));
            return kExitOk;
        }
        opt.envelopes = mv::EnvelopeMode::none;
        auto const rep = mv::run_pipeline(sc, opt);
        write_output(cfg.output, mv::plot_svg(sc, rep.graph, pick_trace(rep, cfg.trace).path));
        return kExitOk;
    }
    if (cfg.command == "export-smv") {
        opt.envelopes = mv::EnvelopeMode::none;
        opt.max_checked = 0;
        auto const rep = mv::run_pipeline(sc, opt);
        auto const& t = pick_trace(rep, cfg.trace);
        write_output(cfg.output, mv::export_smv(t.signatures, rep.rules, sc.congested, mv::PropositionSet(sc)));
        return kExitOk;
    }
    throw mv::Error("unknown command '" + cfg.command + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maneuver verification on free space-time navigation graphs"};
    app.require_subcommand(1);
    Config cfg;

    struct Command {
        char const* name;
        char const* help;
    };
    Command const commands[] = {
        {"partition", "dump the per-step free space-time cells"},
        {"graph", "write the navigation graph in DOT syntax"},
        {"enumerate", "list all root-to-goal traces sorted by cost"},
        {"verify", "verify every trace against the traffic rules and write the report"},
        {"envelope", "write the maneuver envelope of one trace"},
        {"plot", "render the partition (and optionally a trace) as SVG"},
        {"export-smv", "write one trace and the rules as an SMV model"},
    };
    for (auto const& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("-i,--input", cfg.input, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", cfg.output, "output file, '-' for stdout");
        sub->add_option("--step", cfg.step, "override the planning step [s]")->check(CLI::PositiveNumber);
        sub->add_option("--ds", cfg.ds, "envelope sampling distance [m]")->check(CLI::PositiveNumber);
        sub->add_option("--max-checked", cfg.max_checked, "verify only the k cheapest traces");
        sub->add_option("--congested", cfg.congested, "override the CONGESTED signal")
            ->check(CLI::IsMember({"true", "false"}));
        sub->add_option("--trace", cfg.trace, "trace index in cost order");
        sub->add_option("--rules", cfg.rules, "additional rules file")->check(CLI::ExistingFile);
        sub->add_option("--trace-limit", cfg.trace_limit, "cap on enumerated traces");
        sub->add_flag("--no-timings", cfg.no_timings, "omit stage timings from the report");
        sub->callback([&cfg, name = std::string(c.name)] { cfg.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        return run(cfg);
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
