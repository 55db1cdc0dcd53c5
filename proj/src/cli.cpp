#include "cogmac/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cogmac/aloha_analytic.hpp"
#include "cogmac/csma_optimizer.hpp"
#include "cogmac/figures.hpp"
#include "cogmac/monte_carlo.hpp"
#include "cogmac/result_io.hpp"
#include "cogmac/scenario.hpp"
#include "cogmac/spatial_model.hpp"

namespace cogmac {

using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::string sweep;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> slots;
    std::optional<int> shards;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
    auto* c = cmd->add_option("--config", o.config_path, "scenario config file");
    if (needs_config) c->required();
    cmd->add_option("--out", o.out_path, "output file (default derived from command)");
    cmd->add_option("--format", o.format, "csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--seed", o.seed, "override simulation seed");
    cmd->add_option("--slots", o.slots, "override simulation slots");
    cmd->add_option("--shards", o.shards, "override simulation shards");
    cmd->add_option("--sweep", o.sweep, "M sweep, e.g. M=1..400 or M=1..400:5");
}

IntRange parse_sweep(const std::string& s) {
    // M=<from>..<to>[:step]
    IntRange r;
    if (s.rfind("M=", 0) != 0)
        throw ValidationError("--sweep must look like M=1..400[:5]");
    const std::string body = s.substr(2);
    const auto dots = body.find("..");
    if (dots == std::string::npos)
        throw ValidationError("--sweep must look like M=1..400[:5]");
    r.from = std::stoi(body.substr(0, dots));
    std::string rest = body.substr(dots + 2);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
        r.step = std::stoi(rest.substr(colon + 1));
        rest = rest.substr(0, colon);
    }
    r.to = std::stoi(rest);
    if (r.from < 1 || r.to < r.from || r.step < 1)
        throw ValidationError("--sweep requires 1 <= from <= to and step >= 1");
    return r;
}

std::string default_out(const std::string& name, const std::string& format) {
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("COGMAC_OUT_DIR"); env && *env) dir = env;
    return (dir / (name + (format == "csv" ? ".csv" : ".jsonl"))).string();
}

ScenarioConfig load_with_overrides(const CommonOpts& o) {
    ScenarioConfig cfg = load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.slots) cfg.slots = *o.slots;
    if (o.shards) cfg.shards = *o.shards;
    if (!o.sweep.empty()) cfg.m_range = parse_sweep(o.sweep);
    return cfg;
}

std::vector<int> m_values(const ScenarioConfig& cfg) {
    std::vector<int> ms;
    if (cfg.m_range) {
        for (int m = cfg.m_range->from; m <= cfg.m_range->to;
             m += cfg.m_range->step)
            ms.push_back(m);
    } else {
        ms.push_back(cfg.m);
    }
    return ms;
}

json base_manifest(const char* command, const ScenarioConfig& cfg) {
    return json{{"command", command},
                {"config_hash", fnv1a_hex(cfg.source_text)},
                {"config_effective", json::parse(cfg.describe())},
                {"seed", cfg.seed}};
}

void emit(const CommonOpts& o, const char* command,
          const std::vector<ResultRow>& rows, const json& manifest) {
    const std::string path =
        o.out_path.empty() ? default_out(command, o.format) : o.out_path;
    emit_results(rows,
                 o.format == "csv" ? ResultFormat::csv : ResultFormat::jsonl,
                 path, manifest.dump(2));
    std::cout << command << ": wrote " << rows.size() << " rows to " << path
              << "\n";
}

int cmd_analyze_aloha(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o);
    const ChannelSet cs = make_channels(cfg);
    const SensingScheme scheme = make_scheme(cfg, cs);
    if (!scheme.is_singleton())
        throw ValidationError("analyze-aloha requires a singleton (s=1) scheme");
    const double c_t = cs.residual_capacity();
    std::vector<ResultRow> rows;
    for (int m : m_values(cfg)) {
        const AlohaParams p(m, cfg.q);
        const double mix = network_throughput(cs, scheme, p);
        ResultRow r;
        r.coords = {{"M", double(m)}, {"q", cfg.q}};
        r.metric = "throughput";
        r.value = mix;
        r.seed = cfg.seed;
        rows.push_back(r);
        r.metric = "throughput_normalized";
        r.value = c_t > 0.0 ? mix / c_t : 0.0;
        rows.push_back(r);
        r.metric = "closed_form_identity";
        r.value = closed_form_throughput(cs, scheme, p, AlohaClosedForm::identity);
        rows.push_back(r);
        r.metric = "closed_form_damped";
        r.value = closed_form_throughput(cs, scheme, p, AlohaClosedForm::damped);
        rows.push_back(r);
    }
    emit(o, "analyze-aloha", rows, base_manifest("analyze-aloha", cfg));
    return 0;
}

int cmd_cell(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o);
    const ChannelSet cs = make_channels(cfg);
    const SensingScheme scheme = make_scheme(cfg, cs);
    if (!scheme.is_singleton())
        throw ValidationError("cell requires a singleton (s=1) scheme");
    const SpatialConfig base = make_spatial(cfg);
    const double c_t = cs.residual_capacity();
    const bool rd_fixed = cfg.spatial && cfg.spatial->r_d.has_value();
    std::vector<ResultRow> rows;
    ClampStats clamps;
    for (int m : m_values(cfg)) {
        const AlohaParams p(m, cfg.q);
        const double rd = rd_fixed
                              ? *cfg.spatial->r_d
                              : solve_detection_radius(base, cs, scheme, p);
        const SpatialConfig sp = base.with_detection_radius(rd);
        ResultRow r;
        r.coords = {{"M", double(m)}, {"q", cfg.q}};
        r.seed = cfg.seed;
        r.tolerance = rd_fixed ? "" : "bisection_abs_1e-6";
        r.metric = "detection_radius";
        r.value = rd;
        rows.push_back(r);
        r.tolerance = "quad_abs_1e-6";
        for (int j = 0; j < cs.size(); ++j) {
            ResultRow pc = r;
            pc.coords.emplace_back("channel", double(j));
            pc.metric = "p_cc";
            pc.value = p_cc(sp, cs.theta(j), &clamps);
            rows.push_back(pc);
            pc.metric = "p_collision";
            pc.value = p_collision_channel(sp, cs, scheme, p, j, &clamps);
            rows.push_back(pc);
        }
        const double tp = cell_network_throughput(sp, cs, scheme, p, &clamps);
        r.metric = "cell_throughput";
        r.value = tp;
        rows.push_back(r);
        r.metric = "cell_throughput_normalized";
        r.value = c_t > 0.0 ? tp / c_t : 0.0;
        rows.push_back(r);
    }
    json manifest = base_manifest("cell", cfg);
    manifest["clamping"] = {{"low", clamps.clamped_low},
                            {"high", clamps.clamped_high},
                            {"degenerate", clamps.degenerate}};
    emit(o, "cell", rows, manifest);
    return 0;
}

json report_json(const SolverReport& rep) {
    const char* status[] = {"optimal", "max_iter", "infeasible"};
    return json{{"f0", rep.f0},
                {"nu", rep.nu},
                {"objective", rep.objective},
                {"kkt_residual", rep.kkt_residual},
                {"iterations", rep.iterations},
                {"status", status[int(rep.status)]},
                {"max_objective_increase", rep.max_objective_increase},
                {"renorm_residual", rep.scheme.renorm_residual()}};
}

int cmd_optimize(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o);
    const ChannelSet cs = make_channels(cfg);
    const double c_t = cs.residual_capacity();
    std::vector<ResultRow> rows;
    json manifest = base_manifest("optimize", cfg);
    for (int m : m_values(cfg)) {
        SolverReport rep = [&] {
            if (cfg.detector &&
                (cfg.detector->alpha > 0.0 || cfg.detector->beta < 1.0)) {
                const DetectorModel det(cfg.detector->alpha, cfg.detector->beta);
                const double xi = cfg.spatial ? cfg.spatial->xi : 0.2;
                return optimal_with_errors(cs, enumerate_groups(cs.size(), cfg.s),
                                           m, det, xi);
            }
            if (cfg.s == 1) return optimal_single(cs, m);
            return optimal_multi(cs, enumerate_groups(cs.size(), cfg.s), m);
        }();
        ResultRow r;
        r.coords = {{"M", double(m)}};
        r.seed = cfg.seed;
        r.provenance = Provenance::optimized;
        r.tolerance = "kkt_1e-8";
        r.metric = "objective";
        r.value = rep.objective;
        rows.push_back(r);
        r.metric = "throughput";
        r.value = c_t - rep.objective;
        rows.push_back(r);
        r.metric = "f0";
        r.value = rep.f0;
        rows.push_back(r);
        r.metric = "nu";
        r.value = rep.nu;
        rows.push_back(r);
        r.metric = "kkt_residual";
        r.value = rep.kkt_residual;
        rows.push_back(r);
        for (std::size_t g = 0; g < rep.scheme.probs().size(); ++g) {
            ResultRow pr = r;
            pr.coords.emplace_back("group", double(g));
            pr.metric = "prob";
            pr.value = rep.scheme.prob(g);
            rows.push_back(pr);
        }
        manifest["reports"][std::to_string(m)] = report_json(rep);
    }
    emit(o, "optimize", rows, manifest);
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o);
    const ChannelSet cs = make_channels(cfg);
    const SensingScheme scheme = make_scheme(cfg, cs);
    const SimRun run{cfg.slots, cfg.seed, cfg.shards};
    std::vector<ResultRow> rows;
    auto push = [&](const SimEstimate& e,
                    std::vector<std::pair<std::string, double>> coords) {
        ResultRow r;
        r.coords = std::move(coords);
        r.metric = e.label;
        r.value = e.mean;
        r.std_error = e.std_error;
        r.provenance = Provenance::simulated;
        r.seed = e.seed;
        rows.push_back(r);
    };
    const SimKind kind = cfg.effective_sim_kind();
    if (kind == SimKind::aloha) {
        const auto res = simulate_aloha_datalink(cs, scheme,
                                                 AlohaParams(cfg.m, cfg.q), run);
        push(res.throughput, {{"M", double(cfg.m)}, {"q", cfg.q}});
    } else if (kind == SimKind::csma) {
        const auto res =
            simulate_csma(cs, scheme, cfg.m, make_detector(cfg), run);
        push(res.throughput, {{"M", double(cfg.m)}});
        for (int j = 0; j < cs.size(); ++j)
            push(res.collision_rate[j],
                 {{"M", double(cfg.m)}, {"channel", double(j)}});
    } else {
        const SpatialScenario sc{make_spatial(cfg), cs, scheme,
                                 AlohaParams(cfg.m, cfg.q)};
        const auto res = simulate_spatial(sc, run);
        push(res.throughput, {{"M", double(cfg.m)}});
        push(res.collision_total, {{"M", double(cfg.m)}});
        push(res.success_rate, {{"M", double(cfg.m)}});
        for (int j = 0; j < cs.size(); ++j) {
            push(res.collision_count[j],
                 {{"M", double(cfg.m)}, {"channel", double(j)}});
            push(res.p_cc_conditional[j],
                 {{"M", double(cfg.m)}, {"channel", double(j)}});
            push(res.opportunity_rate[j],
                 {{"M", double(cfg.m)}, {"channel", double(j)}});
        }
    }
    json manifest = base_manifest("simulate", cfg);
    manifest["slots"] = run.slots;
    manifest["shards"] = run.shards;
    emit(o, "simulate", rows, manifest);
    return 0;
}

int cmd_compare(const CommonOpts& o) {
    const ScenarioConfig cfg = load_with_overrides(o);
    const ChannelSet cs = make_channels(cfg);
    auto cat = enumerate_groups(cs.size(), cfg.s);
    const SensingScheme heur =
        cfg.s == 1 ? heuristic_single(cs) : heuristic_multi(cs, cat);
    std::vector<ResultRow> rows;
    json manifest = base_manifest("compare", cfg);
    for (int m : m_values(cfg)) {
        const SolverReport rep =
            cfg.s == 1 ? optimal_single(cs, m) : optimal_multi(cs, cat, m);
        ResultRow r;
        r.coords = {{"S", double(cfg.s)}, {"M", double(m)}};
        r.seed = cfg.seed;
        r.provenance = Provenance::optimized;
        r.metric = "loss_percentage";
        r.value = loss_percentage(cs, m, heur, rep);
        rows.push_back(r);
        r.metric = "optimal_throughput";
        r.value = cs.residual_capacity() - rep.objective;
        rows.push_back(r);
        r.metric = "heuristic_throughput";
        r.value = cs.residual_capacity() - unutilized_capacity(cs, heur, m);
        rows.push_back(r);
    }
    emit(o, "compare", rows, manifest);
    return 0;
}

int cmd_figures(const CommonOpts& o, const std::vector<std::string>& names,
                bool list) {
    if (list || names.empty()) {
        std::cout << "available figure recipes:\n";
        for (const auto& r : figure_recipes())
            std::cout << "  " << r.name << "  -  " << r.title << "\n";
        return 0;
    }
    const std::uint64_t seed = o.seed.value_or(20091);
    for (const auto& name : names) {
        const FigureRecipe* rec = find_figure(name);
        if (!rec) {
            std::cerr << "unknown figure '" << name
                      << "'; run `cogmac figures --list`\n";
            return 1;
        }
        const FigureResult res = rec->run(seed);
        std::string path = o.out_path;
        if (path.empty()) {
            std::string stem = name;
            for (char& c : stem)
                if (c == '-') c = '_';
            path = default_out(stem, o.format);
        }
        emit_results(res.rows,
                     o.format == "csv" ? ResultFormat::csv : ResultFormat::jsonl,
                     path, res.manifest_json);
        std::cout << "figures " << name << ": wrote " << res.rows.size()
                  << " rows to " << path << "\n";
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"cognitive MAC throughput analysis toolkit"};
    app.require_subcommand(1);

    CommonOpts o_aloha, o_cell, o_opt, o_sim, o_cmp, o_fig;
    std::vector<std::string> fig_names;
    bool fig_list = false;

    add_common(app.add_subcommand("analyze-aloha",
                                  "analytic ALOHA throughput sweep"),
               o_aloha, true);
    add_common(app.add_subcommand("cell",
                                  "cell-model analytics: detection radius, "
                                  "collision, throughput"),
               o_cell, true);
    add_common(app.add_subcommand("optimize", "CSMA sensing policy optimizers"),
               o_opt, true);
    add_common(app.add_subcommand("simulate", "Monte Carlo run of the scenario"),
               o_sim, true);
    add_common(app.add_subcommand("compare", "optimal vs heuristic loss table"),
               o_cmp, true);
    auto* fig = app.add_subcommand("figures", "named figure-reproduction recipes");
    add_common(fig, o_fig, false);
    fig->add_option("names", fig_names, "recipe names");
    fig->add_flag("--list", fig_list, "list available recipes");

    try {
        std::vector<const char*> argv;
        argv.push_back("cogmac");
        for (const auto& a : args) argv.push_back(a.c_str());
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand("analyze-aloha")) return cmd_analyze_aloha(o_aloha);
        if (app.got_subcommand("cell")) return cmd_cell(o_cell);
        if (app.got_subcommand("optimize")) return cmd_optimize(o_opt);
        if (app.got_subcommand("simulate")) return cmd_simulate(o_sim);
        if (app.got_subcommand("compare")) return cmd_compare(o_cmp);
        if (app.got_subcommand("figures"))
            return cmd_figures(o_fig, fig_names, fig_list);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace cogmac
