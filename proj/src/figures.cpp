#include "cogmac/figures.hpp"

#include <cmath>

#include <json.hpp>

#include "cogmac/aloha_analytic.hpp"
#include "cogmac/csma_optimizer.hpp"
#include "cogmac/scenario.hpp"
#include "cogmac/spatial_model.hpp"

namespace cogmac {

using nlohmann::json;

namespace {

ChannelSet rho_channels(int n, double rho, std::uint64_t seed) {
    return ChannelSet(std::vector<double>(n, 1.0), thetas_for_rho(n, rho, seed));
}

json channels_json(const ChannelSet& cs) {
    return json{{"widths", cs.widths()}, {"thetas", cs.thetas()},
                {"rate_factor", cs.rate_factor()}};
}

ResultRow analytic_row(std::vector<std::pair<std::string, double>> coords,
                       std::string metric, double value, std::uint64_t seed) {
    ResultRow r;
    r.coords = std::move(coords);
    r.metric = std::move(metric);
    r.value = value;
    r.provenance = Provenance::analytic;
    r.seed = seed;
    return r;
}

ResultRow optimized_row(std::vector<std::pair<std::string, double>> coords,
                        std::string metric, double value, std::uint64_t seed) {
    ResultRow r = analytic_row(std::move(coords), std::move(metric), value, seed);
    r.provenance = Provenance::optimized;
    return r;
}

// Normalized ALOHA throughput against M for three utilization regimes
// (q = 0.4, N = 100). Emits the mixture sum plus both single-line reductions.
FigureResult aloha_msweep(std::uint64_t seed) {
    const int n = 100;
    const double q = 0.4;
    const int m_max = 1000;
    FigureResult out;
    json manifest{{"figure", "aloha-msweep"}, {"q", q}, {"n", n},
                  {"m_max", m_max}, {"seed", seed}};
    for (double rho : {0.2, 0.5, 0.8}) {
        const ChannelSet cs = rho_channels(n, rho, seed + std::uint64_t(rho * 100));
        manifest["channels"][format_double(rho)] = channels_json(cs);
        const SensingScheme scheme = heuristic_single(cs);
        const double c_t = cs.residual_capacity();
        for (int m = 1; m <= m_max; ++m) {
            const AlohaParams p(m, q);
            const double mix = network_throughput(cs, scheme, p);
            out.rows.push_back(analytic_row({{"rho", rho}, {"M", double(m)}},
                                            "throughput_normalized", mix / c_t,
                                            seed));
            out.rows.push_back(analytic_row(
                {{"rho", rho}, {"M", double(m)}}, "closed_form_identity_normalized",
                closed_form_throughput(cs, scheme, p, AlohaClosedForm::identity) /
                    c_t,
                seed));
            out.rows.push_back(analytic_row(
                {{"rho", rho}, {"M", double(m)}}, "closed_form_damped_normalized",
                closed_form_throughput(cs, scheme, p, AlohaClosedForm::damped) /
                    c_t,
                seed));
        }
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Detection radius against M and N at R_I = R_r = 1, xi = 0.2, q = 0.3,
// lambda = 1/1.5^2.
FigureResult detection_radius(std::uint64_t seed) {
    const double lambda = 1.0 / (1.5 * 1.5), q = 0.3, xi = 0.2;
    FigureResult out;
    json manifest{{"figure", "detection-radius"},
                  {"lambda", lambda},
                  {"q", q},
                  {"xi", xi},
                  {"radii", 1.0},
                  {"gamma", 0.1},
                  {"seed", seed},
                  {"note", "thetas drawn uniformly (rho 0.5); the setup leaves them open"}};
    for (int n : {5, 10, 20}) {
        const ChannelSet cs = rho_channels(n, 0.5, seed + n);
        manifest["channels"][std::to_string(n)] = channels_json(cs);
        const SensingScheme scheme = heuristic_single(cs);
        const SpatialConfig base = SpatialConfig::with_gamma(
            lambda, 1.0, 1.0, 1.0, 1.0, 0.0, 0.1, xi);
        int transition_m = -1;
        for (int m = 1; m <= 40; ++m) {
            const double rd =
                solve_detection_radius(base, cs, scheme, AlohaParams(m, q));
            if (rd > 0.0 && transition_m < 0) transition_m = m;
            out.rows.push_back(analytic_row({{"N", double(n)}, {"M", double(m)}},
                                            "detection_radius", rd, seed));
        }
        manifest["first_nonzero_m"][std::to_string(n)] = transition_m;
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Normalized cell throughput against M and N (gamma = 0.1, rho = 0.15,
// xi = 0.2, q = 0.3, lambda = 1/1.5^2, unit radii); the detection radius is
// re-solved per point before the throughput evaluation.
FigureResult cell_throughput(std::uint64_t seed) {
    const double lambda = 1.0 / (1.5 * 1.5), q = 0.3, xi = 0.2, gamma = 0.1;
    FigureResult out;
    json manifest{{"figure", "cell-throughput"}, {"lambda", lambda}, {"q", q},
                  {"xi", xi}, {"gamma", gamma}, {"rho", 0.15}, {"seed", seed},
                  {"m_step", 10}};
    for (int n : {1, 2, 3}) {
        const ChannelSet cs = rho_channels(n, 0.15, seed + 7 * n);
        manifest["channels"][std::to_string(n)] = channels_json(cs);
        const SensingScheme scheme = heuristic_single(cs);
        const double c_t = cs.residual_capacity();
        const SpatialConfig base = SpatialConfig::with_gamma(
            lambda, 1.0, 1.0, 1.0, 1.0, 0.0, gamma, xi);
        for (int m = 10; m <= 250; m += 10) {
            const AlohaParams p(m, q);
            const double rd = solve_detection_radius(base, cs, scheme, p);
            const SpatialConfig cfg = base.with_detection_radius(rd);
            const double tp = cell_network_throughput(cfg, cs, scheme, p);
            out.rows.push_back(analytic_row({{"N", double(n)}, {"M", double(m)}},
                                            "detection_radius", rd, seed));
            out.rows.push_back(analytic_row({{"N", double(n)}, {"M", double(m)}},
                                            "cell_throughput_normalized",
                                            tp / c_t, seed));
        }
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Normalized optimal CSMA throughput against M and N for the highly utilized
// regime (rho = 0.8).
FigureResult csma_utilization(std::uint64_t seed) {
    FigureResult out;
    json manifest{{"figure", "csma-utilization"}, {"rho", 0.8}, {"seed", seed}};
    for (int n : {6, 12, 24}) {
        const ChannelSet cs = rho_channels(n, 0.8, seed + 13 * n);
        manifest["channels"][std::to_string(n)] = channels_json(cs);
        const double c_t = cs.residual_capacity();
        for (int m = 2; m <= 96; ++m) {
            const SolverReport rep = optimal_single(cs, m);
            out.rows.push_back(optimized_row(
                {{"N", double(n)}, {"M", double(m)}}, "utilized_fraction",
                (c_t - rep.objective) / c_t, seed));
        }
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Loss percentage of the heuristic single-channel scheme against the optimal
// one, for several N at rho = 0.8 and for several rho at N = 12.
FigureResult loss_single(std::uint64_t seed) {
    FigureResult out;
    json manifest{{"figure", "loss-single"}, {"seed", seed}};
    for (int n : {6, 12, 18}) {
        const ChannelSet cs = rho_channels(n, 0.8, seed + 17 * n);
        manifest["channels_rho08"][std::to_string(n)] = channels_json(cs);
        const SensingScheme heur = heuristic_single(cs);
        for (int m = n; m <= 8 * n; m += std::max(1, n / 4)) {
            const SolverReport rep = optimal_single(cs, m);
            out.rows.push_back(optimized_row(
                {{"rho", 0.8}, {"N", double(n)}, {"M", double(m)}},
                "loss_percentage", loss_percentage(cs, m, heur, rep), seed));
        }
    }
    for (double rho : {0.2, 0.5, 0.8}) {
        const int n = 12;
        const ChannelSet cs = rho_channels(n, rho, seed + std::uint64_t(rho * 1000));
        manifest["channels_n12"][format_double(rho)] = channels_json(cs);
        const SensingScheme heur = heuristic_single(cs);
        for (int m = n; m <= 8 * n; m += 3) {
            const SolverReport rep = optimal_single(cs, m);
            out.rows.push_back(optimized_row(
                {{"rho", rho}, {"N", double(n)}, {"M", double(m)}},
                "loss_percentage", loss_percentage(cs, m, heur, rep), seed));
        }
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Normalized optimal throughput with multi-channel sensing (N = 20,
// rho = 0.2) for group sizes S = 1, 2, 4.
FigureResult multi_throughput(std::uint64_t seed) {
    const int n = 20;
    FigureResult out;
    json manifest{{"figure", "multi-throughput"}, {"rho", 0.2}, {"n", n},
                  {"seed", seed}};
    const ChannelSet cs = rho_channels(n, 0.2, seed + 23);
    manifest["channels"] = channels_json(cs);
    const double c_t = cs.residual_capacity();
    for (int s : {1, 2, 4}) {
        auto cat = enumerate_groups(n, s);
        for (int m = 2; m <= 60; m += 2) {
            const SolverReport rep =
                s == 1 ? optimal_single(cs, m) : optimal_multi(cs, cat, m);
            out.rows.push_back(optimized_row(
                {{"S", double(s)}, {"M", double(m)}}, "utilized_fraction",
                (c_t - rep.objective) / c_t, seed));
        }
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Loss percentage of the heuristic group scheme against the optimal one for
// N = 10 and group sizes 2, 5, 7, in two utilization regimes.
FigureResult loss_multi(std::uint64_t seed) {
    const int n = 10;
    FigureResult out;
    json manifest{{"figure", "loss-multi"}, {"n", n}, {"seed", seed}};
    for (double rho : {0.8, 0.4}) {
        const ChannelSet cs = rho_channels(n, rho, seed + std::uint64_t(rho * 31));
        manifest["channels"][format_double(rho)] = channels_json(cs);
        for (int s : {2, 5, 7}) {
            auto cat = enumerate_groups(n, s);
            const SensingScheme heur = heuristic_multi(cs, cat);
            for (int m = 5; m <= 60; m += 5) {
                const SolverReport rep = optimal_multi(cs, cat, m);
                out.rows.push_back(optimized_row(
                    {{"rho", rho}, {"S", double(s)}, {"M", double(m)}},
                    "loss_percentage", loss_percentage(cs, m, heur, rep), seed));
            }
        }
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Error-aware normalized throughput (alpha = 0.2, beta = 0.8, rho = 0.2):
// fixed S = 5 over several N, and fixed N = 12 over several S. The collision
// budget xi = 0.1 is a recorded choice of this recipe.
FigureResult error_throughput(std::uint64_t seed) {
    const DetectorModel det(0.2, 0.8);
    const double xi = 0.1;
    FigureResult out;
    json manifest{{"figure", "error-throughput"}, {"alpha", det.alpha},
                  {"beta", det.beta}, {"rho", 0.2}, {"xi", xi}, {"seed", seed}};
    ErrorAwareOptions opt;
    opt.max_iter = 30000;
    auto sweep = [&](const ChannelSet& cs, int s, const char* tag, double coord) {
        auto cat = enumerate_groups(cs.size(), s);
        const double c_t = cs.residual_capacity();
        for (int m = 6; m <= 48; m += 6) {
            const SolverReport rep = optimal_with_errors(cs, cat, m, det, xi, opt);
            const double utilized =
                rep.status == SolveStatus::infeasible
                    ? 0.0
                    : c_t - unutilized_capacity_with_errors(cs, rep.scheme, m,
                                                          det.beta, rep.f0);
            out.rows.push_back(optimized_row(
                {{tag, coord}, {"M", double(m)}}, "utilized_fraction",
                utilized / c_t, seed));
            out.rows.push_back(optimized_row({{tag, coord}, {"M", double(m)}},
                                             "f0", rep.f0, seed));
        }
    };
    for (int n : {10, 15}) {
        const ChannelSet cs = rho_channels(n, 0.2, seed + 41 * n);
        manifest["channels_s5"][std::to_string(n)] = channels_json(cs);
        sweep(cs, 5, "N", double(n));
    }
    {
        const ChannelSet cs = rho_channels(12, 0.2, seed + 43);
        manifest["channels_n12"] = channels_json(cs);
        for (int s : {2, 4, 6}) sweep(cs, s, "S", double(s));
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

// Error-free versus erroneous sensing (rho = 0.2, N = 7, S = 3).
FigureResult error_vs_perfect(std::uint64_t seed) {
    const int n = 7, s = 3;
    const double xi = 0.1;
    FigureResult out;
    json manifest{{"figure", "error-vs-perfect"}, {"rho", 0.2}, {"n", n},
                  {"s", s}, {"xi", xi}, {"seed", seed}};
    const ChannelSet cs = rho_channels(n, 0.2, seed + 47);
    manifest["channels"] = channels_json(cs);
    auto cat = enumerate_groups(n, s);
    const double c_t = cs.residual_capacity();
    const DetectorModel det(0.2, 0.8);
    for (int m = 4; m <= 40; m += 4) {
        const SolverReport perfect = optimal_multi(cs, cat, m);
        out.rows.push_back(optimized_row(
            {{"M", double(m)}, {"erroneous", 0.0}}, "utilized_fraction",
            (c_t - perfect.objective) / c_t, seed));
        const SolverReport err = optimal_with_errors(cs, cat, m, det, xi);
        const double utilized = err.status == SolveStatus::infeasible
                                    ? 0.0
                                    : c_t - unutilized_capacity_with_errors(cs, err.scheme, m,
                                                        det.beta, err.f0);
        out.rows.push_back(optimized_row({{"M", double(m)}, {"erroneous", 1.0}},
                                         "utilized_fraction", utilized / c_t,
                                         seed));
    }
    out.manifest_json = manifest.dump(2);
    return out;
}

const std::vector<FigureRecipe> kRecipes = {
    {"aloha-msweep", "ALOHA throughput vs M (q=0.4, N=100, rho 0.2/0.5/0.8)",
     aloha_msweep},
    {"detection-radius", "Detection radius vs M and N (xi=0.2, q=0.3)",
     detection_radius},
    {"cell-throughput", "Cell throughput vs M and N (gamma=0.1, rho=0.15)",
     cell_throughput},
    {"csma-utilization", "Optimal CSMA utilization vs M and N (rho=0.8)",
     csma_utilization},
    {"loss-single", "Heuristic loss percentage, single-channel sensing",
     loss_single},
    {"multi-throughput", "Optimal utilization vs M for S=1,2,4 (N=20, rho=0.2)",
     multi_throughput},
    {"loss-multi", "Heuristic loss percentage, group sensing (N=10)", loss_multi},
    {"error-throughput",
     "Error-aware utilization vs M (alpha=0.2, beta=0.8, rho=0.2)",
     error_throughput},
    {"error-vs-perfect", "Error-free vs erroneous sensing (N=7, S=3, rho=0.2)",
     error_vs_perfect},
};

} // namespace

const std::vector<FigureRecipe>& figure_recipes() { return kRecipes; }

const FigureRecipe* find_figure(const std::string& name) {
    for (const auto& r : kRecipes)
        if (r.name == name) return &r;
    return nullptr;
}

} // namespace cogmac
