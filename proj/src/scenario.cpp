#include "cogmac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cogmac/rng.hpp"

namespace cogmac {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ValidationError(origin + ": " + what);
}

// line/column of a byte offset, for parse diagnostics
std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

void check_keys(const json& obj, const std::string& origin,
                const std::string& block,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok) fail(origin, "unknown field '" + block + key + "'");
    }
}

double get_number(const json& obj, const std::string& origin,
                  const std::string& field) {
    if (!obj.contains(field)) fail(origin, "missing field '" + field + "'");
    if (!obj[field].is_number()) fail(origin, "field '" + field + "' must be a number");
    return obj[field].get<double>();
}

} // namespace

SimKind ScenarioConfig::effective_sim_kind() const {
    if (sim_kind) return *sim_kind;
    if (spatial) return SimKind::spatial;
    if (detector) return SimKind::csma;
    return SimKind::aloha;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte ? e.byte - 1 : 0);
        throw ValidationError(origin + ":" + std::to_string(line) + ":" +
                              std::to_string(col) + ": " + e.what());
    }
    if (!root.is_object()) fail(origin, "config root must be an object");
    check_keys(root, origin, "",
               {"channels", "scheme", "population", "spatial", "detector",
                "simulation"});

    ScenarioConfig cfg;
    cfg.source_text = text;

    if (!root.contains("channels")) fail(origin, "missing block 'channels'");
    {
        const json& ch = root["channels"];
        check_keys(ch, origin, "channels.", {"widths", "thetas", "rate_factor"});
        if (!ch.contains("widths") || !ch["widths"].is_array())
            fail(origin, "'channels.widths' must be an array");
        if (!ch.contains("thetas") || !ch["thetas"].is_array())
            fail(origin, "'channels.thetas' must be an array");
        for (const auto& v : ch["widths"]) cfg.widths.push_back(v.get<double>());
        for (const auto& v : ch["thetas"]) cfg.thetas.push_back(v.get<double>());
        if (ch.contains("rate_factor"))
            cfg.rate_factor = get_number(ch, origin, "rate_factor");
    }

    if (root.contains("scheme")) {
        const json& sc = root["scheme"];
        check_keys(sc, origin, "scheme.", {"kind", "s", "groups", "probs"});
        if (sc.contains("kind")) {
            const std::string k = sc["kind"].get<std::string>();
            if (k == "heuristic_single") cfg.scheme_kind = SchemeKind::heuristic_single;
            else if (k == "heuristic_multi") cfg.scheme_kind = SchemeKind::heuristic_multi;
            else if (k == "optimal") cfg.scheme_kind = SchemeKind::optimal;
            else if (k == "explicit") cfg.scheme_kind = SchemeKind::explicit_;
            else fail(origin, "'scheme.kind' must be one of heuristic_single, "
                              "heuristic_multi, optimal, explicit");
        }
        if (sc.contains("s")) cfg.s = int(get_number(sc, origin, "s"));
        if (cfg.scheme_kind == SchemeKind::explicit_) {
            if (!sc.contains("groups") || !sc.contains("probs"))
                fail(origin, "explicit scheme needs 'scheme.groups' and 'scheme.probs'");
            for (const auto& g : sc["groups"])
                cfg.explicit_groups.push_back(g.get<std::vector<int>>());
            for (const auto& p : sc["probs"])
                cfg.explicit_probs.push_back(p.get<double>());
        } else if (sc.contains("groups") || sc.contains("probs")) {
            fail(origin, "'scheme.groups'/'scheme.probs' only apply to kind explicit");
        }
    }

    if (root.contains("population")) {
        const json& po = root["population"];
        check_keys(po, origin, "population.", {"m", "m_range", "q"});
        if (po.contains("m")) cfg.m = int(get_number(po, origin, "m"));
        if (po.contains("q")) cfg.q = get_number(po, origin, "q");
        if (po.contains("m_range")) {
            const json& r = po["m_range"];
            check_keys(r, origin, "population.m_range.", {"from", "to", "step"});
            IntRange ir;
            ir.from = int(get_number(r, origin, "from"));
            ir.to = int(get_number(r, origin, "to"));
            ir.step = r.contains("step") ? int(get_number(r, origin, "step")) : 1;
            if (ir.from < 1 || ir.to < ir.from || ir.step < 1)
                fail(origin, "'population.m_range' must satisfy 1 <= from <= to, step >= 1");
            cfg.m_range = ir;
        }
        if (cfg.m < 1) fail(origin, "'population.m' must be >= 1");
        if (!(cfg.q >= 0.0 && cfg.q <= 1.0))
            fail(origin, "'population.q' must lie in [0,1]");
    }

    if (root.contains("spatial")) {
        const json& sp = root["spatial"];
        check_keys(sp, origin, "spatial.",
                   {"lambda", "r_r_p", "r_r_s", "r_i_p", "r_i_s", "r_d",
                    "cell_area", "gamma", "xi"});
        ScenarioConfig::Spatial s;
        s.lambda = get_number(sp, origin, "lambda");
        if (sp.contains("r_r_p")) s.r_r_p = get_number(sp, origin, "r_r_p");
        if (sp.contains("r_r_s")) s.r_r_s = get_number(sp, origin, "r_r_s");
        if (sp.contains("r_i_p")) s.r_i_p = get_number(sp, origin, "r_i_p");
        if (sp.contains("r_i_s")) s.r_i_s = get_number(sp, origin, "r_i_s");
        if (sp.contains("r_d")) s.r_d = get_number(sp, origin, "r_d");
        if (sp.contains("cell_area")) s.cell_area = get_number(sp, origin, "cell_area");
        if (sp.contains("gamma")) s.gamma = get_number(sp, origin, "gamma");
        if (sp.contains("xi")) s.xi = get_number(sp, origin, "xi");
        if (!s.cell_area && !s.gamma)
            fail(origin, "'spatial' needs 'cell_area' or 'gamma'");
        if (s.cell_area && s.gamma) {
            const double derived = M_PI * s.r_i_s * s.r_i_s / *s.cell_area;
            if (std::abs(derived - *s.gamma) > 1e-9)
                fail(origin, "'spatial.gamma' (" + std::to_string(*s.gamma) +
                                 ") inconsistent with cell_area (implies gamma=" +
                                 std::to_string(derived) + ")");
        }
        cfg.spatial = s;
    }

    if (root.contains("detector")) {
        const json& de = root["detector"];
        check_keys(de, origin, "detector.", {"alpha", "beta", "f0"});
        ScenarioConfig::Detector d;
        d.alpha = get_number(de, origin, "alpha");
        d.beta = get_number(de, origin, "beta");
        if (de.contains("f0")) {
            if (de["f0"].is_string()) {
                if (de["f0"].get<std::string>() != "optimize")
                    fail(origin, "'detector.f0' must be a number or \"optimize\"");
                d.optimize_f0 = true;
            } else {
                d.f0 = get_number(de, origin, "f0");
            }
        }
        cfg.detector = d;
    }

    if (root.contains("simulation")) {
        const json& si = root["simulation"];
        check_keys(si, origin, "simulation.", {"slots", "seed", "shards", "kind"});
        if (si.contains("slots"))
            cfg.slots = std::uint64_t(get_number(si, origin, "slots"));
        if (si.contains("seed"))
            cfg.seed = std::uint64_t(get_number(si, origin, "seed"));
        if (si.contains("shards"))
            cfg.shards = int(get_number(si, origin, "shards"));
        if (si.contains("kind")) {
            const std::string k = si["kind"].get<std::string>();
            if (k == "aloha") cfg.sim_kind = SimKind::aloha;
            else if (k == "csma") cfg.sim_kind = SimKind::csma;
            else if (k == "spatial") cfg.sim_kind = SimKind::spatial;
            else fail(origin, "'simulation.kind' must be aloha, csma or spatial");
        }
        if (cfg.slots < 1) fail(origin, "'simulation.slots' must be >= 1");
        if (cfg.shards < 1) fail(origin, "'simulation.shards' must be >= 1");
    }

    // cross-checks that do not need the heavier domain constructors
    make_channels(cfg);
    if (cfg.s < 1 || cfg.s > int(cfg.widths.size()))
        fail(origin, "'scheme.s' must satisfy 1 <= s <= channel count");
    return cfg;
}

ChannelSet make_channels(const ScenarioConfig& cfg) {
    return ChannelSet(cfg.widths, cfg.thetas, cfg.rate_factor);
}

SensingScheme make_scheme(const ScenarioConfig& cfg, const ChannelSet& cs) {
    switch (cfg.scheme_kind) {
        case SchemeKind::heuristic_single:
            return heuristic_single(cs);
        case SchemeKind::heuristic_multi:
            return heuristic_multi(cs, enumerate_groups(cs.size(), cfg.s));
        case SchemeKind::optimal: {
            if (cfg.detector && (cfg.detector->alpha > 0.0 || cfg.detector->beta < 1.0)) {
                ErrorAwareOptions opt;
                const DetectorModel det(cfg.detector->alpha, cfg.detector->beta,
                                        cfg.detector->optimize_f0 ? 1.0
                                                                  : cfg.detector->f0);
                const double xi = cfg.spatial ? cfg.spatial->xi : 0.2;
                auto rep = optimal_with_errors(
                    cs, enumerate_groups(cs.size(), cfg.s), cfg.m, det, xi, opt);
                return rep.scheme;
            }
            if (cfg.s == 1) return optimal_single(cs, cfg.m).scheme;
            return optimal_multi(cs, enumerate_groups(cs.size(), cfg.s), cfg.m)
                .scheme;
        }
        case SchemeKind::explicit_: {
            auto cat = std::make_shared<GroupCatalog>(cs.size(), cfg.s,
                                                      cfg.explicit_groups);
            return SensingScheme(cat, cfg.explicit_probs);
        }
    }
    throw ValidationError("unreachable scheme kind");
}

SpatialConfig make_spatial(const ScenarioConfig& cfg) {
    if (!cfg.spatial)
        throw ValidationError("this command needs a 'spatial' block in the config");
    const auto& s = *cfg.spatial;
    const double rd = s.r_d.value_or(0.0);
    if (s.cell_area)
        return SpatialConfig::with_cell_area(s.lambda, s.r_r_p, s.r_r_s, s.r_i_p,
                                             s.r_i_s, rd, *s.cell_area, s.xi);
    return SpatialConfig::with_gamma(s.lambda, s.r_r_p, s.r_r_s, s.r_i_p, s.r_i_s,
                                     rd, *s.gamma, s.xi);
}

DetectorModel make_detector(const ScenarioConfig& cfg) {
    if (!cfg.detector) return DetectorModel(0.0, 1.0, 1.0);
    return DetectorModel(cfg.detector->alpha, cfg.detector->beta,
                         cfg.detector->f0);
}

std::vector<double> thetas_for_rho(int n, double rho, std::uint64_t seed) {
    if (n < 1) throw ValidationError("thetas_for_rho: n must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw ValidationError("thetas_for_rho: rho must lie in [0,1]");
    SplitMix64 g(mix64(seed + 0x7e7a5));
    std::vector<double> u(n);
    double mean = 0.0;
    for (double& x : u) {
        x = g.next_double();
        mean += x;
    }
    mean /= n;
    std::vector<double> t(n);
    if (rho <= mean) {
        const double k = mean > 0.0 ? rho / mean : 0.0;
        for (int i = 0; i < n; ++i) t[i] = u[i] * k;
    } else {
        const double k = (1.0 - rho) / (1.0 - mean);
        for (int i = 0; i < n; ++i) t[i] = 1.0 - (1.0 - u[i]) * k;
    }
    return t;
}

std::string ScenarioConfig::describe() const {
    json j;
    j["channels"] = {{"widths", widths},
                     {"thetas", thetas},
                     {"rate_factor", rate_factor}};
    const char* kinds[] = {"heuristic_single", "heuristic_multi", "optimal",
                           "explicit"};
    j["scheme"] = {{"kind", kinds[int(scheme_kind)]}, {"s", s}};
    j["population"] = {{"m", m}, {"q", q}};
    if (m_range)
        j["population"]["m_range"] = {{"from", m_range->from},
                                      {"to", m_range->to},
                                      {"step", m_range->step}};
    if (spatial) {
        j["spatial"] = {{"lambda", spatial->lambda}, {"r_r_p", spatial->r_r_p},
                        {"r_r_s", spatial->r_r_s},   {"r_i_p", spatial->r_i_p},
                        {"r_i_s", spatial->r_i_s},   {"xi", spatial->xi}};
        if (spatial->r_d) j["spatial"]["r_d"] = *spatial->r_d;
        if (spatial->cell_area) j["spatial"]["cell_area"] = *spatial->cell_area;
        if (spatial->gamma) j["spatial"]["gamma"] = *spatial->gamma;
    }
    if (detector) {
        j["detector"] = {{"alpha", detector->alpha}, {"beta", detector->beta}};
        if (detector->optimize_f0)
            j["detector"]["f0"] = "optimize";
        else
            j["detector"]["f0"] = detector->f0;
    }
    const char* sims[] = {"aloha", "csma", "spatial"};
    j["simulation"] = {{"slots", slots},
                       {"seed", seed},
                       {"shards", shards},
                       {"kind", sims[int(effective_sim_kind())]}};
    return j.dump(2);
}

} // namespace cogmac
