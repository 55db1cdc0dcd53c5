#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogmac/channel_model.hpp"
#include "cogmac/csma_optimizer.hpp"
#include "cogmac/sensing_scheme.hpp"
#include "cogmac/spatial_model.hpp"

namespace cogmac {

struct IntRange {
    int from = 1, to = 1, step = 1;
};

enum class SchemeKind { heuristic_single, heuristic_multi, optimal, explicit_ };
enum class SimKind { aloha, csma, spatial };

/// Parsed scenario file. Optional blocks stay unset; defaults are applied and
/// echoed back by describe().
struct ScenarioConfig {
    // channels
    std::vector<double> widths;
    std::vector<double> thetas;
    double rate_factor = 1.0;
    // scheme
    SchemeKind scheme_kind = SchemeKind::heuristic_single;
    int s = 1;
    std::vector<std::vector<int>> explicit_groups;
    std::vector<double> explicit_probs;
    // population
    int m = 1;
    std::optional<IntRange> m_range;
    double q = 1.0;
    // spatial (optional)
    struct Spatial {
        double lambda = 1.0;
        double r_r_p = 1.0, r_r_s = 1.0, r_i_p = 1.0, r_i_s = 1.0;
        std::optional<double> r_d;
        std::optional<double> cell_area;
        std::optional<double> gamma;
        double xi = 0.2;
    };
    std::optional<Spatial> spatial;
    // detector (optional)
    struct Detector {
        double alpha = 0.0;
        double beta = 1.0;
        double f0 = 1.0;
        bool optimize_f0 = false; // pick f0 jointly with the scheme
    };
    std::optional<Detector> detector;
    // simulation
    std::uint64_t slots = 100000;
    std::uint64_t seed = 1;
    int shards = 1;
    std::optional<SimKind> sim_kind; // inferred from blocks when unset

    std::string source_text; // raw file contents, hashed into manifests

    SimKind effective_sim_kind() const;
    std::string describe() const; // defaults applied, for echo/manifest
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin);

ChannelSet make_channels(const ScenarioConfig& cfg);
SensingScheme make_scheme(const ScenarioConfig& cfg, const ChannelSet& cs);
SpatialConfig make_spatial(const ScenarioConfig& cfg);
DetectorModel make_detector(const ScenarioConfig& cfg);

/// Channel busy probabilities hitting a target utilization rho exactly for
/// equal-width channels: i.i.d. uniform draws affinely rescaled toward 0 or 1.
std::vector<double> thetas_for_rho(int n, double rho, std::uint64_t seed);

} // namespace cogmac
