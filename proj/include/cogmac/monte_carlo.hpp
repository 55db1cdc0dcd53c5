#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cogmac/aloha_analytic.hpp"
#include "cogmac/channel_model.hpp"
#include "cogmac/csma_optimizer.hpp"
#include "cogmac/sensing_scheme.hpp"
#include "cogmac/spatial_model.hpp"

namespace cogmac {

/// Monte Carlo point estimate with normal-approximation standard error and
/// seed provenance.
struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    std::string label;
};

/// Per-slot sample moments; merging shards in slot order reproduces the
/// single-run estimate up to floating rounding.
struct Accumulator {
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t n = 0;
    void add(double v) {
        sum += v;
        sumsq += v * v;
        ++n;
    }
    void merge(const Accumulator& o) {
        sum += o.sum;
        sumsq += o.sumsq;
        n += o.n;
    }
    double mean() const { return n ? sum / double(n) : 0.0; }
    double variance() const;
    double std_error() const;
    SimEstimate estimate(std::uint64_t seed, std::string label) const;
};

struct SimRun {
    std::uint64_t slots;
    std::uint64_t seed;
    int shards = 1;
};

/// Slots needed to bring the relative standard error of `pilot` down to
/// `target_rel_err`.
std::uint64_t recommended_slots(const SimEstimate& pilot, double target_rel_err);

struct AlohaSimResult {
    SimEstimate throughput;
};

/// Slotted-ALOHA ground truth: per slot, channels go busy independently,
/// users transmit with probability q on a channel drawn from the scheme, and
/// a user scores C_j iff its channel is idle and no other active user chose it.
AlohaSimResult simulate_aloha_datalink(const ChannelSet& cs,
                                       const SensingScheme& scheme,
                                       const AlohaParams& p, const SimRun& run);

struct CsmaSimResult {
    SimEstimate throughput;
    std::vector<SimEstimate> collision_rate;   // per channel, busy & accessed
    std::vector<SimEstimate> utilized_fraction; // per channel, idle & seized
};

/// CSMA/CA with detection errors: users sense every channel of a drawn group,
/// detection outcomes follow the ROC, detected-idle channels are accessed
/// with probability f0 each, and one accessor per channel wins the contention.
/// The winner scores C_j iff the channel is truly idle; a busy channel with
/// any accessor records one collision event.
CsmaSimResult simulate_csma(const ChannelSet& cs, const SensingScheme& scheme,
                            int m, const DetectorModel& det, const SimRun& run);

struct SpatialScenario {
    SpatialConfig cfg;
    ChannelSet cs;
    SensingScheme scheme; // singleton
    AlohaParams params;
};

struct SpatialSimResult {
    SimEstimate throughput;
    SimEstimate collision_total;                // events per slot, all channels
    std::vector<SimEstimate> collision_count;   // events per slot, per channel
    std::vector<SimEstimate> p_cc_conditional;  // Pr(no tx in R_D | rx in R_I^s)
    std::vector<SimEstimate> opportunity_rate;  // Pr(no tx within R_D)
    SimEstimate success_rate;                   // successes per transmission
    /// (successes, active users) keyed by (channel, active co-channel count
    /// K): the per-user success frequency conditioned the way the analytic
    /// P_s|(j,K) is, with deferrals counting as failures.
    std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> success_by_k;
};

/// Cell-based scenario on a square torus of area |Omega|: per slot and
/// channel, primary transmitters form a Poisson field of rate lambda theta_j
/// with receivers uniform in their transmission disc; secondary users sense
/// their drawn channel (opportunity iff no same-channel transmitter within
/// r_d), transmit with probability q, and collision/success events follow the
/// disc definitions.
SpatialSimResult simulate_spatial(const SpatialScenario& sc, const SimRun& run);

} // namespace cogmac
