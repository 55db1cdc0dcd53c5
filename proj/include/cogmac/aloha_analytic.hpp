#pragma once

#include <cstdint>
#include <vector>

#include "cogmac/channel_model.hpp"
#include "cogmac/sensing_scheme.hpp"

namespace cogmac {

struct AlohaParams {
    int m;    // secondary population
    double q; // per-slot transmit probability
    AlohaParams(int m_, double q_);
};

/// x^k for integer k >= 0, with 0^0 = 1.
double ipow(double x, long k);

/// Binomial pmf weights w_i = C(m,i) q^i (1-q)^{m-i} for i = 0..m.
/// Uses log-space evaluation for m > 1000 to avoid underflow.
std::vector<double> binomial_pmf(int m, double q);

/// Throughput of one secondary user given k users are transmitting:
/// sum_j (1-theta_j) C_j P_j (1-P_j)^(k-1). Requires a singleton scheme.
double single_user_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                              int k);

/// Expected total secondary throughput under slotted ALOHA, computed as the
/// binomial mixture sum_{i=1..m} C(m,i) q^i (1-q)^{m-i} i C_single|i.
/// Covers the q = 1 and n = 1 cases without special treatment.
double network_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                          const AlohaParams& p);

/// Single-line reductions of the mixture, kept for side-by-side comparison.
/// `identity` follows from the binomial identity and matches the mixture
/// exactly; `damped` carries an extra (1-P_j) factor and does not.
enum class AlohaClosedForm { identity, damped };
double closed_form_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                              const AlohaParams& p, AlohaClosedForm form);

/// Exact expectation by exhaustive enumeration of user states; the oracle for
/// network_throughput. Work is capped by n^m * 2^m <= cap.
double brute_force_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                              const AlohaParams& p,
                              std::uint64_t cap = 10000000);

/// Real-valued stationary point -1/ln(1 - q/n) of the symmetric-channel
/// throughput in m. Callers round to the better integer neighbor.
double symmetric_optimal_m(int n, double q);

struct SweepPoint {
    int m;
    double value;
};

/// network_throughput for m = m_from..m_to, optionally divided by C_t.
std::vector<SweepPoint> throughput_sweep(const ChannelSet& cs,
                                         const SensingScheme& scheme, double q,
                                         int m_from, int m_to,
                                         bool normalized = false);

} // namespace cogmac
