#include "cogmac/aloha_analytic.hpp"

#include <cmath>
#include <string>

namespace cogmac {

AlohaParams::AlohaParams(int m_, double q_) : m(m_), q(q_) {
    if (m < 1) throw ValidationError("aloha: m must be >= 1");
    if (!(q >= 0.0 && q <= 1.0))
        throw ValidationError("aloha: q must lie in [0,1]");
}

double ipow(double x, long k) {
    double r = 1.0;
    for (double b = x; k > 0; k >>= 1, b *= b)
        if (k & 1) r *= b;
    return r;
}

std::vector<double> binomial_pmf(int m, double q) {
    std::vector<double> w(m + 1, 0.0);
    if (q <= 0.0) { w[0] = 1.0; return w; }
    if (q >= 1.0) { w[m] = 1.0; return w; }
    if (m <= 1000 && ipow(1.0 - q, m) > 0.0) {
        w[0] = ipow(1.0 - q, m);
        for (int i = 0; i < m; ++i)
            w[i + 1] = w[i] * (double(m - i) / double(i + 1)) * (q / (1.0 - q));
    } else {
        const double lq = std::log(q), l1q = std::log1p(-q);
        const double lgm = std::lgamma(m + 1.0);
        for (int i = 0; i <= m; ++i) {
            double lw = lgm - std::lgamma(i + 1.0) - std::lgamma(m - i + 1.0) +
                        i * lq + (m - i) * l1q;
            w[i] = std::exp(lw);
        }
    }
    return w;
}

namespace {

void require_singleton(const SensingScheme& scheme, const char* what) {
    if (!scheme.is_singleton())
        throw ValidationError(std::string(what) +
                              ": requires a singleton (s=1, full) scheme");
}

} // namespace

double single_user_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                              int k) {
    require_singleton(scheme, "single_user_throughput");
    if (k < 1) throw ValidationError("single_user_throughput: k must be >= 1");
    double c = 0.0;
    for (int j = 0; j < cs.size(); ++j) {
        const double pj = scheme.prob(j);
        c += cs.residual_rate(j) * pj * ipow(1.0 - pj, k - 1);
    }
    return c;
}

double network_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                          const AlohaParams& p) {
    require_singleton(scheme, "network_throughput");
    const std::vector<double> w = binomial_pmf(p.m, p.q);
    // Mixture sum_{i>=1} w_i i sum_j r_j P_j (1-P_j)^(i-1), channel-major so
    // the inner power is incremental.
    double c_s = 0.0;
    for (int j = 0; j < cs.size(); ++j) {
        const double pj = scheme.prob(j);
        const double base = 1.0 - pj;
        double pw = 1.0, inner = 0.0;
        for (int i = 1; i <= p.m; ++i) {
            inner += w[i] * i * pw;
            pw *= base;
        }
        c_s += cs.residual_rate(j) * pj * inner;
    }
    return c_s;
}

double closed_form_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                              const AlohaParams& p, AlohaClosedForm form) {
    require_singleton(scheme, "closed_form_throughput");
    double sum = 0.0;
    for (int j = 0; j < cs.size(); ++j) {
        const double pj = scheme.prob(j);
        double term = cs.residual_rate(j) * pj * ipow(1.0 - p.q * pj, p.m - 1);
        if (form == AlohaClosedForm::damped) term *= 1.0 - pj;
        sum += term;
    }
    return p.q * p.m * sum;
}

namespace {

// Recursive enumeration: user u is inactive (weight 1-q) or active on channel
// c (weight q P_c). Expected score tallied once all users are assigned.
struct BruteForce {
    const ChannelSet& cs;
    const SensingScheme& scheme;
    double q;
    int m;
    std::vector<int> chooser_count;
    int active = 0;

    double recurse(int u, double weight) {
        if (weight == 0.0) return 0.0;
        if (u == m) {
            double v = 0.0;
            for (int j = 0; j < cs.size(); ++j)
                if (chooser_count[j] == 1) v += cs.residual_rate(j);
            return weight * v;
        }
        double total = recurse(u + 1, weight * (1.0 - q));
        for (int j = 0; j < cs.size(); ++j) {
            ++chooser_count[j];
            total += recurse(u + 1, weight * q * scheme.prob(j));
            --chooser_count[j];
        }
        return total;
    }
};

} // namespace

double brute_force_throughput(const ChannelSet& cs, const SensingScheme& scheme,
                              const AlohaParams& p, std::uint64_t cap) {
    require_singleton(scheme, "brute_force_throughput");
    double work = 1.0;
    for (int u = 0; u < p.m; ++u) work *= 2.0 * cs.size();
    if (work > static_cast<double>(cap))
        throw ValidationError("brute_force_throughput: n^m * 2^m exceeds cap of " +
                              std::to_string(cap));
    BruteForce bf{cs, scheme, p.q, p.m, std::vector<int>(cs.size(), 0)};
    return bf.recurse(0, 1.0);
}

double symmetric_optimal_m(int n, double q) {
    if (n < 1) throw ValidationError("symmetric_optimal_m: n must be >= 1");
    if (!(q > 0.0 && q < 1.0) || q >= static_cast<double>(n))
        throw ValidationError("symmetric_optimal_m: q must lie in (0,1) with q < n");
    return -1.0 / std::log1p(-q / n);
}

std::vector<SweepPoint> throughput_sweep(const ChannelSet& cs,
                                         const SensingScheme& scheme, double q,
                                         int m_from, int m_to, bool normalized) {
    if (m_from < 1 || m_to < m_from)
        throw ValidationError("throughput_sweep: need 1 <= m_from <= m_to");
    const double scale = normalized ? cs.residual_capacity() : 1.0;
    std::vector<SweepPoint> out;
    out.reserve(m_to - m_from + 1);
    for (int m = m_from; m <= m_to; ++m) {
        double v = network_throughput(cs, scheme, AlohaParams(m, q));
        out.push_back({m, scale > 0.0 ? v / scale : 0.0});
    }
    return out;
}

} // namespace cogmac
