#include "cogmac/spatial_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "cogmac/quadrature.hpp"

namespace cogmac {

namespace {

void validate_common(double lambda, double r_r_p, double r_r_s, double r_i_p,
                     double r_i_s, double r_d, double xi) {
    if (!(lambda > 0.0)) throw ValidationError("spatial: lambda must be positive");
    if (!(r_r_p > 0.0 && r_r_s > 0.0 && r_i_p > 0.0 && r_i_s > 0.0))
        throw ValidationError("spatial: all ranges must be positive");
    if (!(r_d >= 0.0)) throw ValidationError("spatial: r_d must be nonnegative");
    if (!(xi >= 0.0 && xi <= 1.0))
        throw ValidationError("spatial: xi must lie in [0,1]");
}

double clamp01(double v, ClampStats* stats) {
    if (v < 0.0) {
        if (stats) ++stats->clamped_low;
        return 0.0;
    }
    if (v > 1.0) {
        if (stats) ++stats->clamped_high;
        return 1.0;
    }
    return v;
}

} // namespace

SpatialConfig SpatialConfig::with_cell_area(double lambda, double r_r_p,
                                            double r_r_s, double r_i_p,
                                            double r_i_s, double r_d,
                                            double cell_area, double xi) {
    validate_common(lambda, r_r_p, r_r_s, r_i_p, r_i_s, r_d, xi);
    if (!(cell_area > 0.0))
        throw ValidationError("spatial: cell_area must be positive");
    SpatialConfig c{lambda, r_r_p, r_r_s, r_i_p, r_i_s,
                    std::min(r_d, r_i_s + r_r_p), cell_area,
                    M_PI * r_i_s * r_i_s / cell_area, xi};
    if (!(c.gamma > 0.0 && c.gamma < 1.0))
        throw ValidationError(
            "spatial: derived gamma = pi r_i_s^2 / cell_area must lie in (0,1)");
    return c;
}

SpatialConfig SpatialConfig::with_gamma(double lambda, double r_r_p,
                                        double r_r_s, double r_i_p, double r_i_s,
                                        double r_d, double gamma, double xi) {
    validate_common(lambda, r_r_p, r_r_s, r_i_p, r_i_s, r_d, xi);
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ValidationError("spatial: gamma must lie in (0,1)");
    SpatialConfig c{lambda, r_r_p, r_r_s, r_i_p, r_i_s,
                    std::min(r_d, r_i_s + r_r_p),
                    M_PI * r_i_s * r_i_s / gamma, gamma, xi};
    return c;
}

SpatialConfig SpatialConfig::with_detection_radius(double new_r_d) const {
    SpatialConfig c = *this;
    c.r_d = std::clamp(new_r_d, 0.0, detection_bound());
    return c;
}

AnnulusWeight annulus_weight(const SpatialConfig& cfg) {
    const double hi = cfg.detection_bound();
    const double s_tilde = hi * hi - cfg.r_d * cfg.r_d;
    if (s_tilde <= 0.0) return {0.0, 1.0};
    const double disc_p = M_PI * cfg.r_r_p * cfg.r_r_p;
    auto integrand = [&](double r) {
        return (1.0 - lens_area(cfg.r_r_p, cfg.r_i_s, r) / disc_p) * r;
    };
    const double tol = std::max(1e-8 * 0.5 * s_tilde, 1e-14);
    const double integral = integrate_adaptive(integrand, cfg.r_d, hi, tol);
    const double s_bar = std::clamp(2.0 / s_tilde * integral, 0.0, 1.0);
    return {s_tilde, s_bar};
}

double p_cc(const SpatialConfig& cfg, double theta_j, ClampStats* stats) {
    if (!(theta_j >= 0.0 && theta_j <= 1.0))
        throw ValidationError("p_cc: theta must lie in [0,1]");
    if (theta_j == 0.0) {
        if (stats) ++stats->degenerate;
        return 0.0;
    }
    const double l = cfg.lambda * theta_j * M_PI;
    const double denom = 1.0 - std::exp(-l * cfg.r_i_s * cfg.r_i_s);
    if (!(denom > 0.0))
        throw ValidationError("p_cc: conditioning event has probability zero");
    const AnnulusWeight w = annulus_weight(cfg);
    const double miss = 1.0 - std::exp(-l * w.s_tilde * (1.0 - w.s_bar));
    const double v = std::exp(-l * cfg.r_d * cfg.r_d) / denom * miss;
    return clamp01(v, stats);
}

double p_collision_channel(const SpatialConfig& cfg, const ChannelSet& cs,
                           const SensingScheme& scheme, const AlohaParams& p,
                           int j, ClampStats* stats) {
    if (!scheme.is_singleton())
        throw ValidationError("p_collision_channel: requires a singleton scheme");
    if (j < 0 || j >= cs.size())
        throw ValidationError("p_collision_channel: channel index out of range");
    const double v = p.m * p.q * scheme.prob(j) * p_cc(cfg, cs.theta(j), stats);
    return clamp01(v, stats);
}

double solve_detection_radius(const SpatialConfig& cfg, const ChannelSet& cs,
                              const SensingScheme& scheme, const AlohaParams& p,
                              double tol) {
    if (!scheme.is_singleton())
        throw ValidationError("solve_detection_radius: requires a singleton scheme");
    if (p.q == 0.0) return 0.0;
    const double budget = cs.size() * cfg.xi / (p.m * p.q);
    auto excess = [&](double rd) {
        const SpatialConfig c = cfg.with_detection_radius(rd);
        double s = 0.0;
        for (int j = 0; j < cs.size(); ++j)
            if (cs.theta(j) > 0.0) s += scheme.prob(j) * p_cc(c, cs.theta(j));
        return s - budget;
    };
    if (excess(0.0) <= 0.0) return 0.0;
    double lo = 0.0, hi = cfg.detection_bound();
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

SuccessModel::SuccessModel(const SpatialConfig& cfg, double theta,
                           double quad_tol) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw ValidationError("SuccessModel: theta must lie in [0,1]");
    const double l = cfg.lambda * theta;
    const double rd = cfg.r_d, rip = cfg.r_i_p, ris = cfg.r_i_s;
    const double rrs = cfg.r_r_s;
    gamma_ = cfg.gamma;

    term1_ = std::exp(-l * (M_PI * (rd * rd + rip * rip) -
                            lens_area(rd, rip, rrs)));

    // P_III, one interferer: radial average of the void probability of the
    // receiver's interference disc minus what the interferer's detector rules
    // out.
    {
        auto f = [&](double r) {
            const double area = M_PI * rip * rip - lens_area(rip, rd, r);
            return r * std::exp(-l * area);
        };
        const double tol = std::max(quad_tol * ris * ris / 2.0, 1e-14);
        p3_1_ = 2.0 / (ris * ris) * integrate_adaptive(f, 0.0, ris, tol);
    }

    // P_III, two interferers: triple integral over their polar positions.
    // Where either radius is below rstar the detector disc covers the whole
    // interference disc and the integrand is exactly 1; that part is analytic.
    {
        const double rstar = std::clamp(rd - rip, 0.0, ris);
        const double full = ris * ris / 2.0;
        const double quad_r = (ris * ris - rstar * rstar) / 2.0;
        const double analytic = M_PI * (full * full - quad_r * quad_r);
        double integral = 0.0, err = 0.0;
        if (quad_r > 0.0) {
            auto area_fn = [&](double r1, double r2, double phi) {
                const std::array<Disc, 2> su = {
                    Disc{r1, 0.0, rd},
                    Disc{r2 * std::cos(phi), r2 * std::sin(phi), rd}};
                const Disc base{0.0, 0.0, rip};
                return disc_minus_union_area(base, su);
            };
            double prev = 0.0;
            for (int order : {8, 12, 16, 24, 32}) {
                GaussLegendre gl(order);
                double sum = 0.0;
                for (int a = 0; a < order; ++a) {
                    const double phi = M_PI * 0.5 * (gl.nodes[a] + 1.0);
                    const double wphi = gl.weights[a] * M_PI * 0.5;
                    for (int b = 0; b < order; ++b) {
                        const double r1 =
                            rstar + (ris - rstar) * 0.5 * (gl.nodes[b] + 1.0);
                        const double w1 =
                            gl.weights[b] * (ris - rstar) * 0.5;
                        for (int c = 0; c < order; ++c) {
                            const double r2 =
                                rstar + (ris - rstar) * 0.5 * (gl.nodes[c] + 1.0);
                            const double w2 =
                                gl.weights[c] * (ris - rstar) * 0.5;
                            sum += wphi * w1 * w2 * r1 * r2 *
                                   std::exp(-l * area_fn(r1, r2, phi));
                        }
                    }
                }
                err = std::abs(sum - prev);
                prev = sum;
                integral = sum;
                if (order > 8 && err < quad_tol * M_PI * full * full) break;
            }
            quad_error_ = std::max(quad_error_, err / (M_PI * full * full));
        }
        p3_2_ = (analytic + integral) * 4.0 / (M_PI * ris * ris * ris * ris);
        p3_2_ = std::min(p3_2_, 1.0);
    }

    // P_IV, one interferer: detector void probability of the transmitter's
    // disc minus the regions already known to be empty.
    {
        double integral = 0.0, err = 0.0;
        if (rd > 0.0) {
            auto area_fn = [&](double r, double phi) {
                const std::array<Disc, 2> known = {
                    Disc{0.0, 0.0, rip},
                    Disc{r * std::cos(phi), r * std::sin(phi), rd}};
                const Disc base{-rrs, 0.0, rd};
                return disc_minus_union_area(base, known);
            };
            double prev = 0.0;
            for (int order : {8, 12, 16, 24, 32}) {
                GaussLegendre gl(order);
                double sum = 0.0;
                for (int a = 0; a < order; ++a) {
                    const double phi = M_PI * 0.5 * (gl.nodes[a] + 1.0);
                    const double wphi = gl.weights[a] * M_PI * 0.5;
                    for (int b = 0; b < order; ++b) {
                        const double r = ris * 0.5 * (gl.nodes[b] + 1.0);
                        const double wr = gl.weights[b] * ris * 0.5;
                        sum += wphi * wr * r * std::exp(-l * area_fn(r, phi));
                    }
                }
                err = std::abs(sum - prev);
                prev = sum;
                integral = sum;
                if (order > 8 && err < quad_tol * M_PI * ris * ris * 0.5) break;
            }
            quad_error_ = std::max(quad_error_, err / (M_PI * ris * ris * 0.5));
            p4_1_ = 2.0 / (M_PI * ris * ris) * integral;
        } else {
            p4_1_ = 1.0;
        }
        p4_1_ = std::min(p4_1_, 1.0);
    }

    // P_IV, representative-distance surrogates for two and three-plus
    // interferers.
    p4_2_ = std::exp(-l * (M_PI * rd * rd -
                           lens_area(rd, rd, std::abs(rrs - ris / 2.0))));
    p4_3_ = std::exp(-l * (M_PI * rd * rd -
                           lens_area(rd, rd, std::abs(rrs - ris))));
}

double SuccessModel::operator()(int k, ClampStats* stats) const {
    if (k < 1) throw ValidationError("SuccessModel: k must be >= 1");
    const int k1 = k - 1;
    double interference = 0.0;
    if (k1 >= 1) {
        const double g = gamma_;
        const double w0 = ipow(1.0 - g, k1);
        const double w1 = k1 * g * ipow(1.0 - g, k1 - 1);
        interference += w1 * p3_1_ * p4_1_;
        if (k1 >= 2) {
            const double w2 =
                0.5 * k1 * (k1 - 1.0) * g * g * ipow(1.0 - g, k1 - 2);
            interference += w2 * p3_2_ * p4_2_;
            if (k1 >= 3) {
                const double tail = std::max(0.0, 1.0 - w0 - w1 - w2);
                interference += tail * p4_3_; // p3 is 1 for m >= 3
            }
        }
    }
    return clamp01(term1_ - interference, stats);
}

double p_success(const SpatialConfig& cfg, double theta_j, int k,
                 ClampStats* stats) {
    return SuccessModel(cfg, theta_j)(k, stats);
}

double cell_network_throughput(const SpatialConfig& cfg, const ChannelSet& cs,
                               const SensingScheme& scheme, const AlohaParams& p,
                               ClampStats* stats) {
    if (!scheme.is_singleton())
        throw ValidationError("cell_network_throughput: requires a singleton scheme");
    if (p.q == 0.0) return 0.0;
    const int n = cs.size(), m = p.m;

    // P_s|(j,K) for K = 1..m, models shared across equal thetas.
    std::map<double, SuccessModel> models;
    std::vector<std::vector<double>> ps(n);
    for (int j = 0; j < n; ++j) {
        auto it = models.find(cs.theta(j));
        if (it == models.end())
            it = models.emplace(cs.theta(j), SuccessModel(cfg, cs.theta(j))).first;
        ps[j].resize(m + 1, 0.0);
        for (int k = 1; k <= m; ++k) ps[j][k] = it->second(k, stats);
    }

    // C_s1|l = sum_j sum_K C(l,K) P_j^K (1-P_j)^(l-K) P_s|(j,K) C_j
    std::vector<double> cs1(m + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        const double pj = scheme.prob(j);
        const double cj = cs.rate(j);
        if (pj == 0.0) continue;
        for (int l = 1; l <= m; ++l) {
            double acc = 0.0;
            if (pj < 1.0 && ipow(1.0 - pj, l) > 0.0) {
                // binomial weights over K via the usual ratio recurrence
                double w = ipow(1.0 - pj, l); // K = 0
                for (int k = 1; k <= l; ++k) {
                    w *= (double(l - k + 1) / double(k)) * (pj / (1.0 - pj));
                    acc += w * ps[j][k];
                }
            } else {
                const std::vector<double> w = binomial_pmf(l, pj);
                for (int k = 1; k <= l; ++k) acc += w[k] * ps[j][k];
            }
            cs1[l] += acc * cj;
        }
    }

    const std::vector<double> wq = binomial_pmf(m, p.q);
    double c_s = 0.0;
    for (int l = 1; l <= m; ++l) c_s += wq[l] * l * cs1[l];
    return c_s;
}

double simplified_cell_throughput(double r, double lambda, double theta, int n,
                                  int m, double q, double gamma, double c) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ValidationError("simplified_cell_throughput: gamma must lie in (0,1)");
    if (n < 1 || m < 1)
        throw ValidationError("simplified_cell_throughput: n and m must be >= 1");
    if (!(q >= 0.0 && q <= 1.0))
        throw ValidationError("simplified_cell_throughput: q must lie in [0,1]");
    const double pre =
        std::exp(-3.0 * M_PI * lambda * theta * r * r) * c * q / (1.0 - gamma);
    const double nd = n;
    return pre * nd * m *
           ((1.0 - gamma / nd) * ipow(1.0 - q * gamma / nd, m - 1) -
            (1.0 - 1.0 / nd) * ipow(1.0 - q / nd, m - 1));
}

} // namespace cogmac
