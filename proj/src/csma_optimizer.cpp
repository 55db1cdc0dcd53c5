#include "cogmac/csma_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cogmac/aloha_analytic.hpp" // ipow

namespace cogmac {

DetectorModel::DetectorModel(double alpha_, double beta_, double f0_)
    : alpha(alpha_), beta(beta_), f0(f0_) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ValidationError("detector: alpha must lie in [0,1]");
    if (!(beta > 0.0 && beta <= 1.0))
        throw ValidationError("detector: beta must lie in (0,1]");
    if (!(f0 > 0.0 && f0 <= 1.0))
        throw ValidationError("detector: f0 must lie in (0,1]");
}

double unutilized_capacity(const ChannelSet& cs, const SensingScheme& scheme,
                           int m) {
    if (m < 1) throw ValidationError("unutilized_capacity: m must be >= 1");
    if (scheme.catalog().n() != cs.size())
        throw ValidationError("unutilized_capacity: catalog channel count mismatch");
    double lost = 0.0;
    for (int i = 0; i < cs.size(); ++i)
        lost += cs.residual_rate(i) * ipow(1.0 - scheme.coverage(i), m);
    return lost;
}

namespace {

// Euclidean projection onto the probability simplex (sort and threshold).
void simplex_project(std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double running = 0.0, tau = 0.0;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < n; ++k) {
        running += u[k];
        const double t = (running - 1.0) / double(k + 1);
        if (u[k] - t > 0.0) {
            tau = t;
            rank = k + 1;
        }
    }
    if (rank == 0) tau = (running - 1.0) / double(n);
    for (double& x : v) x = std::max(0.0, x - tau);
}

std::vector<double> coverage_of(const GroupCatalog& cat,
                                const std::vector<double>& p) {
    std::vector<double> cov(cat.n(), 0.0);
    for (std::size_t j = 0; j < cat.kappa(); ++j) {
        const double pj = p[j];
        if (pj == 0.0) continue;
        for (int ch : cat.group(j)) cov[ch] += pj;
    }
    for (double& c : cov) c = std::min(c, 1.0);
    return cov;
}

double norm2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double dot_diff(const std::vector<double>& g, const std::vector<double>& a,
                const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * (a[i] - b[i]);
    return s;
}

// Simplex multiplier estimate and stationarity residual for min f s.t. P in
// simplex: active coordinates share g_j = -nu; inactive have g_j >= -nu.
void kkt_from_gradient(const std::vector<double>& p,
                       const std::vector<double>& g, double& nu,
                       double& residual) {
    double wsum = 0.0, gsum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 1e-12) {
            wsum += p[j];
            gsum += p[j] * g[j];
        }
    }
    nu = wsum > 0.0 ? -gsum / wsum : 0.0;
    residual = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        residual = std::max(residual, p[j] * std::abs(g[j] + nu));
        residual = std::max(residual, std::max(0.0, -(g[j] + nu)));
    }
}

} // namespace

SolverReport optimal_single(const ChannelSet& cs, int m) {
    if (m < 2) throw ValidationError("optimal_single: m must be >= 2");
    const int n = cs.size();
    auto cat = singleton_catalog(n);

    std::vector<double> c(n);
    double cmax = 0.0;
    int active = 0;
    for (int j = 0; j < n; ++j) {
        c[j] = cs.residual_rate(j);
        cmax = std::max(cmax, c[j]);
        if (c[j] > 0.0) ++active;
    }
    if (active == 0) {
        SolverReport r{SensingScheme(cat, std::vector<double>(n, 1.0 / n))};
        r.status = SolveStatus::infeasible;
        return r;
    }

    const double expo = 1.0 / (m - 1.0);
    auto probs_at = [&](double nu, std::vector<double>& p) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            p[j] = c[j] > 0.0
                       ? std::max(0.0, 1.0 - std::pow(nu / (m * c[j]), expo))
                       : 0.0;
            sum += p[j];
        }
        return sum;
    };

    std::vector<double> p(n);
    double lo = 0.0, hi = m * cmax;
    double nu = 0.0, sum = probs_at(0.0, p);
    int it = 0;
    for (; it < 500; ++it) {
        if (std::abs(sum - 1.0) <= 1e-10) break;
        const double mid = 0.5 * (lo + hi);
        sum = probs_at(mid, p);
        nu = mid;
        if (sum > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-16 * (1.0 + hi)) { sum = probs_at(hi, p); nu = hi; break; }
    }
    // land on the simplex exactly
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= total;

    SolverReport r{SensingScheme(cat, p)};
    r.nu = nu;
    r.iterations = it;
    r.objective = unutilized_capacity(cs, r.scheme, m);
    double resid = std::abs(total - 1.0);
    for (int j = 0; j < n; ++j) {
        const double pj = r.scheme.prob(j);
        const double gj = m * c[j] * ipow(1.0 - pj, m - 1);
        resid = std::max(resid, pj * std::abs(nu - gj));
        resid = std::max(resid, std::max(0.0, gj - nu));
    }
    r.kkt_residual = resid;
    r.status = SolveStatus::optimal;
    return r;
}

SolverReport optimal_multi(const ChannelSet& cs,
                           std::shared_ptr<const GroupCatalog> cat, int m,
                           const PgdOptions& opt) {
    if (m < 2) throw ValidationError("optimal_multi: m must be >= 2");
    if (!cat) throw ValidationError("optimal_multi: null catalog");
    if (cat->n() != cs.size())
        throw ValidationError("optimal_multi: catalog channel count mismatch");
    const std::size_t kappa = cat->kappa();
    const int n = cs.size();

    std::vector<double> c(n);
    for (int i = 0; i < n; ++i) c[i] = cs.residual_rate(i);

    auto objective = [&](const std::vector<double>& p) {
        const auto cov = coverage_of(*cat, p);
        double f = 0.0;
        for (int i = 0; i < n; ++i) f += c[i] * ipow(1.0 - cov[i], m);
        return f;
    };
    auto gradient = [&](const std::vector<double>& p, std::vector<double>& g) {
        const auto cov = coverage_of(*cat, p);
        std::vector<double> w(n);
        for (int i = 0; i < n; ++i) w[i] = -m * c[i] * ipow(1.0 - cov[i], m - 1);
        for (std::size_t j = 0; j < kappa; ++j) {
            double s = 0.0;
            for (int ch : cat->group(j)) s += w[ch];
            g[j] = s;
        }
    };

    std::vector<double> p(kappa, 1.0 / double(kappa));
    std::vector<double> g(kappa), cand(kappa), prev_p, prev_g;
    double f = objective(p);
    gradient(p, g);

    SolverReport r{SensingScheme(cat, p)};
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::abs(x));
    double t = gmax > 0.0 ? 1.0 / gmax : 1.0;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        // projected-gradient stationarity at unit step
        cand = p;
        for (std::size_t j = 0; j < kappa; ++j) cand[j] -= g[j];
        simplex_project(cand);
        const double pg = norm2(p, cand);
        if (pg <= opt.pg_tol) break;

        if (!prev_p.empty()) {
            // Barzilai-Borwein step seed
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < kappa; ++j) {
                const double ds = p[j] - prev_p[j];
                const double dg = g[j] - prev_g[j];
                num += ds * ds;
                den += ds * dg;
            }
            if (den > 0.0) t = std::clamp(num / den, 1e-12, 1e12);
        }
        double fnew = f;
        for (int bt = 0; bt < 60; ++bt) {
            cand = p;
            for (std::size_t j = 0; j < kappa; ++j) cand[j] -= t * g[j];
            simplex_project(cand);
            fnew = objective(cand);
            const double lin = dot_diff(g, cand, p);
            const double dist = norm2(cand, p);
            if (fnew <= f + lin + dist * dist / (2.0 * t) + 1e-15) break;
            t *= 0.5;
        }
        prev_p = p;
        prev_g = g;
        if (fnew > f)
            r.max_objective_increase = std::max(r.max_objective_increase, fnew - f);
        const double df = f - fnew;
        p = cand;
        f = fnew;
        gradient(p, g);
        if (df >= 0.0 && df <= opt.obj_tol) { ++it; break; }
    }

    r.scheme = SensingScheme(cat, p);
    r.objective = f;
    r.iterations = it;
    r.status = it >= opt.max_iter ? SolveStatus::max_iter : SolveStatus::optimal;
    kkt_from_gradient(p, g, r.nu, r.kkt_residual);
    return r;
}

namespace {

struct ErrorAwareProblem {
    const ChannelSet& cs;
    const GroupCatalog& cat;
    int m;
    DetectorModel det;
    double xi;
    ErrorObjective mode;
    std::vector<double> c; // residual rates

    ErrorAwareProblem(const ChannelSet& cs_, const GroupCatalog& cat_, int m_,
                      const DetectorModel& det_, double xi_, ErrorObjective mode_)
        : cs(cs_), cat(cat_), m(m_), det(det_), xi(xi_), mode(mode_),
          c(cs_.size()) {
        for (int i = 0; i < cs.size(); ++i) c[i] = cs.residual_rate(i);
    }

    bool convexity_family_active() const { return det.beta < 1.0; }

    double objective(const std::vector<double>& cov, double f0) const {
        const double beta = det.beta;
        double z = 0.0;
        if (mode == ErrorObjective::sum_of_cases) {
            const double e = 1.0 - beta * (1.0 - f0);
            for (int i = 0; i < cs.size(); ++i)
                z += c[i] * (ipow(1.0 - beta * cov[i], m) +
                             ipow(1.0 - e * cov[i], m));
        } else {
            for (int i = 0; i < cs.size(); ++i)
                z += c[i] * ipow(1.0 - beta * f0 * cov[i], m);
        }
        return z;
    }

    // dZ/dcov_i and dZ/df0
    void objective_grad(const std::vector<double>& cov, double f0,
                        std::vector<double>& dcov, double& df0) const {
        const double beta = det.beta;
        df0 = 0.0;
        if (mode == ErrorObjective::sum_of_cases) {
            const double e = 1.0 - beta * (1.0 - f0);
            for (int i = 0; i < cs.size(); ++i) {
                const double a = ipow(1.0 - beta * cov[i], m - 1);
                const double b = ipow(1.0 - e * cov[i], m - 1);
                dcov[i] = -m * c[i] * (beta * a + e * b);
                df0 += -m * c[i] * b * beta * cov[i];
            }
        } else {
            for (int i = 0; i < cs.size(); ++i) {
                const double b = ipow(1.0 - beta * f0 * cov[i], m - 1);
                dcov[i] = -m * c[i] * beta * f0 * b;
                df0 += -m * c[i] * b * beta * cov[i];
            }
        }
    }

    double slack_convexity(double cov_i) const {
        const double ob = 1.0 - det.beta;
        return 2.0 * (m - 1.0) * ob * cov_i - ipow(1.0 - ob * cov_i, m);
    }
    double slack_collision(int i, double cov_i, double f0) const {
        return xi - cs.theta(i) * ipow(1.0 - cov_i + det.alpha * f0, m);
    }
    double min_slack(const std::vector<double>& cov, double f0) const {
        double s = std::numeric_limits<double>::infinity();
        for (int i = 0; i < cs.size(); ++i) {
            if (convexity_family_active()) s = std::min(s, slack_convexity(cov[i]));
            if (cs.theta(i) > 0.0) s = std::min(s, slack_collision(i, cov[i], f0));
        }
        return s;
    }
};

} // namespace

SolverReport optimal_with_errors(const ChannelSet& cs,
                                 std::shared_ptr<const GroupCatalog> cat, int m,
                                 const DetectorModel& det, double xi,
                                 const ErrorAwareOptions& opt) {
    if (m < 2) throw ValidationError("optimal_with_errors: m must be >= 2");
    if (!cat) throw ValidationError("optimal_with_errors: null catalog");
    if (cat->n() != cs.size())
        throw ValidationError("optimal_with_errors: catalog channel count mismatch");
    if (!(xi >= 0.0 && xi <= 1.0))
        throw ValidationError("optimal_with_errors: xi must lie in [0,1]");
    const std::size_t kappa = cat->kappa();
    const int n = cs.size();
    ErrorAwareProblem prob(cs, *cat, m, det, xi, opt.objective);

    // Feasibility probe at maximal balanced coverage and minimal access.
    std::vector<double> p0(kappa, 1.0 / double(kappa));
    if (!cat->is_full_enumeration()) {
        // max-min coverage by projected subgradient ascent
        std::vector<double> best = p0;
        double best_h = -1.0;
        for (int it = 0; it < 2000; ++it) {
            const auto cov = coverage_of(*cat, p0);
            const int imin = int(std::min_element(cov.begin(), cov.end()) -
                                 cov.begin());
            if (cov[imin] > best_h) { best_h = cov[imin]; best = p0; }
            const double step = 0.5 / std::sqrt(it + 1.0);
            for (int j : cat->groups_containing(imin)) p0[j] += step;
            simplex_project(p0);
        }
        p0 = best;
    }
    {
        const auto cov0 = coverage_of(*cat, p0);
        if (!(prob.min_slack(cov0, opt.f_min) > 0.0)) {
            SolverReport r{SensingScheme(cat, p0)};
            r.f0 = opt.f_min;
            r.objective = prob.objective(cov0, opt.f_min);
            r.status = SolveStatus::infeasible;
            return r;
        }
    }

    std::vector<double> p = p0;
    double f0 = opt.f_min;

    // Barrier objective and gradient at weight mu.
    auto barrier_value = [&](const std::vector<double>& pv, double f0v,
                             double mu) {
        const auto cov = coverage_of(*cat, pv);
        double v = prob.objective(cov, f0v);
        if (mu > 0.0) {
            for (int i = 0; i < n; ++i) {
                if (prob.convexity_family_active()) {
                    const double s = prob.slack_convexity(cov[i]);
                    if (s <= 0.0) return std::numeric_limits<double>::infinity();
                    v -= mu * std::log(s);
                }
                if (cs.theta(i) > 0.0) {
                    const double s = prob.slack_collision(i, cov[i], f0v);
                    if (s <= 0.0) return std::numeric_limits<double>::infinity();
                    v -= mu * std::log(s);
                }
            }
        } else if (!(prob.min_slack(cov, f0v) > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        return v;
    };
    auto barrier_grad = [&](const std::vector<double>& pv, double f0v, double mu,
                            std::vector<double>& gp, double& gf) {
        const auto cov = coverage_of(*cat, pv);
        std::vector<double> dcov(n);
        prob.objective_grad(cov, f0v, dcov, gf);
        if (mu > 0.0) {
            const double ob = 1.0 - det.beta;
            for (int i = 0; i < n; ++i) {
                if (prob.convexity_family_active()) {
                    const double s = prob.slack_convexity(cov[i]);
                    const double ds = 2.0 * (m - 1.0) * ob +
                                      m * ob * ipow(1.0 - ob * cov[i], m - 1);
                    dcov[i] -= mu * ds / s;
                }
                if (cs.theta(i) > 0.0) {
                    const double s = prob.slack_collision(i, cov[i], f0v);
                    const double base = ipow(1.0 - cov[i] + det.alpha * f0v, m - 1);
                    const double ds_dcov = m * cs.theta(i) * base;
                    const double ds_df0 = -m * cs.theta(i) * det.alpha * base;
                    dcov[i] -= mu * ds_dcov / s;
                    gf -= mu * ds_df0 / s;
                }
            }
        }
        for (std::size_t j = 0; j < kappa; ++j) {
            double s = 0.0;
            for (int ch : cat->group(j)) s += dcov[ch];
            gp[j] = s;
        }
    };

    SolverReport r{SensingScheme(cat, p)};
    const double z_scale = std::max(1.0, std::abs(barrier_value(p, f0, 0.0)));
    int total_it = 0;
    bool converged = false;
    std::vector<double> gp(kappa), cand(kappa);

    std::vector<double> mus;
    for (double mu = opt.barrier_init * z_scale; mu >= opt.barrier_min * z_scale;
         mu *= opt.barrier_decay)
        mus.push_back(mu);
    mus.push_back(0.0); // final polish, feasibility kept by backtracking

    for (double mu : mus) {
        double f = barrier_value(p, f0, mu);
        double gf = 0.0;
        barrier_grad(p, f0, mu, gp, gf);
        const double inner_tol =
            mu > 0.0 ? std::max(opt.pg_tol, 0.05 * mu / z_scale) : opt.pg_tol;
        double t = 1.0;
        std::vector<double> prev_p;
        double prev_f0 = f0, prev_gf = 0.0;
        std::vector<double> prev_gp;
        const int budget = std::max(500, opt.max_iter / int(mus.size()));
        int it = 0;
        for (; it < budget && total_it + it < opt.max_iter; ++it) {
            // stationarity measure at unit step
            cand = p;
            for (std::size_t j = 0; j < kappa; ++j) cand[j] -= gp[j];
            simplex_project(cand);
            double f0c = std::clamp(f0 - gf, opt.f_min, 1.0);
            double pg = norm2(p, cand);
            {
                const double d = f0 - f0c;
                pg = std::sqrt(pg * pg + d * d);
            }
            if (pg <= inner_tol) { converged = true; break; }
            converged = false;

            if (!prev_p.empty()) {
                double num = 0.0, den = 0.0;
                for (std::size_t j = 0; j < kappa; ++j) {
                    const double ds = p[j] - prev_p[j];
                    const double dg = gp[j] - prev_gp[j];
                    num += ds * ds;
                    den += ds * dg;
                }
                const double dsf = f0 - prev_f0, dgf = gf - prev_gf;
                num += dsf * dsf;
                den += dsf * dgf;
                if (den > 0.0) t = std::clamp(num / den, 1e-14, 1e10);
            }
            double fnew = f;
            double f0new = f0;
            for (int bt = 0; bt < 80; ++bt) {
                cand = p;
                for (std::size_t j = 0; j < kappa; ++j) cand[j] -= t * gp[j];
                simplex_project(cand);
                f0new = std::clamp(f0 - t * gf, opt.f_min, 1.0);
                fnew = barrier_value(cand, f0new, mu);
                if (std::isfinite(fnew)) {
                    double lin = dot_diff(gp, cand, p) + gf * (f0new - f0);
                    double dist2 = 0.0;
                    for (std::size_t j = 0; j < kappa; ++j) {
                        const double d = cand[j] - p[j];
                        dist2 += d * d;
                    }
                    dist2 += (f0new - f0) * (f0new - f0);
                    if (fnew <= f + lin + dist2 / (2.0 * t) + 1e-15) break;
                }
                t *= 0.5;
            }
            if (!std::isfinite(fnew) || fnew > f + 1e-12) {
                // a stall with no measurable objective change is convergence
                if (std::isfinite(fnew) && std::abs(fnew - f) <= 1e-10 * z_scale)
                    converged = true;
                break;
            }
            prev_p = p;
            prev_gp = gp;
            prev_f0 = f0;
            prev_gf = gf;
            p = cand;
            f0 = f0new;
            const double df = f - fnew;
            f = fnew;
            barrier_grad(p, f0, mu, gp, gf);
            if (df >= 0.0 && df <= 1e-14 * z_scale) { converged = true; ++it; break; }
        }
        total_it += it;
    }

    const auto cov = coverage_of(*cat, p);
    r.scheme = SensingScheme(cat, p);
    r.f0 = f0;
    r.objective = prob.objective(cov, f0);
    r.iterations = total_it;
    r.status = converged ? SolveStatus::optimal : SolveStatus::max_iter;
    {
        std::vector<double> gz(kappa);
        double gf = 0.0;
        barrier_grad(p, f0, 0.0, gz, gf);
        kkt_from_gradient(p, gz, r.nu, r.kkt_residual);
        // final stationarity, measured on the barrier-free objective
        cand = p;
        for (std::size_t j = 0; j < kappa; ++j) cand[j] -= gz[j];
        simplex_project(cand);
        r.kkt_residual = std::min(r.kkt_residual, norm2(p, cand));
    }
    return r;
}

double unutilized_capacity_with_errors(const ChannelSet& cs,
                                       const SensingScheme& scheme, int m,
                                       double beta, double f0) {
    if (m < 1)
        throw ValidationError("unutilized_capacity_with_errors: m must be >= 1");
    double lost = 0.0;
    for (int i = 0; i < cs.size(); ++i)
        lost += cs.residual_rate(i) *
                ipow(1.0 - beta * f0 * scheme.coverage(i), m);
    return lost;
}

double collision_probability_exact(const ChannelSet& cs,
                                   const SensingScheme& scheme, int m,
                                   const DetectorModel& det, int channel) {
    if (m < 1) throw ValidationError("collision_probability_exact: m must be >= 1");
    if (channel < 0 || channel >= cs.size())
        throw ValidationError("collision_probability_exact: channel out of range");
    const double cov = scheme.coverage(channel);
    const double af = det.alpha * det.f0;
    return cs.theta(channel) *
           (ipow(af * cov + (1.0 - cov), m) - ipow(1.0 - cov, m));
}

double loss_percentage(const ChannelSet& cs, int m,
                       const SensingScheme& heuristic,
                       const SolverReport& optimal) {
    const GroupCatalog& a = heuristic.catalog();
    const GroupCatalog& b = optimal.scheme.catalog();
    if (a.n() != b.n() || a.s() != b.s() || a.kappa() != b.kappa())
        throw ValidationError("loss_percentage: schemes use different catalogs");
    const double c_t = cs.residual_capacity();
    const double c_opt = c_t - optimal.objective;
    const double c_heur = c_t - unutilized_capacity(cs, heuristic, m);
    if (!(c_opt > 0.0))
        throw ValidationError("loss_percentage: optimal throughput is zero; "
                              "loss percentage undefined");
    return 100.0 * (c_opt - c_heur) / c_opt;
}

} // namespace cogmac
