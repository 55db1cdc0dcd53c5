#include "cogmac/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "cogmac/rng.hpp"

namespace cogmac {

double Accumulator::variance() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double v = (sumsq - double(n) * m * m) / double(n - 1);
    return std::max(v, 0.0);
}

double Accumulator::std_error() const {
    return n ? std::sqrt(variance() / double(n)) : 0.0;
}

SimEstimate Accumulator::estimate(std::uint64_t seed, std::string label) const {
    return SimEstimate{mean(), std_error(), n, seed, std::move(label)};
}

std::uint64_t recommended_slots(const SimEstimate& pilot, double target_rel_err) {
    if (!(target_rel_err > 0.0))
        throw ValidationError("recommended_slots: target must be positive");
    if (pilot.mean == 0.0 || pilot.samples == 0)
        throw ValidationError("recommended_slots: pilot has no signal");
    const double sd = pilot.std_error * std::sqrt(double(pilot.samples));
    const double needed = sd / (target_rel_err * std::abs(pilot.mean));
    return std::uint64_t(std::ceil(needed * needed));
}

namespace {

// Ratio estimator over per-slot totals (numerator A_t, denominator N_t) with
// the linearized cluster-sampling standard error.
struct RatioAccumulator {
    double sa = 0.0, sn = 0.0, saa = 0.0, snn = 0.0, san = 0.0;
    std::uint64_t slots = 0;
    void add(double a, double n) {
        sa += a;
        sn += n;
        saa += a * a;
        snn += n * n;
        san += a * n;
        ++slots;
    }
    void merge(const RatioAccumulator& o) {
        sa += o.sa;
        sn += o.sn;
        saa += o.saa;
        snn += o.snn;
        san += o.san;
        slots += o.slots;
    }
    SimEstimate estimate(std::uint64_t seed, std::string label) const {
        SimEstimate e{0.0, 0.0, std::uint64_t(sn), seed, std::move(label)};
        if (sn > 0.0) {
            const double p = sa / sn;
            const double d2 = std::max(0.0, saa - 2.0 * p * san + p * p * snn);
            e.mean = p;
            e.std_error = std::sqrt(d2) / sn;
        }
        return e;
    }
};

// Runs `slots` per-slot draws split across shards; each shard owns scratch
// state created by `factory` and a contiguous slot range. Shard results merge
// in shard order, so the pooled estimate does not depend on the schedule.
template <class State, class Factory>
State run_sharded(const SimRun& run, const State& proto, Factory&& factory) {
    int shards = std::max(1, run.shards);
    if (run.slots > 0 && std::uint64_t(shards) > run.slots)
        shards = int(run.slots);
    std::vector<State> parts(shards, proto);
    auto work = [&](int s) {
        auto slot_fn = factory();
        const std::uint64_t lo = run.slots * std::uint64_t(s) / shards;
        const std::uint64_t hi = run.slots * std::uint64_t(s + 1) / shards;
        for (std::uint64_t t = lo; t < hi; ++t) {
            SplitMix64 g = slot_stream(run.seed, t);
            slot_fn(g, parts[s]);
        }
    };
    if (shards == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(shards);
        for (int s = 0; s < shards; ++s) pool.emplace_back(work, s);
        for (auto& th : pool) th.join();
    }
    State total = parts[0];
    for (int s = 1; s < shards; ++s) total.merge(parts[s]);
    return total;
}

std::vector<double> cumulative_probs(const SensingScheme& scheme) {
    std::vector<double> cum(scheme.probs());
    for (std::size_t j = 1; j < cum.size(); ++j) cum[j] += cum[j - 1];
    cum.back() = 1.0;
    return cum;
}

} // namespace

AlohaSimResult simulate_aloha_datalink(const ChannelSet& cs,
                                       const SensingScheme& scheme,
                                       const AlohaParams& p, const SimRun& run) {
    if (!scheme.is_singleton())
        throw ValidationError("simulate_aloha_datalink: requires a singleton scheme");
    if (run.slots < 1) throw ValidationError("simulate: slots must be >= 1");
    struct State {
        Accumulator throughput;
        void merge(const State& o) { throughput.merge(o.throughput); }
    };
    const int n = cs.size();
    const std::vector<double> cum = cumulative_probs(scheme);
    State total = run_sharded(run, State{}, [&] {
        std::vector<char> busy(n);
        std::vector<int> count(n);
        return [&, busy, count](SplitMix64& g, State& st) mutable {
            for (int j = 0; j < n; ++j) busy[j] = g.bernoulli(cs.theta(j));
            std::fill(count.begin(), count.end(), 0);
            for (int u = 0; u < p.m; ++u)
                if (g.bernoulli(p.q)) ++count[g.pick(cum)];
            double v = 0.0;
            for (int j = 0; j < n; ++j)
                if (!busy[j] && count[j] == 1) v += cs.rate(j);
            st.throughput.add(v);
        };
    });
    return {total.throughput.estimate(run.seed, "aloha_throughput")};
}

CsmaSimResult simulate_csma(const ChannelSet& cs, const SensingScheme& scheme,
                            int m, const DetectorModel& det, const SimRun& run) {
    if (m < 1) throw ValidationError("simulate_csma: m must be >= 1");
    if (run.slots < 1) throw ValidationError("simulate: slots must be >= 1");
    if (scheme.catalog().n() != cs.size())
        throw ValidationError("simulate_csma: catalog channel count mismatch");
    struct State {
        Accumulator throughput;
        std::vector<Accumulator> collision;
        void merge(const State& o) {
            throughput.merge(o.throughput);
            for (std::size_t j = 0; j < collision.size(); ++j)
                collision[j].merge(o.collision[j]);
        }
    };
    const int n = cs.size();
    const auto& cat = scheme.catalog();
    const std::vector<double> cum = cumulative_probs(scheme);
    State proto;
    proto.collision.resize(n);
    State total = run_sharded(run, proto, [&] {
        std::vector<char> busy(n);
        std::vector<int> accessors(n);
        return [&, busy, accessors](SplitMix64& g, State& st) mutable {
            for (int j = 0; j < n; ++j) busy[j] = g.bernoulli(cs.theta(j));
            std::fill(accessors.begin(), accessors.end(), 0);
            for (int u = 0; u < m; ++u) {
                const std::size_t gi = g.pick(cum);
                for (int ch : cat.group(gi)) {
                    const bool detected_idle =
                        busy[ch] ? g.bernoulli(det.alpha) : g.bernoulli(det.beta);
                    if (detected_idle && g.bernoulli(det.f0)) ++accessors[ch];
                }
            }
            double v = 0.0;
            for (int j = 0; j < n; ++j) {
                if (accessors[j] > 0 && !busy[j]) v += cs.rate(j);
                st.collision[j].add(busy[j] && accessors[j] > 0 ? 1.0 : 0.0);
            }
            st.throughput.add(v);
        };
    });
    CsmaSimResult out;
    out.throughput = total.throughput.estimate(run.seed, "csma_throughput");
    out.collision_rate.reserve(n);
    for (int j = 0; j < n; ++j)
        out.collision_rate.push_back(total.collision[j].estimate(
            run.seed, "csma_collision_ch" + std::to_string(j)));
    return out;
}

namespace {

struct Point {
    double x, y;
};

double torus_dist2(const Point& a, const Point& b, double side) {
    double dx = std::abs(a.x - b.x);
    double dy = std::abs(a.y - b.y);
    if (dx > 0.5 * side) dx = side - dx;
    if (dy > 0.5 * side) dy = side - dy;
    return dx * dx + dy * dy;
}

Point wrap(Point p, double side) {
    p.x = std::fmod(p.x, side);
    if (p.x < 0.0) p.x += side;
    p.y = std::fmod(p.y, side);
    if (p.y < 0.0) p.y += side;
    return p;
}

} // namespace

SpatialSimResult simulate_spatial(const SpatialScenario& sc, const SimRun& run) {
    const SpatialConfig& cfg = sc.cfg;
    const ChannelSet& cs = sc.cs;
    if (!sc.scheme.is_singleton())
        throw ValidationError("simulate_spatial: requires a singleton scheme");
    if (run.slots < 1) throw ValidationError("simulate: slots must be >= 1");
    const double side = std::sqrt(cfg.cell_area);
    const double rmax = std::max({cfg.r_d, cfg.r_i_p, cfg.r_i_s, cfg.r_r_p,
                                  cfg.r_r_s});
    if (2.0 * rmax > side)
        throw ValidationError(
            "simulate_spatial: a disc of radius " + std::to_string(rmax) +
            " does not fit the torus cell (side " + std::to_string(side) +
            "); increase cell_area");
    const int n = cs.size();
    const int m = sc.params.m;
    const double q = sc.params.q;
    const std::vector<double> cum = cumulative_probs(sc.scheme);

    struct State {
        Accumulator throughput, collision_total;
        std::vector<Accumulator> collision;
        std::vector<RatioAccumulator> pcc, opportunity;
        RatioAccumulator success;
        std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> by_k;
        void merge(const State& o) {
            throughput.merge(o.throughput);
            collision_total.merge(o.collision_total);
            for (std::size_t j = 0; j < collision.size(); ++j) {
                collision[j].merge(o.collision[j]);
                pcc[j].merge(o.pcc[j]);
                opportunity[j].merge(o.opportunity[j]);
            }
            success.merge(o.success);
            for (std::size_t j = 0; j < by_k.size(); ++j) {
                if (o.by_k[j].size() > by_k[j].size())
                    by_k[j].resize(o.by_k[j].size());
                for (std::size_t k = 0; k < o.by_k[j].size(); ++k) {
                    by_k[j][k].first += o.by_k[j][k].first;
                    by_k[j][k].second += o.by_k[j][k].second;
                }
            }
        }
    };
    State proto;
    proto.collision.resize(n);
    proto.pcc.resize(n);
    proto.opportunity.resize(n);
    proto.by_k.resize(n);

    const double r_d2 = cfg.r_d * cfg.r_d;
    const double r_is2 = cfg.r_i_s * cfg.r_i_s;
    const double r_ip2 = cfg.r_i_p * cfg.r_i_p;

    State total = run_sharded(run, proto, [&] {
        struct Su {
            Point pos, rx;
            int ch;
            bool active;
            bool transmit;
        };
        std::vector<std::vector<Point>> tx(n), rx(n);
        std::vector<Su> sus(m);
        std::vector<int> active_by_ch(n);
        return [&, tx, rx, sus, active_by_ch](SplitMix64& g,
                                              State& st) mutable {
            for (int j = 0; j < n; ++j) {
                tx[j].clear();
                rx[j].clear();
                const std::uint64_t cnt =
                    g.poisson(cfg.lambda * cs.theta(j) * cfg.cell_area);
                for (std::uint64_t i = 0; i < cnt; ++i) {
                    Point t{g.uniform(0.0, side), g.uniform(0.0, side)};
                    const double rad = cfg.r_r_p * std::sqrt(g.next_double());
                    const double ang = g.uniform(0.0, 2.0 * M_PI);
                    Point r = wrap({t.x + rad * std::cos(ang),
                                    t.y + rad * std::sin(ang)}, side);
                    tx[j].push_back(t);
                    rx[j].push_back(r);
                }
            }
            std::fill(active_by_ch.begin(), active_by_ch.end(), 0);
            for (int u = 0; u < m; ++u) {
                Su& s = sus[u];
                s.pos = {g.uniform(0.0, side), g.uniform(0.0, side)};
                const double ang = g.uniform(0.0, 2.0 * M_PI);
                s.rx = wrap({s.pos.x + cfg.r_r_s * std::cos(ang),
                             s.pos.y + cfg.r_r_s * std::sin(ang)}, side);
                s.ch = int(g.pick(cum));
                s.active = g.bernoulli(q);
                if (s.active) ++active_by_ch[s.ch];
                bool detected = false;
                for (const Point& t : tx[s.ch])
                    if (torus_dist2(s.pos, t, side) <= r_d2) { detected = true; break; }
                const bool opportunity = !detected;
                bool rx_near = false;
                for (const Point& r : rx[s.ch])
                    if (torus_dist2(s.pos, r, side) < r_is2) { rx_near = true; break; }
                st.opportunity[s.ch].add(opportunity ? 1.0 : 0.0, 1.0);
                st.pcc[s.ch].add(opportunity && rx_near ? 1.0 : 0.0,
                                 rx_near ? 1.0 : 0.0);
                s.transmit = s.active && opportunity;
            }
            double slot_coll = 0.0, slot_tp = 0.0;
            std::vector<double> coll(n, 0.0);
            for (int u = 0; u < m; ++u) {
                const Su& s = sus[u];
                if (!s.active) continue;
                // per-k success is keyed by the active co-channel count and
                // counts a deferred (no-opportunity) user as a failure, which
                // is what the analytic per-k probability describes
                const std::size_t k = std::size_t(active_by_ch[s.ch]);
                if (st.by_k[s.ch].size() <= k) st.by_k[s.ch].resize(k + 1);
                st.by_k[s.ch][k].second += 1;
                if (!s.transmit) continue;
                bool collides = false;
                for (const Point& r : rx[s.ch])
                    if (torus_dist2(s.pos, r, side) < r_is2) { collides = true; break; }
                if (collides) {
                    coll[s.ch] += 1.0;
                    slot_coll += 1.0;
                }
                bool clear = true;
                for (const Point& t : tx[s.ch])
                    if (torus_dist2(s.rx, t, side) < r_ip2) { clear = false; break; }
                if (clear) {
                    for (int v = 0; v < m && clear; ++v) {
                        if (v == u || !sus[v].transmit || sus[v].ch != s.ch)
                            continue;
                        if (torus_dist2(s.rx, sus[v].pos, side) < r_is2)
                            clear = false;
                    }
                }
                st.by_k[s.ch][k].first += clear ? 1 : 0;
                st.success.add(clear ? 1.0 : 0.0, 1.0);
                if (clear) slot_tp += cs.rate(s.ch);
            }
            for (int j = 0; j < n; ++j) st.collision[j].add(coll[j]);
            st.collision_total.add(slot_coll);
            st.throughput.add(slot_tp);
        };
    });

    SpatialSimResult out;
    out.throughput = total.throughput.estimate(run.seed, "spatial_throughput");
    out.collision_total =
        total.collision_total.estimate(run.seed, "spatial_collisions");
    for (int j = 0; j < n; ++j) {
        out.collision_count.push_back(total.collision[j].estimate(
            run.seed, "spatial_collision_ch" + std::to_string(j)));
        out.p_cc_conditional.push_back(total.pcc[j].estimate(
            run.seed, "spatial_pcc_ch" + std::to_string(j)));
        out.opportunity_rate.push_back(total.opportunity[j].estimate(
            run.seed, "spatial_opportunity_ch" + std::to_string(j)));
    }
    out.success_rate = total.success.estimate(run.seed, "spatial_success_rate");
    out.success_by_k = std::move(total.by_k);
    return out;
}

} // namespace cogmac
