#include "cogmac/quadrature.hpp"

#include <algorithm>
#include <utility>

namespace cogmac {

GaussLegendre::GaussLegendre(int order) {
    if (order < 1) throw ValidationError("GaussLegendre: order must be >= 1");
    nodes.resize(order);
    weights.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

double lens_area(double r1, double r2, double d) {
    if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
    if (d >= r1 + r2) return 0.0;
    if (d <= std::abs(r1 - r2)) {
        const double rm = std::min(r1, r2);
        return M_PI * rm * rm;
    }
    const double d1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    const double d2 = d - d1;
    auto half = [](double r, double x) {
        const double c = std::clamp(x / r, -1.0, 1.0);
        return r * r * std::acos(c) - x * std::sqrt(std::max(0.0, r * r - x * x));
    };
    return half(r1, d1) + half(r2, d2);
}

namespace {

// Nodes and weights of the tanh-sinh (double exponential) rule on [-1,1],
// truncated where the weights fall below 1e-17.
struct TanhSinh {
    std::vector<double> nodes, weights;
    TanhSinh() {
        const double h = 0.09;
        for (int k = -40; k <= 40; ++k) {
            const double t = k * h;
            const double s = M_PI_2 * std::sinh(t);
            const double x = std::tanh(s);
            const double w = h * M_PI_2 * std::cosh(t) /
                             (std::cosh(s) * std::cosh(s));
            if (w < 1e-17) continue;
            nodes.push_back(x);
            weights.push_back(w);
        }
    }
};

struct RelDisc {
    double cx, cy; // center relative to base center
    double dist;   // |center|
    double r;
    double angle;  // atan2 of center
};

// Radial measure along the ray at angle psi: sum over the union intervals
// [a,b] within [0, R0] of (b^2 - a^2) / 2.
double ray_measure(double psi, double r0, const std::vector<RelDisc>& discs) {
    const double ux = std::cos(psi), uy = std::sin(psi);
    // At most a handful of discs; a small fixed buffer avoids allocation.
    std::pair<double, double> iv[8];
    int count = 0;
    for (const auto& d : discs) {
        const double proj = ux * d.cx + uy * d.cy;
        const double disc = proj * proj - (d.dist * d.dist - d.r * d.r);
        if (disc <= 0.0) continue;
        const double s = std::sqrt(disc);
        double lo = proj - s, hi = proj + s;
        if (hi <= 0.0 || lo >= r0) continue;
        lo = std::max(lo, 0.0);
        hi = std::min(hi, r0);
        if (count < 8) iv[count++] = {lo, hi};
    }
    if (count == 0) return 0.0;
    std::sort(iv, iv + count);
    double measure = 0.0;
    double cur_lo = iv[0].first, cur_hi = iv[0].second;
    for (int i = 1; i < count; ++i) {
        if (iv[i].first > cur_hi) {
            measure += 0.5 * (cur_hi * cur_hi - cur_lo * cur_lo);
            cur_lo = iv[i].first;
            cur_hi = iv[i].second;
        } else {
            cur_hi = std::max(cur_hi, iv[i].second);
        }
    }
    measure += 0.5 * (cur_hi * cur_hi - cur_lo * cur_lo);
    return measure;
}

// Both intersection points of circles (c1,r1) and (c2,r2), if any.
int circle_intersections(double x1, double y1, double r1, double x2, double y2,
                         double r2, double out[2][2]) {
    const double dx = x2 - x1, dy = y2 - y1;
    const double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) return 0;
    const double d = std::sqrt(d2);
    if (d > r1 + r2 || d < std::abs(r1 - r2)) return 0;
    const double a = (d2 + r1 * r1 - r2 * r2) / (2.0 * d);
    const double h2 = r1 * r1 - a * a;
    const double h = h2 > 0.0 ? std::sqrt(h2) : 0.0;
    const double mx = x1 + a * dx / d, my = y1 + a * dy / d;
    out[0][0] = mx + h * (-dy) / d;
    out[0][1] = my + h * dx / d;
    out[1][0] = mx - h * (-dy) / d;
    out[1][1] = my - h * dx / d;
    return h == 0.0 ? 1 : 2;
}

} // namespace

double disc_intersect_union_area(const Disc& base, std::span<const Disc> others) {
    const double r0 = base.r;
    if (r0 <= 0.0) return 0.0;
    if (others.size() > 8)
        throw ValidationError("disc_intersect_union_area: at most 8 discs");
    std::vector<RelDisc> discs;
    discs.reserve(others.size());
    for (const auto& o : others) {
        if (o.r <= 0.0) continue;
        const double cx = o.x - base.x, cy = o.y - base.y;
        const double dist = std::hypot(cx, cy);
        if (dist >= r0 + o.r) continue;            // disjoint from base
        if (dist + r0 <= o.r) return M_PI * r0 * r0; // covers base entirely
        discs.push_back({cx, cy, dist, o.r, std::atan2(cy, cx)});
    }
    if (discs.empty()) return 0.0;

    std::vector<double> cuts;
    auto add_angle = [&cuts](double a) {
        a = std::fmod(a, 2.0 * M_PI);
        if (a < 0.0) a += 2.0 * M_PI;
        cuts.push_back(a);
    };
    for (const auto& d : discs) {
        if (d.dist > d.r) {
            const double half = std::asin(std::clamp(d.r / d.dist, -1.0, 1.0));
            add_angle(d.angle - half);
            add_angle(d.angle + half);
        }
        // crossings with the base circle
        double pts[2][2];
        int np = circle_intersections(0.0, 0.0, r0, d.cx, d.cy, d.r, pts);
        for (int i = 0; i < np; ++i) add_angle(std::atan2(pts[i][1], pts[i][0]));
    }
    for (std::size_t i = 0; i < discs.size(); ++i)
        for (std::size_t j = i + 1; j < discs.size(); ++j) {
            double pts[2][2];
            int np = circle_intersections(discs[i].cx, discs[i].cy, discs[i].r,
                                          discs[j].cx, discs[j].cy, discs[j].r,
                                          pts);
            for (int k = 0; k < np; ++k) {
                if (std::hypot(pts[k][0], pts[k][1]) < r0)
                    add_angle(std::atan2(pts[k][1], pts[k][0]));
            }
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(cuts.empty() ? 2.0 * M_PI : cuts.front() + 2.0 * M_PI);
    if (cuts.size() == 1) cuts.insert(cuts.begin(), 0.0);

    // tanh-sinh rule per segment: the radial measure has square-root
    // behaviour at tangency breakpoints, which this rule absorbs. Wide
    // segments are chunked so the sparse central nodes still resolve the
    // interior.
    static const TanhSinh rule;
    double area = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (b - a < 1e-14) continue;
        const int chunks = int(std::ceil((b - a) / 1.0));
        for (int c = 0; c < chunks; ++c) {
            const double ca = a + (b - a) * c / chunks;
            const double cb = a + (b - a) * (c + 1) / chunks;
            const double mid = 0.5 * (ca + cb), halfw = 0.5 * (cb - ca);
            double seg = 0.0;
            for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                seg += rule.weights[i] *
                       ray_measure(mid + halfw * rule.nodes[i], r0, discs);
            area += seg * halfw;
        }
    }
    return area;
}

double disc_minus_union_area(const Disc& base, std::span<const Disc> others) {
    if (base.r <= 0.0) return 0.0;
    return M_PI * base.r * base.r - disc_intersect_union_area(base, others);
}

} // namespace cogmac
