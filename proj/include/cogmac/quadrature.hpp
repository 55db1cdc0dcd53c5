#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cogmac/errors.hpp"

namespace cogmac {

/// Adaptive Simpson on [a,b] to absolute tolerance `abs_tol`. Throws
/// NumericalError with the offending sub-interval if the depth cap is hit
/// before the local error bound is met.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol,
                          int max_depth = 40) {
    if (!(b >= a)) throw ValidationError("integrate_adaptive: b < a");
    if (a == b) return 0.0;
    struct Impl {
        F& f;
        int max_depth;
        double step(double a, double fa, double b, double fb, double fm,
                    double whole, double tol, int depth) {
            const double m = 0.5 * (a + b);
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            if (depth >= max_depth)
                throw NumericalError(
                    "integrate_adaptive: no convergence on [" +
                    std::to_string(a) + ", " + std::to_string(b) +
                    "] at depth " + std::to_string(depth) + " (|error| ~ " +
                    std::to_string(std::abs(delta) / 15.0) + ", tol " +
                    std::to_string(tol) + ")");
            return step(a, fa, m, fm, flm, left, 0.5 * tol, depth + 1) +
                   step(m, fm, b, fb, frm, right, 0.5 * tol, depth + 1);
        }
    };
    Impl impl{f, max_depth};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return impl.step(a, fa, b, fb, fm, whole, abs_tol, 0);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes, weights;
    explicit GaussLegendre(int order);
};

struct Disc {
    double x = 0.0, y = 0.0, r = 0.0;
};

/// Area of base ∩ (others[0] ∪ others[1] ∪ ...), computed by an angular
/// sweep around the base center. Within each angular segment delimited by
/// tangency and circle-intersection directions the radial measure is an
/// analytic function, integrated by fixed Gauss-Legendre; the result is
/// accurate to near machine precision.
double disc_intersect_union_area(const Disc& base, std::span<const Disc> others);

/// Area of base minus the union of the other discs.
double disc_minus_union_area(const Disc& base, std::span<const Disc> others);

/// Intersection area of two discs with center distance d (the lens).
double lens_area(double r1, double r2, double d);

} // namespace cogmac
