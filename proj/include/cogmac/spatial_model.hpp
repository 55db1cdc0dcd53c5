#pragma once

#include <optional>

#include "cogmac/aloha_analytic.hpp"
#include "cogmac/channel_model.hpp"
#include "cogmac/sensing_scheme.hpp"

namespace cogmac {

/// Counters for probability outputs that had to be clamped into [0,1] and for
/// degenerate conditioning events. Callers that care pass a pointer.
struct ClampStats {
    long clamped_low = 0;
    long clamped_high = 0;
    long degenerate = 0;
};

/// Cell geometry and interference model. gamma = pi * r_i_s^2 / cell_area is
/// kept consistent by construction: build from either cell_area or gamma.
struct SpatialConfig {
    double lambda;        // primary density per unit area
    double r_r_p, r_r_s;  // transmission ranges
    double r_i_p, r_i_s;  // interference ranges
    double r_d;           // detection radius, clamped to r_i_s + r_r_p
    double cell_area;     // |Omega|
    double gamma;         // pi r_i_s^2 / |Omega|
    double xi;            // collision budget

    static SpatialConfig with_cell_area(double lambda, double r_r_p, double r_r_s,
                                        double r_i_p, double r_i_s, double r_d,
                                        double cell_area, double xi);
    static SpatialConfig with_gamma(double lambda, double r_r_p, double r_r_s,
                                    double r_i_p, double r_i_s, double r_d,
                                    double gamma, double xi);

    double detection_bound() const { return r_i_s + r_r_p; }
    SpatialConfig with_detection_radius(double new_r_d) const;
};

struct AnnulusWeight {
    double s_tilde; // (r_i_s + r_r_p)^2 - r_d^2
    double s_bar;   // averaged area-ratio weight, in [0,1]
};

/// s_bar = (2/s_tilde) * integral_{r_d}^{r_i_s+r_r_p} [1 - lens(r_r_p, r_i_s, r)
/// / (pi r_r_p^2)] r dr. When the annulus is empty s_bar is 1 by convention
/// (unused downstream).
AnnulusWeight annulus_weight(const SpatialConfig& cfg);

/// Probability that a secondary transmitter wrongly perceives channel j as an
/// opportunity while a primary receiver sits inside its interference range:
/// exp(-l pi R_D^2)/(1-exp(-l pi R_I_s^2)) * [1 - exp(-l pi s_tilde (1-s_bar))]
/// with l = lambda * theta_j. Exactly 0 at r_d = r_i_s + r_r_p. Returns 0 with
/// a degenerate flag for theta_j = 0 (the conditioning event has probability 0).
double p_cc(const SpatialConfig& cfg, double theta_j, ClampStats* stats = nullptr);

/// Linearized per-channel collision probability M q P_j Pcc|j, clamped to
/// [0,1] with a flag when the raw value exceeds 1.
double p_collision_channel(const SpatialConfig& cfg, const ChannelSet& cs,
                           const SensingScheme& scheme, const AlohaParams& p,
                           int j, ClampStats* stats = nullptr);

/// Smallest r_d in [0, r_i_s + r_r_p] with sum_j P_j Pcc|j <= (N / (M q)) xi,
/// found by bisection (the left side is non-increasing in r_d and zero at the
/// right endpoint, so the constraint is always satisfiable).
double solve_detection_radius(const SpatialConfig& cfg, const ChannelSet& cs,
                              const SensingScheme& scheme, const AlohaParams& p,
                              double tol = 1e-6);

/// Per-channel success probability constants: the leading void-probability
/// term plus the three-case interference factors, precomputed once per
/// (config, theta) so that P_s|(j,K) is O(1) per K.
class SuccessModel {
public:
    SuccessModel(const SpatialConfig& cfg, double theta, double quad_tol = 1e-6);

    /// P_s|(j,K) for K >= 1, clamped to [0,1].
    double operator()(int k, ClampStats* stats = nullptr) const;

    double term1() const { return term1_; }
    double p3(int m) const { return m == 1 ? p3_1_ : (m == 2 ? p3_2_ : 1.0); }
    double p4(int m) const { return m == 1 ? p4_1_ : (m == 2 ? p4_2_ : p4_3_); }
    /// Worst estimated quadrature error across the escalated integrals.
    double quad_error() const { return quad_error_; }

private:
    double term1_, p3_1_, p3_2_, p4_1_, p4_2_, p4_3_;
    double gamma_;
    double quad_error_ = 0.0;
};

double p_success(const SpatialConfig& cfg, double theta_j, int k,
                 ClampStats* stats = nullptr);

/// Cell-based expected secondary throughput: the double binomial mixture over
/// the transmitting population and the per-channel co-channel count.
double cell_network_throughput(const SpatialConfig& cfg, const ChannelSet& cs,
                               const SensingScheme& scheme, const AlohaParams& p,
                               ClampStats* stats = nullptr);

/// Closed-form throughput of the symmetric special case (equal channels,
/// r_i = r_r = r, r_d = 2r):
/// e^(-3 pi lambda theta r^2) C q/(1-gamma) N M [(1-gamma/N)(1-q gamma/N)^(M-1)
/// - (1-1/N)(1-q/N)^(M-1)].
double simplified_cell_throughput(double r, double lambda, double theta, int n,
                                  int m, double q, double gamma, double c);

} // namespace cogmac
