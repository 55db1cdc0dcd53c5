#pragma once

#include <memory>
#include <vector>

#include "cogmac/channel_model.hpp"
#include "cogmac/sensing_scheme.hpp"

namespace cogmac {

/// Detector operating point and access policy. Access on a busy-detected
/// channel is fixed to zero.
struct DetectorModel {
    double alpha; // miss-detection probability, in [0,1]
    double beta;  // detection probability (1-beta is the false alarm), in (0,1]
    double f0;    // access probability when detected idle, in (0,1]
    DetectorModel(double alpha_, double beta_, double f0_ = 1.0);
    static constexpr double f1 = 0.0;
};

enum class SolveStatus { optimal, max_iter, infeasible };

struct SolverReport {
    SensingScheme scheme;
    double f0 = 1.0;           // 1 for error-free problems
    double nu = 0.0;           // simplex multiplier (estimate for iterative solvers)
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::optimal;
    double max_objective_increase = 0.0; // across accepted iterations; ~0 by descent
};

/// Expected capacity left unused by both networks:
/// sum_i C_i (1-theta_i) (1 - coverage(i))^m. Error-free CSMA throughput is
/// C_t minus this value.
double unutilized_capacity(const ChannelSet& cs, const SensingScheme& scheme,
                           int m);

/// Water-filling solution of the single-channel program for m >= 2:
/// p_j = (1 - (nu / (m C_j theta_bar_j))^(1/(m-1)))^+ with nu chosen by
/// bisection so the probabilities sum to one.
SolverReport optimal_single(const ChannelSet& cs, int m);

struct PgdOptions {
    int max_iter = 100000;
    double pg_tol = 1e-8;   // projected-gradient norm
    double obj_tol = 1e-12; // objective change
};

/// Projected-gradient minimization of the group-sensing overlooked capacity
/// over the probability simplex. The objective is convex, so convergence is
/// to the global optimum within tolerance.
SolverReport optimal_multi(const ChannelSet& cs,
                           std::shared_ptr<const GroupCatalog> cat, int m,
                           const PgdOptions& opt = {});

/// Which overlooked-capacity objective the error-aware solver minimizes.
/// `sum_of_cases` adds the per-case losses (1-beta cov)^M + (1-(1-beta(1-f0))
/// cov)^M, which double counts the never-sensed event; `exact` uses the
/// exhaustive-case probability (1 - beta f0 cov)^M. Both are convex in P for
/// fixed f0; the Monte Carlo module adjudicates between them.
enum class ErrorObjective { sum_of_cases, exact };

struct ErrorAwareOptions {
    ErrorObjective objective = ErrorObjective::sum_of_cases;
    int max_iter = 200000;
    double pg_tol = 1e-8;
    double f_min = 1e-6;       // lower bound implementing 0 < f0
    double barrier_init = 1e-2;
    double barrier_decay = 0.2;
    double barrier_min = 1e-10;
};

/// Joint (P, f0) optimization with detection errors: minimizes the chosen
/// objective subject to the simplex, the per-channel convexity-region
/// inequality and the restricted collision constraint
/// theta_i (1 - cov_i + alpha f0)^m <= xi. Nonlinear constraints are handled
/// by a logarithmic barrier with geometrically decreasing weight.
SolverReport optimal_with_errors(const ChannelSet& cs,
                                 std::shared_ptr<const GroupCatalog> cat, int m,
                                 const DetectorModel& det, double xi,
                                 const ErrorAwareOptions& opt = {});

/// Exact overlooked capacity under detection errors at a given policy:
/// sum_i C_i (1-theta_i) (1 - beta f0 cov_i)^m. A channel is utilized iff at
/// least one user senses it, detects it idle and accesses it.
double unutilized_capacity_with_errors(const ChannelSet& cs,
                                       const SensingScheme& scheme, int m,
                                       double beta, double f0);

/// Per-channel collision probability from the k-sum definition:
/// theta_i ([alpha f0 cov_i + (1 - cov_i)]^m - (1 - cov_i)^m).
double collision_probability_exact(const ChannelSet& cs,
                                   const SensingScheme& scheme, int m,
                                   const DetectorModel& det, int channel);

/// 100 (C(P*) - C(P)) / C(P*) with C = C_t - unutilized_capacity.
double loss_percentage(const ChannelSet& cs, int m,
                       const SensingScheme& heuristic,
                       const SolverReport& optimal);

} // namespace cogmac
