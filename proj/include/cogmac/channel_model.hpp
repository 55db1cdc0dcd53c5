#pragma once

#include <vector>

#include "cogmac/errors.hpp"

namespace cogmac {

/// Licensed spectrum: per-channel bandwidth W_j, busy probability theta_j and
/// the rate law C_j = rate_factor * W_j. Immutable after construction.
class ChannelSet {
public:
    ChannelSet(std::vector<double> widths, std::vector<double> thetas,
               double rate_factor = 1.0);

    int size() const { return static_cast<int>(widths_.size()); }
    double width(int j) const { return widths_[j]; }
    double theta(int j) const { return thetas_[j]; }
    double theta_bar(int j) const { return 1.0 - thetas_[j]; }
    double rate(int j) const { return rate_factor_ * widths_[j]; }
    /// (1 - theta_j) * C_j, the expected idle rate of channel j.
    double residual_rate(int j) const { return theta_bar(j) * rate(j); }
    double rate_factor() const { return rate_factor_; }
    const std::vector<double>& widths() const { return widths_; }
    const std::vector<double>& thetas() const { return thetas_; }

    /// C_t = sum_j (1 - theta_j) C_j, the ceiling on secondary throughput.
    double residual_capacity() const;

private:
    std::vector<double> widths_;
    std::vector<double> thetas_;
    double rate_factor_;
};

struct CapacitySummary {
    std::vector<double> rates;      // C_j
    std::vector<double> normalized; // C_j / C_max
    double c_primary = 0.0;         // sum theta_j C_j
    double c_max = 0.0;             // sum C_j
    double c_residual = 0.0;        // sum (1 - theta_j) C_j
    double rho = 0.0;               // c_primary / c_max
};

CapacitySummary summarize(const ChannelSet& cs);

} // namespace cogmac
