#include "cogmac/channel_model.hpp"

#include <string>

namespace cogmac {

ChannelSet::ChannelSet(std::vector<double> widths, std::vector<double> thetas,
                       double rate_factor)
    : widths_(std::move(widths)), thetas_(std::move(thetas)),
      rate_factor_(rate_factor) {
    if (widths_.empty())
        throw ValidationError("channel set: widths must be non-empty");
    if (widths_.size() != thetas_.size())
        throw ValidationError(
            "channel set: widths has " + std::to_string(widths_.size()) +
            " entries but thetas has " + std::to_string(thetas_.size()));
    if (!(rate_factor_ > 0.0))
        throw ValidationError("channel set: rate_factor must be positive");
    for (std::size_t j = 0; j < widths_.size(); ++j) {
        if (!(widths_[j] > 0.0))
            throw ValidationError("channel set: width must be positive at index " +
                                  std::to_string(j));
        if (!(thetas_[j] >= 0.0 && thetas_[j] <= 1.0))
            throw ValidationError("channel set: theta must lie in [0,1] at index " +
                                  std::to_string(j));
    }
}

double ChannelSet::residual_capacity() const {
    double c_t = 0.0;
    for (int j = 0; j < size(); ++j) c_t += residual_rate(j);
    return c_t;
}

CapacitySummary summarize(const ChannelSet& cs) {
    CapacitySummary s;
    const int n = cs.size();
    s.rates.resize(n);
    for (int j = 0; j < n; ++j) {
        s.rates[j] = cs.rate(j);
        s.c_max += s.rates[j];
        s.c_primary += cs.theta(j) * s.rates[j];
        s.c_residual += cs.theta_bar(j) * s.rates[j];
    }
    s.normalized.resize(n);
    for (int j = 0; j < n; ++j) s.normalized[j] = s.rates[j] / s.c_max;
    s.rho = s.c_primary / s.c_max;
    return s;
}

} // namespace cogmac
