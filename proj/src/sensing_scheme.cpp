#include "cogmac/sensing_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cogmac {

GroupCatalog::GroupCatalog(int n, int s, std::vector<std::vector<int>> groups)
    : n_(n), s_(s), groups_(std::move(groups)) {
    if (n_ < 1) throw ValidationError("catalog: n must be >= 1");
    if (s_ < 1 || s_ > n_)
        throw ValidationError("catalog: group size s must satisfy 1 <= s <= n");
    if (groups_.empty()) throw ValidationError("catalog: no groups");
    for (std::size_t j = 0; j < groups_.size(); ++j) {
        const auto& g = groups_[j];
        if (static_cast<int>(g.size()) != s_)
            throw ValidationError("catalog: group " + std::to_string(j) +
                                  " does not have size s");
        for (std::size_t t = 0; t < g.size(); ++t) {
            if (g[t] < 0 || g[t] >= n_)
                throw ValidationError("catalog: group " + std::to_string(j) +
                                      " has channel index out of range");
            if (t > 0 && g[t] <= g[t - 1])
                throw ValidationError("catalog: group " + std::to_string(j) +
                                      " is not strictly increasing");
        }
    }
    auto sorted = groups_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ValidationError("catalog: duplicate groups");

    incidence_.resize(n_);
    for (std::size_t j = 0; j < groups_.size(); ++j)
        for (int ch : groups_[j]) incidence_[ch].push_back(static_cast<int>(j));

    std::uint64_t full = 1;
    bool overflow = false;
    for (int i = 0; i < s_; ++i) {
        // kappa <= C(n,s) is enforced by uniqueness; the product stays small
        // whenever the comparison below can be true.
        if (full > (std::uint64_t(1) << 62) / std::uint64_t(n_)) { overflow = true; break; }
        full = full * std::uint64_t(n_ - i) / std::uint64_t(i + 1);
    }
    full_ = !overflow && groups_.size() == full;
}

const std::vector<int>& GroupCatalog::groups_containing(int channel) const {
    if (channel < 0 || channel >= n_)
        throw ValidationError("catalog: channel index out of range");
    return incidence_[channel];
}

std::uint64_t binomial_count(int n, int s, std::uint64_t cap) {
    std::uint64_t count = 1;
    for (int i = 0; i < s; ++i) {
        double projected = static_cast<double>(count) * (n - i) / (i + 1);
        if (projected > 2.0 * static_cast<double>(cap))
            throw ValidationError(
                "catalog: C(" + std::to_string(n) + "," + std::to_string(s) +
                ") exceeds the enumeration cap of " + std::to_string(cap) +
                "; use a restricted catalog instead of the full enumeration");
        count = count * std::uint64_t(n - i) / std::uint64_t(i + 1);
    }
    if (count > cap)
        throw ValidationError(
            "catalog: C(" + std::to_string(n) + "," + std::to_string(s) +
            ") = " + std::to_string(count) + " exceeds the enumeration cap of " +
            std::to_string(cap) + "; use a restricted catalog instead");
    return count;
}

std::shared_ptr<const GroupCatalog> enumerate_groups(int n, int s,
                                                     std::uint64_t cap) {
    if (n < 1 || s < 1 || s > n)
        throw ValidationError("enumerate_groups: need 1 <= s <= n");
    const std::uint64_t count = binomial_count(n, s, cap);
    std::vector<std::vector<int>> groups;
    groups.reserve(count);
    std::vector<int> cur(s);
    for (int i = 0; i < s; ++i) cur[i] = i;
    while (true) {
        groups.push_back(cur);
        int pos = s - 1;
        while (pos >= 0 && cur[pos] == n - s + pos) --pos;
        if (pos < 0) break;
        ++cur[pos];
        for (int i = pos + 1; i < s; ++i) cur[i] = cur[i - 1] + 1;
    }
    return std::make_shared<GroupCatalog>(n, s, std::move(groups));
}

std::shared_ptr<const GroupCatalog> singleton_catalog(int n) {
    return enumerate_groups(n, 1);
}

SensingScheme::SensingScheme(std::shared_ptr<const GroupCatalog> catalog,
                             std::vector<double> probs) {
    if (!catalog) throw ValidationError("scheme: null catalog");
    if (probs.size() != catalog->kappa())
        throw ValidationError("scheme: " + std::to_string(probs.size()) +
                              " probabilities for " +
                              std::to_string(catalog->kappa()) + " groups");
    double sum = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!(probs[j] >= 0.0))
            throw ValidationError("scheme: negative probability at group " +
                                  std::to_string(j));
        sum += probs[j];
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("scheme: probabilities sum to " +
                              std::to_string(sum) + ", expected 1 within 1e-9");
    for (double& p : probs) p /= sum;
    catalog_ = std::move(catalog);
    probs_ = std::move(probs);
}

SensingScheme SensingScheme::renormalized(
    std::shared_ptr<const GroupCatalog> catalog, std::vector<double> raw) {
    if (!catalog) throw ValidationError("scheme: null catalog");
    if (raw.size() != catalog->kappa())
        throw ValidationError("scheme: probability count does not match catalog");
    double sum = 0.0;
    for (std::size_t j = 0; j < raw.size(); ++j) {
        if (!(raw[j] >= 0.0))
            throw ValidationError("scheme: negative probability at group " +
                                  std::to_string(j));
        sum += raw[j];
    }
    if (!(sum > 0.0))
        throw ValidationError("scheme: probabilities sum to zero");
    SensingScheme s;
    s.renorm_residual_ = std::abs(sum - 1.0);
    for (double& p : raw) p /= sum;
    s.catalog_ = std::move(catalog);
    s.probs_ = std::move(raw);
    return s;
}

double SensingScheme::coverage(int channel) const {
    double c = 0.0;
    for (int j : catalog_->groups_containing(channel)) c += probs_[j];
    return std::min(c, 1.0);
}

bool SensingScheme::is_singleton() const {
    return catalog_->s() == 1 &&
           catalog_->kappa() == static_cast<std::size_t>(catalog_->n());
}

SensingScheme heuristic_single(const ChannelSet& cs) {
    const int n = cs.size();
    std::vector<double> w(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        w[j] = cs.residual_rate(j);
        total += w[j];
    }
    if (!(total > 0.0))
        throw ValidationError(
            "heuristic scheme: no spectrum opportunity (every channel always busy)");
    for (double& x : w) x /= total;
    return SensingScheme(singleton_catalog(n), std::move(w));
}

SensingScheme heuristic_multi(const ChannelSet& cs,
                              std::shared_ptr<const GroupCatalog> cat) {
    if (!cat) throw ValidationError("heuristic scheme: null catalog");
    if (cat->n() != cs.size())
        throw ValidationError("heuristic scheme: catalog channel count mismatch");
    if (!cat->is_full_enumeration())
        throw ValidationError(
            "heuristic scheme: the group formula requires the full C(n,s) catalog");
    double total = 0.0;
    for (int j = 0; j < cs.size(); ++j) total += cs.residual_rate(j);
    if (!(total > 0.0))
        throw ValidationError(
            "heuristic scheme: no spectrum opportunity (every channel always busy)");
    std::vector<double> raw(cat->kappa());
    for (std::size_t j = 0; j < cat->kappa(); ++j) {
        double g = 0.0;
        for (int ch : cat->group(j)) g += cs.residual_rate(ch);
        raw[j] = g / (cat->s() * total);
    }
    return SensingScheme::renormalized(std::move(cat), std::move(raw));
}

double channel_coverage(const SensingScheme& scheme, int channel) {
    return scheme.coverage(channel);
}

} // namespace cogmac
