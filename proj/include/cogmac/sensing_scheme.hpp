#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cogmac/channel_model.hpp"

namespace cogmac {

/// The sensing action set: channel groups of size s that a user may scan in
/// one slot. Groups are strictly increasing 0-based index subsets; catalog
/// order is lexicographic when produced by enumerate_groups, which keeps
/// optimizer output deterministic across runs.
class GroupCatalog {
public:
    GroupCatalog(int n, int s, std::vector<std::vector<int>> groups);

    int n() const { return n_; }
    int s() const { return s_; }
    std::size_t kappa() const { return groups_.size(); }
    const std::vector<int>& group(std::size_t j) const { return groups_[j]; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }
    /// Indices of the groups that contain `channel`.
    const std::vector<int>& groups_containing(int channel) const;
    bool is_full_enumeration() const { return full_; }

private:
    int n_, s_;
    std::vector<std::vector<int>> groups_;
    std::vector<std::vector<int>> incidence_;
    bool full_;
};

/// C(n, s); throws ValidationError if the count exceeds `cap`.
std::uint64_t binomial_count(int n, int s, std::uint64_t cap);

/// All C(n,s) groups in lexicographic order.
std::shared_ptr<const GroupCatalog>
enumerate_groups(int n, int s, std::uint64_t cap = 1000000);

/// The s = 1 catalog {0},...,{n-1}.
std::shared_ptr<const GroupCatalog> singleton_catalog(int n);

/// Probability measure over a group catalog.
class SensingScheme {
public:
    /// Strict construction: probs must be nonnegative and sum to 1 within
    /// 1e-9. Stored renormalized.
    SensingScheme(std::shared_ptr<const GroupCatalog> catalog,
                  std::vector<double> probs);

    /// Accepts any nonnegative vector with positive sum; divides through and
    /// records |raw sum - 1| in renorm_residual().
    static SensingScheme renormalized(std::shared_ptr<const GroupCatalog> catalog,
                                      std::vector<double> raw_probs);

    const GroupCatalog& catalog() const { return *catalog_; }
    std::shared_ptr<const GroupCatalog> catalog_ptr() const { return catalog_; }
    const std::vector<double>& probs() const { return probs_; }
    double prob(std::size_t j) const { return probs_[j]; }
    /// sum of P_j over groups containing `channel`, in [0,1].
    double coverage(int channel) const;
    /// True when the catalog is the full singleton catalog (s=1, kappa=n),
    /// so prob(j) is directly the probability of sensing channel j.
    bool is_singleton() const;
    double renorm_residual() const { return renorm_residual_; }

private:
    SensingScheme() = default;
    std::shared_ptr<const GroupCatalog> catalog_;
    std::vector<double> probs_;
    double renorm_residual_ = 0.0;
};

/// P_j proportional to (1 - theta_j) C_j over the singleton catalog.
SensingScheme heuristic_single(const ChannelSet& cs);

/// Group probabilities (1/s) * sum_{i in G_j} (1-theta_i)C_i / sum_i (1-theta_i)C_i
/// over the full catalog, renormalized (the raw sum is C(n,s)/n in general).
SensingScheme heuristic_multi(const ChannelSet& cs,
                              std::shared_ptr<const GroupCatalog> cat);

double channel_coverage(const SensingScheme& scheme, int channel);

} // namespace cogmac
