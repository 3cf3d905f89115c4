#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ensim/common.hpp"
#include "ensim/fock/registry.hpp"

namespace ensim::fock {

/// Per-mode photon/excitation numbers. Length always equals registry size.
using Occupation = std::vector<std::uint8_t>;

struct OccupationHash {
    std::size_t operator()(const Occupation& occ) const {
        // FNV-1a
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint8_t b : occ) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

using AmplitudeMap = std::unordered_map<Occupation, cplx, OccupationHash>;

/// Sparse multimode Fock state. Amplitudes are kept (approximately)
/// normalized between operations; `weight` carries the probability mass of
/// the heralded branch this state represents. Occupations exceeding the
/// cutoff are dropped by operations and accounted in `truncated_weight`.
class PureState {
  public:
    PureState(RegistryPtr registry, int cutoff);

    static PureState vacuum(RegistryPtr registry, int cutoff);

    const RegistryPtr& registry() const { return registry_; }
    int cutoff() const { return cutoff_; }

    double weight() const { return weight_; }
    void set_weight(double w) { weight_ = w; }

    double truncated_weight() const { return truncated_weight_; }
    void add_truncated_weight(double w) { truncated_weight_ += w; }

    const AmplitudeMap& amplitudes() const { return amps_; }

    std::size_t term_count() const { return amps_.size(); }

    /// Adds `amp` to the coefficient of `occ` (no cutoff check).
    void accumulate(const Occupation& occ, cplx amp);

    cplx amplitude(const Occupation& occ) const;

    double norm_sq() const;
    double norm() const;

    /// Returns a copy scaled to unit norm (weight preserved). A zero state is
    /// returned unchanged.
    PureState normalized() const;

    void scale(cplx factor);

    /// Removes amplitudes below the prune tolerance.
    void prune(double tol = kAmplitudePruneTol);

    /// Terms sorted by occupation vector (lexicographic): deterministic order
    /// for serialization and sampling.
    std::vector<std::pair<Occupation, cplx>> sorted_terms() const;

  private:
    RegistryPtr registry_;
    int cutoff_;
    double weight_ = 1.0;
    double truncated_weight_ = 0.0;
    AmplitudeMap amps_;
};

/// Finite ensemble of pure branches, e.g. after tracing loss modes or
/// keeping several heralded outcomes. Branch weights sum to the total
/// retained probability (<= 1).
class MixedState {
  public:
    MixedState() = default;
    explicit MixedState(PureState branch);

    const std::vector<PureState>& branches() const { return branches_; }
    std::vector<PureState>& branches() { return branches_; }

    void push_branch(PureState branch);

    std::size_t branch_count() const { return branches_.size(); }
    bool empty() const { return branches_.empty(); }

    double total_weight() const;

    /// Rescales branch weights so they sum to one. No-op on zero weight.
    MixedState normalized() const;

    const RegistryPtr& registry() const;
    int cutoff() const;

    /// Applies `fn` to every branch, keeping weights as produced by `fn`.
    template <typename Fn>
    MixedState map_branches(Fn&& fn) const {
        MixedState out;
        for (const PureState& b : branches_) out.push_branch(fn(b));
        return out;
    }

  private:
    std::vector<PureState> branches_;
};

void require_same_registry(const PureState& a, const PureState& b);

}  // namespace ensim::fock
