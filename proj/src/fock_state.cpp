#include "ensim/fock/state.hpp"

#include <algorithm>
#include <cmath>

namespace ensim::fock {

PureState::PureState(RegistryPtr registry, int cutoff)
    : registry_(std::move(registry)), cutoff_(cutoff) {
    if (!registry_ || registry_->size() == 0)
        throw PreconditionError("PureState: empty registry");
    if (cutoff_ < 1) throw OutOfRangeError("PureState: cutoff must be >= 1");
}

PureState PureState::vacuum(RegistryPtr registry, int cutoff) {
    PureState s(std::move(registry), cutoff);
    s.accumulate(Occupation(s.registry_->size(), 0), cplx{1.0});
    return s;
}

void PureState::accumulate(const Occupation& occ, cplx amp) {
    if (occ.size() != registry_->size())
        throw RegistryMismatchError("PureState: occupation length mismatch");
    cplx& slot = amps_[occ];
    slot += amp;
    if (std::abs(slot) < kAmplitudePruneTol) amps_.erase(occ);
}

cplx PureState::amplitude(const Occupation& occ) const {
    auto it = amps_.find(occ);
    return it == amps_.end() ? cplx{} : it->second;
}

double PureState::norm_sq() const {
    double s = 0.0;
    for (const auto& [occ, amp] : amps_) s += std::norm(amp);
    return s;
}

double PureState::norm() const { return std::sqrt(norm_sq()); }

PureState PureState::normalized() const {
    const double n = norm();
    if (n == 0.0) return *this;
    PureState out = *this;
    out.scale(1.0 / n);
    return out;
}

void PureState::scale(cplx factor) {
    for (auto& [occ, amp] : amps_) amp *= factor;
}

void PureState::prune(double tol) {
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (std::abs(it->second) < tol)
            it = amps_.erase(it);
        else
            ++it;
    }
}

std::vector<std::pair<Occupation, cplx>> PureState::sorted_terms() const {
    std::vector<std::pair<Occupation, cplx>> terms(amps_.begin(), amps_.end());
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return terms;
}

MixedState::MixedState(PureState branch) { branches_.push_back(std::move(branch)); }

void MixedState::push_branch(PureState branch) {
    if (!branches_.empty()) {
        if (branch.registry() != branches_.front().registry() ||
            branch.cutoff() != branches_.front().cutoff())
            throw RegistryMismatchError("MixedState: branch registry/cutoff mismatch");
    }
    branches_.push_back(std::move(branch));
}

double MixedState::total_weight() const {
    double w = 0.0;
    for (const PureState& b : branches_) w += b.weight();
    return w;
}

MixedState MixedState::normalized() const {
    const double w = total_weight();
    if (w == 0.0) return *this;
    MixedState out = *this;
    for (PureState& b : out.branches_) b.set_weight(b.weight() / w);
    return out;
}

const RegistryPtr& MixedState::registry() const {
    if (branches_.empty()) throw PreconditionError("MixedState: empty");
    return branches_.front().registry();
}

int MixedState::cutoff() const {
    if (branches_.empty()) throw PreconditionError("MixedState: empty");
    return branches_.front().cutoff();
}

void require_same_registry(const PureState& a, const PureState& b) {
    if (a.registry() != b.registry())
        throw RegistryMismatchError("states belong to different registries");
    if (a.cutoff() != b.cutoff())
        throw RegistryMismatchError("states have different cutoffs");
}

}  // namespace ensim::fock
