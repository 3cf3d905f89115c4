#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ensim/common.hpp"
#include "ensim/fock/state.hpp"

namespace ensim::fock {

/// Bosonic ladder operators. These return the raw operator action (a+|n> =
/// sqrt(n+1)|n+1>), so the result is generally unnormalized. Quanta pushed
/// past the cutoff are dropped and recorded as truncated weight.
PureState create(const PureState& state, ModeId mode);
PureState annihilate(const PureState& state, ModeId mode);

/// <n_mode> for a normalized state.
double occupation_expectation(const PureState& state, ModeId mode);

/// Applies a passive linear-optical transform on `modes`: every basis term is
/// rewritten by substituting a_k+ -> sum_j U(j,k) a_j+ (column k of U is the
/// image of mode k) and re-expanding with multinomial coefficients.
/// Throws NonUnitaryError if U is not unitary to 1e-12.
PureState apply_mode_unitary(const PureState& state, std::span<const ModeId> modes,
                             const CMatrix& u);

PureState apply_mode_unitary(const PureState& state, std::initializer_list<ModeId> modes,
                             const CMatrix& u);

MixedState apply_mode_unitary(const MixedState& state, std::span<const ModeId> modes,
                              const CMatrix& u);

/// Projects onto occupation `n` of `mode`. Returns the normalized projected
/// branch (weight multiplied by the outcome probability) and the probability
/// itself. Probabilities over all n sum to the squared input norm, so mass
/// lost to truncation stays visible rather than being renormalized away.
std::pair<PureState, double> project_occupation(const PureState& state, ModeId mode, int n);

/// Discards `modes`, producing one branch per joint occupation pattern of the
/// traced modes (their occupations are zeroed in the surviving branches).
/// Valid as long as no later operation references the traced modes.
MixedState trace_modes(const PureState& state, std::span<const ModeId> modes);
MixedState trace_modes(const MixedState& state, std::span<const ModeId> modes);

/// Product of two states on one registry whose occupied modes are disjoint
/// (occupations add termwise).
PureState tensor_product(const PureState& a, const PureState& b);

/// Raw <a|b>. Throws RegistryMismatchError for states from different
/// registries or cutoffs.
cplx inner_product(const PureState& a, const PureState& b);

/// Sum over branches of weight * |<ref|branch>|^2, with both sides
/// normalized. In [0, total_weight].
double fidelity(const MixedState& state, const PureState& reference);
double fidelity(const PureState& state, const PureState& reference);

}  // namespace ensim::fock
