#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ensim/detect/detection.hpp"
#include "ensim/fock/ops.hpp"
#include "ensim/protocols/protocols.hpp"

namespace ensim::verify {

using fock::MixedState;
using fock::ModeId;
using fock::PureState;

/// r = 1 - (2 - eta)^-1: the per-qubit loss rate of heralded three-cluster
/// outputs under readout/detection efficiency eta.
double loss_rate(double eta);

/// g = eta / (2 - eta): the factor by which losses reduce the fusion success
/// rate.
double gate_factor(double eta);

/// g - 1/2. Positive exactly when eta > 2/3 (the loss-tolerance threshold).
double threshold_margin(double eta);

/// Varnava-style source rate f = 1 - eta_s / (2 - eta_s).
double source_loss_rate(double eta_s);

/// Excitation superoperator: rho -> sum_i (p^i (1-eta)^i / i!) S+^i rho S^i,
/// truncated at the cutoff and renormalized to unit total weight.
MixedState apply_excitation_superop(const MixedState& state, ModeId mode, double p, double eta);

/// Loss superoperator at rate r: with probability r the mode is read out
/// destructively and left in vacuum (branch per occupation), else untouched.
/// On states with at most one excitation per mode this is exactly
/// rho -> (1-r) rho + r (S rho S+ + P0 rho P0). Trace preserving.
MixedState apply_loss_superop(const MixedState& state, ModeId mode, double r);

/// Independent qubit-loss channel at rate r: with probability r both rails of
/// the qubit are read out destructively and left in |G> (branch per joint
/// occupation), else the qubit is untouched. This is the independently
/// degraded error model the heralded protocols produce.
MixedState apply_qubit_erasure(const MixedState& state, const protocols::LogicalQubit& q,
                               double r);

/// Ideal pure state under independent per-qubit loss at rate r on each of the
/// given qubits. Heralded three-cluster outputs at efficiency eta equal this
/// reference with r = 1 - (2 - eta)^-1.
MixedState id_reference(const PureState& ideal,
                        std::span<const protocols::LogicalQubit* const> qubits, double r);

/// Uhlmann fidelity of two branch ensembles, computed densely on the joint
/// occupation support.
double mixed_fidelity(const MixedState& a, const MixedState& b);

/// Probability mass of the components with exactly one excitation across
/// (H_i, V_i) for every listed qubit. The complement is leakage.
double computational_subspace_weight(const MixedState& state,
                                     std::span<const protocols::LogicalQubit* const> qubits);

/// Excess-excitation weight of a heralded pair state: mass of the components
/// where an excitation rail pair (H_i, H_j) or (V_i, V_j) holds more than one
/// quantum. Order p(1-eta) for lossy preparation.
double eme_excess_weight(const MixedState& state, const protocols::LogicalQubit& qi,
                         const protocols::LogicalQubit& qj);

/// A candidate local-correction word: per-qubit 2x2 mode transforms.
using CorrectionWord = std::vector<detect::Correction>;

/// Finite group closure of the generator words, deduplicated up to per-qubit
/// global phase. Throws GroupTooLarge above `bound` elements.
std::vector<CorrectionWord> correction_group(std::span<const CorrectionWord> generators,
                                             std::size_t bound = 4096);

struct EquivalenceResult {
    bool equivalent = false;
    CorrectionWord corrections;  // the first group element that worked
};

/// True when some group element maps `state` onto `reference` with fidelity
/// >= 1 - tol. Deterministic enumeration order; first hit returned.
EquivalenceResult equivalent_up_to_corrections(const MixedState& state,
                                               const PureState& reference,
                                               std::span<const CorrectionWord> group,
                                               double tol = 1e-8);

}  // namespace ensim::verify
