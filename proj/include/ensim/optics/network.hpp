#pragma once

#include <string>
#include <vector>

#include "ensim/common.hpp"
#include "ensim/fock/ops.hpp"
#include "ensim/fock/registry.hpp"
#include "ensim/fock/state.hpp"

namespace ensim::optics {

using fock::ModeId;

/// Hands out pre-registered loss ancilla modes. Loss modes are never reused:
/// every beamsplitter insertion consumes a fresh one so traced branches stay
/// valid.
class LossModePool {
  public:
    LossModePool() = default;
    explicit LossModePool(std::vector<ModeId> modes) : modes_(std::move(modes)) {}

    ModeId acquire() {
        if (next_ >= modes_.size())
            throw PreconditionError("LossModePool: no fresh loss modes left in registry");
        return modes_[next_++];
    }

    std::size_t remaining() const { return modes_.size() - next_; }

    /// All modes handed out so far (the ones that must eventually be traced).
    std::vector<ModeId> used() const {
        return {modes_.begin(), modes_.begin() + static_cast<std::ptrdiff_t>(next_)};
    }

  private:
    std::vector<ModeId> modes_;
    std::size_t next_ = 0;
};

enum class ElementKind { Beamsplitter, PolRotator, Hadamard, PBS, Swap };

enum class LossTag { None, Source, Detector };

/// One passive linear-optical element acting on an ordered list of modes.
struct Element {
    ElementKind kind;
    double param = 0.0;  // transmissivity for Beamsplitter, angle for PolRotator
    std::vector<ModeId> modes;
    LossTag loss = LossTag::None;
};

/// Real beamsplitter convention [[sqrt(t), sqrt(1-t)], [sqrt(1-t), -sqrt(t)]].
CMatrix beamsplitter_matrix(double transmissivity);

/// Rotation by theta: h+ -> cos(theta) h+ + sin(theta) v+.
CMatrix rotator_matrix(double theta);

/// h+ -> (h+ + v+)/sqrt(2), v+ -> (h+ - v+)/sqrt(2).
CMatrix hadamard_matrix();

CMatrix swap_matrix();

/// Transmits h modes, exchanges v_a <-> v_b (4-mode permutation).
CMatrix pbs_matrix();

CMatrix element_matrix(const Element& e);

Element make_beamsplitter(double transmissivity, ModeId a, ModeId b);
Element make_rotator(double theta, ModeId h, ModeId v);
Element make_hadamard(ModeId h, ModeId v);
Element make_pbs(ModeId h_a, ModeId v_a, ModeId h_b, ModeId v_b);
Element make_swap(ModeId a, ModeId b);

/// Ordered element list with declared input (source) and detector modes.
struct Network {
    std::vector<Element> elements;
    std::vector<ModeId> sources;
    std::vector<ModeId> detectors;
};

fock::PureState apply(const Network& net, const fock::PureState& state);
fock::MixedState apply(const Network& net, const fock::MixedState& state);

fock::PureState apply_element(const Element& e, const fock::PureState& state);

/// Efficiencies of the two physical loss channels. eta() is the effective
/// per-photon readout-and-detection probability.
struct LossModel {
    double eta_e = 1.0;  // ensemble-photon coupling
    double eta_d = 1.0;  // detector efficiency

    double eta() const { return eta_e * eta_d; }
    bool lossless() const { return eta_e >= 1.0 && eta_d >= 1.0; }
};

/// Models inefficiency with beamsplitters: Beamsplitter(eta_e) after each
/// source mode and Beamsplitter(eta_d) before each detector mode, each routed
/// to a dedicated fresh loss mode.
Network insert_loss(const Network& net, const LossModel& loss, LossModePool& pool);

/// Rewrites a lossy network into the equivalent form with a single
/// Beamsplitter(eta_e * eta_d) per source mode. Requires all detector-side
/// efficiencies equal and all source-side efficiencies equal.
Network commute_loss_to_sources(const Network& net, LossModePool& pool);

/// Loss modes referenced by the network's loss elements.
std::vector<ModeId> loss_modes_of(const Network& net);

/// JSON description (element list with kinds, parameters, mode names) for CLI
/// reproducibility.
std::string to_json(const Network& net, const fock::ModeRegistry& registry);

}  // namespace ensim::optics
