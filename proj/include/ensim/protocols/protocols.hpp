#pragma once

#include <array>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ensim/detect/detection.hpp"
#include "ensim/fock/ops.hpp"
#include "ensim/optics/network.hpp"
#include "ensim/protocols/layout.hpp"

namespace ensim::protocols {

using detect::ClickPattern;
using detect::Correction;
using detect::ExecMode;
using fock::MixedState;
using fock::PureState;
using optics::LossModel;
using optics::LossModePool;

struct ExcitationParams {
    double p = 0.01;  // excitation probability per pulse
};

/// Weak excitation pulse on one rail: multiplies the state by
/// sum_n (p^(n/2)/n!) (S+ s+)^n through the cutoff, then renormalizes
/// (weight unchanged). S is the qubit's collective mode for `pol`, s the
/// matching optical mode, which must start in vacuum.
PureState excite(const PureState& state, const LogicalQubit& q, Pol pol,
                 const ExcitationParams& params);
MixedState excite(const MixedState& state, const LogicalQubit& q, Pol pol,
                  const ExcitationParams& params);

/// Readout pulse: swaps both atomic rails into the matching optical modes
/// (H -> h, V -> v). The optical modes must start in vacuum.
PureState readout(const PureState& state, const LogicalQubit& q);

/// Readout followed by a loss beamsplitter of transmissivity eta on each
/// optical rail, routed to fresh loss modes (the commuted single-beamsplitter
/// loss placement). The loss modes drawn from `pool` are appended to `used`.
PureState readout_with_loss(const PureState& state, const LogicalQubit& q, double eta,
                            LossModePool& pool, std::vector<fock::ModeId>& used);

struct ProtocolOutcome {
    bool success = false;
    double probability = 0.0;  // total probability of the accepted herald set
    MixedState state;          // post-measurement state of the selected pattern, normalized
    ClickPattern pattern;      // selected pattern
    std::vector<Correction> corrections;  // recorded, not applied
    std::vector<std::string> consumed;    // qubit labels destroyed by the step
    std::vector<detect::DetectionBranch> branches;  // full decomposition (analytic)
    std::string note;
};

struct EmeOptions {
    double p = 0.01;
    LossModel loss;
    ExecMode mode = ExecMode::Analytic;
    int cutoff = kDefaultCutoff;
    // Canonical signs selected in analytic mode: +1 picks the "click in the
    // first detector" pattern of a round.
    int prefer_sign_h = +1;
    int prefer_sign_v = +1;
};

/// Two heralded excitation rounds (h first, then v) on a pair of ensembles in
/// |G>. On success the pair is left in (H_i +/- H_j)(V_i +/- V_j)|G>, with the
/// local mode transform that brings it to EME form recorded as a correction
/// on qubit i. Sampled mode reports a failed round via success=false.
ProtocolOutcome prepare_eme(const MixedState& in, const LogicalQubit& qi, const LogicalQubit& qj,
                            const EmeOptions& opts, LossModePool& pool,
                            std::mt19937_64* rng = nullptr);

/// |EME>_{i,j} = (H_i+ + V_j+)(V_i+ + H_j+)|G>, normalized.
PureState ideal_eme(const fock::RegistryPtr& registry, int cutoff, const LogicalQubit& qi,
                    const LogicalQubit& qj);

/// The EME-form correction on qubit i for round signs (sign_h, sign_v).
Correction eme_frame_correction(const LogicalQubit& qi, int sign_h, int sign_v);

/// Optical circuit of one EME round (50/50 beamsplitter on the two Stokes
/// modes; the same modes are the detectors).
optics::Network eme_round_network(const LogicalQubit& qi, const LogicalQubit& qj, Pol pol);

struct ThreeClusterOptions {
    LossModel loss;
    ExecMode mode = ExecMode::Analytic;
    std::optional<ClickPattern> prefer;
};

struct EmePairInput {
    const LogicalQubit* measured;  // gets the readout pulse
    const LogicalQubit* kept;
};

/// Projects the kept halves of three EME pairs onto a state locally
/// equivalent to the 3-qubit linear cluster. Readout pulses hit the measured
/// qubits; their photons pass pi/4 rotators, a PBS pair, a second rotator
/// layer, and three polarization-resolving detectors. Herald: exactly one
/// photon at each detector. Pending EME corrections are applied optically
/// after readout.
ProtocolOutcome prepare_three_cluster(const MixedState& in,
                                      const std::array<EmePairInput, 3>& pairs,
                                      std::span<const Correction> pending,
                                      const ThreeClusterOptions& opts, LossModePool& pool,
                                      std::mt19937_64* rng = nullptr);

/// The photonic network of the three-cluster step (acts on the six optical
/// modes of the measured qubits).
optics::Network three_cluster_network(const std::array<EmePairInput, 3>& pairs);

/// Ideal post-herald state of the kept qubits for a given number of h-side
/// clicks: (|---> + (-1)^n_h |+++>)/sqrt(2) in the atomic encoding.
PureState three_cluster_reference(const fock::RegistryPtr& registry, int cutoff,
                                  const std::array<const LogicalQubit*, 3>& kept,
                                  int h_clicks);

enum class FusionStatus { Success, Failure, Indeterminate };

struct CzOptions {
    LossModel loss;
    ExecMode mode = ExecMode::Analytic;
    std::optional<ClickPattern> prefer;
};

struct CzOutcome {
    FusionStatus status = FusionStatus::Indeterminate;
    double p_success = 0.0;
    double p_failure = 0.0;
    double p_indeterminate = 0.0;
    ClickPattern pattern;
    MixedState state;  // selected branch, normalized
    std::vector<Correction> corrections;
    int failure_z_outcome = 0;  // +1 / -1 when status == Failure
    std::vector<std::string> consumed;
    std::vector<detect::DetectionBranch> branches;  // full decomposition
    std::string note;
};

/// Destructive controlled-phase: consumes link qubits l1 (attached to t3) and
/// l2 (attached to t4). Success (opposite polarizations, probability 1/2 when
/// lossless) applies CZ between t3 and t4 up to recorded Z corrections.
/// Same-polarization patterns project t3 onto a Z eigenstate (failure);
/// fewer than two clicks leaves the state flagged indeterminate.
CzOutcome cz_fuse(const MixedState& in, const LogicalQubit& l1, const LogicalQubit& l2,
                  const LogicalQubit& t3, const LogicalQubit& t4, const CzOptions& opts,
                  LossModePool& pool, std::mt19937_64* rng = nullptr);

FusionStatus classify_cz_pattern(const ClickPattern& pattern, const LogicalQubit& l1,
                                 const LogicalQubit& l2);

/// Optical circuit of the fusion step (Hadamard on l1's photon, then a
/// polarization-preserving 50/50 beamsplitter).
optics::Network cz_network(const LogicalQubit& l1, const LogicalQubit& l2);

struct ClusterGraph {
    std::vector<std::string> vertices;
    std::vector<std::pair<std::string, std::string>> edges;

    static ClusterGraph line(const std::vector<std::string>& vs);
    void validate() const;  // simple graph, no self-loops
    ClusterGraph without_vertices(std::span<const std::string> removed) const;
};

/// Reference cluster state in the ensemble encoding: |+>_L per vertex, then a
/// CZ phase on every edge, applied analytically in the logical basis.
PureState encode_cluster(const Layout& layout, const ClusterGraph& graph, int cutoff);

/// Product state of logical basis values (0, 1) per qubit.
PureState logical_basis_state(const fock::RegistryPtr& registry, int cutoff,
                              std::span<const std::pair<const LogicalQubit*, int>> values);

struct MeasureOutcome {
    enum class Result { Plus, Minus, HeraldedLoss, Leakage };
    Result result = Result::HeraldedLoss;
    double probability = 0.0;
    MixedState state;
    std::vector<detect::DetectionBranch> branches;
};

/// Single-qubit measurement of sin(theta) X + cos(theta) Y: readout, a
/// photonic basis rotation, then h/v detection. No click at all is a
/// heralded loss; two clicks flag leakage.
MeasureOutcome measure_qubit(const MixedState& in, const LogicalQubit& q, double theta,
                             const LossModel& loss, LossModePool& pool,
                             ExecMode mode = ExecMode::Analytic, std::mt19937_64* rng = nullptr,
                             const ClickPattern* prefer = nullptr);

/// Checks the readout-deferral identity R U_atomic |psi> = U_optical R |psi>
/// for a 2x2 unitary U on one qubit, to `tol`.
bool defer_unitary_check(const PureState& state, const LogicalQubit& q, const CMatrix& u,
                         double tol = 1e-10);

/// Pauli corrections as mode transforms on the atomic rails.
Correction logical_z(const LogicalQubit& q);
Correction logical_x(const LogicalQubit& q);

/// Applies recorded corrections directly on the atomic modes (the analytic
/// shortcut justified by the deferral identity).
PureState apply_corrections_atomic(const PureState& state, std::span<const Correction> cs);
MixedState apply_corrections_atomic(const MixedState& state, std::span<const Correction> cs);

/// || |a> - |b> || for pure states on one registry.
double state_distance(const PureState& a, const PureState& b);

}  // namespace ensim::protocols
