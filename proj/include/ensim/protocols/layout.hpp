#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ensim/fock/registry.hpp"
#include "ensim/optics/network.hpp"

namespace ensim::protocols {

/// Where the qubit lives physically: two internal levels of one ensemble, or
/// a pair of single-level ensembles. Both map onto two collective bosonic
/// modes; the choice only affects labeling.
enum class Encoding { InternalState, DualRail };

enum class Pol { H, V };

/// One logical qubit: the collective atomic modes (H, V) holding the qubit
/// and the optical modes (h, v) its excitations map onto. |0>_L has a single
/// excitation in the H rail, |1>_L in the V rail.
struct LogicalQubit {
    std::string label;
    Encoding encoding = Encoding::InternalState;
    fock::ModeId atomic_h, atomic_v;
    fock::ModeId optical_h, optical_v;
};

/// A registry covering a set of qubits plus a budget of loss ancillas.
struct Layout {
    fock::RegistryPtr registry;
    std::vector<LogicalQubit> qubits;
    optics::LossModePool loss_pool;

    const LogicalQubit& qubit(std::string_view label) const;
};

Layout make_layout(const std::vector<std::string>& labels, std::size_t loss_budget,
                   Encoding encoding = Encoding::InternalState);

}  // namespace ensim::protocols
