#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ensim/common.hpp"
#include "ensim/fock/ops.hpp"
#include "ensim/fock/state.hpp"

namespace ensim::detect {

using fock::ModeId;

/// How heralded steps are executed: ANALYTIC keeps every branch with exact
/// probabilities, SAMPLED draws one click pattern from the distribution with
/// the caller's RNG.
enum class ExecMode { Analytic, Sampled };

/// Observed photon counts over a fixed list of detector modes.
struct ClickPattern {
    std::vector<ModeId> modes;
    std::vector<int> counts;

    int count_for(ModeId m) const;
    int total() const;

    friend bool operator==(const ClickPattern& a, const ClickPattern& b) {
        return a.counts == b.counts;
    }
    friend bool operator<(const ClickPattern& a, const ClickPattern& b) {
        return a.counts < b.counts;
    }
};

std::string to_string(const ClickPattern& p);

/// A pending local mode transform on one qubit, recorded by heralded
/// protocols and applied later (optically, after readout).
struct Correction {
    std::string qubit;
    ModeId mode_h, mode_v;
    CMatrix unitary;  // 2x2 on (mode_h, mode_v)
    std::string label;
};

struct DetectionBranch {
    ClickPattern pattern;
    double probability = 0.0;
    fock::MixedState state;  // detector modes consumed (projected to vacuum)
};

struct DetectorOptions {
    /// Expected dark clicks per detector mode per measurement window. Zero by
    /// default; the protocols and acceptance checks never enable it.
    double dark_rate = 0.0;
};

/// Complete branch decomposition over the joint occupations of the detector
/// modes, sorted by pattern. Probabilities sum to the input branch weight
/// minus any mass previously lost to the cutoff.
std::vector<DetectionBranch> measure(const fock::MixedState& state,
                                     std::span<const ModeId> detector_modes,
                                     const DetectorOptions& opts = {});
std::vector<DetectionBranch> measure(const fock::PureState& state,
                                     std::span<const ModeId> detector_modes,
                                     const DetectorOptions& opts = {});

/// Accept predicate plus the local corrections implied by each accepted
/// pattern.
struct HeraldRule {
    std::function<bool(const ClickPattern&)> accept;
    std::function<std::vector<Correction>(const ClickPattern&)> corrections =
        [](const ClickPattern&) { return std::vector<Correction>{}; };
};

struct HeraldOutcome {
    bool success = false;
    double probability = 0.0;  // total accepted probability
    std::optional<DetectionBranch> selected;
    std::vector<Correction> corrections;  // for the selected pattern
    std::vector<DetectionBranch> accepted;  // full accepted set (analytic mode)
};

/// Post-selects `branches` on the rule. Analytic mode keeps the full accepted
/// set and selects `prefer` if given (first accepted pattern otherwise);
/// sampled mode draws one pattern from the full distribution.
HeraldOutcome herald(std::span<const DetectionBranch> branches, const HeraldRule& rule,
                     ExecMode mode, std::mt19937_64* rng = nullptr,
                     const ClickPattern* prefer = nullptr);

/// CSV rows "pattern,probability".
void write_click_csv(std::ostream& os, std::span<const DetectionBranch> branches);

}  // namespace ensim::detect
