#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ensim/protocols/protocols.hpp"

namespace ensim::verify::claims {

struct ClaimResult {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// A complete three-cluster run: the layout it happened on plus the outcome.
struct ThreeClusterRun {
    protocols::Layout layout;
    protocols::ProtocolOutcome outcome;
    std::array<std::string, 3> measured_labels;
    std::array<std::string, 3> kept_labels;
};

/// Builds three ideal EME pairs and runs the three-cluster projection with
/// commuted source loss eta.
ThreeClusterRun run_three_cluster_ideal(double eta, detect::ExecMode mode, int cutoff = 2,
                                        std::mt19937_64* rng = nullptr,
                                        const detect::ClickPattern* prefer = nullptr);

/// Full pipeline from excitation pulses: three EME preparations followed by
/// the three-cluster projection. Analytic mode post-selects the canonical
/// herald; sampled mode retries failed EME rounds up to `max_round_attempts`.
ThreeClusterRun run_three_cluster_from_pulses(double p, const optics::LossModel& loss,
                                              detect::ExecMode mode, int cutoff = kDefaultCutoff,
                                              std::mt19937_64* rng = nullptr,
                                              int max_round_attempts = 200);

/// The quantitative claims checked by `verify-claims`: the 1/32 herald rate,
/// the 1/2 fusion rate, the r(eta) degradation law, the eta > 2/3 threshold,
/// and the 1536 N / p pulse ledger.
std::vector<ClaimResult> run_paper_claims(std::uint64_t mc_trials = 100000,
                                          std::uint64_t seed = 12345);

bool all_pass(const std::vector<ClaimResult>& results);

std::string format_table(const std::vector<ClaimResult>& results);

}  // namespace ensim::verify::claims
