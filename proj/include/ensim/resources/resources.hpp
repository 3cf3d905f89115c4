#pragma once

#include <cstdint>
#include <string>

namespace ensim::resources {

/// Closed-form expected pulse counts of the incremental growth strategy.
struct CostLedger {
    double p = 0.0;
    double eme_cost = 0.0;           // 2/p
    double three_cluster_cost = 0.0; // 3 * 32 * eme = 192/p
    double four_cluster_cost = 0.0;  // 2 * 2 * three = 768/p
    double per_qubit_cost = 0.0;     // 2 * four = 1536/p
};

CostLedger expected_costs(double p);

struct GrowthOptions {
    /// When set, EME rounds succeed at the protocol-derived rate (two pulses
    /// per attempt, acceptance probability ~2 p eta) instead of the idealized
    /// ledger rate (one pulse per attempt, probability p).
    bool protocol_rate = false;
    unsigned threads = 0;  // 0: pick automatically
};

struct GrowthStats {
    int target_n = 0;
    double p = 0.0;
    double eta = 1.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;

    double mean_pulses = 0.0;
    double stderr_pulses = 0.0;
    double mean_bond_attempts = 0.0;        // per trial
    double mean_attempts_per_qubit = 0.0;   // bond attempts / N
    double mean_pulses_per_eme = 0.0;
    double mean_pulses_per_three = 0.0;     // per successful 3-cluster
    double mean_pulses_per_four = 0.0;      // per successful 4-cluster
};

/// Monte Carlo of the incremental strategy: EME pairs feed 3-cluster attempts
/// (success 1/32), two 3-clusters per 4-cluster attempt (success 1/2), one
/// 4-cluster per bonding attempt (+2 qubits on success, -1 on failure, floor
/// at zero). Per-trial RNG streams derive from (seed, trial index); results
/// are independent of the thread count.
GrowthStats simulate_growth(int n, double p, std::uint64_t trials, std::uint64_t seed,
                            const GrowthOptions& opts = {});

/// Same model with loss: EME rounds succeed at rate p*eta and bonding at
/// (1/2) * [eta/(2-eta)]^2 (both heralding photons must survive readout and
/// detection from independently degraded inputs). The three-cluster rate is
/// kept at 1/32; see the module notes.
GrowthStats simulate_growth_lossy(int n, double p, double eta, std::uint64_t trials,
                                  std::uint64_t seed, const GrowthOptions& opts = {});

std::string to_csv_header();
std::string to_csv_row(const GrowthStats& s);
std::string to_json(const GrowthStats& s);

}  // namespace ensim::resources
