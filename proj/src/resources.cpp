#include "ensim/resources/resources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>
#include <vector>

#include "ensim/common.hpp"
#include "nlohmann/json.hpp"

namespace ensim::resources {

CostLedger expected_costs(double p) {
    if (p <= 0.0 || p >= 1.0) throw OutOfRangeError("expected_costs: p must lie in (0,1)");
    CostLedger c;
    c.p = p;
    c.eme_cost = 2.0 / p;
    c.three_cluster_cost = 3.0 * 32.0 * c.eme_cost;
    c.four_cluster_cost = 2.0 * 2.0 * c.three_cluster_cost;
    c.per_qubit_cost = 2.0 * c.four_cluster_cost;
    return c;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Number of Bernoulli(q) attempts up to and including the first success.
std::uint64_t geometric_trials(std::mt19937_64& rng, double q) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (q >= 1.0) return 1;
    // Inverse CDF; ceil(log(U)/log(1-q)) >= 1.
    const double x = u(rng);
    return 1 + static_cast<std::uint64_t>(std::floor(std::log1p(-x) / std::log1p(-q)));
}

/// Total Bernoulli(q) attempts needed for `successes` successes (sum of
/// geometrics, drawn in one shot).
std::uint64_t negative_binomial_total(std::mt19937_64& rng, std::uint64_t successes, double q) {
    if (successes == 0) return 0;
    if (q >= 1.0) return successes;
    std::negative_binomial_distribution<std::uint64_t> nb(successes, q);
    return nb(rng) + successes;
}

struct ModelParams {
    double round_rate;       // EME round acceptance probability
    int pulses_per_attempt;  // laser pulses per EME round attempt
    double three_rate;       // 3-cluster herald probability
    double bond_rate;        // fusion success probability
};

struct Totals {
    double pulses_sum = 0.0;
    double pulses_sq_sum = 0.0;
    double attempts_sum = 0.0;
    std::uint64_t emes = 0;
    std::uint64_t threes = 0;
    std::uint64_t fours = 0;
    std::uint64_t pulses_total = 0;

    void merge(const Totals& o) {
        pulses_sum += o.pulses_sum;
        pulses_sq_sum += o.pulses_sq_sum;
        attempts_sum += o.attempts_sum;
        emes += o.emes;
        threes += o.threes;
        fours += o.fours;
        pulses_total += o.pulses_total;
    }
};

void run_trial(std::mt19937_64& rng, int n, const ModelParams& mp, Totals& t) {
    std::uint64_t pulses = 0;
    std::uint64_t attempts = 0;
    int size = 0;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    while (size < n) {
        // Build one ancillary 4-cluster: repeat {two 3-clusters, coin} until
        // bonded. The grouped draws are distributionally identical to the
        // step-by-step hierarchy.
        const std::uint64_t four_attempts = geometric_trials(rng, 0.5);
        const std::uint64_t threes_needed = 2 * four_attempts;
        const std::uint64_t three_attempts =
            negative_binomial_total(rng, threes_needed, mp.three_rate);
        const std::uint64_t emes_needed = 3 * three_attempts;
        const std::uint64_t rounds = 2 * emes_needed;
        const std::uint64_t round_attempts =
            negative_binomial_total(rng, rounds, mp.round_rate);
        pulses += round_attempts * std::uint64_t(mp.pulses_per_attempt);

        t.emes += emes_needed;
        t.threes += threes_needed;
        t.fours += 1;

        ++attempts;
        if (u(rng) < mp.bond_rate)
            size += 2;
        else
            size = std::max(0, size - 1);
    }
    t.pulses_sum += double(pulses);
    t.pulses_sq_sum += double(pulses) * double(pulses);
    t.attempts_sum += double(attempts);
    t.pulses_total += pulses;
}

GrowthStats run_model(int n, double p, double eta, std::uint64_t trials, std::uint64_t seed,
                      const ModelParams& mp, const GrowthOptions& opts) {
    if (n < 1) throw OutOfRangeError("simulate_growth: N must be >= 1");
    if (trials < 1) throw OutOfRangeError("simulate_growth: trials must be >= 1");

    unsigned threads = opts.threads;
    if (threads == 0)
        threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

    // Fixed chunking by trial index: merge order does not depend on thread
    // scheduling, so results are bit-stable for a given seed.
    constexpr std::uint64_t kChunk = 1024;
    const std::uint64_t chunks = (trials + kChunk - 1) / kChunk;
    std::vector<Totals> chunk_totals(chunks);

    auto worker = [&](unsigned worker_id) {
        for (std::uint64_t c = worker_id; c < chunks; c += threads) {
            Totals t;
            const std::uint64_t begin = c * kChunk;
            const std::uint64_t end = std::min(trials, begin + kChunk);
            for (std::uint64_t trial = begin; trial < end; ++trial) {
                std::mt19937_64 rng(splitmix64(seed ^ splitmix64(trial + 1)));
                run_trial(rng, n, mp, t);
            }
            chunk_totals[c] = t;
        }
    };

    if (threads <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (std::thread& th : pool) th.join();
    }

    Totals total;
    for (const Totals& t : chunk_totals) total.merge(t);

    GrowthStats s;
    s.target_n = n;
    s.p = p;
    s.eta = eta;
    s.trials = trials;
    s.seed = seed;
    s.mean_pulses = total.pulses_sum / double(trials);
    const double var =
        total.pulses_sq_sum / double(trials) - s.mean_pulses * s.mean_pulses;
    s.stderr_pulses = std::sqrt(std::max(0.0, var) / double(trials));
    s.mean_bond_attempts = total.attempts_sum / double(trials);
    s.mean_attempts_per_qubit = s.mean_bond_attempts / double(n);
    s.mean_pulses_per_eme = double(total.pulses_total) / double(total.emes);
    s.mean_pulses_per_three = double(total.pulses_total) / double(total.threes);
    s.mean_pulses_per_four = double(total.pulses_total) / double(total.fours);
    return s;
}

}  // namespace

GrowthStats simulate_growth(int n, double p, std::uint64_t trials, std::uint64_t seed,
                            const GrowthOptions& opts) {
    if (p <= 0.0 || p >= 1.0) throw OutOfRangeError("simulate_growth: p must lie in (0,1)");
    ModelParams mp;
    if (opts.protocol_rate) {
        mp.round_rate = std::min(1.0, 2.0 * p);
        mp.pulses_per_attempt = 2;
    } else {
        mp.round_rate = p;
        mp.pulses_per_attempt = 1;
    }
    mp.three_rate = 1.0 / 32.0;
    mp.bond_rate = 0.5;
    return run_model(n, p, 1.0, trials, seed, mp, opts);
}

GrowthStats simulate_growth_lossy(int n, double p, double eta, std::uint64_t trials,
                                  std::uint64_t seed, const GrowthOptions& opts) {
    if (p <= 0.0 || p >= 1.0) throw OutOfRangeError("simulate_growth_lossy: p outside (0,1)");
    if (eta <= 0.0 || eta > 1.0) throw OutOfRangeError("simulate_growth_lossy: eta outside (0,1]");
    ModelParams mp;
    if (opts.protocol_rate) {
        mp.round_rate = std::min(1.0, 2.0 * p * eta);
        mp.pulses_per_attempt = 2;
    } else {
        mp.round_rate = p * eta;
        mp.pulses_per_attempt = 1;
    }
    mp.three_rate = 1.0 / 32.0;
    const double survive = eta / (2.0 - eta);  // (1-r) * eta
    mp.bond_rate = 0.5 * survive * survive;
    return run_model(n, p, eta, trials, seed, mp, opts);
}

std::string to_csv_header() { return "N,p,eta,trials,mean_pulses,stderr,mean_attempts"; }

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string to_csv_row(const GrowthStats& s) {
    return std::to_string(s.target_n) + "," + fmt(s.p) + "," + fmt(s.eta) + "," +
           std::to_string(s.trials) + "," + fmt(s.mean_pulses) + "," + fmt(s.stderr_pulses) +
           "," + fmt(s.mean_bond_attempts);
}

std::string to_json(const GrowthStats& s) {
    nlohmann::json j;
    j["N"] = s.target_n;
    j["p"] = s.p;
    j["eta"] = s.eta;
    j["trials"] = s.trials;
    j["seed"] = s.seed;
    j["mean_pulses"] = s.mean_pulses;
    j["stderr_pulses"] = s.stderr_pulses;
    j["mean_bond_attempts"] = s.mean_bond_attempts;
    j["mean_attempts_per_qubit"] = s.mean_attempts_per_qubit;
    j["mean_pulses_per_eme"] = s.mean_pulses_per_eme;
    j["mean_pulses_per_three_cluster"] = s.mean_pulses_per_three;
    j["mean_pulses_per_four_cluster"] = s.mean_pulses_per_four;
    return j.dump(2);
}

}  // namespace ensim::resources
