#include <cmath>
#include <random>

#include "doctest.h"
#include "ensim/protocols/protocols.hpp"
#include "ensim/verify/claims.hpp"
#include "ensim/verify/verify.hpp"

using namespace ensim;
using namespace ensim::protocols;
using verify::claims::run_three_cluster_ideal;
using verify::claims::ThreeClusterRun;

namespace {

std::array<const LogicalQubit*, 3> kept_of(const ThreeClusterRun& run) {
    return {&run.layout.qubit(run.kept_labels[0]), &run.layout.qubit(run.kept_labels[1]),
            &run.layout.qubit(run.kept_labels[2])};
}

int h_clicks_of(const detect::ClickPattern& p) {
    return p.counts[0] + p.counts[2] + p.counts[4];
}

}  // namespace

TEST_CASE("ideal inputs herald at exactly 1/32") {
    ThreeClusterRun run = run_three_cluster_ideal(1.0, detect::ExecMode::Analytic);
    CHECK(run.outcome.success);
    CHECK(std::abs(run.outcome.probability - 1.0 / 32.0) < 1e-10);
}

TEST_CASE("all eight accepted patterns are equally likely and cluster-equivalent") {
    ThreeClusterRun run = run_three_cluster_ideal(1.0, detect::ExecMode::Analytic);
    const auto kept = kept_of(run);

    int accepted = 0;
    for (const auto& br : run.outcome.branches) {
        bool one_each = true;
        for (int d = 0; d < 3; ++d)
            one_each &= (br.pattern.counts[2 * d] + br.pattern.counts[2 * d + 1] == 1);
        if (!one_each) continue;
        ++accepted;
        CHECK(br.probability == doctest::Approx(1.0 / 256.0).epsilon(1e-12));

        const fock::PureState ref = three_cluster_reference(
            run.layout.registry, 2, kept, h_clicks_of(br.pattern));
        CHECK(fock::fidelity(br.state.normalized(), ref) == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(accepted == 8);
}

TEST_CASE("output is the three-qubit cluster up to local transforms") {
    ThreeClusterRun run = run_three_cluster_ideal(1.0, detect::ExecMode::Analytic);
    const auto kept = kept_of(run);

    // encode_cluster on a 3-line, then the known local frame: Hadamard on
    // every kept qubit maps (|---> + |+++>)/sqrt(2) onto the GHZ form, and
    // H (x) I (x) H turns that into the linear cluster.
    const ClusterGraph line =
        ClusterGraph::line({run.kept_labels[0], run.kept_labels[1], run.kept_labels[2]});
    const fock::PureState cluster = encode_cluster(run.layout, line, 2);

    const CMatrix had = optics::hadamard_matrix();
    fock::MixedState adjusted = run.outcome.state.normalized();
    adjusted = fock::apply_mode_unitary(
        adjusted, std::vector<fock::ModeId>{kept[1]->atomic_h, kept[1]->atomic_v}, had);
    CHECK(fock::fidelity(adjusted, cluster) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("success probability is 1/32 for every EME sign combination") {
    // Raw (H_i +/- H_j)(V_i +/- V_j) inputs with their recorded frame
    // corrections, fed through the projection network.
    for (int mask = 0; mask < 64; ++mask) {
        Layout layout = make_layout({"q1", "q2", "q3", "q4", "q5", "q6"}, 0);
        std::array<EmePairInput, 3> pairs{
            EmePairInput{&layout.qubit("q1"), &layout.qubit("q2")},
            EmePairInput{&layout.qubit("q3"), &layout.qubit("q4")},
            EmePairInput{&layout.qubit("q5"), &layout.qubit("q6")}};

        fock::PureState state = fock::PureState::vacuum(layout.registry, 2);
        std::vector<detect::Correction> pending;
        for (int k = 0; k < 3; ++k) {
            const int sh = (mask >> (2 * k)) & 1 ? -1 : +1;
            const int sv = (mask >> (2 * k + 1)) & 1 ? -1 : +1;
            const LogicalQubit& qi = *pairs[k].measured;
            const LogicalQubit& qj = *pairs[k].kept;
            // (H_i + sh H_j)(V_i + sv V_j)|G>, normalized.
            fock::PureState pair(layout.registry, 2);
            auto add = [&](fock::ModeId a, fock::ModeId b, double amp) {
                fock::PureState t = fock::create(
                    fock::create(fock::PureState::vacuum(layout.registry, 2), a), b);
                for (const auto& [occ, c] : t.amplitudes()) pair.accumulate(occ, amp * c);
            };
            add(qi.atomic_h, qi.atomic_v, 0.5);
            add(qi.atomic_h, qj.atomic_v, 0.5 * sv);
            add(qj.atomic_h, qi.atomic_v, 0.5 * sh);
            add(qj.atomic_h, qj.atomic_v, 0.5 * sh * sv);
            state = fock::tensor_product(state, pair);
            pending.push_back(eme_frame_correction(qi, sh, sv));
        }

        ThreeClusterOptions opts;
        opts.mode = detect::ExecMode::Analytic;
        ProtocolOutcome out = prepare_three_cluster(fock::MixedState(state), pairs, pending,
                                                    opts, layout.loss_pool);
        CHECK(std::abs(out.probability - 1.0 / 32.0) < 1e-10);

        const std::array<const LogicalQubit*, 3> kept{pairs[0].kept, pairs[1].kept,
                                                      pairs[2].kept};
        const fock::MixedState corrected =
            apply_corrections_atomic(out.state.normalized(), out.corrections);
        const fock::PureState ref =
            three_cluster_reference(layout.registry, 2, kept, 0);
        // Corrections map the selected pattern onto the canonical reference.
        const fock::PureState sel_ref = three_cluster_reference(
            layout.registry, 2, kept, h_clicks_of(out.pattern));
        CHECK(fock::fidelity(out.state.normalized(), sel_ref) ==
              doctest::Approx(1.0).epsilon(1e-9));
        CHECK(fock::fidelity(corrected, ref) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("lossless outputs stay in the computational subspace") {
    ThreeClusterRun run = run_three_cluster_ideal(1.0, detect::ExecMode::Analytic);
    const auto kept = kept_of(run);
    CHECK(verify::computational_subspace_weight(run.outcome.state.normalized(), kept) ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("degraded runs match the independent-loss reference") {
    for (double eta : {0.9, 2.0 / 3.0}) {
        ThreeClusterRun run = run_three_cluster_ideal(eta, detect::ExecMode::Analytic);
        const auto kept = kept_of(run);
        const double r = verify::loss_rate(eta);
        const fock::PureState ideal =
            three_cluster_reference(run.layout.registry, 2, kept, 0);
        const fock::MixedState reference = verify::id_reference(ideal, kept, r);
        CHECK(verify::mixed_fidelity(run.outcome.state, reference) >= 1.0 - 1e-8);
    }
}

TEST_CASE("sampled mode reproduces the analytic herald rate") {
    std::mt19937_64 rng(2025);
    int hits = 0;
    const int reps = 3000;
    for (int i = 0; i < reps; ++i) {
        ThreeClusterRun run = run_three_cluster_ideal(1.0, detect::ExecMode::Sampled, 2, &rng);
        if (run.outcome.success) ++hits;
    }
    const double freq = hits / double(reps);
    const double sigma = std::sqrt((1.0 / 32.0) / reps);
    CHECK(std::abs(freq - 1.0 / 32.0) < 5 * sigma);
}

TEST_CASE("full pipeline from pulses approaches the ideal-input herald rate") {
    const double p = 1e-4;
    verify::claims::ThreeClusterRun run = verify::claims::run_three_cluster_from_pulses(
        p, optics::LossModel{1.0, 1.0}, detect::ExecMode::Analytic, 3);
    CHECK(run.outcome.success);
    CHECK(std::abs(run.outcome.probability - 1.0 / 32.0) < 1e-3 / 32.0);

    const auto kept = kept_of(run);
    const fock::PureState ref = three_cluster_reference(run.layout.registry, 3, kept, 0);
    int h_clicks = h_clicks_of(run.outcome.pattern);
    const fock::PureState sel_ref =
        three_cluster_reference(run.layout.registry, 3, kept, h_clicks);
    CHECK(fock::fidelity(run.outcome.state.normalized(), sel_ref) >= 1.0 - 1e-6);
}
