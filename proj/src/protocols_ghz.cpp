#include <cmath>

#include "ensim/protocols/protocols.hpp"

namespace ensim::protocols {

namespace {

constexpr double kQuarterPi = 0.78539816339744830961;

/// Exactly one photon at each of the three polarization-resolving detectors.
bool one_photon_per_detector(const ClickPattern& p) {
    // Pattern modes are ordered (h_1, v_1, h_3, v_3, h_5, v_5).
    for (int d = 0; d < 3; ++d) {
        if (p.counts[2 * d] + p.counts[2 * d + 1] != 1) return false;
    }
    return true;
}

int h_click_count(const ClickPattern& p) {
    return p.counts[0] + p.counts[2] + p.counts[4];
}

}  // namespace

optics::Network three_cluster_network(const std::array<EmePairInput, 3>& pairs) {
    optics::Network net;
    for (const EmePairInput& pr : pairs) {
        net.sources.push_back(pr.measured->optical_h);
        net.sources.push_back(pr.measured->optical_v);
    }
    net.detectors = net.sources;

    const LogicalQubit& m1 = *pairs[0].measured;
    const LogicalQubit& m3 = *pairs[1].measured;
    const LogicalQubit& m5 = *pairs[2].measured;

    for (const LogicalQubit* m : {&m1, &m3, &m5})
        net.elements.push_back(optics::make_rotator(kQuarterPi, m->optical_h, m->optical_v));
    net.elements.push_back(
        optics::make_pbs(m1.optical_h, m1.optical_v, m3.optical_h, m3.optical_v));
    net.elements.push_back(
        optics::make_pbs(m3.optical_h, m3.optical_v, m5.optical_h, m5.optical_v));
    for (const LogicalQubit* m : {&m1, &m3, &m5})
        net.elements.push_back(optics::make_rotator(kQuarterPi, m->optical_h, m->optical_v));
    return net;
}

PureState three_cluster_reference(const fock::RegistryPtr& registry, int cutoff,
                                  const std::array<const LogicalQubit*, 3>& kept,
                                  int h_clicks) {
    // (|---> + (-1)^n_h |+++>)/sqrt(2) with |+/-> = (H+ +/- V+)|G>/sqrt(2).
    PureState out(registry, cutoff);
    const double sigma = (h_clicks % 2 == 0) ? 1.0 : -1.0;
    const double amp = 1.0 / (std::sqrt(2.0) * std::sqrt(8.0));
    fock::Occupation base(registry->size(), 0);
    for (int bits = 0; bits < 8; ++bits) {
        fock::Occupation occ = base;
        int ones = 0;
        for (int k = 0; k < 3; ++k) {
            const bool one = (bits >> k) & 1;
            ones += one;
            occ[(one ? kept[k]->atomic_v : kept[k]->atomic_h).value] = 1;
        }
        // |---> expands with (-1)^(#V); |+++> with +1.
        const double minus_part = (ones % 2 == 0) ? 1.0 : -1.0;
        out.accumulate(occ, amp * (minus_part + sigma));
    }
    return out.normalized();
}

ProtocolOutcome prepare_three_cluster(const MixedState& in,
                                      const std::array<EmePairInput, 3>& pairs,
                                      std::span<const Correction> pending,
                                      const ThreeClusterOptions& opts, LossModePool& pool,
                                      std::mt19937_64* rng) {
    if (opts.mode == ExecMode::Sampled && rng == nullptr)
        throw PreconditionError("prepare_three_cluster: sampled mode needs an RNG");

    // Readout pulses on the measured qubits.
    MixedState state = in;
    std::vector<fock::ModeId> loss_used;
    const double eta = opts.loss.eta();
    for (const EmePairInput& pr : pairs) {
        state = state.map_branches(
            [&](const PureState& b) { return readout(b, *pr.measured); });
    }

    // Pending EME-frame corrections, deferred to the optical side.
    for (const Correction& c : pending) {
        const LogicalQubit* owner = nullptr;
        for (const EmePairInput& pr : pairs)
            if (pr.measured->label == c.qubit) owner = pr.measured;
        if (owner == nullptr)
            throw PreconditionError("prepare_three_cluster: pending correction on qubit '" +
                                    c.qubit + "' which is not a measured qubit");
        state = fock::apply_mode_unitary(
            state, std::vector<fock::ModeId>{owner->optical_h, owner->optical_v}, c.unitary);
    }

    // Commuted source loss on all six photonic modes.
    if (eta < 1.0) {
        const CMatrix bs = optics::beamsplitter_matrix(eta);
        for (const EmePairInput& pr : pairs) {
            for (fock::ModeId rail : {pr.measured->optical_h, pr.measured->optical_v}) {
                const fock::ModeId l = pool.acquire();
                loss_used.push_back(l);
                state = fock::apply_mode_unitary(state, std::vector<fock::ModeId>{rail, l}, bs);
            }
        }
    }

    const optics::Network net = three_cluster_network(pairs);
    state = apply(net, state);

    std::vector<detect::DetectionBranch> branches = detect::measure(state, net.detectors);

    detect::HeraldRule rule;
    rule.accept = one_photon_per_detector;
    const ClickPattern* prefer = opts.prefer ? &*opts.prefer : nullptr;
    detect::HeraldOutcome h = detect::herald(branches, rule, opts.mode, rng, prefer);

    ProtocolOutcome out;
    out.probability = h.probability;
    out.branches = std::move(branches);
    out.success = h.success;
    for (const EmePairInput& pr : pairs) out.consumed.push_back(pr.measured->label);
    if (!h.success) {
        if (h.selected) out.pattern = h.selected->pattern;
        out.note = "herald failed";
        out.state = in;
        return out;
    }

    out.pattern = h.selected->pattern;
    MixedState post = h.selected->state;
    if (!loss_used.empty()) post = fock::trace_modes(post, loss_used);
    out.state = post.normalized();

    // (|---> - |+++>) maps to the canonical +1 form under X on one kept
    // qubit (global phase aside).
    if (h_click_count(out.pattern) % 2 == 1) out.corrections.push_back(logical_x(*pairs[0].kept));
    return out;
}

}  // namespace ensim::protocols
