#include <cmath>

#include "ensim/protocols/protocols.hpp"

namespace ensim::protocols {

namespace {

using detect::DetectionBranch;

void require_ground(const MixedState& state, const LogicalQubit& q) {
    for (const PureState& b : state.branches()) {
        for (const auto& [occ, amp] : b.amplitudes()) {
            if (occ[q.atomic_h.value] != 0 || occ[q.atomic_v.value] != 0 ||
                occ[q.optical_h.value] != 0 || occ[q.optical_v.value] != 0)
                throw PreconditionError("prepare_eme: qubit " + q.label + " is not in |G>");
        }
    }
}

struct RoundResult {
    double probability = 0.0;  // total accepted probability of the round
    int sign = +1;             // +1: click in the first Stokes mode
    MixedState state;          // normalized post-round state
    bool success = false;
    ClickPattern pattern;
};

/// One heralded excitation round: pulse both ensembles on `pol`, mix the
/// Stokes photons on a 50/50 beamsplitter, accept exactly one click.
RoundResult run_round(const MixedState& in, const LogicalQubit& qi, const LogicalQubit& qj,
                      Pol pol, const EmeOptions& opts, LossModePool& pool,
                      std::mt19937_64* rng, int prefer_sign) {
    const fock::ModeId s_i = pol == Pol::H ? qi.optical_h : qi.optical_v;
    const fock::ModeId s_j = pol == Pol::H ? qj.optical_h : qj.optical_v;

    MixedState state = excite(in, qi, pol, ExcitationParams{opts.p});
    state = excite(state, qj, pol, ExcitationParams{opts.p});

    // Commuted loss placement: a single eta beamsplitter per Stokes mode at
    // the source (equivalent to eta_e at the ensembles plus eta_d at the
    // detectors).
    std::vector<fock::ModeId> loss_used;
    const double eta = opts.loss.eta();
    if (eta < 1.0) {
        for (fock::ModeId s : {s_i, s_j}) {
            const fock::ModeId l = pool.acquire();
            loss_used.push_back(l);
            state = fock::apply_mode_unitary(state, std::vector<fock::ModeId>{s, l},
                                             optics::beamsplitter_matrix(eta));
        }
    }

    state = apply(eme_round_network(qi, qj, pol), state);

    const std::vector<fock::ModeId> detectors{s_i, s_j};
    std::vector<DetectionBranch> branches = detect::measure(state, detectors);

    detect::HeraldRule rule;
    rule.accept = [](const ClickPattern& p) {
        return (p.counts[0] == 1 && p.counts[1] == 0) || (p.counts[0] == 0 && p.counts[1] == 1);
    };
    const ClickPattern prefer{detectors, prefer_sign > 0 ? std::vector<int>{1, 0}
                                                         : std::vector<int>{0, 1}};
    detect::HeraldOutcome h =
        detect::herald(branches, rule, opts.mode, rng, &prefer);

    RoundResult r;
    r.probability = h.probability;
    r.success = h.success;
    if (!h.success) {
        if (h.selected) r.pattern = h.selected->pattern;
        return r;
    }
    r.pattern = h.selected->pattern;
    r.sign = r.pattern.counts[0] == 1 ? +1 : -1;

    MixedState post = h.selected->state;
    if (!loss_used.empty()) post = fock::trace_modes(post, loss_used);
    r.state = post.normalized();
    return r;
}

}  // namespace

Correction eme_frame_correction(const LogicalQubit& qi, int sign_h, int sign_v) {
    Correction c;
    c.qubit = qi.label;
    c.mode_h = qi.atomic_h;
    c.mode_v = qi.atomic_v;
    // (H_i + s_h H_j)(V_i + s_v V_j) -> (H_i + V_j)(V_i + H_j) under
    // H_i -> s_h V_i, V_i -> s_v H_i (up to a global phase s_h s_v).
    c.unitary = CMatrix::mat2(0, sign_v, sign_h, 0);
    c.label = std::string("eme-frame(") + (sign_h > 0 ? "+" : "-") + "," +
              (sign_v > 0 ? "+" : "-") + ")";
    return c;
}

optics::Network eme_round_network(const LogicalQubit& qi, const LogicalQubit& qj, Pol pol) {
    const fock::ModeId s_i = pol == Pol::H ? qi.optical_h : qi.optical_v;
    const fock::ModeId s_j = pol == Pol::H ? qj.optical_h : qj.optical_v;
    optics::Network net;
    net.sources = {s_i, s_j};
    net.detectors = {s_i, s_j};
    net.elements.push_back(optics::make_beamsplitter(0.5, s_i, s_j));
    return net;
}

ProtocolOutcome prepare_eme(const MixedState& in, const LogicalQubit& qi, const LogicalQubit& qj,
                            const EmeOptions& opts, LossModePool& pool, std::mt19937_64* rng) {
    require_ground(in, qi);
    require_ground(in, qj);
    if (opts.mode == ExecMode::Sampled && rng == nullptr)
        throw PreconditionError("prepare_eme: sampled mode needs an RNG");

    ProtocolOutcome out;

    RoundResult rh = run_round(in, qi, qj, Pol::H, opts, pool, rng, opts.prefer_sign_h);
    if (!rh.success) {
        out.success = false;
        out.probability = rh.probability;
        out.note = "h round failed";
        out.state = in;
        return out;
    }

    RoundResult rv = run_round(rh.state, qi, qj, Pol::V, opts, pool, rng, opts.prefer_sign_v);
    if (!rv.success) {
        out.success = false;
        out.probability = rh.probability * rv.probability;
        out.note = "v round failed";
        out.state = rh.state;
        return out;
    }

    out.success = true;
    out.probability = rh.probability * rv.probability;
    out.state = rv.state;
    out.pattern = rv.pattern;
    out.corrections.push_back(eme_frame_correction(qi, rh.sign, rv.sign));
    return out;
}

PureState ideal_eme(const fock::RegistryPtr& registry, int cutoff, const LogicalQubit& qi,
                    const LogicalQubit& qj) {
    PureState vac = PureState::vacuum(registry, cutoff);
    // (H_i + V_j)(V_i + H_j)|G>
    PureState a = fock::create(vac, qi.atomic_v);
    a = fock::create(a, qi.atomic_h);  // H_i V_i
    PureState b = fock::create(vac, qj.atomic_h);
    b = fock::create(b, qi.atomic_h);  // H_i H_j
    PureState c = fock::create(vac, qi.atomic_v);
    c = fock::create(c, qj.atomic_v);  // V_j V_i
    PureState d = fock::create(vac, qj.atomic_h);
    d = fock::create(d, qj.atomic_v);  // V_j H_j

    PureState out(registry, cutoff);
    for (const PureState* part : {&a, &b, &c, &d})
        for (const auto& [occ, amp] : part->amplitudes()) out.accumulate(occ, amp);
    return out.normalized();
}

}  // namespace ensim::protocols
