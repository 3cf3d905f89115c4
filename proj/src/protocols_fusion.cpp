#include <cmath>

#include "ensim/protocols/protocols.hpp"

namespace ensim::protocols {

optics::Network cz_network(const LogicalQubit& l1, const LogicalQubit& l2) {
    optics::Network net;
    net.sources = {l1.optical_h, l1.optical_v, l2.optical_h, l2.optical_v};
    net.detectors = net.sources;
    net.elements.push_back(optics::make_hadamard(l1.optical_h, l1.optical_v));
    // Polarization-preserving 50/50 mixing of the two photons.
    net.elements.push_back(optics::make_beamsplitter(0.5, l1.optical_h, l2.optical_h));
    net.elements.push_back(optics::make_beamsplitter(0.5, l1.optical_v, l2.optical_v));
    return net;
}

FusionStatus classify_cz_pattern(const ClickPattern& pattern, const LogicalQubit& l1,
                                 const LogicalQubit& l2) {
    const int h_total = pattern.count_for(l1.optical_h) + pattern.count_for(l2.optical_h);
    const int v_total = pattern.count_for(l1.optical_v) + pattern.count_for(l2.optical_v);
    const int total = h_total + v_total;
    if (total < 2) return FusionStatus::Indeterminate;
    if (total == 2 && h_total == 1 && v_total == 1) return FusionStatus::Success;
    return FusionStatus::Failure;
}

CzOutcome cz_fuse(const MixedState& in, const LogicalQubit& l1, const LogicalQubit& l2,
                  const LogicalQubit& t3, const LogicalQubit& t4, const CzOptions& opts,
                  LossModePool& pool, std::mt19937_64* rng) {
    if (opts.mode == ExecMode::Sampled && rng == nullptr)
        throw PreconditionError("cz_fuse: sampled mode needs an RNG");

    MixedState state =
        in.map_branches([&](const PureState& b) { return readout(b, l1); });
    state = state.map_branches([&](const PureState& b) { return readout(b, l2); });

    std::vector<fock::ModeId> loss_used;
    const double eta = opts.loss.eta();
    if (eta < 1.0) {
        const CMatrix bs = optics::beamsplitter_matrix(eta);
        for (const LogicalQubit* l : {&l1, &l2}) {
            for (fock::ModeId rail : {l->optical_h, l->optical_v}) {
                const fock::ModeId lm = pool.acquire();
                loss_used.push_back(lm);
                state = fock::apply_mode_unitary(state, std::vector<fock::ModeId>{rail, lm}, bs);
            }
        }
    }

    const optics::Network net = cz_network(l1, l2);
    state = apply(net, state);

    std::vector<detect::DetectionBranch> branches = detect::measure(state, net.detectors);

    CzOutcome out;
    out.consumed = {l1.label, l2.label};
    for (const detect::DetectionBranch& br : branches) {
        switch (classify_cz_pattern(br.pattern, l1, l2)) {
            case FusionStatus::Success: out.p_success += br.probability; break;
            case FusionStatus::Failure: out.p_failure += br.probability; break;
            case FusionStatus::Indeterminate: out.p_indeterminate += br.probability; break;
        }
    }

    const detect::DetectionBranch* selected = nullptr;
    if (opts.mode == ExecMode::Sampled) {
        double total = 0.0;
        for (const auto& br : branches) total += br.probability;
        std::uniform_real_distribution<double> dist(0.0, total);
        double x = dist(*rng);
        for (const auto& br : branches) {
            if (x < br.probability) {
                selected = &br;
                break;
            }
            x -= br.probability;
        }
        if (selected == nullptr && !branches.empty()) selected = &branches.back();
    } else {
        if (opts.prefer) {
            for (const auto& br : branches)
                if (br.pattern == *opts.prefer) selected = &br;
        }
        if (selected == nullptr) {
            // Canonical: the first success pattern in deterministic order.
            for (const auto& br : branches) {
                if (classify_cz_pattern(br.pattern, l1, l2) == FusionStatus::Success) {
                    selected = &br;
                    break;
                }
            }
        }
        if (selected == nullptr && !branches.empty()) selected = &branches.front();
    }

    if (selected == nullptr) {
        out.status = FusionStatus::Indeterminate;
        out.note = "no detection branches";
        out.state = in;
        out.branches = std::move(branches);
        return out;
    }

    out.pattern = selected->pattern;
    out.status = classify_cz_pattern(out.pattern, l1, l2);

    MixedState post = selected->state;
    if (!loss_used.empty()) post = fock::trace_modes(post, loss_used);
    out.state = post.normalized();

    switch (out.status) {
        case FusionStatus::Success: {
            // Same-port pairs herald Z4 CZ34; cross-port pairs herald Z3 Z4 CZ34.
            const bool same_port =
                (out.pattern.count_for(l1.optical_h) == 1 &&
                 out.pattern.count_for(l1.optical_v) == 1) ||
                (out.pattern.count_for(l2.optical_h) == 1 &&
                 out.pattern.count_for(l2.optical_v) == 1);
            if (!same_port) out.corrections.push_back(logical_z(t3));
            out.corrections.push_back(logical_z(t4));
            break;
        }
        case FusionStatus::Failure: {
            const int h_total =
                out.pattern.count_for(l1.optical_h) + out.pattern.count_for(l2.optical_h);
            // h-type failures project t3 onto Z=+1, v-type onto Z=-1 with a
            // Z4 by-product.
            out.failure_z_outcome = h_total >= 2 ? +1 : -1;
            if (out.failure_z_outcome < 0) out.corrections.push_back(logical_z(t4));
            out.consumed.push_back(t3.label);
            break;
        }
        case FusionStatus::Indeterminate: {
            out.note = "fewer than two clicks: recover by Z-measuring " + t3.label + " and " +
                       t4.label;
            break;
        }
    }
    out.branches = std::move(branches);
    return out;
}

}  // namespace ensim::protocols
