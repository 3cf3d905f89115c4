#include <cmath>

#include "ensim/protocols/protocols.hpp"

namespace ensim::protocols {

namespace {

void require_vacuum(const PureState& state, fock::ModeId mode, const char* what) {
    for (const auto& [occ, amp] : state.amplitudes()) {
        if (occ[mode.value] != 0)
            throw PreconditionError(std::string(what) + ": mode " +
                                    state.registry()->name(mode) + " is not in vacuum");
    }
}

}  // namespace

PureState excite(const PureState& state, const LogicalQubit& q, Pol pol,
                 const ExcitationParams& params) {
    if (params.p < 0.0 || params.p >= 1.0)
        throw OutOfRangeError("excite: p must lie in [0, 1)");
    const fock::ModeId atomic = pol == Pol::H ? q.atomic_h : q.atomic_v;
    const fock::ModeId optical = pol == Pol::H ? q.optical_h : q.optical_v;
    require_vacuum(state, optical, "excite");

    const int cutoff = state.cutoff();
    PureState out(state.registry(), cutoff);
    out.set_weight(state.weight());

    for (const auto& [occ, amp] : state.amplitudes()) {
        const int base_atomic = occ[atomic.value];
        double coeff = 1.0;  // p^(n/2)/n! times the ladder factors
        for (int n = 0; base_atomic + n <= cutoff && n <= cutoff; ++n) {
            if (n > 0) {
                // One more (S+ s+) application: p^(1/2)/n accumulates the
                // 1/n! and the two sqrt ladder factors land below.
                coeff *= std::sqrt(params.p) / n;
            }
            double ladder = 1.0;
            for (int k = 1; k <= n; ++k)
                ladder *= std::sqrt(double(base_atomic + k)) * std::sqrt(double(k));
            fock::Occupation dst = occ;
            dst[atomic.value] = static_cast<std::uint8_t>(base_atomic + n);
            dst[optical.value] = static_cast<std::uint8_t>(n);
            out.accumulate(dst, amp * coeff * ladder);
        }
    }
    return out.normalized();
}

MixedState excite(const MixedState& state, const LogicalQubit& q, Pol pol,
                  const ExcitationParams& params) {
    return state.map_branches([&](const PureState& b) { return excite(b, q, pol, params); });
}

PureState readout(const PureState& state, const LogicalQubit& q) {
    require_vacuum(state, q.optical_h, "readout");
    require_vacuum(state, q.optical_v, "readout");
    const CMatrix swap = optics::swap_matrix();
    PureState s = fock::apply_mode_unitary(state, {q.atomic_h, q.optical_h}, swap);
    return fock::apply_mode_unitary(s, {q.atomic_v, q.optical_v}, swap);
}

PureState readout_with_loss(const PureState& state, const LogicalQubit& q, double eta,
                            LossModePool& pool, std::vector<fock::ModeId>& used) {
    PureState s = readout(state, q);
    if (eta < 1.0) {
        for (fock::ModeId rail : {q.optical_h, q.optical_v}) {
            const fock::ModeId loss = pool.acquire();
            used.push_back(loss);
            s = fock::apply_mode_unitary(s, {rail, loss}, optics::beamsplitter_matrix(eta));
        }
    }
    return s;
}

}  // namespace ensim::protocols
