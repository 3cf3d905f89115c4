#include "ensim/fock/ops.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace ensim::fock {

namespace {

void require_registered(const PureState& state, ModeId mode) {
    if (!state.registry()->contains(mode))
        throw OutOfRangeError("fock: unregistered mode");
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

PureState create(const PureState& state, ModeId mode) {
    require_registered(state, mode);
    PureState out(state.registry(), state.cutoff());
    out.set_weight(state.weight());
    out.add_truncated_weight(state.truncated_weight());
    for (const auto& [occ, amp] : state.amplitudes()) {
        const int n = occ[mode.value];
        if (n + 1 > state.cutoff()) {
            out.add_truncated_weight(std::norm(amp) * (n + 1));
            continue;
        }
        Occupation next = occ;
        ++next[mode.value];
        out.accumulate(next, amp * std::sqrt(double(n + 1)));
    }
    return out;
}

PureState annihilate(const PureState& state, ModeId mode) {
    require_registered(state, mode);
    PureState out(state.registry(), state.cutoff());
    out.set_weight(state.weight());
    out.add_truncated_weight(state.truncated_weight());
    for (const auto& [occ, amp] : state.amplitudes()) {
        const int n = occ[mode.value];
        if (n == 0) continue;
        Occupation next = occ;
        --next[mode.value];
        out.accumulate(next, amp * std::sqrt(double(n)));
    }
    return out;
}

double occupation_expectation(const PureState& state, ModeId mode) {
    require_registered(state, mode);
    double acc = 0.0;
    for (const auto& [occ, amp] : state.amplitudes()) acc += std::norm(amp) * occ[mode.value];
    const double n2 = state.norm_sq();
    return n2 == 0.0 ? 0.0 : acc / n2;
}

namespace {

/// One partial monomial while re-expanding the target-mode content of a basis
/// term: exponents of the target modes plus the accumulated coefficient.
struct Partial {
    std::vector<int> exponents;
    cplx coeff;
};

/// Enumerates compositions of n into `parts` nonneg integers.
void for_each_composition(int n, int parts, std::vector<int>& scratch,
                          const std::function<void(const std::vector<int>&)>& fn, int idx = 0,
                          int left = -1) {
    if (left < 0) left = n;
    if (idx == parts - 1) {
        scratch[idx] = left;
        fn(scratch);
        return;
    }
    for (int k = 0; k <= left; ++k) {
        scratch[idx] = k;
        for_each_composition(n, parts, scratch, fn, idx + 1, left - k);
    }
}

}  // namespace

PureState apply_mode_unitary(const PureState& state, std::span<const ModeId> modes,
                             const CMatrix& u) {
    if (u.rows() != modes.size() || u.cols() != modes.size())
        throw std::invalid_argument("apply_mode_unitary: matrix/mode count mismatch");
    for (ModeId m : modes) require_registered(state, m);
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j)
            if (modes[i] == modes[j]) throw DuplicateModeError("apply_mode_unitary: repeated mode");
    require_unitary(u, "apply_mode_unitary");

    const int t = static_cast<int>(modes.size());
    const int cutoff = state.cutoff();

    PureState out(state.registry(), cutoff);
    out.set_weight(state.weight());
    out.add_truncated_weight(state.truncated_weight());

    std::vector<int> comp(static_cast<std::size_t>(t));
    for (const auto& [occ, amp] : state.amplitudes()) {
        // Coefficient form: divide out sqrt(n_k!) of the source monomial.
        double src_fact = 1.0;
        std::vector<int> n(static_cast<std::size_t>(t));
        for (int k = 0; k < t; ++k) {
            n[k] = occ[modes[k].value];
            src_fact *= factorial(n[k]);
        }

        std::vector<Partial> partials{{std::vector<int>(t, 0), amp / std::sqrt(src_fact)}};
        for (int k = 0; k < t; ++k) {
            if (n[k] == 0) continue;
            std::vector<Partial> next;
            const double nk_fact = factorial(n[k]);
            for_each_composition(n[k], t, comp, [&](const std::vector<int>& m) {
                cplx factor = nk_fact;
                for (int j = 0; j < t; ++j) {
                    if (m[j] == 0) continue;
                    factor /= factorial(m[j]);
                    cplx ujk = u(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
                    for (int q = 0; q < m[j]; ++q) factor *= ujk;
                    if (factor == cplx{}) break;
                }
                if (factor == cplx{}) return;
                for (const Partial& p : partials) {
                    Partial np;
                    np.exponents.resize(static_cast<std::size_t>(t));
                    bool over = false;
                    for (int j = 0; j < t; ++j) {
                        np.exponents[j] = p.exponents[j] + m[j];
                        if (np.exponents[j] > cutoff) over = true;
                    }
                    np.coeff = p.coeff * factor;
                    if (over) continue;  // settled below via exact-norm accounting
                    next.push_back(std::move(np));
                }
            });
            partials = std::move(next);
        }

        for (const Partial& p : partials) {
            double dst_fact = 1.0;
            for (int e : p.exponents) dst_fact *= factorial(e);
            Occupation dst = occ;
            for (int k = 0; k < t; ++k) dst[modes[k].value] = static_cast<std::uint8_t>(p.exponents[k]);
            out.accumulate(dst, p.coeff * std::sqrt(dst_fact));
        }
    }

    // Unitarity means any missing norm was truncated at the cutoff.
    const double lost = state.norm_sq() - out.norm_sq();
    if (lost > 0.0) out.add_truncated_weight(lost);
    out.prune();
    return out;
}

PureState apply_mode_unitary(const PureState& state, std::initializer_list<ModeId> modes,
                             const CMatrix& u) {
    std::vector<ModeId> v(modes);
    return apply_mode_unitary(state, std::span<const ModeId>(v), u);
}

MixedState apply_mode_unitary(const MixedState& state, std::span<const ModeId> modes,
                              const CMatrix& u) {
    return state.map_branches(
        [&](const PureState& b) { return apply_mode_unitary(b, modes, u); });
}

std::pair<PureState, double> project_occupation(const PureState& state, ModeId mode, int n) {
    require_registered(state, mode);
    if (n < 0 || n > state.cutoff()) throw OutOfRangeError("project_occupation: n out of range");

    PureState kept(state.registry(), state.cutoff());
    double mass = 0.0;
    for (const auto& [occ, amp] : state.amplitudes()) {
        if (occ[mode.value] != n) continue;
        kept.accumulate(occ, amp);
        mass += std::norm(amp);
    }
    if (mass > 0.0) kept.scale(1.0 / std::sqrt(mass));
    kept.set_weight(state.weight() * mass);
    return {std::move(kept), mass};
}

namespace {

MixedState trace_modes_pure(const PureState& state, std::span<const ModeId> modes) {
    for (ModeId m : modes) require_registered(state, m);

    // Key = joint occupation pattern of the traced modes; ordered map gives a
    // deterministic branch order.
    std::map<std::vector<std::uint8_t>, PureState> groups;
    for (const auto& [occ, amp] : state.amplitudes()) {
        std::vector<std::uint8_t> key(modes.size());
        for (std::size_t i = 0; i < modes.size(); ++i) key[i] = occ[modes[i].value];
        auto it = groups.find(key);
        if (it == groups.end())
            it = groups.emplace(std::move(key), PureState(state.registry(), state.cutoff())).first;
        Occupation cleared = occ;
        for (ModeId m : modes) cleared[m.value] = 0;
        it->second.accumulate(cleared, amp);
    }

    MixedState out;
    for (auto& [key, branch] : groups) {
        const double mass = branch.norm_sq();
        if (mass <= 0.0) continue;
        branch.scale(1.0 / std::sqrt(mass));
        branch.set_weight(state.weight() * mass);
        out.push_branch(std::move(branch));
    }
    return out;
}

}  // namespace

MixedState trace_modes(const PureState& state, std::span<const ModeId> modes) {
    return trace_modes_pure(state, modes);
}

MixedState trace_modes(const MixedState& state, std::span<const ModeId> modes) {
    MixedState out;
    for (const PureState& b : state.branches()) {
        MixedState part = trace_modes_pure(b, modes);
        for (PureState& p : part.branches()) out.push_branch(std::move(p));
    }
    return out;
}

PureState tensor_product(const PureState& a, const PureState& b) {
    require_same_registry(a, b);
    PureState out(a.registry(), a.cutoff());
    out.set_weight(a.weight() * b.weight());
    for (const auto& [occ_a, amp_a] : a.amplitudes()) {
        for (const auto& [occ_b, amp_b] : b.amplitudes()) {
            Occupation occ = occ_a;
            bool over = false;
            for (std::size_t i = 0; i < occ.size(); ++i) {
                occ[i] = static_cast<std::uint8_t>(occ[i] + occ_b[i]);
                if (occ[i] > a.cutoff()) over = true;
            }
            if (over) {
                out.add_truncated_weight(std::norm(amp_a * amp_b));
                continue;
            }
            out.accumulate(occ, amp_a * amp_b);
        }
    }
    return out;
}

cplx inner_product(const PureState& a, const PureState& b) {
    require_same_registry(a, b);
    // Iterate the smaller map.
    const PureState& small = a.term_count() <= b.term_count() ? a : b;
    const PureState& large = a.term_count() <= b.term_count() ? b : a;
    const bool swapped = &small != &a;
    cplx acc{};
    for (const auto& [occ, amp] : small.amplitudes()) {
        const cplx other = large.amplitude(occ);
        if (other == cplx{}) continue;
        acc += swapped ? std::conj(other) * amp : std::conj(amp) * other;
    }
    return acc;
}

double fidelity(const MixedState& state, const PureState& reference) {
    const PureState ref = reference.normalized();
    double acc = 0.0;
    for (const PureState& b : state.branches()) {
        const double n2 = b.norm_sq();
        if (n2 == 0.0) continue;
        acc += b.weight() * std::norm(inner_product(b, ref)) / n2;
    }
    return acc;
}

double fidelity(const PureState& state, const PureState& reference) {
    return fidelity(MixedState(state), reference);
}

}  // namespace ensim::fock
