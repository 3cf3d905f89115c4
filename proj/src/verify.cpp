#include "ensim/verify/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ensim::verify {

double loss_rate(double eta) {
    if (eta < 0.0 || eta > 1.0) throw OutOfRangeError("loss_rate: eta outside [0,1]");
    return 1.0 - 1.0 / (2.0 - eta);
}

double gate_factor(double eta) {
    if (eta < 0.0 || eta > 1.0) throw OutOfRangeError("gate_factor: eta outside [0,1]");
    return eta / (2.0 - eta);
}

double threshold_margin(double eta) { return gate_factor(eta) - 0.5; }

double source_loss_rate(double eta_s) {
    if (eta_s < 0.0 || eta_s > 1.0) throw OutOfRangeError("source_loss_rate: eta outside [0,1]");
    return 1.0 - eta_s / (2.0 - eta_s);
}

MixedState apply_excitation_superop(const MixedState& state, ModeId mode, double p,
                                    double eta) {
    if (p < 0.0 || p >= 1.0) throw OutOfRangeError("apply_excitation_superop: bad p");
    if (eta < 0.0 || eta > 1.0) throw OutOfRangeError("apply_excitation_superop: bad eta");
    const double x = p * (1.0 - eta);

    MixedState out;
    for (const PureState& b : state.branches()) {
        double coeff = 1.0;  // x^i / i!
        PureState raised = b.normalized();
        raised.set_weight(1.0);
        for (int i = 0; i <= state.cutoff(); ++i) {
            if (i > 0) {
                coeff *= x / i;
                raised = fock::create(raised, mode);
                if (coeff == 0.0) break;
            }
            const double mass = raised.norm_sq();
            if (mass <= 0.0) break;
            PureState branch = raised.normalized();
            branch.set_weight(b.weight() * coeff * mass);
            out.push_branch(std::move(branch));
        }
    }
    return out.normalized();
}

MixedState apply_loss_superop(const MixedState& state, ModeId mode, double r) {
    if (r < 0.0 || r > 1.0) throw OutOfRangeError("apply_loss_superop: r outside [0,1]");
    MixedState out;
    for (const PureState& b : state.branches()) {
        if (r < 1.0) {
            PureState intact = b;
            intact.set_weight(b.weight() * (1.0 - r));
            out.push_branch(std::move(intact));
        }
        if (r > 0.0) {
            for (int n = 0; n <= b.cutoff(); ++n) {
                auto [proj, prob] = fock::project_occupation(b, mode, n);
                if (prob <= 0.0) continue;
                // Mode read out destructively: excitations dumped to vacuum.
                PureState erased(b.registry(), b.cutoff());
                for (const auto& [occ, amp] : proj.amplitudes()) {
                    fock::Occupation cleared = occ;
                    cleared[mode.value] = 0;
                    erased.accumulate(cleared, amp);
                }
                erased.set_weight(b.weight() * r * prob);
                out.push_branch(std::move(erased));
            }
        }
    }
    return out;
}

MixedState id_reference(const PureState& ideal,
                        std::span<const protocols::LogicalQubit* const> qubits, double r) {
    MixedState rho{ideal.normalized()};
    rho.branches().front().set_weight(1.0);
    for (const protocols::LogicalQubit* q : qubits) {
        rho = apply_loss_superop(rho, q->atomic_h, r);
        rho = apply_loss_superop(rho, q->atomic_v, r);
    }
    return rho;
}

namespace {

/// Dense density matrix on the joint occupation support of the given states.
Eigen::MatrixXcd dense_on_support(const MixedState& s,
                                  const std::map<fock::Occupation, int>& index) {
    const auto n = static_cast<Eigen::Index>(index.size());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
    for (const PureState& b : s.branches()) {
        const double n2 = b.norm_sq();
        if (n2 <= 0.0) continue;
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        for (const auto& [occ, amp] : b.amplitudes()) v(index.at(occ)) = amp;
        rho += (b.weight() / n2) * v * v.adjoint();
    }
    return rho;
}

Eigen::MatrixXcd matrix_sqrt_psd(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double mixed_fidelity(const MixedState& a, const MixedState& b) {
    std::map<fock::Occupation, int> index;
    for (const MixedState* s : {&a, &b}) {
        for (const PureState& br : s->branches())
            for (const auto& [occ, amp] : br.amplitudes()) index.emplace(occ, 0);
    }
    int k = 0;
    for (auto& [occ, idx] : index) idx = k++;

    const Eigen::MatrixXcd ra = dense_on_support(a.normalized(), index);
    const Eigen::MatrixXcd rb = dense_on_support(b.normalized(), index);
    const Eigen::MatrixXcd sa = matrix_sqrt_psd(ra);
    const Eigen::MatrixXcd inner = matrix_sqrt_psd(sa * rb * sa);
    const double tr = inner.trace().real();
    return tr * tr;
}

double computational_subspace_weight(const MixedState& state,
                                     std::span<const protocols::LogicalQubit* const> qubits) {
    double acc = 0.0;
    for (const PureState& b : state.branches()) {
        const double n2 = b.norm_sq();
        if (n2 <= 0.0) continue;
        double mass = 0.0;
        for (const auto& [occ, amp] : b.amplitudes()) {
            bool ok = true;
            for (const protocols::LogicalQubit* q : qubits) {
                if (occ[q->atomic_h.value] + occ[q->atomic_v.value] != 1) {
                    ok = false;
                    break;
                }
            }
            if (ok) mass += std::norm(amp);
        }
        acc += b.weight() * mass / n2;
    }
    return acc;
}

double eme_excess_weight(const MixedState& state, const protocols::LogicalQubit& qi,
                         const protocols::LogicalQubit& qj) {
    double acc = 0.0;
    for (const PureState& b : state.branches()) {
        const double n2 = b.norm_sq();
        if (n2 <= 0.0) continue;
        double mass = 0.0;
        for (const auto& [occ, amp] : b.amplitudes()) {
            const int h_rail = occ[qi.atomic_h.value] + occ[qj.atomic_h.value];
            const int v_rail = occ[qi.atomic_v.value] + occ[qj.atomic_v.value];
            if (h_rail > 1 || v_rail > 1) mass += std::norm(amp);
        }
        acc += b.weight() * mass / n2;
    }
    return acc;
}

namespace {

/// Canonical per-qubit matrix table of a word, with each qubit's matrix phase
/// normalized (first entry of largest magnitude made real positive) so that
/// physically identical words deduplicate.
std::vector<std::pair<std::uint64_t, std::array<cplx, 4>>> canonical_key(
    const CorrectionWord& word) {
    std::map<std::uint64_t, CMatrix> per_qubit;  // keyed by (mode_h, mode_v)
    for (const detect::Correction& c : word) {
        const std::uint64_t key =
            (std::uint64_t(c.mode_h.value) << 32) | std::uint64_t(c.mode_v.value);
        auto it = per_qubit.find(key);
        if (it == per_qubit.end())
            per_qubit.emplace(key, c.unitary);
        else
            it->second = c.unitary * it->second;  // word applied left to right
    }
    std::vector<std::pair<std::uint64_t, std::array<cplx, 4>>> out;
    for (auto& [key, m] : per_qubit) {
        std::array<cplx, 4> e{m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
        std::size_t lead = 0;
        for (std::size_t i = 1; i < 4; ++i)
            if (std::abs(e[i]) > std::abs(e[lead]) + 1e-12) lead = i;
        const cplx phase = std::abs(e[lead]) > 0 ? e[lead] / std::abs(e[lead]) : cplx{1.0};
        for (cplx& x : e) {
            x /= phase;
            x = cplx(std::round(std::real(x) * 1e9) / 1e9, std::round(std::imag(x) * 1e9) / 1e9);
        }
        out.emplace_back(key, e);
    }
    return out;
}

struct KeyLess {
    bool operator()(const std::vector<std::pair<std::uint64_t, std::array<cplx, 4>>>& a,
                    const std::vector<std::pair<std::uint64_t, std::array<cplx, 4>>>& b) const {
        auto tup = [](const cplx& c) { return std::make_pair(c.real(), c.imag()); };
        if (a.size() != b.size()) return a.size() < b.size();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].first != b[i].first) return a[i].first < b[i].first;
            for (std::size_t j = 0; j < 4; ++j) {
                if (tup(a[i].second[j]) != tup(b[i].second[j]))
                    return tup(a[i].second[j]) < tup(b[i].second[j]);
            }
        }
        return false;
    }
};

}  // namespace

std::vector<CorrectionWord> correction_group(std::span<const CorrectionWord> generators,
                                             std::size_t bound) {
    std::vector<CorrectionWord> elements{CorrectionWord{}};  // identity
    std::set<std::vector<std::pair<std::uint64_t, std::array<cplx, 4>>>, KeyLess> seen;
    seen.insert(canonical_key(elements.front()));

    std::size_t frontier_begin = 0;
    while (frontier_begin < elements.size()) {
        const std::size_t frontier_end = elements.size();
        for (std::size_t i = frontier_begin; i < frontier_end; ++i) {
            for (const CorrectionWord& g : generators) {
                CorrectionWord next = elements[i];
                next.insert(next.end(), g.begin(), g.end());
                if (seen.insert(canonical_key(next)).second) {
                    elements.push_back(std::move(next));
                    if (elements.size() > bound)
                        throw GroupTooLargeError("correction_group: closure exceeds bound");
                }
            }
        }
        frontier_begin = frontier_end;
    }
    return elements;
}

EquivalenceResult equivalent_up_to_corrections(const MixedState& state,
                                               const PureState& reference,
                                               std::span<const CorrectionWord> group,
                                               double tol) {
    const MixedState normalized = state.normalized();
    for (const CorrectionWord& word : group) {
        const MixedState adjusted = protocols::apply_corrections_atomic(normalized, word);
        if (fock::fidelity(adjusted, reference) >= 1.0 - tol) return {true, word};
    }
    return {false, {}};
}

}  // namespace ensim::verify
