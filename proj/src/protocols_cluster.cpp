#include <algorithm>
#include <cmath>
#include <set>

#include "ensim/protocols/protocols.hpp"

namespace ensim::protocols {

ClusterGraph ClusterGraph::line(const std::vector<std::string>& vs) {
    ClusterGraph g;
    g.vertices = vs;
    for (std::size_t i = 0; i + 1 < vs.size(); ++i) g.edges.emplace_back(vs[i], vs[i + 1]);
    return g;
}

void ClusterGraph::validate() const {
    std::set<std::string> vset(vertices.begin(), vertices.end());
    if (vset.size() != vertices.size())
        throw PreconditionError("ClusterGraph: duplicate vertices");
    std::set<std::pair<std::string, std::string>> eset;
    for (const auto& [a, b] : edges) {
        if (a == b) throw PreconditionError("ClusterGraph: self-loop on " + a);
        if (!vset.count(a) || !vset.count(b))
            throw PreconditionError("ClusterGraph: edge references unknown vertex");
        auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
        if (!eset.insert(key).second) throw PreconditionError("ClusterGraph: duplicate edge");
    }
}

ClusterGraph ClusterGraph::without_vertices(std::span<const std::string> removed) const {
    std::set<std::string> gone(removed.begin(), removed.end());
    ClusterGraph g;
    for (const std::string& v : vertices)
        if (!gone.count(v)) g.vertices.push_back(v);
    for (const auto& [a, b] : edges)
        if (!gone.count(a) && !gone.count(b)) g.edges.emplace_back(a, b);
    return g;
}

PureState encode_cluster(const Layout& layout, const ClusterGraph& graph, int cutoff) {
    graph.validate();
    const std::size_t n = graph.vertices.size();
    if (n == 0) throw PreconditionError("encode_cluster: empty graph");
    if (n > 20) throw OutOfRangeError("encode_cluster: too many vertices");

    std::vector<const LogicalQubit*> qs;
    qs.reserve(n);
    for (const std::string& v : graph.vertices) qs.push_back(&layout.qubit(v));

    std::vector<std::pair<std::size_t, std::size_t>> edge_idx;
    for (const auto& [a, b] : graph.edges) {
        const auto ia = std::find(graph.vertices.begin(), graph.vertices.end(), a);
        const auto ib = std::find(graph.vertices.begin(), graph.vertices.end(), b);
        edge_idx.emplace_back(ia - graph.vertices.begin(), ib - graph.vertices.begin());
    }

    PureState out(layout.registry, cutoff);
    const double amp = std::pow(2.0, -0.5 * double(n));
    fock::Occupation base(layout.registry->size(), 0);
    for (std::uint32_t z = 0; z < (1u << n); ++z) {
        fock::Occupation occ = base;
        for (std::size_t k = 0; k < n; ++k) {
            const bool one = (z >> k) & 1u;
            occ[(one ? qs[k]->atomic_v : qs[k]->atomic_h).value] = 1;
        }
        int phase = 0;
        for (const auto& [ia, ib] : edge_idx)
            if (((z >> ia) & 1u) && ((z >> ib) & 1u)) ++phase;
        out.accumulate(occ, (phase % 2 == 0 ? amp : -amp));
    }
    return out;
}

PureState logical_basis_state(const fock::RegistryPtr& registry, int cutoff,
                              std::span<const std::pair<const LogicalQubit*, int>> values) {
    PureState out(registry, cutoff);
    fock::Occupation occ(registry->size(), 0);
    for (const auto& [q, v] : values) {
        if (v != 0 && v != 1) throw OutOfRangeError("logical_basis_state: value must be 0 or 1");
        occ[(v == 1 ? q->atomic_v : q->atomic_h).value] = 1;
    }
    out.accumulate(occ, cplx{1.0});
    return out;
}

Correction logical_z(const LogicalQubit& q) {
    Correction c;
    c.qubit = q.label;
    c.mode_h = q.atomic_h;
    c.mode_v = q.atomic_v;
    c.unitary = CMatrix::mat2(1, 0, 0, -1);
    c.label = "Z";
    return c;
}

Correction logical_x(const LogicalQubit& q) {
    Correction c;
    c.qubit = q.label;
    c.mode_h = q.atomic_h;
    c.mode_v = q.atomic_v;
    c.unitary = CMatrix::mat2(0, 1, 1, 0);
    c.label = "X";
    return c;
}

PureState apply_corrections_atomic(const PureState& state, std::span<const Correction> cs) {
    PureState s = state;
    for (const Correction& c : cs)
        s = fock::apply_mode_unitary(s, {c.mode_h, c.mode_v}, c.unitary);
    return s;
}

MixedState apply_corrections_atomic(const MixedState& state, std::span<const Correction> cs) {
    return state.map_branches(
        [&](const PureState& b) { return apply_corrections_atomic(b, cs); });
}

double state_distance(const PureState& a, const PureState& b) {
    fock::require_same_registry(a, b);
    double d2 = 0.0;
    for (const auto& [occ, amp] : a.amplitudes()) d2 += std::norm(amp - b.amplitude(occ));
    for (const auto& [occ, amp] : b.amplitudes()) {
        if (a.amplitude(occ) == cplx{}) d2 += std::norm(amp);
    }
    return std::sqrt(d2);
}

MeasureOutcome measure_qubit(const MixedState& in, const LogicalQubit& q, double theta,
                             const LossModel& loss, LossModePool& pool, ExecMode mode,
                             std::mt19937_64* rng, const ClickPattern* prefer) {
    MixedState state = in.map_branches([&](const PureState& b) { return readout(b, q); });

    std::vector<fock::ModeId> loss_used;
    const double eta = loss.eta();
    if (eta < 1.0) {
        const CMatrix bs = optics::beamsplitter_matrix(eta);
        for (fock::ModeId rail : {q.optical_h, q.optical_v}) {
            const fock::ModeId lm = pool.acquire();
            loss_used.push_back(lm);
            state = fock::apply_mode_unitary(state, std::vector<fock::ModeId>{rail, lm}, bs);
        }
    }

    // Rotate so that an h click is the +1 eigenstate of sin(theta) X + cos(theta) Y:
    // |+theta> = (|0> + i e^{-i theta} |1>)/sqrt(2).
    const cplx i{0.0, 1.0};
    CMatrix u(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    u(0, 0) = s;
    u(0, 1) = -i * std::exp(i * theta) * s;
    u(1, 0) = s;
    u(1, 1) = i * std::exp(i * theta) * s;
    state = fock::apply_mode_unitary(state, std::vector<fock::ModeId>{q.optical_h, q.optical_v},
                                     u);

    const std::vector<fock::ModeId> detectors{q.optical_h, q.optical_v};
    std::vector<detect::DetectionBranch> branches = detect::measure(state, detectors);

    const detect::DetectionBranch* selected = nullptr;
    if (mode == ExecMode::Sampled) {
        if (rng == nullptr) throw PreconditionError("measure_qubit: sampled mode needs an RNG");
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
        if (prefer != nullptr) {
            for (const auto& br : branches)
                if (br.pattern == *prefer) selected = &br;
        }
        if (selected == nullptr && !branches.empty()) selected = &branches.front();
    }

    MeasureOutcome out;
    out.branches = branches;
    if (selected == nullptr) return out;

    out.probability = selected->probability;
    MixedState post = selected->state;
    if (!loss_used.empty()) post = fock::trace_modes(post, loss_used);
    out.state = post.normalized();

    const int nh = selected->pattern.counts[0];
    const int nv = selected->pattern.counts[1];
    if (nh + nv == 0)
        out.result = MeasureOutcome::Result::HeraldedLoss;
    else if (nh == 1 && nv == 0)
        out.result = MeasureOutcome::Result::Plus;
    else if (nh == 0 && nv == 1)
        out.result = MeasureOutcome::Result::Minus;
    else
        out.result = MeasureOutcome::Result::Leakage;
    return out;
}

bool defer_unitary_check(const PureState& state, const LogicalQubit& q, const CMatrix& u,
                         double tol) {
    require_unitary(u, "defer_unitary_check");
    const std::vector<fock::ModeId> atomic{q.atomic_h, q.atomic_v};
    const std::vector<fock::ModeId> optical{q.optical_h, q.optical_v};
    const PureState lhs = readout(fock::apply_mode_unitary(state, atomic, u), q);
    const PureState rhs = fock::apply_mode_unitary(readout(state, q), optical, u);
    return state_distance(lhs, rhs) <= tol;
}

}  // namespace ensim::protocols
