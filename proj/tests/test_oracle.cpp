// Randomized agreement suite between the sparse operations and the dense
// reference: every fock operation on instances of up to six modes at
// cutoff 2, checked to 1e-10.

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "doctest.h"
#include "ensim/fock/ops.hpp"

using namespace ensim;
using namespace ensim::fock;
using testing::DenseOracle;

namespace {

double vec_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return (a - b).norm();
}

struct Instance {
    std::size_t n_modes;
    RegistryPtr reg;
    DenseOracle oracle;        // ladder-capable basis (total <= cutoff + 1)
    DenseOracle state_oracle;  // state basis (total <= cutoff)

    explicit Instance(std::size_t n)
        : n_modes(n), reg(testing::plain_registry(n)), oracle(n, 2, 3), state_oracle(n, 2, 2) {}
};

}  // namespace

TEST_CASE("randomized dense-oracle agreement across all operations") {
    std::mt19937_64 rng(20240811);
    std::uniform_int_distribution<std::size_t> mode_count(1, 6);
    std::uniform_real_distribution<double> coin(0.0, 1.0);

    int cases = 0;
    while (cases < 1100) {
        const std::size_t n = mode_count(rng);
        Instance inst(n);
        std::uniform_int_distribution<std::uint32_t> pick_mode(0, std::uint32_t(n) - 1);

        PureState s = testing::random_state(inst.state_oracle, inst.reg, 2, rng);
        const Eigen::VectorXcd dense = inst.oracle.from_sparse(s);
        const std::uint32_t mode = pick_mode(rng);

        // create / annihilate
        {
            const PureState sparse = create(s, ModeId{mode});
            const Eigen::VectorXcd want = inst.oracle.creation(mode) * dense;
            CHECK(vec_distance(inst.oracle.from_sparse(sparse), want) < 1e-10);
        }
        {
            const PureState sparse = annihilate(s, ModeId{mode});
            const Eigen::VectorXcd want = inst.oracle.annihilation(mode) * dense;
            CHECK(vec_distance(inst.oracle.from_sparse(sparse), want) < 1e-10);
        }

        // occupation expectation
        {
            const double want =
                (dense.adjoint() * inst.oracle.number(mode) * dense).real()(0) /
                dense.squaredNorm();
            CHECK(std::abs(occupation_expectation(s, ModeId{mode}) - want) < 1e-10);
        }

        // mode unitary on 1..min(3, n) random modes
        {
            std::vector<std::size_t> all(n);
            for (std::size_t i = 0; i < n; ++i) all[i] = i;
            std::shuffle(all.begin(), all.end(), rng);
            const std::size_t k = 1 + static_cast<std::size_t>(coin(rng) * std::min<std::size_t>(3, n));
            std::vector<std::size_t> targets(all.begin(), all.begin() + std::min(k, n));
            std::vector<ModeId> target_ids;
            for (std::size_t t : targets) target_ids.push_back(ModeId{std::uint32_t(t)});
            const CMatrix u = testing::random_unitary(targets.size(), rng);

            const PureState sparse = apply_mode_unitary(s, std::span<const ModeId>(target_ids), u);
            const Eigen::VectorXcd want = inst.oracle.mode_unitary(targets, u) * dense;
            CHECK(vec_distance(inst.oracle.from_sparse(sparse), want) < 1e-10);
        }

        // projection
        {
            const int nproj = static_cast<int>(coin(rng) * 3);
            auto [proj, prob] = project_occupation(s, ModeId{mode}, nproj);
            Eigen::VectorXcd want = dense;
            for (std::size_t i = 0; i < inst.oracle.dim(); ++i)
                if (inst.oracle.basis(i)[mode] != nproj) want(static_cast<Eigen::Index>(i)) = 0;
            const double want_prob = want.squaredNorm() / dense.squaredNorm();
            CHECK(std::abs(prob - want_prob) < 1e-10);
            if (want_prob > 1e-12) {
                want.normalize();
                const Eigen::VectorXcd got = inst.oracle.from_sparse(proj);
                // Phases agree because projection never rotates amplitudes.
                CHECK(vec_distance(got, want) < 1e-10);
            }
        }

        // inner product and fidelity
        {
            const PureState t = testing::random_state(inst.state_oracle, inst.reg, 2, rng);
            const Eigen::VectorXcd td = inst.oracle.from_sparse(t);
            const cplx want = (dense.adjoint() * td)(0);
            CHECK(std::abs(inner_product(s, t) - want) < 1e-10);
            const double fwant = std::norm(want) / (dense.squaredNorm() * td.squaredNorm());
            CHECK(std::abs(fidelity(MixedState(s), t) - fwant) < 1e-10);
        }

        // trace_modes: reduced density matrices agree
        if (n >= 2) {
            std::vector<std::size_t> keep, traced;
            std::vector<ModeId> traced_ids;
            for (std::size_t i = 0; i < n; ++i) {
                if (coin(rng) < 0.5 && traced.size() + 1 < n) {
                    traced.push_back(i);
                    traced_ids.push_back(ModeId{std::uint32_t(i)});
                } else {
                    keep.push_back(i);
                }
            }
            if (!traced.empty()) {
                const MixedState mixed = trace_modes(s, std::span<const ModeId>(traced_ids));
                CHECK(std::abs(mixed.total_weight() - 1.0) < 1e-10);

                // Dense route: full density matrix, then partial trace.
                DenseOracle kept_oracle(keep.size(), 2, 2);
                const Eigen::MatrixXcd want = inst.state_oracle.partial_trace(
                    inst.state_oracle.density(MixedState(s)), keep, kept_oracle);

                // Branch route: embed branches (traced modes are zeroed) on
                // the kept modes.
                Eigen::MatrixXcd got =
                    Eigen::MatrixXcd::Zero(kept_oracle.dim(), kept_oracle.dim());
                for (const PureState& b : mixed.branches()) {
                    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(kept_oracle.dim());
                    for (const auto& [occ, amp] : b.amplitudes()) {
                        Occupation sub(keep.size());
                        for (std::size_t i = 0; i < keep.size(); ++i) sub[i] = occ[keep[i]];
                        v(static_cast<Eigen::Index>(*kept_oracle.index(sub))) = amp;
                    }
                    const double n2 = v.squaredNorm();
                    if (n2 > 0) got += (b.weight() / n2) * v * v.adjoint();
                }
                CHECK((got - want).cwiseAbs().maxCoeff() < 1e-10);
            }
        }

        ++cases;
    }
    CHECK(cases >= 1000);
}
