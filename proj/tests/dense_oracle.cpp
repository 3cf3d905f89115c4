#include "dense_oracle.hpp"

#include <cmath>
#include <random>

namespace ensim::testing {

namespace {

void enumerate(std::size_t mode, int left, int cutoff, fock::Occupation& occ,
               std::vector<fock::Occupation>& out) {
    if (mode == occ.size()) {
        out.push_back(occ);
        return;
    }
    for (int n = 0; n <= std::min(cutoff, left); ++n) {
        occ[mode] = static_cast<std::uint8_t>(n);
        enumerate(mode + 1, left - n, cutoff, occ, out);
    }
    occ[mode] = 0;
}

}  // namespace

DenseOracle::DenseOracle(std::size_t n_modes, int cutoff, int total_max)
    : n_modes_(n_modes), cutoff_(cutoff), total_max_(total_max) {
    fock::Occupation occ(n_modes, 0);
    enumerate(0, total_max, cutoff, occ, basis_);
    for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
}

std::optional<std::size_t> DenseOracle::index(const fock::Occupation& occ) const {
    auto it = index_.find(occ);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Eigen::VectorXcd DenseOracle::from_sparse(const fock::PureState& s) const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim()));
    for (const auto& [occ, amp] : s.amplitudes()) {
        const auto idx = index(occ);
        if (!idx) throw std::runtime_error("DenseOracle: state outside oracle basis");
        v(static_cast<Eigen::Index>(*idx)) = amp;
    }
    return v;
}

fock::PureState DenseOracle::to_sparse(const Eigen::VectorXcd& v, const fock::RegistryPtr& reg,
                                       int cutoff) const {
    fock::PureState s(reg, cutoff);
    for (std::size_t i = 0; i < dim(); ++i) {
        const cplx amp = v(static_cast<Eigen::Index>(i));
        if (std::abs(amp) > 0.0) s.accumulate(basis_[i], amp);
    }
    return s;
}

Eigen::MatrixXcd DenseOracle::creation(std::size_t mode) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j) {
        fock::Occupation occ = basis_[j];
        const int n = occ[mode];
        occ[mode] = static_cast<std::uint8_t>(n + 1);
        const auto i = index(occ);
        if (i) m(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j)) =
            std::sqrt(double(n + 1));
    }
    return m;
}

Eigen::MatrixXcd DenseOracle::annihilation(std::size_t mode) const {
    return creation(mode).adjoint();
}

Eigen::MatrixXcd DenseOracle::number(std::size_t mode) const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim(), dim());
    for (std::size_t j = 0; j < dim(); ++j)
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = double(basis_[j][mode]);
    return m;
}

Eigen::MatrixXcd DenseOracle::mode_unitary(const std::vector<std::size_t>& modes,
                                           const CMatrix& u) const {
    const auto k = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXcd small(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) small(i, j) = u(i, j);

    // h = i log(U) through the Schur form (diagonal for a normal matrix).
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(small);
    const Eigen::MatrixXcd q = schur.matrixU();
    Eigen::VectorXcd phases(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const cplx lambda = schur.matrixT()(i, i);
        phases(i) = -std::arg(lambda);  // lambda = exp(-i theta)
    }
    const Eigen::MatrixXcd h = q * phases.asDiagonal() * q.adjoint();

    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(dim(), dim());
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) {
            if (std::abs(h(a, b)) == 0.0) continue;
            big += h(a, b) * (creation(modes[a]) * annihilation(modes[b]));
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(big);
    Eigen::VectorXcd expvals(dim());
    for (std::size_t i = 0; i < dim(); ++i)
        expvals(static_cast<Eigen::Index>(i)) =
            std::exp(cplx(0.0, -1.0) * es.eigenvalues()(static_cast<Eigen::Index>(i)));
    return es.eigenvectors() * expvals.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd DenseOracle::density(const fock::MixedState& s) const {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim(), dim());
    for (const fock::PureState& b : s.branches()) {
        const double n2 = b.norm_sq();
        if (n2 <= 0.0) continue;
        const Eigen::VectorXcd v = from_sparse(b);
        rho += (b.weight() / n2) * v * v.adjoint();
    }
    return rho;
}

Eigen::MatrixXcd DenseOracle::partial_trace(const Eigen::MatrixXcd& rho,
                                            const std::vector<std::size_t>& keep,
                                            const DenseOracle& kept_oracle) const {
    std::vector<std::size_t> traced;
    for (std::size_t m = 0; m < n_modes_; ++m) {
        bool kept = false;
        for (std::size_t k : keep) kept |= (k == m);
        if (!kept) traced.push_back(m);
    }

    auto split = [&](const fock::Occupation& occ) {
        fock::Occupation kept_occ(keep.size()), traced_occ(traced.size());
        for (std::size_t i = 0; i < keep.size(); ++i) kept_occ[i] = occ[keep[i]];
        for (std::size_t i = 0; i < traced.size(); ++i) traced_occ[i] = occ[traced[i]];
        return std::make_pair(kept_occ, traced_occ);
    };

    Eigen::MatrixXcd out =
        Eigen::MatrixXcd::Zero(kept_oracle.dim(), kept_oracle.dim());
    for (std::size_t i = 0; i < dim(); ++i) {
        const auto [ki, ti] = split(basis_[i]);
        const auto io = kept_oracle.index(ki);
        if (!io) continue;
        for (std::size_t j = 0; j < dim(); ++j) {
            const auto [kj, tj] = split(basis_[j]);
            if (ti != tj) continue;
            const auto jo = kept_oracle.index(kj);
            if (!jo) continue;
            out(static_cast<Eigen::Index>(*io), static_cast<Eigen::Index>(*jo)) +=
                rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return out;
}

double DenseOracle::uhlmann_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    auto sqrt_psd = [](const Eigen::MatrixXcd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        return Eigen::MatrixXcd(es.eigenvectors() * ev.asDiagonal() *
                                es.eigenvectors().adjoint());
    };
    const Eigen::MatrixXcd sa = sqrt_psd(a);
    const double tr = sqrt_psd(sa * b * sa).trace().real();
    return tr * tr;
}

fock::RegistryPtr plain_registry(std::size_t n_modes) {
    std::vector<fock::ModeInfo> modes;
    for (std::size_t i = 0; i < n_modes; ++i)
        modes.push_back({fock::ModeKind::OpticalH, "m" + std::to_string(i)});
    return std::make_shared<const fock::ModeRegistry>(std::move(modes));
}

CMatrix random_unitary(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::size_t j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    CMatrix u(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) u(i, j) = q(i, j);
    return u;
}

fock::PureState random_state(const DenseOracle& oracle, const fock::RegistryPtr& reg,
                             int cutoff, std::mt19937_64& rng, int max_terms) {
    std::uniform_int_distribution<std::size_t> pick(0, oracle.dim() - 1);
    std::uniform_int_distribution<int> count(1, max_terms);
    std::normal_distribution<double> g(0.0, 1.0);
    fock::PureState s(reg, cutoff);
    const int terms = count(rng);
    for (int i = 0; i < terms; ++i)
        s.accumulate(oracle.basis(pick(rng)), cplx(g(rng), g(rng)));
    if (s.norm() == 0.0) s.accumulate(oracle.basis(0), cplx{1.0});
    return s.normalized();
}

}  // namespace ensim::testing
