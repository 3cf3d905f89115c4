#pragma once

// Test-only dense reference implementation. Everything here enumerates the
// full occupation basis and works with explicit matrices, deliberately
// avoiding the sparse code paths it is used to check. Mode unitaries go
// through the single-particle logarithm and a many-body matrix exponential
// rather than the multinomial substitution used by the library.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "ensim/fock/ops.hpp"
#include "ensim/fock/registry.hpp"
#include "ensim/fock/state.hpp"

namespace ensim::testing {

class DenseOracle {
  public:
    /// Basis: occupations over `n_modes` modes with each entry <= cutoff and
    /// total <= total_max.
    DenseOracle(std::size_t n_modes, int cutoff, int total_max);

    std::size_t dim() const { return basis_.size(); }
    std::size_t n_modes() const { return n_modes_; }
    const fock::Occupation& basis(std::size_t i) const { return basis_[i]; }
    std::optional<std::size_t> index(const fock::Occupation& occ) const;

    Eigen::VectorXcd from_sparse(const fock::PureState& s) const;
    fock::PureState to_sparse(const Eigen::VectorXcd& v, const fock::RegistryPtr& reg,
                              int cutoff) const;

    Eigen::MatrixXcd creation(std::size_t mode) const;
    Eigen::MatrixXcd annihilation(std::size_t mode) const;
    Eigen::MatrixXcd number(std::size_t mode) const;

    /// Many-body matrix of the passive transform a_k+ -> sum_j U(j,k) a_j+
    /// on `modes`, via exp(-i sum h_jk a_j+ a_k) with h = i log(U).
    Eigen::MatrixXcd mode_unitary(const std::vector<std::size_t>& modes,
                                  const CMatrix& u) const;

    /// rho = sum_b w_b |b><b| / <b|b>.
    Eigen::MatrixXcd density(const fock::MixedState& s) const;

    /// Reduced density matrix over `keep` (ascending mode indices).
    Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho,
                                   const std::vector<std::size_t>& keep,
                                   const DenseOracle& kept_oracle) const;

    static double uhlmann_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

  private:
    std::size_t n_modes_;
    int cutoff_;
    int total_max_;
    std::vector<fock::Occupation> basis_;
    std::map<fock::Occupation, std::size_t> index_;
};

/// Registry of n anonymous optical modes for oracle tests.
fock::RegistryPtr plain_registry(std::size_t n_modes);

/// Haar-ish random unitary via QR of a complex Gaussian matrix.
CMatrix random_unitary(std::size_t n, std::mt19937_64& rng);

/// Random normalized sparse state over the oracle basis.
fock::PureState random_state(const DenseOracle& oracle, const fock::RegistryPtr& reg,
                             int cutoff, std::mt19937_64& rng, int max_terms = 6);

}  // namespace ensim::testing
