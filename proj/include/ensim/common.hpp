#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ensim {

using cplx = std::complex<double>;

// Amplitudes below this magnitude are pruned from sparse states.
inline constexpr double kAmplitudePruneTol = 1e-14;
// Tolerance for accepting a matrix as unitary.
inline constexpr double kUnitaryTol = 1e-12;
inline constexpr int kDefaultCutoff = 3;

struct OutOfRangeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonUnitaryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DuplicateModeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct RegistryMismatchError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnequalEfficienciesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct GroupTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Small dense complex matrix, row-major. Used for mode transforms; these are
/// at most a handful of modes wide so no linear-algebra library is needed.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// 2x2 constructor, row major: [[a, b], [c, d]].
    static CMatrix mat2(cplx a, cplx b, cplx c, cplx d) {
        CMatrix m(2, 2);
        m(0, 0) = a;
        m(0, 1) = b;
        m(1, 0) = c;
        m(1, 1) = d;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    CMatrix adjoint() const {
        CMatrix m(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
        return m;
    }

    CMatrix operator*(const CMatrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("CMatrix: dimension mismatch");
        CMatrix m(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const cplx v = (*this)(i, k);
                if (v == cplx{}) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) m(i, j) += v * o(k, j);
            }
        return m;
    }

    bool operator==(const CMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    double max_deviation_from_identity() const {
        double dev = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                const cplx want = (i == j) ? cplx{1.0} : cplx{};
                dev = std::max(dev, std::abs((*this)(i, j) - want));
            }
        return dev;
    }

    bool is_unitary(double tol = kUnitaryTol) const {
        if (rows_ != cols_) return false;
        return (adjoint() * (*this)).max_deviation_from_identity() <= tol;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

inline void require_unitary(const CMatrix& u, const char* what) {
    if (!u.is_unitary()) throw NonUnitaryError(std::string(what) + ": matrix is not unitary");
}

}  // namespace ensim
