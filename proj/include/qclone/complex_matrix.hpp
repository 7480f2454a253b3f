#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qclone/errors.hpp"

namespace qclone {

using cplx = std::complex<double>;

// Library-wide default comparison tolerance. Every check that uses it also
// accepts an explicit tolerance argument.
inline constexpr double kDefaultTol = 1e-10;

// Dimension-product cap for Kronecker products (total Hilbert-space size).
inline constexpr std::size_t kKronDimCap = std::size_t{1} << 20;

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Dense complex matrix, row-major. Entries are validated finite on
// construction; all operations return new values.
class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, cplx{0.0, 0.0}) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (entries_.size() != rows_ * cols_)
            throw argument_error("ComplexMatrix: entry count does not match rows*cols");
        for (const cplx& z : entries_)
            if (!is_finite(z)) throw argument_error("ComplexMatrix: non-finite entry");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    const std::vector<cplx>& entries() const { return entries_; }
    std::vector<cplx>& mutable_entries() { return entries_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    cplx trace() const {
        if (!is_square()) throw argument_error("trace: matrix not square");
        cplx t{0.0, 0.0};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : entries_) m = std::max(m, std::abs(z));
        return m;
    }

    ComplexMatrix operator+(const ComplexMatrix& o) const {
        require_same_shape(o, "operator+");
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k)
            out.entries_[k] = entries_[k] + o.entries_[k];
        return out;
    }

    ComplexMatrix operator-(const ComplexMatrix& o) const {
        require_same_shape(o, "operator-");
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k)
            out.entries_[k] = entries_[k] - o.entries_[k];
        return out;
    }

    ComplexMatrix operator*(cplx s) const {
        ComplexMatrix out(rows_, cols_);
        for (std::size_t k = 0; k < entries_.size(); ++k) out.entries_[k] = entries_[k] * s;
        return out;
    }

    // C = A*B with the k-loop in the middle so both B rows and C rows stream.
    // Zero rows of B are skipped; density matrices of composed registers are
    // mostly zeros and this keeps their conjugation cheap.
    ComplexMatrix operator*(const ComplexMatrix& b) const {
        if (cols_ != b.rows_) throw argument_error("operator*: inner dimensions disagree");
        std::vector<char> b_row_nonzero(b.rows_, 0);
        for (std::size_t k = 0; k < b.rows_; ++k) {
            const cplx* brow = &b.entries_[k * b.cols_];
            for (std::size_t j = 0; j < b.cols_; ++j)
                if (brow[j] != cplx{0.0, 0.0}) {
                    b_row_nonzero[k] = 1;
                    break;
                }
        }
        ComplexMatrix c(rows_, b.cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t k = 0; k < cols_; ++k) {
                if (!b_row_nonzero[k]) continue;
                const cplx aik = (*this)(i, k);
                if (aik == cplx{0.0, 0.0}) continue;
                const cplx* brow = &b.entries_[k * b.cols_];
                cplx* crow = &c.entries_[i * b.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    std::vector<cplx> apply(const std::vector<cplx>& v) const {
        if (v.size() != cols_) throw argument_error("apply: vector dimension disagrees");
        std::vector<cplx> out(rows_, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < rows_; ++i) {
            cplx acc{0.0, 0.0};
            const cplx* row = &entries_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j) acc += row[j] * v[j];
            out[i] = acc;
        }
        return out;
    }

    bool bit_equal(const ComplexMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && entries_ == o.entries_;
    }

private:
    void require_same_shape(const ComplexMatrix& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw argument_error(std::string(who) + ": shape mismatch");
    }

    std::size_t rows_, cols_;
    std::vector<cplx> entries_;
};

// A * B^dagger without materializing the adjoint; inner loop streams rows of
// both, and all-zero rows of A are skipped.
inline ComplexMatrix multiply_adjoint(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.cols()) throw argument_error("multiply_adjoint: dimensions disagree");
    ComplexMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const cplx* arow = &a.entries()[i * a.cols()];
        bool nonzero = false;
        for (std::size_t k = 0; k < a.cols(); ++k)
            if (arow[k] != cplx{0.0, 0.0}) {
                nonzero = true;
                break;
            }
        if (!nonzero) continue;
        for (std::size_t j = 0; j < b.rows(); ++j) {
            cplx acc{0.0, 0.0};
            const cplx* brow = &b.entries()[j * b.cols()];
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * std::conj(brow[k]);
            c(i, j) = acc;
        }
    }
    return c;
}

// Kronecker product; dimension product is capped (defaults to 2^20).
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          std::size_t dim_cap = kKronDimCap) {
    const std::size_t r = a.rows() * b.rows();
    const std::size_t c = a.cols() * b.cols();
    if (r > dim_cap || c > dim_cap) throw size_error(std::max(r, c), dim_cap);
    ComplexMatrix out(r, c);
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja) {
            const cplx av = a(ia, ja);
            if (av == cplx{0.0, 0.0}) continue;
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = av * b(ib, jb);
        }
    return out;
}

// Pauli matrices and the qubit identity.
inline const ComplexMatrix& pauli_x() {
    static const ComplexMatrix m(2, 2, {cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}});
    return m;
}
inline const ComplexMatrix& pauli_y() {
    static const ComplexMatrix m(2, 2, {cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}});
    return m;
}
inline const ComplexMatrix& pauli_z() {
    static const ComplexMatrix m(2, 2, {cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}});
    return m;
}
inline const ComplexMatrix& identity2() {
    static const ComplexMatrix m = ComplexMatrix::identity(2);
    return m;
}

}  // namespace qclone
