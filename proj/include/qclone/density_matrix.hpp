#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "qclone/complex_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/linalg.hpp"
#include "qclone/state_vector.hpp"

namespace qclone {

// Mixed state over a labeled register layout. Construction validates
// Hermiticity and unit trace entrywise, and positivity via a shifted Cholesky
// factorization (min eigenvalue >= -psd_tol up to rounding).
class DensityMatrix {
public:
    DensityMatrix(std::vector<std::size_t> layout, ComplexMatrix matrix,
                  double tol = kDefaultTol)
        : layout_(std::move(layout)), mat_(std::move(matrix)) {
        const std::size_t d = layout_dim(layout_);
        if (!mat_.is_square() || mat_.rows() != d)
            throw argument_error("DensityMatrix: matrix side does not match layout");
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j)
                if (std::abs(mat_(i, j) - std::conj(mat_(j, i))) > tol)
                    throw argument_error("DensityMatrix: not Hermitian within tolerance");
        if (std::abs(mat_.trace() - cplx{1.0, 0.0}) > tol)
            throw argument_error("DensityMatrix: trace differs from 1");
        if (!cholesky_psd(mat_, tol + 1e-13))
            throw argument_error("DensityMatrix: not positive semidefinite within tolerance");
    }

    static DensityMatrix from_pure(const StateVector& psi) {
        const std::size_t d = psi.dim();
        ComplexMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
        return DensityMatrix(psi.layout(), std::move(m));
    }

    static DensityMatrix maximally_mixed(std::vector<std::size_t> layout) {
        const std::size_t d = layout_dim(layout);
        ComplexMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0 / static_cast<double>(d);
        return DensityMatrix(std::move(layout), std::move(m));
    }

    std::size_t dim() const { return mat_.rows(); }
    const std::vector<std::size_t>& layout() const { return layout_; }
    const ComplexMatrix& matrix() const { return mat_; }

    double min_eigenvalue() const { return hermitian_eigenvalues(mat_).front(); }

    DensityMatrix reshaped(std::vector<std::size_t> new_layout) const {
        if (layout_dim(new_layout) != dim())
            throw argument_error("reshaped: layout dimension mismatch");
        return DensityMatrix(std::move(new_layout), mat_);
    }

    bool bit_equal(const DensityMatrix& o) const {
        return layout_ == o.layout_ && mat_.bit_equal(o.mat_);
    }

private:
    std::vector<std::size_t> layout_;
    ComplexMatrix mat_;
};

// Reduced state on the kept registers, order preserved. keep must be a
// non-empty subset of layout indices.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::set<std::size_t>& keep) {
    const auto& layout = rho.layout();
    if (keep.empty()) throw argument_error("partial_trace: empty keep set");
    for (std::size_t k : keep)
        if (k >= layout.size()) throw argument_error("partial_trace: register index out of range");

    std::vector<std::size_t> kept, traced;
    for (std::size_t r = 0; r < layout.size(); ++r)
        (keep.count(r) ? kept : traced).push_back(r);

    // stride of each register in the flat index (register 0 most significant)
    std::vector<std::size_t> stride(layout.size(), 1);
    for (std::size_t r = layout.size(); r-- > 1;) stride[r - 1] = stride[r] * layout[r];

    std::size_t dim_keep = 1, dim_tr = 1;
    std::vector<std::size_t> keep_layout;
    for (std::size_t r : kept) {
        dim_keep *= layout[r];
        keep_layout.push_back(layout[r]);
    }
    for (std::size_t r : traced) dim_tr *= layout[r];

    // flat offsets contributed by each composite kept / traced index
    auto offsets = [&](const std::vector<std::size_t>& regs, std::size_t count) {
        std::vector<std::size_t> off(count, 0);
        for (std::size_t x = 0; x < count; ++x) {
            std::size_t rem = x;
            for (std::size_t r = regs.size(); r-- > 0;) {
                off[x] += (rem % layout[regs[r]]) * stride[regs[r]];
                rem /= layout[regs[r]];
            }
        }
        return off;
    };
    const std::vector<std::size_t> koff = offsets(kept, dim_keep);
    const std::vector<std::size_t> toff = offsets(traced, dim_tr);

    const ComplexMatrix& m = rho.matrix();
    ComplexMatrix out(dim_keep, dim_keep);
    for (std::size_t i = 0; i < dim_keep; ++i)
        for (std::size_t j = 0; j < dim_keep; ++j) {
            cplx acc{0.0, 0.0};
            for (std::size_t t = 0; t < dim_tr; ++t)
                acc += m(koff[i] + toff[t], koff[j] + toff[t]);
            out(i, j) = acc;
        }
    return DensityMatrix(std::move(keep_layout), std::move(out));
}

// U rho U^dagger, preserving the layout. Ordered as U * (rho * U^dagger) so
// the zero-row skips see rho's sparsity on both multiplications.
inline DensityMatrix conjugate_evolve(const ComplexMatrix& u, const DensityMatrix& rho) {
    if (u.cols() != rho.dim()) throw argument_error("conjugate_evolve: dimension mismatch");
    ComplexMatrix t = multiply_adjoint(rho.matrix(), u);
    return DensityMatrix(rho.layout(), u * t);
}

}  // namespace qclone
