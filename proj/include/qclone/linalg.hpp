#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qclone/complex_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/state_vector.hpp"

namespace qclone {

inline ComplexMatrix gram_matrix(const std::vector<StateVector>& vs) {
    ComplexMatrix g(vs.size(), vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < vs.size(); ++j) g(i, j) = inner(vs[i], vs[j]);
    return g;
}

struct HermitianEigen {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

// Cyclic Jacobi for complex Hermitian matrices. Plenty for desk-scale sizes;
// results are consumed only through tolerance-checked scalars.
inline HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
    if (!m.is_square()) throw argument_error("hermitian_eigen: matrix not square");
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    ComplexMatrix v = ComplexMatrix::identity(n);

    double scale = a.max_abs();
    if (scale == 0.0) scale = 1.0;
    const double stop = 1e-15 * scale;

    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
        if (off <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= stop) continue;

                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                double t;
                if (tau >= 0)
                    t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
                else
                    t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx phase = apq / mag;          // e^{i arg(apq)}
                const cplx sp = s * phase;             // s e^{i phi}
                const cplx spc = s * std::conj(phase); // s e^{-i phi}

                // A <- G^dagger A G with G = I except
                // G(p,p)=c, G(p,q)=s e^{i phi}, G(q,p)=-s e^{-i phi}, G(q,q)=c.
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - spc * akq;
                    a(k, q) = sp * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sp * aqk;
                    a(q, k) = spc * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - spc * vkq;
                    v(k, q) = sp * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });

    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
    return hermitian_eigen(m).values;
}

// True iff m + shift*I admits a Cholesky factorization, i.e. the smallest
// eigenvalue of m exceeds -shift up to rounding. O(n^3/3), much cheaper than
// an eigensolve for large states.
inline bool cholesky_psd(const ComplexMatrix& m, double shift) {
    if (!m.is_square()) throw argument_error("cholesky_psd: matrix not square");
    const std::size_t n = m.rows();
    ComplexMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m(j, j).real() + shift;
        for (std::size_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
        if (diag <= 0.0 || !std::isfinite(diag)) return false;
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx acc = m(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
            l(i, j) = acc / ljj;
        }
    }
    return true;
}

// Extends a mutually orthonormal set of columns to a full unitary. Remaining
// columns come from Gram-Schmidt over the standard basis vectors in index
// order, discarding residuals below residual_tol; the supplied columns are
// copied into the result verbatim.
inline ComplexMatrix complete_isometry(const std::vector<StateVector>& columns,
                                       double ortho_tol = kDefaultTol,
                                       double residual_tol = 1e-10) {
    if (columns.empty()) throw argument_error("complete_isometry: no columns given");
    const std::size_t n = columns.front().dim();
    if (columns.size() > n)
        throw argument_error("complete_isometry: more columns than the space dimension");
    for (const StateVector& c : columns)
        if (c.dim() != n) throw argument_error("complete_isometry: mixed column dimensions");

    const ComplexMatrix g = gram_matrix(columns);
    for (std::size_t i = 0; i < columns.size(); ++i)
        for (std::size_t j = 0; j < columns.size(); ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            const double got = std::abs(g(i, j) - cplx{want, 0.0});
            if (got > ortho_tol)
                throw precondition_error(
                    "complete_isometry: columns not orthonormal, Gram(" + std::to_string(i) +
                    "," + std::to_string(j) + ") off by " + std::to_string(got));
        }

    std::vector<std::vector<cplx>> basis;
    basis.reserve(n);
    for (const StateVector& c : columns) basis.push_back(c.amplitudes());

    for (std::size_t cand = 0; cand < n && basis.size() < n; ++cand) {
        std::vector<cplx> r(n, cplx{0.0, 0.0});
        r[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalize once
            for (const auto& b : basis) {
                const cplx c = inner_raw(b, r);
                for (std::size_t i = 0; i < n; ++i) r[i] -= c * b[i];
            }
        }
        const double rn = norm_raw(r);
        if (rn < residual_tol) continue;
        for (cplx& z : r) z /= rn;
        basis.push_back(std::move(r));
    }
    if (basis.size() != n)
        throw precondition_error("complete_isometry: completion failed to span the space");

    ComplexMatrix out(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) out(i, j) = basis[j][i];
    return out;
}

inline double unitarity_defect(const ComplexMatrix& u) {
    const ComplexMatrix d = u.adjoint() * u - ComplexMatrix::identity(u.rows());
    return d.max_abs();
}

}  // namespace qclone
