#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "qclone/complex_matrix.hpp"
#include "qclone/density_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/linalg.hpp"
#include "qclone/state_vector.hpp"

namespace qclone {

// <psi|rho|psi>, clamped to [0,1].
inline double fidelity_pure(const StateVector& psi, const DensityMatrix& rho) {
    if (psi.dim() != rho.dim()) throw argument_error("fidelity_pure: dimension mismatch");
    const std::vector<cplx> rp = rho.matrix().apply(psi.amplitudes());
    cplx f{0.0, 0.0};
    for (std::size_t i = 0; i < psi.dim(); ++i) f += std::conj(psi[i]) * rp[i];
    return std::clamp(f.real(), 0.0, 1.0);
}

// Half the sum of singular values of a-b. The difference is Hermitian, so the
// singular values are the absolute eigenvalues.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw argument_error("trace_distance: dimension mismatch");
    const std::vector<double> evs = hermitian_eigenvalues(a.matrix() - b.matrix());
    double s = 0.0;
    for (double e : evs) s += std::abs(e);
    return std::clamp(0.5 * s, 0.0, 1.0);
}

// (tr(rho sx), tr(rho sy), tr(rho sz)) of a single qubit.
inline std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw argument_error("bloch_vector: not a single qubit");
    const ComplexMatrix& m = rho.matrix();
    const std::array<double, 3> s = {(m * pauli_x()).trace().real(),
                                     (m * pauli_y()).trace().real(),
                                     (m * pauli_z()).trace().real()};
    const double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    if (n > 1.0 + kDefaultTol) throw argument_error("bloch_vector: norm exceeds 1");
    return s;
}

// rho = (I + s.sigma)/2 for |s| <= 1.
inline DensityMatrix state_from_bloch(const std::array<double, 3>& s) {
    ComplexMatrix m(2, 2);
    m(0, 0) = cplx{(1.0 + s[2]) / 2.0, 0.0};
    m(1, 1) = cplx{(1.0 - s[2]) / 2.0, 0.0};
    m(0, 1) = cplx{s[0] / 2.0, -s[1] / 2.0};
    m(1, 0) = cplx{s[0] / 2.0, s[1] / 2.0};
    return DensityMatrix({2}, std::move(m));
}

struct ShrinkFit {
    double eta;            // |clone bloch| / |input bloch|
    double angle;          // radians between the two bloch vectors
};

// Fits the scalar contraction of the input Bloch vector in a clone.
// Collinearity is the caller's assertion; the angle is reported for it,
// computed as atan2(|a x b|, a.b) which stays accurate near 0 and pi.
inline ShrinkFit fit_shrink(const std::array<double, 3>& input_bloch,
                            const std::array<double, 3>& clone_bloch) {
    const auto& a = input_bloch;
    const auto& b = clone_bloch;
    const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (na < 1e-14) throw argument_error("fit_shrink: input Bloch vector is zero");
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const std::array<double, 3> cross = {a[1] * b[2] - a[2] * b[1],
                                         a[2] * b[0] - a[0] * b[2],
                                         a[0] * b[1] - a[1] * b[0]};
    const double cn =
        std::sqrt(cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]);
    return ShrinkFit{nb / na, nb > 1e-14 ? std::atan2(cn, dot) : 0.0};
}

}  // namespace qclone
