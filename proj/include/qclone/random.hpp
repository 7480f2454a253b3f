#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "qclone/complex_matrix.hpp"
#include "qclone/density_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/state_vector.hpp"

namespace qclone {

// Seeded generator. Gaussians come from a hand-rolled Box-Muller over
// mt19937_64 so that identical seeds give identical streams on every
// toolchain (std::normal_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed), cached_(false), cache_(0.0) {}

    std::uint64_t raw() { return gen_(); }

    double uniform() {  // [0,1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double gaussian() {
        if (cached_) {
            cached_ = false;
            return cache_;
        }
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
        const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        cache_ = r * std::sin(a);
        cached_ = true;
        return r * std::cos(a);
    }

    cplx cgauss() {
        const double re = gaussian();
        const double im = gaussian();
        return cplx{re, im};
    }

private:
    std::mt19937_64 gen_;
    bool cached_;
    double cache_;
};

// Haar-uniform unit vector: normalized complex standard normals.
inline StateVector haar_random_state(std::size_t dim, Rng& rng) {
    if (dim == 0) throw argument_error("haar_random_state: dim must be >= 1");
    std::vector<cplx> a(dim);
    for (cplx& z : a) z = rng.cgauss();
    double n2 = 0.0;
    for (const cplx& z : a) n2 += std::norm(z);
    if (n2 == 0.0) a[0] = 1.0;  // astronomically unlikely
    return StateVector({dim}, std::move(a));
}

inline StateVector haar_random_state(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    return haar_random_state(dim, rng);
}

// k Haar-random mutually orthonormal vectors (Gram-Schmidt on Gaussians).
inline std::vector<StateVector> random_orthonormal(std::size_t dim, std::size_t k, Rng& rng) {
    if (k > dim) throw argument_error("random_orthonormal: k exceeds dimension");
    std::vector<std::vector<cplx>> basis;
    while (basis.size() < k) {
        std::vector<cplx> v(dim);
        for (cplx& z : v) z = rng.cgauss();
        for (const auto& b : basis) {
            const cplx c = inner_raw(b, v);
            for (std::size_t i = 0; i < dim; ++i) v[i] -= c * b[i];
        }
        const double n = norm_raw(v);
        if (n < 1e-8) continue;
        for (cplx& z : v) z /= n;
        basis.push_back(std::move(v));
    }
    std::vector<StateVector> out;
    out.reserve(k);
    for (auto& b : basis) out.emplace_back(std::vector<std::size_t>{dim}, std::move(b));
    return out;
}

// Rank-2 mixed state a|a1><a1| + (1-a)|a2><a2| with a Haar-random eigenbasis,
// mirroring the two-term eigendecomposition of an arbitrary mixed qubit.
inline DensityMatrix random_mixed_rank2(std::size_t dim, Rng& rng) {
    if (dim < 2) throw argument_error("random_mixed_rank2: dim must be >= 2");
    const std::vector<StateVector> vs = random_orthonormal(dim, 2, rng);
    const double a = rng.uniform();
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            m(i, j) = a * vs[0][i] * std::conj(vs[0][j]) +
                      (1.0 - a) * vs[1][i] * std::conj(vs[1][j]);
    return DensityMatrix({dim}, std::move(m));
}

// Full-rank random state: normalized G G^dagger with Gaussian G.
inline DensityMatrix random_density(std::size_t dim, Rng& rng) {
    ComplexMatrix g(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.cgauss();
    ComplexMatrix m = multiply_adjoint(g, g);
    const double tr = m.trace().real();
    m = m * cplx{1.0 / tr, 0.0};
    // Hermitize exactly to keep the entrywise validator happy
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            const cplx avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    return DensityMatrix({dim}, std::move(m));
}

// Qubit pair with |<psi0|psi1>| = s and Haar-random placement.
inline std::pair<StateVector, StateVector> random_pair_with_overlap(double s, Rng& rng) {
    if (s < 0.0 || s >= 1.0)
        throw argument_error("random_pair_with_overlap: overlap must lie in [0,1)");
    const std::vector<StateVector> vs = random_orthonormal(2, 2, rng);
    const double phi = 2.0 * 3.14159265358979323846 * rng.uniform();
    const cplx ph{std::cos(phi), std::sin(phi)};
    std::vector<cplx> a(2), b(2);
    for (std::size_t i = 0; i < 2; ++i) {
        a[i] = vs[0][i];
        b[i] = s * vs[0][i] + std::sqrt(1.0 - s * s) * ph * vs[1][i];
    }
    return {StateVector({2}, std::move(a)), StateVector({2}, std::move(b))};
}

}  // namespace qclone
