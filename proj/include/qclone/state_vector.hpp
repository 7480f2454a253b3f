#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "qclone/complex_matrix.hpp"
#include "qclone/errors.hpp"

namespace qclone {

inline std::size_t layout_dim(const std::vector<std::size_t>& layout) {
    std::size_t d = 1;
    for (std::size_t r : layout) {
        if (r == 0) throw argument_error("layout: zero register dimension");
        d *= r;
    }
    return d;
}

// Pure state: complex amplitudes over a labeled tensor-factor layout.
// Register 0 is the leftmost (most significant) tensor factor. Constructors
// normalize; a zero or non-finite amplitude vector is rejected.
class StateVector {
public:
    StateVector(std::vector<std::size_t> layout, std::vector<cplx> amplitudes)
        : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
        if (amps_.size() != layout_dim(layout_))
            throw argument_error("StateVector: amplitude count does not match layout");
        double n2 = 0.0;
        for (const cplx& a : amps_) {
            if (!is_finite(a)) throw argument_error("StateVector: non-finite amplitude");
            n2 += std::norm(a);
        }
        if (n2 < 1e-24) throw argument_error("StateVector: zero vector cannot be normalized");
        // already-unit vectors keep their bits (serialized states round-trip exactly)
        if (std::abs(n2 - 1.0) > 1e-12) {
            const double n = std::sqrt(n2);
            for (cplx& a : amps_) a /= n;
        }
    }

    // Computational basis state |index> in the given layout.
    static StateVector basis(std::vector<std::size_t> layout, std::size_t index) {
        std::vector<cplx> a(layout_dim(layout), cplx{0.0, 0.0});
        if (index >= a.size()) throw argument_error("StateVector::basis: index out of range");
        a[index] = 1.0;
        return StateVector(std::move(layout), std::move(a));
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<std::size_t>& layout() const { return layout_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    // Same amplitudes under a different register labeling (total dim must match).
    StateVector reshaped(std::vector<std::size_t> new_layout) const {
        if (layout_dim(new_layout) != dim())
            throw argument_error("reshaped: layout dimension mismatch");
        return StateVector(std::move(new_layout), amps_);
    }

    bool bit_equal(const StateVector& o) const {
        return layout_ == o.layout_ && amps_ == o.amps_;
    }

private:
    std::vector<std::size_t> layout_;
    std::vector<cplx> amps_;
};

inline cplx inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw argument_error("inner: dimension mismatch");
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

inline cplx inner_raw(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

inline double norm_raw(const std::vector<cplx>& a) {
    double n2 = 0.0;
    for (const cplx& z : a) n2 += std::norm(z);
    return std::sqrt(n2);
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    std::vector<std::size_t> layout = a.layout();
    layout.insert(layout.end(), b.layout().begin(), b.layout().end());
    std::vector<cplx> amps(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) amps[i * b.dim() + j] = a[i] * b[j];
    return StateVector(std::move(layout), std::move(amps));
}

}  // namespace qclone
