#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qclone/errors.hpp"
#include "qclone/state_vector.hpp"

namespace qclone {

// Occupation vector (n_1,...,n_d): how many of the systems sit in each level.
struct OccupationVector {
    std::vector<int> counts;
    int total;

    explicit OccupationVector(std::vector<int> c) : counts(std::move(c)), total(0) {
        if (counts.empty()) throw argument_error("OccupationVector: needs at least one slot");
        for (int v : counts) {
            if (v < 0) throw argument_error("OccupationVector: negative count");
            total += v;
        }
    }

    std::size_t levels() const { return counts.size(); }

    bool operator==(const OccupationVector& o) const { return counts == o.counts; }
    bool operator<(const OccupationVector& o) const {
        return std::lexicographical_compare(counts.begin(), counts.end(),
                                            o.counts.begin(), o.counts.end());
    }
};

namespace detail {

inline std::uint64_t binom_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n-k+i) cannot overflow at desk scale, but guard anyway
        const std::uint64_t num = n - k + i;
        if (r > UINT64_MAX / num) throw argument_error("binom: overflow");
        r = r * num / i;
    }
    return r;
}

// Exact up to 20!, lgamma beyond; results only enter double-precision ratios.
inline double factorial_d(int n) {
    static const std::uint64_t table[21] = {
        1ull, 1ull, 2ull, 6ull, 24ull, 120ull, 720ull, 5040ull, 40320ull, 362880ull,
        3628800ull, 39916800ull, 479001600ull, 6227020800ull, 87178291200ull,
        1307674368000ull, 20922789888000ull, 355687428096000ull, 6402373705728000ull,
        121645100408832000ull, 2432902008176640000ull};
    if (n < 0) throw argument_error("factorial: negative argument");
    if (n <= 20) return static_cast<double>(table[n]);
    return std::exp(std::lgamma(static_cast<double>(n) + 1.0));
}

}  // namespace detail

// Dimension of the symmetric subspace of N qudits: binom(N+d-1, d-1).
inline std::size_t sym_dim(int n_systems, int d) {
    if (d < 1) throw argument_error("sym_dim: d must be >= 1");
    if (n_systems < 0) throw argument_error("sym_dim: negative particle count");
    return static_cast<std::size_t>(
        detail::binom_u64(static_cast<std::uint64_t>(n_systems + d - 1),
                          static_cast<std::uint64_t>(d - 1)));
}

// Machine dimension D = (M-N+d-1)! / ((M-N)!(d-1)!) of the fixed-blank cloner.
inline std::size_t machine_dim(int n, int m, int d) {
    if (d < 2) throw argument_error("machine_dim: d must be >= 2");
    if (n < 1 || m <= n) throw argument_error("machine_dim: requires M > N >= 1");
    return sym_dim(m - n, d);
}

// All occupation vectors with the given total, lexicographically ascending.
inline std::vector<OccupationVector> enumerate_occupations(int total, int d) {
    if (d < 1) throw argument_error("enumerate_occupations: d must be >= 1");
    if (total < 0) throw argument_error("enumerate_occupations: negative total");
    std::vector<OccupationVector> out;
    std::vector<int> cur(static_cast<std::size_t>(d), 0);
    auto rec = [&](auto&& self, int slot, int remaining) -> void {
        if (slot == d - 1) {
            cur[slot] = remaining;
            out.emplace_back(cur);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            cur[slot] = v;
            self(self, slot + 1, remaining - v);
        }
    };
    rec(rec, 0, total);
    return out;
}

// Lexicographically ordered symmetric basis of N qudits of local dimension d.
class SymmetricBasis {
public:
    SymmetricBasis(int n_systems, int d)
        : d_(d), n_(n_systems), ordering_(enumerate_occupations(n_systems, d)) {
        if (ordering_.size() != sym_dim(n_systems, d))
            throw error("SymmetricBasis: enumeration does not match the dimension formula");
        for (std::size_t i = 1; i < ordering_.size(); ++i)
            if (!(ordering_[i - 1] < ordering_[i]))
                throw error("SymmetricBasis: ordering not strictly increasing");
    }

    int local_dim() const { return d_; }
    int n_systems() const { return n_; }
    std::size_t size() const { return ordering_.size(); }
    const std::vector<OccupationVector>& ordering() const { return ordering_; }
    const OccupationVector& at(std::size_t i) const { return ordering_.at(i); }

    std::size_t index_of(const OccupationVector& n) const {
        const auto it = std::lower_bound(ordering_.begin(), ordering_.end(), n);
        if (it == ordering_.end() || !(*it == n))
            throw argument_error("SymmetricBasis: occupation vector not in basis");
        return static_cast<std::size_t>(it - ordering_.begin());
    }

private:
    int d_;
    int n_;
    std::vector<OccupationVector> ordering_;
};

// Cloning coefficient
//   alpha_{nj} = sqrt((M-N)!(N+d-1)!/(M+d-1)!) * sqrt(prod_k (n_k+j_k)!/(n_k! j_k!)).
// Evaluated as a ratio of exact integers: the prefactor is 1/binom(M+d-1, M-N)
// and each product term is binom(n_k+j_k, j_k).
inline double alpha(const OccupationVector& n, const OccupationVector& j,
                    int n_in, int m_out, int d) {
    if (static_cast<int>(n.levels()) != d || static_cast<int>(j.levels()) != d)
        throw argument_error("alpha: occupation length does not match d");
    if (n.total != n_in) throw argument_error("alpha: n does not sum to N");
    if (j.total != m_out - n_in) throw argument_error("alpha: j does not sum to M-N");

    const std::uint64_t denom = detail::binom_u64(
        static_cast<std::uint64_t>(m_out + d - 1), static_cast<std::uint64_t>(m_out - n_in));
    std::uint64_t numer = 1;
    for (int k = 0; k < d; ++k) {
        const std::uint64_t b = detail::binom_u64(
            static_cast<std::uint64_t>(n.counts[k] + j.counts[k]),
            static_cast<std::uint64_t>(j.counts[k]));
        if (numer > UINT64_MAX / b) throw argument_error("alpha: overflow");
        numer *= b;
    }
    return std::sqrt(static_cast<double>(numer) / static_cast<double>(denom));
}

// Normalized equal superposition over all distinct arrangements of the
// occupation string, in the d^k tensor space (k registers of dimension d).
// Total 0 yields the dimension-1 scalar unit.
inline StateVector embed_symmetric(const OccupationVector& n) {
    const int d = static_cast<int>(n.levels());
    const int k = n.total;
    if (k == 0) return StateVector({}, {cplx{1.0, 0.0}});

    std::vector<int> digits;
    digits.reserve(static_cast<std::size_t>(k));
    for (int level = 0; level < d; ++level)
        for (int c = 0; c < n.counts[level]; ++c) digits.push_back(level);

    std::size_t dim = 1;
    for (int i = 0; i < k; ++i) {
        if (dim > kKronDimCap / static_cast<std::size_t>(d))
            throw size_error(dim * static_cast<std::size_t>(d), kKronDimCap);
        dim *= static_cast<std::size_t>(d);
    }

    std::vector<cplx> amps(dim, cplx{0.0, 0.0});
    std::size_t terms = 0;
    do {  // next_permutation walks the distinct multiset permutations
        std::size_t idx = 0;
        for (int digit : digits) idx = idx * static_cast<std::size_t>(d) +
                                       static_cast<std::size_t>(digit);
        amps[idx] = 1.0;
        ++terms;
    } while (std::next_permutation(digits.begin(), digits.end()));

    const double a = 1.0 / std::sqrt(static_cast<double>(terms));
    for (cplx& z : amps)
        if (z != cplx{0.0, 0.0}) z = a;

    return StateVector(std::vector<std::size_t>(static_cast<std::size_t>(k),
                                                static_cast<std::size_t>(d)),
                       std::move(amps));
}

// Occupation vector obtained by adding j to n slotwise (the |n+j> label).
inline OccupationVector occupation_sum(const OccupationVector& n, const OccupationVector& j) {
    if (n.levels() != j.levels()) throw argument_error("occupation_sum: length mismatch");
    std::vector<int> c(n.counts);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += j.counts[i];
    return OccupationVector(std::move(c));
}

}  // namespace qclone
