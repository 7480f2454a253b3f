#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qclone/complex_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/linalg.hpp"
#include "qclone/state_vector.hpp"
#include "qclone/symmetric.hpp"

namespace qclone {

enum class Variant {
    qubit12_fixed,
    qubit12_robust,
    quditNM_fixed,
    quditNM_robust,
    prob_fixed,
    prob_robust,
};

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::qubit12_fixed: return "qubit12-fixed";
        case Variant::qubit12_robust: return "qubit12-robust";
        case Variant::quditNM_fixed: return "quditNM-fixed";
        case Variant::quditNM_robust: return "quditNM-robust";
        case Variant::prob_fixed: return "prob-fixed";
        case Variant::prob_robust: return "prob-robust";
    }
    throw argument_error("variant_name: unknown variant");
}

inline Variant variant_from_name(const std::string& s) {
    if (s == "qubit12-fixed") return Variant::qubit12_fixed;
    if (s == "qubit12-robust") return Variant::qubit12_robust;
    if (s == "quditNM-fixed" || s == "qudit-fixed") return Variant::quditNM_fixed;
    if (s == "quditNM-robust" || s == "qudit-robust") return Variant::quditNM_robust;
    if (s == "prob-fixed") return Variant::prob_fixed;
    if (s == "prob-robust") return Variant::prob_robust;
    throw argument_error("unknown machine variant: " + s);
}

inline bool is_robust(Variant v) {
    return v == Variant::qubit12_robust || v == Variant::quditNM_robust ||
           v == Variant::prob_robust;
}

inline bool is_probabilistic(Variant v) {
    return v == Variant::prob_fixed || v == Variant::prob_robust;
}

inline bool is_qudit(Variant v) {
    return v == Variant::quditNM_fixed || v == Variant::quditNM_robust;
}

struct MachineParams {
    int n = 1;       // input copies
    int m = 2;       // output copies
    int d = 2;       // local dimension
    std::optional<StateVector> psi0;      // probabilistic candidates
    std::optional<StateVector> psi1;      // (psi1 already phase-adjusted)
    double gamma = 0.0;                   // 1/(1+|<psi0|psi1>|)
    double phase_adjustment = 0.0;        // phase removed from psi1
};

using DomainPair = std::pair<StateVector, StateVector>;

// Total Hilbert-space cap for a single machine.
inline constexpr std::size_t kMachineDimCap = std::size_t{1} << 16;

// A register layout plus the full unitary completed from the defining
// equations. Registers run (clone/input qudits..., blank qudits..., machine);
// the clones surface on the first m registers after application.
struct CloningMachine {
    Variant variant;
    MachineParams params;
    std::vector<std::size_t> layout;  // m registers of dim d, then the machine
    std::size_t machine_dim;
    ComplexMatrix unitary;
    std::vector<DomainPair> domain_spec;
    std::optional<ComplexMatrix> success_projector;

    CloningMachine(Variant v, MachineParams p, std::vector<std::size_t> lay,
                   std::size_t mach_dim, ComplexMatrix u, std::vector<DomainPair> domain,
                   std::optional<ComplexMatrix> projector, double unitary_tol = kDefaultTol,
                   double domain_tol = 1e-12)
        : variant(v), params(std::move(p)), layout(std::move(lay)), machine_dim(mach_dim),
          unitary(std::move(u)), domain_spec(std::move(domain)),
          success_projector(std::move(projector)) {
        const std::size_t total = layout_dim(layout);
        if (!unitary.is_square() || unitary.rows() != total)
            throw argument_error("CloningMachine: unitary side does not match layout");
        const double defect = unitarity_defect(unitary);
        if (defect > unitary_tol)
            throw precondition_error("CloningMachine: unitary defect " + std::to_string(defect));
        for (const DomainPair& pr : domain_spec) {
            const std::vector<cplx> got = unitary.apply(pr.first.amplitudes());
            double worst = 0.0;
            for (std::size_t i = 0; i < got.size(); ++i)
                worst = std::max(worst, std::abs(got[i] - pr.second[i]));
            if (worst > domain_tol)
                throw precondition_error("CloningMachine: defining equation violated by " +
                                         std::to_string(worst));
        }
    }

    std::size_t total_dim() const { return layout_dim(layout); }
    int num_inputs() const { return params.n; }
    int num_clones() const { return params.m; }
    int local_dim() const { return params.d; }

    std::vector<std::size_t> input_layout() const {
        return std::vector<std::size_t>(layout.begin(), layout.begin() + params.n);
    }
    std::vector<std::size_t> blank_layout() const {
        return std::vector<std::size_t>(layout.begin() + params.n,
                                        layout.begin() + params.m);
    }
    std::size_t input_dim() const { return layout_dim(input_layout()); }
    std::size_t blank_dim() const { return layout_dim(blank_layout()); }

    StateVector designated_blank() const { return StateVector::basis(blank_layout(), 0); }
    StateVector machine_initial() const { return StateVector::basis({machine_dim}, 0); }
};

// Rewrites defining (input, output) pairs on an orthonormal input basis while
// preserving the linear map on the span. Rejects pair sets whose input and
// output Gram matrices disagree: such pairs define no isometry (this is the
// numerical detector for off-formula parameter choices such as a wrong gamma).
inline std::vector<DomainPair> orthonormalize_domain(const std::vector<DomainPair>& pairs,
                                                     double tol = kDefaultTol) {
    if (pairs.empty()) throw argument_error("orthonormalize_domain: no pairs");
    const std::size_t k = pairs.size();

    double worst = 0.0;
    std::size_t wi = 0, wj = 0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const cplx gi = inner(pairs[i].first, pairs[j].first);
            const cplx go = inner(pairs[i].second, pairs[j].second);
            const double diff = std::abs(gi - go);
            if (diff > worst) {
                worst = diff;
                wi = i;
                wj = j;
            }
        }
    if (worst > tol) throw not_an_isometry_error(wi, wj, worst);

    std::vector<std::vector<cplx>> ins, outs;
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<cplx> v = pairs[i].first.amplitudes();
        std::vector<cplx> w = pairs[i].second.amplitudes();
        for (std::size_t p = 0; p < ins.size(); ++p) {
            const cplx c = inner_raw(ins[p], v);
            for (std::size_t t = 0; t < v.size(); ++t) v[t] -= c * ins[p][t];
            for (std::size_t t = 0; t < w.size(); ++t) w[t] -= c * outs[p][t];
        }
        const double vn = norm_raw(v);
        if (vn < 1e-8)
            throw precondition_error("orthonormalize_domain: inputs linearly dependent");
        for (cplx& z : v) z /= vn;
        for (cplx& z : w) z /= vn;
        ins.push_back(std::move(v));
        outs.push_back(std::move(w));
    }

    std::vector<DomainPair> result;
    result.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        result.emplace_back(StateVector(pairs[i].first.layout(), std::move(ins[i])),
                            StateVector(pairs[i].second.layout(), std::move(outs[i])));
    return result;
}

namespace detail {

inline std::size_t flat_index(const std::vector<std::size_t>& layout,
                              const std::vector<std::size_t>& digits) {
    std::size_t idx = 0;
    for (std::size_t r = 0; r < layout.size(); ++r) idx = idx * layout[r] + digits[r];
    return idx;
}

inline CloningMachine finish_machine(Variant v, MachineParams p,
                                     std::vector<std::size_t> layout, std::size_t mach_dim,
                                     std::vector<DomainPair> pairs,
                                     std::optional<ComplexMatrix> projector,
                                     bool inputs_orthonormal) {
    const std::vector<DomainPair> ortho =
        inputs_orthonormal ? pairs : orthonormalize_domain(pairs);
    std::vector<StateVector> ins, outs;
    ins.reserve(ortho.size());
    outs.reserve(ortho.size());
    for (const DomainPair& pr : ortho) {
        ins.push_back(pr.first);
        outs.push_back(pr.second);
    }
    const ComplexMatrix w = complete_isometry(ins);
    const ComplexMatrix vmat = complete_isometry(outs);
    ComplexMatrix u = multiply_adjoint(vmat, w);
    return CloningMachine(v, std::move(p), std::move(layout), mach_dim, std::move(u),
                          std::move(pairs), std::move(projector));
}

inline std::size_t pow_sz(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (r > kKronDimCap / base) throw size_error(r * base, kKronDimCap);
        r *= base;
    }
    return r;
}

}  // namespace detail

// 1->2 qubit cloner with the fixed blank |b>: qubit machine with |m>,
// |m_perp> on machine basis 0, 1.
inline CloningMachine build_qubit12_fixed() {
    const std::vector<std::size_t> layout{2, 2, 2};
    const double big = std::sqrt(2.0 / 3.0);
    const double small = std::sqrt(1.0 / 6.0);

    std::vector<DomainPair> pairs;
    for (std::size_t a : {std::size_t{0}, std::size_t{1}}) {
        const StateVector in = StateVector::basis(layout, detail::flat_index(layout, {a, 0, 0}));
        std::vector<cplx> out(8, cplx{0.0, 0.0});
        const std::size_t mach_big = a;        // m for |0>, m_perp for |1>
        const std::size_t mach_small = 1 - a;
        out[detail::flat_index(layout, {a, a, mach_big})] = big;
        out[detail::flat_index(layout, {0, 1, mach_small})] = small;
        out[detail::flat_index(layout, {1, 0, mach_small})] = small;
        pairs.emplace_back(in, StateVector(layout, std::move(out)));
    }

    MachineParams p;
    p.n = 1;
    p.m = 2;
    p.d = 2;
    return detail::finish_machine(Variant::qubit12_fixed, p, layout, 2, std::move(pairs),
                                  std::nullopt, true);
}

// Blank-robust 1->2 qubit cloner: four defining equations over blank basis
// |b>, |b_perp> with the four-dimensional machine kets M_0..M_3.
inline CloningMachine build_qubit12_robust() {
    const std::vector<std::size_t> layout{2, 2, 4};
    const double big = std::sqrt(2.0 / 3.0);
    const double small = std::sqrt(1.0 / 6.0);

    std::vector<DomainPair> pairs;
    for (std::size_t b : {std::size_t{0}, std::size_t{1}}) {
        for (std::size_t a : {std::size_t{0}, std::size_t{1}}) {
            const StateVector in =
                StateVector::basis(layout, detail::flat_index(layout, {a, b, 0}));
            std::vector<cplx> out(16, cplx{0.0, 0.0});
            const std::size_t base = 2 * b;       // (M_0,M_1) for |b>, (M_2,M_3) for |b_perp>
            const std::size_t mach_big = base + a;
            const std::size_t mach_small = base + 1 - a;
            out[detail::flat_index(layout, {a, a, mach_big})] = big;
            out[detail::flat_index(layout, {0, 1, mach_small})] = small;
            out[detail::flat_index(layout, {1, 0, mach_small})] = small;
            pairs.emplace_back(in, StateVector(layout, std::move(out)));
        }
    }

    MachineParams p;
    p.n = 1;
    p.m = 2;
    p.d = 2;
    return detail::finish_machine(Variant::qubit12_robust, p, layout, 4, std::move(pairs),
                                  std::nullopt, true);
}

namespace detail {

// Shared body of the N->M builders. The robust variant writes one defining
// block per blank basis state beta; machine kets are indexed j-major as
// flat(j, beta) = j_index * d^(M-N) + beta.
inline CloningMachine build_quditNM(int n, int m, int d, bool robust, std::size_t dim_cap) {
    if (d < 2) throw argument_error("build_quditNM: d must be >= 2");
    if (n < 1 || m <= n) throw argument_error("build_quditNM: requires M > N >= 1");

    const std::size_t blank_total = pow_sz(static_cast<std::size_t>(d), m - n);
    const std::size_t big_d = machine_dim(n, m, d);
    const std::size_t mach = robust ? big_d * blank_total : big_d;
    const std::size_t clone_total = pow_sz(static_cast<std::size_t>(d), m);
    if (clone_total > dim_cap / mach) throw size_error(clone_total * mach, dim_cap);

    std::vector<std::size_t> layout(static_cast<std::size_t>(m), static_cast<std::size_t>(d));
    layout.push_back(mach);
    const std::vector<std::size_t> blank_layout(static_cast<std::size_t>(m - n),
                                                static_cast<std::size_t>(d));

    const std::vector<OccupationVector> ns = enumerate_occupations(n, d);
    const std::vector<OccupationVector> js = enumerate_occupations(m - n, d);

    const StateVector mach0 = StateVector::basis({mach}, 0);
    const std::size_t betas = robust ? blank_total : 1;

    std::vector<DomainPair> pairs;
    pairs.reserve(ns.size() * betas);
    for (std::size_t beta = 0; beta < betas; ++beta) {
        const StateVector blank = StateVector::basis(blank_layout, beta);
        for (const OccupationVector& nv : ns) {
            const StateVector in = tensor(tensor(embed_symmetric(nv), blank), mach0);
            std::vector<cplx> out(clone_total * mach, cplx{0.0, 0.0});
            for (std::size_t jidx = 0; jidx < js.size(); ++jidx) {
                const double a = alpha(nv, js[jidx], n, m, d);
                const StateVector sym = embed_symmetric(occupation_sum(nv, js[jidx]));
                const std::size_t mach_ket = robust ? jidx * blank_total + beta : jidx;
                for (std::size_t i = 0; i < clone_total; ++i) {
                    const cplx amp = sym[i];
                    if (amp != cplx{0.0, 0.0}) out[i * mach + mach_ket] = a * amp;
                }
            }
            pairs.emplace_back(in, StateVector(layout, std::move(out)));
        }
    }

    MachineParams p;
    p.n = n;
    p.m = m;
    p.d = d;
    return finish_machine(robust ? Variant::quditNM_robust : Variant::quditNM_fixed, p,
                          layout, mach, std::move(pairs), std::nullopt, true);
}

}  // namespace detail

// Fixed-blank N->M qudit cloner: machine dimension D, blanks pinned to the
// all-zeros product state.
inline CloningMachine build_quditNM_fixed(int n, int m, int d,
                                          std::size_t dim_cap = kMachineDimCap) {
    return detail::build_quditNM(n, m, d, false, dim_cap);
}

// Blank-robust N->M qudit cloner: one defining block per blank basis state,
// machine dimension D * d^(M-N).
inline CloningMachine build_quditNM_robust(int n, int m, int d,
                                           std::size_t dim_cap = kMachineDimCap) {
    return detail::build_quditNM(n, m, d, true, dim_cap);
}

namespace detail {

inline CloningMachine build_prob(const StateVector& psi0_in, const StateVector& psi1_in,
                                 bool robust) {
    if (psi0_in.dim() != 2 || psi1_in.dim() != 2)
        throw argument_error("probabilistic cloner: candidates must be qubits");

    const cplx ov = inner(psi0_in, psi1_in);
    const double s = std::abs(ov);
    if (s > 1.0 - 1e-12)
        throw degenerate_pair_error("probabilistic cloner: candidates are parallel");

    // gamma's identity needs a real non-negative overlap; strip the phase.
    // Sub-1e-14 phases are rounding dust from an already-adjusted pair.
    double theta = 0.0;
    StateVector psi1 = psi1_in;
    if (s > 1e-15 && std::abs(std::arg(ov)) > 1e-14) {
        theta = std::arg(ov);
        const cplx ph{std::cos(-theta), std::sin(-theta)};
        std::vector<cplx> adj(2);
        for (std::size_t i = 0; i < 2; ++i) adj[i] = psi1_in[i] * ph;
        psi1 = StateVector({2}, std::move(adj));
    }
    const double gamma = 1.0 / (1.0 + s);

    const std::size_t mach = robust ? 4 : 2;
    const std::vector<std::size_t> layout{2, 2, mach};
    const std::size_t total = 4 * mach;
    const double sq = std::sqrt(gamma);
    const double sf = std::sqrt(1.0 - gamma);

    const std::vector<const StateVector*> cands{&psi0_in, &psi1};
    // blank basis values each block is defined for
    const std::size_t blank_count = robust ? 2 : 1;

    std::vector<DomainPair> pairs;
    for (std::size_t b = 0; b < blank_count; ++b) {
        for (const StateVector* cand : cands) {
            const StateVector& psi = *cand;
            std::vector<cplx> in(total, cplx{0.0, 0.0});
            for (std::size_t a = 0; a < 2; ++a)
                in[flat_index(layout, {a, b, 0})] = psi[a];
            std::vector<cplx> out(total, cplx{0.0, 0.0});
            const std::size_t mach_success = b;            // |m>, or M_0 / M_1
            const std::size_t mach_fail = robust ? 2 + b : 1;  // |m_perp>, or M_2 / M_3
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t c = 0; c < 2; ++c)
                    out[flat_index(layout, {a, c, mach_success})] = sq * psi[a] * psi[c];
            out[flat_index(layout, {0, 0, mach_fail})] += sf;
            pairs.emplace_back(StateVector(layout, std::move(in)),
                               StateVector(layout, std::move(out)));
        }
    }

    ComplexMatrix projector(total, total);
    for (std::size_t i = 0; i < total; ++i)
        if (i % mach < blank_count) projector(i, i) = 1.0;

    MachineParams p;
    p.n = 1;
    p.m = 2;
    p.d = 2;
    p.psi0 = psi0_in;
    p.psi1 = psi1;
    p.gamma = gamma;
    p.phase_adjustment = theta;
    return finish_machine(robust ? Variant::prob_robust : Variant::prob_fixed, p, layout,
                          mach, std::move(pairs), std::move(projector), false);
}

}  // namespace detail

// Conditional machine states X_j of a symmetric cloner for a given blank:
// U |n>|B>|M> = sum_j alpha_{nj} |n+j> (x) |X_j>. Extracted by contracting the
// output against the orthonormal clone states |n+j>.
inline std::vector<StateVector> conditional_machine_states(const CloningMachine& m,
                                                           const OccupationVector& n,
                                                           const StateVector& blank) {
    if (is_probabilistic(m.variant))
        throw unsupported_variant_error(
            "conditional_machine_states: symmetric cloners only");
    const StateVector in =
        tensor(tensor(embed_symmetric(n).reshaped(m.input_layout()),
                      blank.reshaped(m.blank_layout())),
               m.machine_initial());
    const std::vector<cplx> out = m.unitary.apply(in.amplitudes());

    const std::vector<OccupationVector> js =
        enumerate_occupations(m.params.m - m.params.n, m.params.d);
    std::vector<StateVector> xs;
    xs.reserve(js.size());
    for (const OccupationVector& j : js) {
        const double a = alpha(n, j, m.params.n, m.params.m, m.params.d);
        const StateVector sym = embed_symmetric(occupation_sum(n, j));
        std::vector<cplx> x(m.machine_dim, cplx{0.0, 0.0});
        for (std::size_t c = 0; c < sym.dim(); ++c) {
            const cplx s = std::conj(sym[c]);
            if (s == cplx{0.0, 0.0}) continue;
            for (std::size_t k = 0; k < m.machine_dim; ++k)
                x[k] += s * out[c * m.machine_dim + k];
        }
        for (cplx& z : x) z /= a;
        xs.emplace_back(std::vector<std::size_t>{m.machine_dim}, std::move(x));
    }
    return xs;
}

// Probabilistic exact cloner for two non-orthogonal qubit candidates, fixed
// blank. Success probability gamma = 1/(1+|<psi0|psi1>|); the failure branch
// |Phi> = |00>|m_perp> keeps |m> and |Phi> orthogonal through the machine.
inline CloningMachine build_prob_fixed(const StateVector& psi0, const StateVector& psi1) {
    return detail::build_prob(psi0, psi1, false);
}

// Blank-robust probabilistic cloner: four defining equations, machine kets
// M_0..M_3 with |Phi> = |00>|M_2>, |Phi'> = |00>|M_3>.
inline CloningMachine build_prob_robust(const StateVector& psi0, const StateVector& psi1) {
    return detail::build_prob(psi0, psi1, true);
}

}  // namespace qclone
