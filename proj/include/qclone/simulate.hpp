#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qclone/complex_matrix.hpp"
#include "qclone/density_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/machines.hpp"
#include "qclone/metrics.hpp"
#include "qclone/random.hpp"
#include "qclone/state_vector.hpp"
#include "qclone/symmetric.hpp"

namespace qclone {

enum class NoiseKind { depolarizing, dephasing, amplitude_damping };

inline std::string noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::depolarizing: return "depolarizing";
        case NoiseKind::dephasing: return "dephasing";
        case NoiseKind::amplitude_damping: return "amplitude-damping";
    }
    throw argument_error("noise_kind_name: unknown kind");
}

inline NoiseKind noise_kind_from_name(const std::string& s) {
    if (s == "depolarizing") return NoiseKind::depolarizing;
    if (s == "dephasing") return NoiseKind::dephasing;
    if (s == "amplitude-damping" || s == "amplitude_damping") return NoiseKind::amplitude_damping;
    throw argument_error("unknown noise channel: " + s);
}

// Discrete channel in Kraus form; trace preservation checked on construction.
struct NoiseChannel {
    NoiseKind kind;
    double strength;
    std::vector<ComplexMatrix> kraus;

    NoiseChannel(NoiseKind k, double p, std::vector<ComplexMatrix> ops)
        : kind(k), strength(p), kraus(std::move(ops)) {
        if (p < 0.0 || p > 1.0) throw argument_error("NoiseChannel: strength outside [0,1]");
        if (kraus.empty()) throw argument_error("NoiseChannel: no Kraus operators");
        const std::size_t d = kraus.front().rows();
        ComplexMatrix sum(d, d);
        for (const ComplexMatrix& op : kraus) {
            if (op.rows() != d || op.cols() != d)
                throw argument_error("NoiseChannel: mixed Kraus dimensions");
            sum = sum + op.adjoint() * op;
        }
        if ((sum - ComplexMatrix::identity(d)).max_abs() > kDefaultTol)
            throw argument_error("NoiseChannel: Kraus operators are not trace preserving");
    }

    std::size_t dim() const { return kraus.front().rows(); }
};

// rho -> (1-p) rho + p I/d, in Heisenberg-Weyl Kraus form.
inline NoiseChannel make_depolarizing(double p, std::size_t d = 2) {
    if (d < 2) throw argument_error("make_depolarizing: d must be >= 2");
    std::vector<ComplexMatrix> ops;
    ComplexMatrix shift(d, d), clock(d, d);
    const double tau = 2.0 * 3.14159265358979323846 / static_cast<double>(d);
    for (std::size_t k = 0; k < d; ++k) {
        shift((k + 1) % d, k) = 1.0;
        clock(k, k) = cplx{std::cos(tau * static_cast<double>(k)),
                           std::sin(tau * static_cast<double>(k))};
    }
    ops.push_back(ComplexMatrix::identity(d) * cplx{std::sqrt(1.0 - p), 0.0});
    const double w = std::sqrt(p / static_cast<double>(d * d));
    ComplexMatrix xa = ComplexMatrix::identity(d);
    for (std::size_t a = 0; a < d; ++a) {
        ComplexMatrix op = xa;
        for (std::size_t b = 0; b < d; ++b) {
            ops.push_back(op * cplx{w, 0.0});
            op = op * clock;
        }
        xa = shift * xa;
    }
    return NoiseChannel(NoiseKind::depolarizing, p, std::move(ops));
}

// rho -> (1-p) rho + p diag(rho): off-diagonals scaled by 1-p.
inline NoiseChannel make_dephasing(double p, std::size_t d = 2) {
    if (d < 2) throw argument_error("make_dephasing: d must be >= 2");
    std::vector<ComplexMatrix> ops;
    ops.push_back(ComplexMatrix::identity(d) * cplx{std::sqrt(1.0 - p), 0.0});
    for (std::size_t k = 0; k < d; ++k) {
        ComplexMatrix proj(d, d);
        proj(k, k) = std::sqrt(p);
        ops.push_back(std::move(proj));
    }
    return NoiseChannel(NoiseKind::dephasing, p, std::move(ops));
}

// Qubit amplitude damping with decay probability p.
inline NoiseChannel make_amplitude_damping(double p) {
    ComplexMatrix k0(2, 2), k1(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1.0 - p);
    k1(0, 1) = std::sqrt(p);
    return NoiseChannel(NoiseKind::amplitude_damping, p, {std::move(k0), std::move(k1)});
}

inline NoiseChannel make_channel(NoiseKind kind, double p, std::size_t d) {
    switch (kind) {
        case NoiseKind::depolarizing: return make_depolarizing(p, d);
        case NoiseKind::dephasing: return make_dephasing(p, d);
        case NoiseKind::amplitude_damping:
            if (d != 2)
                throw argument_error("amplitude damping is defined for qubit blanks only");
            return make_amplitude_damping(p);
    }
    throw argument_error("make_channel: unknown kind");
}

// Sum_k K rho K^dagger.
inline DensityMatrix apply_noise(const DensityMatrix& blank, const NoiseChannel& channel) {
    if (channel.dim() != blank.dim())
        throw argument_error("apply_noise: Kraus dimension does not match the blank");
    ComplexMatrix acc(blank.dim(), blank.dim());
    for (const ComplexMatrix& k : channel.kraus) {
        const ComplexMatrix t = k * blank.matrix();
        acc = acc + multiply_adjoint(t, k);
    }
    // re-Hermitize the rounding dust so the validating constructor stays exact
    for (std::size_t i = 0; i < acc.rows(); ++i)
        for (std::size_t j = i + 1; j < acc.cols(); ++j) {
            const cplx avg = 0.5 * (acc(i, j) + std::conj(acc(j, i)));
            acc(i, j) = avg;
            acc(j, i) = std::conj(avg);
        }
    return DensityMatrix(blank.layout(), std::move(acc));
}

// Everything a single cloning run reports.
struct CloneReport {
    std::string machine_variant;
    std::string input_descriptor;
    std::string blank_descriptor;
    std::vector<DensityMatrix> per_clone_states;
    std::vector<double> per_clone_fidelity;
    std::optional<double> shrink_factor;
    std::optional<double> success_probability;
    std::optional<double> blank_invariance_distance;
    std::optional<DensityMatrix> joint_clone_state;  // probabilistic runs
    bool input_in_domain = true;
    std::optional<std::uint64_t> seed;
};

struct RunOptions {
    // Run a fixed-blank machine outside its defining domain anyway (the
    // behavior there is completion-dependent and reported as such).
    bool force_blank = false;
    // Single-system pure state the clones are scored against. Defaults to the
    // input itself when the input is a single system.
    std::optional<StateVector> reference;
};

namespace detail {

inline double blank_overlap_with_designated(const CloningMachine& m, const StateVector& blank) {
    const StateVector b0 = m.designated_blank();
    return std::abs(inner(b0, blank.reshaped(b0.layout())));
}

// Weight of the input inside the symmetric subspace (qudit machines only).
inline double symmetric_weight(const CloningMachine& m, const StateVector& input) {
    if (!is_qudit(m.variant) || m.params.n == 1) return 1.0;
    double w = 0.0;
    for (const OccupationVector& n : enumerate_occupations(m.params.n, m.params.d)) {
        const StateVector e = embed_symmetric(n).reshaped(input.layout());
        w += std::norm(inner(e, input));
    }
    return w;
}

inline void score_clones(const CloningMachine& m, const RunOptions& opts, CloneReport& rep) {
    if (!opts.reference) return;
    const StateVector& psi = *opts.reference;
    if (psi.dim() != static_cast<std::size_t>(m.params.d))
        throw argument_error("reference state must be a single system");
    for (const DensityMatrix& c : rep.per_clone_states)
        rep.per_clone_fidelity.push_back(fidelity_pure(psi, c));
    if (m.params.d == 2) {
        const auto in_bloch = bloch_vector(DensityMatrix::from_pure(psi.reshaped({2})));
        const auto cl_bloch = bloch_vector(rep.per_clone_states.front().reshaped({2}));
        rep.shrink_factor = fit_shrink(in_bloch, cl_bloch).eta;
    }
}

inline std::vector<DensityMatrix> reduce_clones(const CloningMachine& m,
                                                const DensityMatrix& full) {
    std::vector<DensityMatrix> clones;
    clones.reserve(static_cast<std::size_t>(m.params.m));
    for (int c = 0; c < m.params.m; ++c)
        clones.push_back(partial_trace(full, {static_cast<std::size_t>(c)}));
    return clones;
}

// Clone states for the designated blank, composed directly (no report, no
// recursion into run_pure).
inline std::vector<DensityMatrix> designated_blank_clones(const CloningMachine& m,
                                                          const StateVector& input) {
    const StateVector full = tensor(
        tensor(input.reshaped(m.input_layout()), m.designated_blank()), m.machine_initial());
    const StateVector out(m.layout, m.unitary.apply(full.amplitudes()));
    return reduce_clones(m, DensityMatrix::from_pure(out));
}

}  // namespace detail

// Applies the machine to input (x) blank (x) machine-initial and reduces to
// each clone. Fixed-blank machines insist on their designated blank unless
// forced; what they do elsewhere is an artifact of the completion.
inline CloneReport run_pure(const CloningMachine& m, const StateVector& input,
                            const StateVector& blank, const RunOptions& opts = {}) {
    if (input.dim() != m.input_dim()) throw argument_error("run_pure: input dimension mismatch");
    if (blank.dim() != m.blank_dim()) throw argument_error("run_pure: blank dimension mismatch");
    if (!is_robust(m.variant) && !opts.force_blank &&
        detail::blank_overlap_with_designated(m, blank) < 1.0 - kDefaultTol)
        throw blank_mismatch_error(
            "fixed-blank machine given a non-designated blank; its action there is undefined "
            "(completion-dependent); pass the override to run anyway");

    const StateVector full = tensor(
        tensor(input.reshaped(m.input_layout()), blank.reshaped(m.blank_layout())),
        m.machine_initial());
    const StateVector out(m.layout, m.unitary.apply(full.amplitudes()));
    const DensityMatrix rho_out = DensityMatrix::from_pure(out);

    CloneReport rep;
    rep.machine_variant = variant_name(m.variant);
    rep.input_descriptor = "pure, dim " + std::to_string(input.dim());
    rep.blank_descriptor = "pure, dim " + std::to_string(blank.dim());
    rep.per_clone_states = detail::reduce_clones(m, rho_out);
    rep.input_in_domain = detail::symmetric_weight(m, input) >= 1.0 - 1e-9;
    if (!rep.input_in_domain) rep.input_descriptor += " (outside symmetric subspace)";

    if (is_robust(m.variant) && !is_probabilistic(m.variant) &&
        detail::blank_overlap_with_designated(m, blank) < 1.0 - kDefaultTol) {
        const auto reference = detail::designated_blank_clones(m, input);
        double worst = 0.0;
        for (std::size_t c = 0; c < reference.size(); ++c)
            worst = std::max(worst, trace_distance(rep.per_clone_states[c], reference[c]));
        rep.blank_invariance_distance = worst;
    }

    RunOptions scored = opts;
    if (!scored.reference && input.dim() == static_cast<std::size_t>(m.params.d))
        scored.reference = input;
    detail::score_clones(m, scored, rep);
    return rep;
}

// Density-matrix route: conjugates (input)(input)^+ (x) blank (x) machine by
// the unitary. Robust variants only; the force flag exists to demonstrate the
// completion-dependent behavior of fixed machines on corrupted blanks.
inline CloneReport run_mixed_blank(const CloningMachine& m, const StateVector& input,
                                   const DensityMatrix& blank, const RunOptions& opts = {}) {
    if (input.dim() != m.input_dim())
        throw argument_error("run_mixed_blank: input dimension mismatch");
    if (blank.dim() != m.blank_dim())
        throw argument_error("run_mixed_blank: blank dimension mismatch");
    if (!is_robust(m.variant) && !opts.force_blank)
        throw unsupported_variant_error(
            "run_mixed_blank: fixed-blank machine; a mixed blank lies outside its defining "
            "domain (pass the override to demonstrate the completion-dependent result)");

    const DensityMatrix rho_in = DensityMatrix::from_pure(input.reshaped(m.input_layout()));
    const DensityMatrix rho_mach = DensityMatrix::from_pure(m.machine_initial());
    ComplexMatrix full = kron(kron(rho_in.matrix(), blank.matrix()), rho_mach.matrix());
    const DensityMatrix rho_full(m.layout, std::move(full));
    const DensityMatrix evolved = conjugate_evolve(m.unitary, rho_full);

    CloneReport rep;
    rep.machine_variant = variant_name(m.variant);
    rep.input_descriptor = "pure, dim " + std::to_string(input.dim());
    rep.blank_descriptor = "mixed, dim " + std::to_string(blank.dim());
    rep.per_clone_states = detail::reduce_clones(m, evolved);
    rep.input_in_domain = detail::symmetric_weight(m, input) >= 1.0 - 1e-9;

    if (is_robust(m.variant) && !is_probabilistic(m.variant)) {
        const auto reference = detail::designated_blank_clones(m, input);
        double worst = 0.0;
        for (std::size_t c = 0; c < reference.size(); ++c)
            worst = std::max(worst, trace_distance(rep.per_clone_states[c], reference[c]));
        rep.blank_invariance_distance = worst;
    }

    RunOptions scored = opts;
    if (!scored.reference && input.dim() == static_cast<std::size_t>(m.params.d))
        scored.reference = input;
    detail::score_clones(m, scored, rep);
    return rep;
}

namespace detail {

inline CloneReport postselect_common(const CloningMachine& m, int which,
                                     const DensityMatrix& projected, double p) {
    const StateVector& psi = which == 0 ? *m.params.psi0 : *m.params.psi1;
    CloneReport rep;
    rep.machine_variant = variant_name(m.variant);
    rep.input_descriptor = "candidate psi" + std::to_string(which);
    rep.per_clone_states = reduce_clones(m, projected);
    for (const DensityMatrix& c : rep.per_clone_states)
        rep.per_clone_fidelity.push_back(fidelity_pure(psi, c));
    rep.joint_clone_state = partial_trace(projected, {0, 1});
    rep.success_probability = p;
    return rep;
}

}  // namespace detail

// Probabilistic run: applies the unitary, measures the success projector, and
// reports the renormalized post-selected clones plus the success probability.
inline CloneReport run_postselect(const CloningMachine& m, int which, const StateVector& blank,
                                  const RunOptions& opts = {}) {
    if (!is_probabilistic(m.variant))
        throw unsupported_variant_error("run_postselect: not a probabilistic machine");
    if (which != 0 && which != 1) throw argument_error("run_postselect: which must be 0 or 1");
    if (blank.dim() != m.blank_dim())
        throw argument_error("run_postselect: blank dimension mismatch");
    if (!is_robust(m.variant) && !opts.force_blank &&
        detail::blank_overlap_with_designated(m, blank) < 1.0 - kDefaultTol)
        throw blank_mismatch_error(
            "fixed-blank probabilistic machine given a non-designated blank; pass the "
            "override to run anyway");

    const StateVector& psi = which == 0 ? *m.params.psi0 : *m.params.psi1;
    const StateVector full =
        tensor(tensor(psi.reshaped(m.input_layout()), blank.reshaped(m.blank_layout())),
               m.machine_initial());
    const std::vector<cplx> out = m.unitary.apply(full.amplitudes());
    std::vector<cplx> proj = m.success_projector->apply(out);
    double p = 0.0;
    for (const cplx& z : proj) p += std::norm(z);
    if (p < 1e-14) throw error("run_postselect: vanishing success probability");

    const StateVector post(m.layout, std::move(proj));
    CloneReport rep = detail::postselect_common(m, which, DensityMatrix::from_pure(post), p);
    rep.blank_descriptor = "pure, dim " + std::to_string(blank.dim());
    return rep;
}

inline CloneReport run_postselect(const CloningMachine& m, int which, const DensityMatrix& blank,
                                  const RunOptions& opts = {}) {
    if (!is_probabilistic(m.variant))
        throw unsupported_variant_error("run_postselect: not a probabilistic machine");
    if (which != 0 && which != 1) throw argument_error("run_postselect: which must be 0 or 1");
    if (blank.dim() != m.blank_dim())
        throw argument_error("run_postselect: blank dimension mismatch");
    if (!is_robust(m.variant) && !opts.force_blank)
        throw unsupported_variant_error(
            "run_postselect: fixed-blank machine with a mixed blank (pass the override to "
            "demonstrate the completion-dependent result)");

    const StateVector& psi = which == 0 ? *m.params.psi0 : *m.params.psi1;
    const DensityMatrix rho_in = DensityMatrix::from_pure(psi.reshaped(m.input_layout()));
    const DensityMatrix rho_mach = DensityMatrix::from_pure(m.machine_initial());
    ComplexMatrix full = kron(kron(rho_in.matrix(), blank.matrix()), rho_mach.matrix());
    const DensityMatrix evolved = conjugate_evolve(m.unitary, DensityMatrix(m.layout, std::move(full)));

    const ComplexMatrix& p_op = *m.success_projector;
    const ComplexMatrix projected_raw = p_op * evolved.matrix() * p_op;
    const double p = projected_raw.trace().real();
    if (p < 1e-14) throw error("run_postselect: vanishing success probability");
    const DensityMatrix projected(m.layout, projected_raw * cplx{1.0 / p, 0.0});

    CloneReport rep = detail::postselect_common(m, which, projected, p);
    rep.blank_descriptor = "mixed, dim " + std::to_string(blank.dim());
    return rep;
}

namespace detail {

inline std::vector<DensityMatrix> clone_states_for_blank_pure(const CloningMachine& m,
                                                              const StateVector& input,
                                                              const StateVector& blank,
                                                              const RunOptions& opts) {
    if (is_probabilistic(m.variant)) {
        std::vector<DensityMatrix> all;
        for (int which : {0, 1}) {
            CloneReport r = run_postselect(m, which, blank, opts);
            for (DensityMatrix& c : r.per_clone_states) all.push_back(std::move(c));
        }
        return all;
    }
    return run_pure(m, input, blank, opts).per_clone_states;
}

inline std::vector<DensityMatrix> clone_states_for_blank_mixed(const CloningMachine& m,
                                                               const StateVector& input,
                                                               const DensityMatrix& blank,
                                                               const RunOptions& opts) {
    if (is_probabilistic(m.variant)) {
        std::vector<DensityMatrix> all;
        for (int which : {0, 1}) {
            CloneReport r = run_postselect(m, which, blank, opts);
            for (DensityMatrix& c : r.per_clone_states) all.push_back(std::move(c));
        }
        return all;
    }
    return run_mixed_blank(m, input, blank, opts).per_clone_states;
}

}  // namespace detail

// Max trace distance of any clone state from its designated-blank reference
// over sampled blanks: trial 0 is the fully depolarized blank, odd trials are
// Haar-random pure (entangled across blank registers where they are several),
// even trials rank-2 random mixed. Robust machines sit at numerical zero;
// fixed machines (forced) expose their completion dependence.
inline double blank_invariance_scan(const CloningMachine& m, const StateVector& input,
                                    int trials, std::uint64_t seed,
                                    const RunOptions& opts = {}) {
    if (!is_robust(m.variant) && !opts.force_blank)
        throw unsupported_variant_error(
            "blank_invariance_scan: robust variants only (pass the override to probe a "
            "fixed machine)");
    if (trials < 1) throw argument_error("blank_invariance_scan: trials must be >= 1");

    const std::vector<DensityMatrix> reference =
        detail::clone_states_for_blank_pure(m, input, m.designated_blank(), opts);

    Rng rng(seed);
    const std::size_t bdim = m.blank_dim();
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::vector<DensityMatrix> clones;
        if (t == 0) {
            clones = detail::clone_states_for_blank_mixed(
                m, input, DensityMatrix::maximally_mixed({bdim}), opts);
        } else if (t % 2 == 1) {
            clones = detail::clone_states_for_blank_pure(m, input,
                                                         haar_random_state(bdim, rng), opts);
        } else if (bdim > 2 && t % 4 == 2) {
            // higher-rank sampling for qudit blanks: normalized random positive
            clones = detail::clone_states_for_blank_mixed(m, input,
                                                          random_density(bdim, rng), opts);
        } else {
            clones = detail::clone_states_for_blank_mixed(m, input,
                                                          random_mixed_rank2(bdim, rng), opts);
        }
        for (std::size_t c = 0; c < clones.size(); ++c)
            worst = std::max(worst, trace_distance(clones[c], reference[c]));
    }
    return worst;
}

}  // namespace qclone
