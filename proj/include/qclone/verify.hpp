#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "qclone/density_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/machines.hpp"
#include "qclone/metrics.hpp"
#include "qclone/random.hpp"
#include "qclone/simulate.hpp"
#include "qclone/state_vector.hpp"
#include "qclone/symmetric.hpp"

namespace qclone {

// One named, tolerance-checked claim. passed means observed lies within
// [expected_lo - tolerance, expected_hi + tolerance] and every auxiliary
// assertion noted in details held.
struct CheckResult {
    std::string name;
    bool passed;
    double observed;
    double expected_lo;
    double expected_hi;
    double tolerance;
    std::string details;
};

namespace detail {

inline CheckResult make_result(std::string name, double observed, double expected,
                               double tol, std::string details, bool extra_ok = true) {
    const bool ok = extra_ok && std::abs(observed - expected) <= tol;
    return CheckResult{std::move(name), ok, observed, expected, expected, tol,
                       std::move(details)};
}

inline StateVector tensor_power(const StateVector& psi, int n) {
    StateVector out = psi;
    for (int i = 1; i < n; ++i) out = tensor(out, psi);
    return out.reshaped({out.dim()});
}

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Brute-force oracle: builds the cloner output by explicit summation over the
// defining expansion (no unitary matrix, no completion) and reduces clones
// with its own naive index loop. Kept independent of the machines/simulate
// pipeline it cross-checks.
// ---------------------------------------------------------------------------
namespace oracle {

// Output state for input psi^{(x)N}: sum_n <n|psi^N> sum_j alpha_{nj} |n+j>|M_j>,
// machine register last with dimension D.
inline std::vector<cplx> output_state(const StateVector& psi, int n, int m, int d) {
    if (psi.dim() != static_cast<std::size_t>(d))
        throw argument_error("oracle: psi must be a single qudit");
    const std::vector<OccupationVector> ns = enumerate_occupations(n, d);
    const std::vector<OccupationVector> js = enumerate_occupations(m - n, d);
    const std::size_t big_d = js.size();

    std::vector<cplx> psin(1, cplx{1.0, 0.0});
    for (int t = 0; t < n; ++t) {
        std::vector<cplx> next(psin.size() * static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < psin.size(); ++i)
            for (int a = 0; a < d; ++a)
                next[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)] =
                    psin[i] * psi[static_cast<std::size_t>(a)];
        psin = std::move(next);
    }

    std::size_t clone_total = 1;
    for (int t = 0; t < m; ++t) clone_total *= static_cast<std::size_t>(d);

    std::vector<cplx> out(clone_total * big_d, cplx{0.0, 0.0});
    for (const OccupationVector& nv : ns) {
        const StateVector en = embed_symmetric(nv);
        cplx cn{0.0, 0.0};
        for (std::size_t i = 0; i < psin.size(); ++i) cn += std::conj(en[i]) * psin[i];
        if (std::abs(cn) < 1e-300) continue;
        for (std::size_t jidx = 0; jidx < js.size(); ++jidx) {
            const double a = alpha(nv, js[jidx], n, m, d);
            const StateVector sym = embed_symmetric(occupation_sum(nv, js[jidx]));
            for (std::size_t i = 0; i < clone_total; ++i)
                out[i * big_d + jidx] += cn * a * sym[i];
        }
    }
    return out;
}

// Reduced state of one clone register, by direct summation over the others.
inline ComplexMatrix reduce_single_clone(const std::vector<cplx>& state, int clone, int m,
                                         int d, std::size_t mach_dim) {
    std::size_t pre = 1;
    for (int t = 0; t < clone; ++t) pre *= static_cast<std::size_t>(d);
    std::size_t post = mach_dim;
    for (int t = clone + 1; t < m; ++t) post *= static_cast<std::size_t>(d);

    ComplexMatrix rho(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < static_cast<std::size_t>(d); ++a)
        for (std::size_t b = 0; b < static_cast<std::size_t>(d); ++b) {
            cplx acc{0.0, 0.0};
            for (std::size_t l = 0; l < pre; ++l)
                for (std::size_t r = 0; r < post; ++r) {
                    const std::size_t ia = (l * static_cast<std::size_t>(d) + a) * post + r;
                    const std::size_t ib = (l * static_cast<std::size_t>(d) + b) * post + r;
                    acc += state[ia] * std::conj(state[ib]);
                }
            rho(a, b) = acc;
        }
    return rho;
}

}  // namespace oracle

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

// Worst fitted shrink factor of the 1->2 qubit cloners over Haar inputs;
// expected 2/3. Collinearity of clone and input Bloch vectors is asserted
// separately (angle <= 1e-8 rad) and folded into passed.
inline CheckResult check_shrink_qubit12(const CloningMachine& fixed,
                                        const CloningMachine& robust, int trials,
                                        std::uint64_t seed) {
    Rng rng(seed);
    double worst_eta = 2.0 / 3.0;
    double worst_dev = 0.0;
    double worst_angle = 0.0;
    for (int t = 0; t < trials; ++t) {
        const StateVector psi = haar_random_state(2, rng);
        const auto in_bloch = bloch_vector(DensityMatrix::from_pure(psi));
        const std::vector<std::pair<const CloningMachine*, StateVector>> runs = {
            {&fixed, fixed.designated_blank()},
            {&robust, haar_random_state(robust.blank_dim(), rng)}};
        for (const auto& [m, blank] : runs) {
            const CloneReport rep = run_pure(*m, psi, blank, RunOptions{false, psi});
            for (const DensityMatrix& clone : rep.per_clone_states) {
                const ShrinkFit fit = fit_shrink(in_bloch, bloch_vector(clone));
                worst_angle = std::max(worst_angle, fit.angle);
                const double dev = std::abs(fit.eta - 2.0 / 3.0);
                if (dev > worst_dev) {
                    worst_dev = dev;
                    worst_eta = fit.eta;
                }
            }
        }
    }
    return detail::make_result(
        "shrink-qubit12", worst_eta, 2.0 / 3.0, 1e-10,
        "worst fitted eta over " + std::to_string(trials) +
            " Haar inputs, both machines, both clones; worst collinearity angle " +
            detail::fmt(worst_angle) + " rad (required <= 1e-8)",
        worst_angle <= 1e-8);
}

inline CheckResult check_shrink_qubit12(int trials, std::uint64_t seed) {
    return check_shrink_qubit12(build_qubit12_fixed(), build_qubit12_robust(), trials, seed);
}

// Standard deviation of the single-clone fidelity over Haar inputs psi^{(x)N};
// universality demands a constant, so the expected value is 0.
inline CheckResult check_universality(int n, int m, int d, int trials, std::uint64_t seed) {
    const CloningMachine machine = build_quditNM_fixed(n, m, d);
    Rng rng(seed);
    std::vector<double> fids;
    fids.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
        const StateVector psi = haar_random_state(static_cast<std::size_t>(d), rng);
        const StateVector input = detail::tensor_power(psi, n);
        const CloneReport rep =
            run_pure(machine, input, machine.designated_blank(), RunOptions{false, psi});
        fids.push_back(rep.per_clone_fidelity.front());
    }
    double mean = 0.0;
    for (double f : fids) mean += f;
    mean /= static_cast<double>(fids.size());
    double var = 0.0;
    for (double f : fids) var += (f - mean) * (f - mean);
    const double stddev = std::sqrt(var / static_cast<double>(fids.size()));
    return detail::make_result(
        "universality(" + std::to_string(n) + "," + std::to_string(m) + "," +
            std::to_string(d) + ")",
        stddev, 0.0, 1e-10,
        "constant single-clone fidelity " + detail::fmt(mean) + " over " +
            std::to_string(trials) + " Haar inputs");
}

// Max trace distance of clone states from the designated-blank reference over
// sampled blanks; robust machines must sit at numerical zero.
inline CheckResult check_blank_invariance(Variant variant, int n, int m, int d, int trials,
                                          std::uint64_t seed) {
    Rng rng(seed);
    CloningMachine machine = [&]() -> CloningMachine {
        switch (variant) {
            case Variant::qubit12_robust: return build_qubit12_robust();
            case Variant::quditNM_robust: return build_quditNM_robust(n, m, d);
            case Variant::prob_robust: {
                const auto pair = random_pair_with_overlap(0.5, rng);
                return build_prob_robust(pair.first, pair.second);
            }
            default:
                throw unsupported_variant_error(
                    "check_blank_invariance: robust variants only");
        }
    }();
    const StateVector psi = haar_random_state(static_cast<std::size_t>(machine.params.d), rng);
    const StateVector input = detail::tensor_power(psi, machine.params.n);
    const double worst = blank_invariance_scan(machine, input, trials, rng.raw());
    std::string name = "blank-invariance:" + variant_name(variant);
    if (variant == Variant::quditNM_robust)
        name += "(" + std::to_string(n) + "," + std::to_string(m) + "," + std::to_string(d) + ")";
    return detail::make_result(std::move(name), worst, 0.0, 1e-10,
                               std::to_string(trials) +
                                   " blanks: fully depolarized, Haar pure, rank-2 mixed" +
                                   (is_probabilistic(machine.variant)
                                        ? "; clones compared post-selection"
                                        : ""));
}

// Success probability of the probabilistic cloners against gamma = 1/(1+s)
// for a grid of overlaps, both candidates, both variants, and random blanks
// on the robust variant. Post-selected two-clone fidelity folded into passed.
inline CheckResult check_prob_gamma(const std::vector<double>& overlaps, std::uint64_t seed) {
    Rng rng(seed);
    double worst_dev = 0.0;
    double worst_fid = 1.0;
    for (double s : overlaps) {
        const auto pair = random_pair_with_overlap(s, rng);
        const CloningMachine fixed = build_prob_fixed(pair.first, pair.second);
        const CloningMachine robust = build_prob_robust(pair.first, pair.second);
        const double gamma = 1.0 / (1.0 + s);

        std::vector<std::pair<const CloningMachine*, StateVector>> runs;
        runs.emplace_back(&fixed, fixed.designated_blank());
        runs.emplace_back(&robust, robust.designated_blank());
        for (int b = 0; b < 3; ++b) runs.emplace_back(&robust, haar_random_state(2, rng));

        for (const auto& [m, blank] : runs) {
            for (int which : {0, 1}) {
                const CloneReport rep = run_postselect(*m, which, blank);
                worst_dev = std::max(worst_dev, std::abs(*rep.success_probability - gamma));
                const StateVector& psi = which == 0 ? *m->params.psi0 : *m->params.psi1;
                const StateVector target = tensor(psi, psi);
                worst_fid = std::min(worst_fid,
                                     fidelity_pure(target, *rep.joint_clone_state));
            }
        }
    }
    return detail::make_result(
        "prob-gamma", worst_dev, 0.0, 1e-10,
        "worst |p - 1/(1+s)| over overlaps; worst post-selected two-clone fidelity " +
            detail::fmt(worst_fid) + " (required >= 1 - 1e-10)",
        worst_fid >= 1.0 - 1e-10);
}

// Pipeline clone states vs the brute-force expansion oracle.
inline CheckResult check_oracle_equivalence(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    std::string details;
    for (const auto& [n, m, d] : std::vector<std::tuple<int, int, int>>{
             {1, 2, 2}, {2, 3, 2}, {1, 2, 3}}) {
        const CloningMachine machine = build_quditNM_fixed(n, m, d);
        const StateVector psi = haar_random_state(static_cast<std::size_t>(d), rng);
        const StateVector input = detail::tensor_power(psi, n);
        const CloneReport rep = run_pure(machine, input, machine.designated_blank());

        const std::vector<cplx> oracle_out = oracle::output_state(psi, n, m, d);
        for (int c = 0; c < m; ++c) {
            const ComplexMatrix rho =
                oracle::reduce_single_clone(oracle_out, c, m, d, machine_dim(n, m, d));
            const DensityMatrix oracle_clone({static_cast<std::size_t>(d)}, rho);
            worst = std::max(worst, trace_distance(rep.per_clone_states[static_cast<std::size_t>(c)],
                                                   oracle_clone));
        }
    }

    // frozen desk value: the 1->2 qubit clone of |0> is diag(5/6, 1/6)
    const CloningMachine q12 = build_quditNM_fixed(1, 2, 2);
    const StateVector zero = StateVector::basis({2}, 0);
    const CloneReport rep0 = run_pure(q12, zero, q12.designated_blank());
    const ComplexMatrix& c0 = rep0.per_clone_states.front().matrix();
    const double diag_dev = std::max(
        {std::abs(c0(0, 0) - cplx{5.0 / 6.0, 0.0}), std::abs(c0(1, 1) - cplx{1.0 / 6.0, 0.0}),
         std::abs(c0(0, 1)), std::abs(c0(1, 0))});

    return detail::make_result("oracle-equivalence", std::max(worst, diag_dev), 0.0, 1e-10,
                               "grid (1,2,2),(2,3,2),(1,2,3); includes clone(|0>) = "
                               "diag(5/6,1/6)");
}

// Machine dimension formula vs direct enumeration counts over M <= 5, d <= 4.
inline CheckResult check_machine_dims() {
    double worst = 0.0;
    for (int d = 2; d <= 4; ++d)
        for (int n = 1; n <= 4; ++n)
            for (int m = n + 1; m <= 5; ++m) {
                const auto formula = machine_dim(n, m, d);
                const auto count = enumerate_occupations(m - n, d).size();
                const auto sdim = sym_dim(m - n, d);
                worst = std::max(worst, std::abs(static_cast<double>(formula) -
                                                 static_cast<double>(count)));
                worst = std::max(worst, std::abs(static_cast<double>(formula) -
                                                 static_cast<double>(sdim)));
            }
    return detail::make_result("dimension-formulas", worst, 0.0, 0.0,
                               "D = (M-N+d-1)!/((M-N)!(d-1)!) vs enumeration length, "
                               "exact integer equality over M <= 5, d <= 4");
}

// ---------------------------------------------------------------------------
// Negative-control fixtures: tampered inputs that a sound check must reject.
// ---------------------------------------------------------------------------

// The fixed 1->2 machine with two unitary columns swapped (still unitary, no
// longer a cloner). Domain metadata is dropped since it no longer holds.
inline CloningMachine tampered_qubit12_fixed() {
    CloningMachine m = build_qubit12_fixed();
    ComplexMatrix u = m.unitary;
    for (std::size_t i = 0; i < u.rows(); ++i) std::swap(u(i, 0), u(i, 4));
    return CloningMachine(m.variant, m.params, m.layout, m.machine_dim, std::move(u), {},
                          std::nullopt);
}

// Runs the shrink check against the tampered machine; must come back failed.
inline CheckResult check_negctrl_shrink(std::uint64_t seed) {
    CheckResult r = check_shrink_qubit12(tampered_qubit12_fixed(), build_qubit12_robust(),
                                         10, seed);
    r.name = "negctrl-shrink-tampered";
    r.details += "; negative control: failure expected";
    return r;
}

// The fixed probabilistic defining pairs with an off-formula gamma; the Gram
// detector in orthonormalize_domain must reject them.
inline std::vector<DomainPair> prob_domain_with_gamma(const StateVector& psi0,
                                                      const StateVector& psi1, double gamma) {
    const std::vector<std::size_t> layout{2, 2, 2};
    const double sq = std::sqrt(gamma);
    const double sf = std::sqrt(1.0 - gamma);
    std::vector<DomainPair> pairs;
    for (const StateVector* psi : {&psi0, &psi1}) {
        std::vector<cplx> in(8, cplx{0.0, 0.0});
        for (std::size_t a = 0; a < 2; ++a) in[a * 4] = (*psi)[a];
        std::vector<cplx> out(8, cplx{0.0, 0.0});
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t c = 0; c < 2; ++c)
                out[a * 4 + c * 2] = sq * (*psi)[a] * (*psi)[c];
        out[1] += sf;  // |00>|m_perp>
        pairs.emplace_back(StateVector(layout, std::move(in)),
                           StateVector(layout, std::move(out)));
    }
    return pairs;
}

inline CheckResult check_negctrl_gamma(std::uint64_t seed) {
    Rng rng(seed);
    const double s = 0.5;
    const auto pair = random_pair_with_overlap(s, rng);
    const double wrong = 1.0 / (1.0 + s) + 0.05;
    double observed = 0.0;
    std::string note = "orthonormalize_domain unexpectedly accepted the wrong gamma";
    try {
        orthonormalize_domain(prob_domain_with_gamma(pair.first, pair.second, wrong));
    } catch (const not_an_isometry_error& e) {
        observed = e.mismatch;
        note = "Gram mismatch detected as required";
    }
    CheckResult r = detail::make_result("negctrl-gamma-perturbed", observed, 0.0, 1e-10,
                                        note + "; negative control: failure expected");
    return r;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<CheckResult> out;
    const bool all = suite == "all";
    if (all || suite == "shrink") out.push_back(check_shrink_qubit12(100, seed));
    if (all || suite == "universality") {
        out.push_back(check_universality(1, 2, 2, 50, seed));
        out.push_back(check_universality(1, 2, 3, 50, seed));
        out.push_back(check_universality(2, 3, 2, 50, seed));
    }
    if (all || suite == "blank-invariance") {
        out.push_back(check_blank_invariance(Variant::qubit12_robust, 1, 2, 2, 50, seed));
        out.push_back(check_blank_invariance(Variant::quditNM_robust, 1, 2, 2, 50, seed));
        out.push_back(check_blank_invariance(Variant::quditNM_robust, 1, 3, 2, 50, seed));
        out.push_back(check_blank_invariance(Variant::quditNM_robust, 2, 3, 2, 50, seed));
        out.push_back(check_blank_invariance(Variant::quditNM_robust, 1, 2, 3, 50, seed));
        out.push_back(check_blank_invariance(Variant::prob_robust, 1, 2, 2, 50, seed));
    }
    if (all || suite == "prob")
        out.push_back(check_prob_gamma({0.0, 0.25, 0.5, 0.75, 0.9}, seed));
    if (all || suite == "oracle") out.push_back(check_oracle_equivalence(seed));
    if (all || suite == "dims") out.push_back(check_machine_dims());
    if (suite == "negative-controls") {
        out.push_back(check_negctrl_shrink(seed));
        out.push_back(check_negctrl_gamma(seed));
    }
    if (out.empty()) throw argument_error("unknown verification suite: " + suite);
    return out;
}

}  // namespace qclone
