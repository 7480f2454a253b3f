// qclone: build cloning machines, run cloning experiments and noise sweeps,
// and execute the verification suites.
//
// Exit codes: 0 success, 1 verification failure, 2 argument error,
//             3 blank-mismatch guard, 4 size cap.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qclone/qclone.hpp"

namespace {

using namespace qclone;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitArgument = 2;
constexpr int kExitBlankMismatch = 3;
constexpr int kExitSizeCap = 4;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QCLONE_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw argument_error("QCLONE_SEED is not a valid unsigned integer");
        }
    }
    return 42;
}

// Complex literal in the form used by the state flags: "re", "imj", "re+imj",
// "re-imj" (e.g. "0.5", "-0.25j", "1+2j").
cplx parse_complex(const std::string& tok) {
    std::string s = tok;
    if (s.empty()) throw argument_error("empty amplitude token");
    const bool has_j = s.back() == 'j' || s.back() == 'i';
    if (!has_j) {
        std::size_t pos = 0;
        const double re = std::stod(s, &pos);
        if (pos != s.size()) throw argument_error("bad amplitude: " + tok);
        return cplx{re, 0.0};
    }
    s.pop_back();
    if (s.empty() || s == "+" || s == "-") return cplx{0.0, s == "-" ? -1.0 : 1.0};
    // split at the sign that separates the real and imaginary parts
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    try {
        if (split == std::string::npos) {
            std::size_t pos = 0;
            const double im = std::stod(s, &pos);
            if (pos != s.size()) throw argument_error("bad amplitude: " + tok);
            return cplx{0.0, im};
        }
        const double re = std::stod(s.substr(0, split));
        std::string imtok = s.substr(split);
        if (imtok == "+") imtok = "1";
        if (imtok == "-") imtok = "-1";
        return cplx{re, std::stod(imtok)};
    } catch (const std::exception&) {
        throw argument_error("bad amplitude: " + tok);
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) out.push_back(tok);
    return out;
}

std::vector<cplx> parse_amplitudes(const std::string& spec) {
    std::vector<cplx> amps;
    for (const std::string& tok : split(spec, ',')) amps.push_back(parse_complex(tok));
    return amps;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw argument_error("cannot open for writing: " + out_path);
    out << text << "\n";
}

struct InputFlags {
    std::string amplitudes;
    std::string occupation;
    double theta = -1.0;
    double phi = 0.0;
};

// Resolves the input register state and, when one exists, the single-system
// reference the clones are scored against.
std::pair<StateVector, std::optional<StateVector>> resolve_input(const CloningMachine& m,
                                                                 const InputFlags& f) {
    const std::size_t d = static_cast<std::size_t>(m.params.d);
    if (!f.occupation.empty()) {
        std::vector<int> counts;
        for (const std::string& tok : split(f.occupation, ','))
            counts.push_back(std::stoi(tok));
        const OccupationVector occ(counts);
        if (occ.levels() != d) throw argument_error("--occ length must equal d");
        if (occ.total != m.params.n) throw argument_error("--occ counts must sum to N");
        std::optional<StateVector> ref;
        for (std::size_t lvl = 0; lvl < occ.levels(); ++lvl)
            if (occ.counts[lvl] == occ.total) ref = StateVector::basis({d}, lvl);
        return {embed_symmetric(occ).reshaped({m.input_dim()}), ref};
    }

    StateVector single = [&]() {
        if (!f.amplitudes.empty()) return StateVector({d}, parse_amplitudes(f.amplitudes));
        if (f.theta >= 0.0) {
            if (d != 2) throw argument_error("--theta/--phi describe a qubit (d=2) input");
            return StateVector({2}, {cplx{std::cos(f.theta / 2.0), 0.0},
                                     cplx{std::sin(f.theta / 2.0) * std::cos(f.phi),
                                          std::sin(f.theta / 2.0) * std::sin(f.phi)}});
        }
        return StateVector::basis({d}, 0);
    }();
    StateVector input = single;
    for (int i = 1; i < m.params.n; ++i) input = tensor(input, single);
    return {input.reshaped({m.input_dim()}), single};
}

int cmd_build(const std::string& variant_name_arg, int n, int m, int d,
              const std::string& psi0_spec, const std::string& psi1_spec, double overlap,
              const std::string& out_path) {
    const Variant variant = variant_from_name(variant_name_arg);
    CloningMachine machine = [&]() -> CloningMachine {
        switch (variant) {
            case Variant::qubit12_fixed: return build_qubit12_fixed();
            case Variant::qubit12_robust: return build_qubit12_robust();
            case Variant::quditNM_fixed: return build_quditNM_fixed(n, m, d);
            case Variant::quditNM_robust: return build_quditNM_robust(n, m, d);
            case Variant::prob_fixed:
            case Variant::prob_robust: {
                StateVector psi0 = StateVector::basis({2}, 0);
                StateVector psi1 = StateVector::basis({2}, 1);
                if (!psi0_spec.empty() || !psi1_spec.empty()) {
                    if (psi0_spec.empty() || psi1_spec.empty())
                        throw argument_error("provide both --psi0 and --psi1");
                    psi0 = StateVector({2}, parse_amplitudes(psi0_spec));
                    psi1 = StateVector({2}, parse_amplitudes(psi1_spec));
                } else if (overlap >= 0.0) {
                    if (overlap >= 1.0) throw argument_error("--overlap must lie in [0,1)");
                    psi1 = StateVector({2}, {cplx{overlap, 0.0},
                                             cplx{std::sqrt(1.0 - overlap * overlap), 0.0}});
                } else {
                    throw argument_error(
                        "probabilistic variants need --psi0/--psi1 or --overlap");
                }
                return variant == Variant::prob_fixed ? build_prob_fixed(psi0, psi1)
                                                      : build_prob_robust(psi0, psi1);
            }
        }
        throw argument_error("unknown variant");
    }();

    if (out_path.empty()) throw argument_error("build requires --out PATH");
    write_machine_file(machine, out_path);

    std::ostringstream summary;
    summary << "variant=" << variant_name(machine.variant) << " layout=[";
    for (std::size_t i = 0; i < machine.layout.size(); ++i)
        summary << (i ? "," : "") << machine.layout[i];
    summary << "] machine_dim=" << machine.machine_dim << " total_dim=" << machine.total_dim();
    if (is_probabilistic(machine.variant)) summary << " gamma=" << machine.params.gamma;
    summary << " -> " << out_path;
    std::cout << summary.str() << "\n";
    return kExitOk;
}

int cmd_clone(const std::string& machine_path, const InputFlags& in_flags,
              const std::string& blank_spec, bool blank_random, const std::string& mixed_spec,
              const std::string& noise_spec, int which, bool force_blank, std::uint64_t seed,
              bool seed_given, const std::string& out_path) {
    const CloningMachine machine = read_machine_file(machine_path);
    auto [input, reference] = resolve_input(machine, in_flags);
    RunOptions opts;
    opts.force_blank = force_blank;
    opts.reference = reference;

    const std::size_t bdim = machine.blank_dim();
    std::optional<StateVector> blank_pure;
    std::optional<DensityMatrix> blank_mixed;
    std::string blank_desc;
    bool used_seed = false;

    if (blank_random || blank_spec == "random") {
        blank_pure = haar_random_state(bdim, seed);
        blank_desc = "haar-random pure (seed " + std::to_string(seed) + ")";
        used_seed = true;
    } else if (!mixed_spec.empty()) {
        if (mixed_spec == "maximally-mixed") {
            blank_mixed = DensityMatrix::maximally_mixed({bdim});
            blank_desc = "maximally mixed";
        } else {
            ComplexMatrix acc(bdim, bdim);
            double total_p = 0.0;
            for (const std::string& term : split(mixed_spec, ';')) {
                const auto parts = split(term, ':');
                if (parts.size() != 2)
                    throw argument_error("--blank-mixed expects p:amps[;p:amps...]");
                const double p = std::stod(parts[0]);
                const StateVector v({bdim}, parse_amplitudes(parts[1]));
                total_p += p;
                for (std::size_t i = 0; i < bdim; ++i)
                    for (std::size_t j = 0; j < bdim; ++j)
                        acc(i, j) += p * v[i] * std::conj(v[j]);
            }
            if (std::abs(total_p - 1.0) > kDefaultTol)
                throw argument_error("--blank-mixed probabilities must sum to 1");
            blank_mixed = DensityMatrix({bdim}, std::move(acc));
            blank_desc = "mixed (eigen-decomposition spec)";
        }
    } else if (!noise_spec.empty()) {
        const auto parts = split(noise_spec, ',');
        if (parts.size() != 2) throw argument_error("--blank-noise expects channel,p");
        const NoiseChannel ch = make_channel(noise_kind_from_name(parts[0]),
                                             std::stod(parts[1]), bdim);
        blank_mixed = apply_noise(DensityMatrix::from_pure(
                                      machine.designated_blank().reshaped({bdim})),
                                  ch);
        blank_desc = parts[0] + "(p=" + parts[1] + ") on the designated blank";
    } else if (!blank_spec.empty()) {
        blank_pure = StateVector({bdim}, parse_amplitudes(blank_spec));
        blank_desc = "pure (explicit amplitudes)";
    } else {
        blank_pure = machine.designated_blank().reshaped({bdim});
        blank_desc = "designated |b>";
    }

    CloneReport rep = [&]() {
        if (is_probabilistic(machine.variant)) {
            if (blank_pure) return run_postselect(machine, which, *blank_pure, opts);
            return run_postselect(machine, which, *blank_mixed, opts);
        }
        if (blank_pure) return run_pure(machine, input, *blank_pure, opts);
        return run_mixed_blank(machine, input, *blank_mixed, opts);
    }();
    rep.blank_descriptor = blank_desc;
    if (used_seed || seed_given) rep.seed = seed;

    emit(report_to_json(rep).dump(2), out_path);
    return kExitOk;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& out_path) {
    const std::vector<CheckResult> results = run_suite(suite, seed);
    const bool expected_failures = suite == "negative-controls";
    bool all_passed = true;
    for (const CheckResult& c : results) {
        all_passed = all_passed && c.passed;
        std::ostringstream line;
        line << (c.passed ? "PASS " : "FAIL ") << c.name << "  observed=" << c.observed
             << " expected=" << c.expected_lo << " tol=" << c.tolerance;
        if (!c.passed && expected_failures) line << "  (expected failure)";
        std::cerr << line.str() << "\n";
    }
    emit(checks_to_json(results).dump(2), out_path);
    return all_passed ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const std::string& machine_path, const std::string& channel_name, double pmin,
              double pmax, int steps, const InputFlags& in_flags, const std::string& out_path) {
    const CloningMachine robust = read_machine_file(machine_path);
    if (!is_robust(robust.variant))
        throw argument_error("sweep expects a robust machine file (the fixed counterpart is "
                             "derived from its parameters)");
    CloningMachine fixed = [&]() -> CloningMachine {
        switch (robust.variant) {
            case Variant::qubit12_robust: return build_qubit12_fixed();
            case Variant::quditNM_robust:
                return build_quditNM_fixed(robust.params.n, robust.params.m, robust.params.d);
            case Variant::prob_robust:
                return build_prob_fixed(*robust.params.psi0, *robust.params.psi1);
            default: throw argument_error("sweep: unexpected variant");
        }
    }();

    auto [input, reference] = resolve_input(robust, in_flags);
    if (!reference) throw argument_error("sweep input needs a single-system reference");
    const NoiseKind kind = noise_kind_from_name(channel_name);
    const std::size_t bdim = robust.blank_dim();

    RunOptions ropts;
    ropts.reference = reference;
    RunOptions fopts;  // fixed column runs under the override, by construction
    fopts.force_blank = true;
    fopts.reference = reference;

    auto clone_fidelity = [&](const CloningMachine& m, const DensityMatrix& blank,
                              const RunOptions& o) {
        if (is_probabilistic(m.variant))
            return run_postselect(m, 0, blank, o).per_clone_fidelity.front();
        return run_mixed_blank(m, input, blank, o).per_clone_fidelity.front();
    };
    auto clone_state = [&](const CloningMachine& m, const DensityMatrix& blank,
                           const RunOptions& o) {
        if (is_probabilistic(m.variant))
            return run_postselect(m, 0, blank, o).per_clone_states.front();
        return run_mixed_blank(m, input, blank, o).per_clone_states.front();
    };

    const DensityMatrix clean =
        DensityMatrix::from_pure(robust.designated_blank().reshaped({bdim}));
    const DensityMatrix reference_clone = clone_state(robust, clean, ropts);

    std::ostringstream csv;
    csv << "p,clone_fidelity_robust,clone_fidelity_fixed_override,blank_invariance_distance\n";
    if (steps < 1) throw argument_error("sweep needs --steps >= 1");
    for (int i = 0; i < steps; ++i) {
        const double p = steps == 1 ? pmin : pmin + (pmax - pmin) * i / (steps - 1);
        const DensityMatrix noisy = apply_noise(clean, make_channel(kind, p, bdim));
        const double f_robust = clone_fidelity(robust, noisy, ropts);
        const double f_fixed = clone_fidelity(fixed, noisy, fopts);
        const double dist = trace_distance(clone_state(robust, noisy, ropts), reference_clone);
        csv << format_double(p) << "," << format_double(f_robust) << ","
            << format_double(f_fixed) << "," << format_double(dist) << "\n";
    }
    std::string text = csv.str();
    text.pop_back();  // emit() appends the final newline
    emit(text, out_path);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"universal and probabilistic quantum cloning machines with arbitrary blanks"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "construct a machine and write it to a file");
    std::string b_variant, b_psi0, b_psi1, b_out;
    int b_n = 1, b_m = 2, b_d = 2;
    double b_overlap = -1.0;
    build->add_option("--variant", b_variant,
                      "qubit12-fixed|qubit12-robust|qudit-fixed|qudit-robust|prob-fixed|"
                      "prob-robust")
        ->required();
    build->add_option("--n", b_n, "input copies N");
    build->add_option("--m", b_m, "output copies M");
    build->add_option("--d", b_d, "local dimension d");
    build->add_option("--psi0", b_psi0, "candidate 0 amplitudes (prob variants)");
    build->add_option("--psi1", b_psi1, "candidate 1 amplitudes (prob variants)");
    build->add_option("--overlap", b_overlap,
                      "build a canonical candidate pair with this overlap (prob variants)");
    build->add_option("--out", b_out, "output machine file")->required();

    // clone
    auto* clone = app.add_subcommand("clone", "run a machine on an input and report the clones");
    std::string c_machine, c_input, c_occ, c_blank, c_mixed, c_noise, c_out;
    double c_theta = -1.0, c_phi = 0.0;
    bool c_blank_random = false, c_force = false;
    int c_which = 0;
    std::uint64_t c_seed = 0;
    bool c_seed_given = false;
    clone->add_option("--machine", c_machine, "machine file")->required();
    clone->add_option("--input", c_input, "input amplitudes re+imj,...");
    clone->add_option("--occ", c_occ, "occupation-vector input n1,n2,...");
    clone->add_option("--theta", c_theta, "qubit input Bloch polar angle");
    clone->add_option("--phi", c_phi, "qubit input Bloch azimuth");
    clone->add_option("--blank", c_blank, "pure blank amplitudes");
    clone->add_flag("--blank-random", c_blank_random, "Haar-random pure blank (seeded)");
    clone->add_option("--blank-mixed", c_mixed,
                      "mixed blank p:amps[;p:amps...] or 'maximally-mixed'");
    clone->add_option("--blank-noise", c_noise, "channel,p applied to the designated blank");
    clone->add_option("--which", c_which, "candidate index for probabilistic machines (0|1)");
    clone->add_flag("--force-blank", c_force,
                    "run a fixed machine outside its designated blank anyway");
    clone->add_option("--seed", c_seed, "sampling seed")->each([&](const std::string&) {
        c_seed_given = true;
    });
    clone->add_option("--out", c_out, "write the JSON report here instead of stdout");

    // verify
    auto* verify = app.add_subcommand("verify", "run the verification suites");
    std::string v_suite = "all", v_out;
    std::uint64_t v_seed = 0;
    bool v_seed_given = false;
    verify->add_option("--suite", v_suite,
                       "all|shrink|universality|blank-invariance|prob|oracle|dims|"
                       "negative-controls");
    verify->add_option("--seed", v_seed, "suite seed")->each([&](const std::string&) {
        v_seed_given = true;
    });
    verify->add_option("--out", v_out, "write the JSON results here instead of stdout");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "noise sweep on the blank register (CSV)");
    std::string s_machine, s_channel, s_input, s_occ, s_out;
    double s_pmin = 0.0, s_pmax = 1.0, s_theta = -1.0, s_phi = 0.0;
    int s_steps = 5;
    sweep->add_option("--machine", s_machine, "robust machine file")->required();
    sweep->add_option("--channel", s_channel, "depolarizing|dephasing|amplitude-damping")
        ->required();
    sweep->add_option("--pmin", s_pmin, "lowest strength");
    sweep->add_option("--pmax", s_pmax, "highest strength");
    sweep->add_option("--steps", s_steps, "number of strengths");
    sweep->add_option("--input", s_input, "input amplitudes");
    sweep->add_option("--occ", s_occ, "occupation-vector input");
    sweep->add_option("--theta", s_theta, "qubit input Bloch polar angle");
    sweep->add_option("--phi", s_phi, "qubit input Bloch azimuth");
    sweep->add_option("--out", s_out, "write the CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitArgument;
    }

    try {
        if (build->parsed())
            return cmd_build(b_variant, b_n, b_m, b_d, b_psi0, b_psi1, b_overlap, b_out);
        if (clone->parsed()) {
            InputFlags f{c_input, c_occ, c_theta, c_phi};
            const std::uint64_t seed = c_seed_given ? c_seed : default_seed();
            return cmd_clone(c_machine, f, c_blank, c_blank_random, c_mixed, c_noise, c_which,
                             c_force, seed, c_seed_given, c_out);
        }
        if (verify->parsed())
            return cmd_verify(v_suite, v_seed_given ? v_seed : default_seed(), v_out);
        if (sweep->parsed()) {
            InputFlags f{s_input, s_occ, s_theta, s_phi};
            return cmd_sweep(s_machine, s_channel, s_pmin, s_pmax, s_steps, f, s_out);
        }
    } catch (const blank_mismatch_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBlankMismatch;
    } catch (const size_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSizeCap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitArgument;
    }
    return kExitArgument;
}
