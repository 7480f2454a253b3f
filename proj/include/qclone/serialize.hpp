#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qclone/complex_matrix.hpp"
#include "qclone/density_matrix.hpp"
#include "qclone/errors.hpp"
#include "qclone/machines.hpp"
#include "qclone/simulate.hpp"
#include "qclone/state_vector.hpp"
#include "qclone/verify.hpp"

namespace qclone {

using json = nlohmann::json;

inline constexpr int kMachineFormatVersion = 1;

// Shortest decimal that round-trips the double (used for CSV; JSON numbers go
// through nlohmann's own round-trip-exact dumper).
inline std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline json complex_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw argument_error("parse: complex entry must be a [re, im] pair");
    return cplx{j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw argument_error("parse: matrix must be a row array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    std::vector<cplx> entries;
    entries.reserve(rows * cols);
    for (const json& row : j) {
        if (row.size() != cols) throw argument_error("parse: ragged matrix rows");
        for (const json& e : row) entries.push_back(complex_from_json(e));
    }
    return ComplexMatrix(rows, cols, std::move(entries));
}

inline json state_to_json(const StateVector& s) {
    json amps = json::array();
    for (std::size_t i = 0; i < s.dim(); ++i) amps.push_back(complex_to_json(s[i]));
    return json{{"layout", s.layout()}, {"amplitudes", std::move(amps)}};
}

inline StateVector state_from_json(const json& j) {
    std::vector<cplx> amps;
    for (const json& e : j.at("amplitudes")) amps.push_back(complex_from_json(e));
    return StateVector(j.at("layout").get<std::vector<std::size_t>>(), std::move(amps));
}

inline json density_to_json(const DensityMatrix& d) {
    return json{{"layout", d.layout()}, {"matrix", matrix_to_json(d.matrix())}};
}

// ---------------------------------------------------------------------------
// Machine files
// ---------------------------------------------------------------------------

inline json machine_to_json(const CloningMachine& m) {
    json params;
    if (is_probabilistic(m.variant)) {
        json p0 = json::array(), p1 = json::array();
        for (std::size_t i = 0; i < 2; ++i) {
            p0.push_back(complex_to_json((*m.params.psi0)[i]));
            p1.push_back(complex_to_json((*m.params.psi1)[i]));
        }
        params = json{{"psi0", std::move(p0)}, {"psi1", std::move(p1)},
                      {"gamma", m.params.gamma}};
    } else {
        params = json{{"n", m.params.n}, {"m", m.params.m}, {"d", m.params.d}};
    }
    return json{
        {"format_version", kMachineFormatVersion},
        {"variant", variant_name(m.variant)},
        {"params", std::move(params)},
        {"layout", m.layout},
        {"basis_conventions",
         {{"occupation_ordering", "lexicographic-ascending"},
          {"machine_index_flattening", "j-major"},
          {"designated_blank", "basis-0 product state"},
          {"machine_initial", "basis-0"},
          {"phase_adjustment", m.params.phase_adjustment}}},
        {"unitary", matrix_to_json(m.unitary)},
    };
}

// Rebuilds the machine from the recorded parameters (regenerating the domain
// spec and the success projector deterministically), then swaps in the stored
// unitary bit-exactly after validating it.
inline CloningMachine machine_from_json(const json& j);

namespace detail {

inline CloningMachine machine_from_json_impl(const json& j) {
    if (j.at("format_version").get<int>() != kMachineFormatVersion)
        throw argument_error("machine file: unsupported format_version");
    const Variant variant = variant_from_name(j.at("variant").get<std::string>());
    const json& params = j.at("params");

    CloningMachine fresh = [&]() -> CloningMachine {
        switch (variant) {
            case Variant::qubit12_fixed: return build_qubit12_fixed();
            case Variant::qubit12_robust: return build_qubit12_robust();
            case Variant::quditNM_fixed:
                return build_quditNM_fixed(params.at("n").get<int>(), params.at("m").get<int>(),
                                           params.at("d").get<int>());
            case Variant::quditNM_robust:
                return build_quditNM_robust(params.at("n").get<int>(),
                                            params.at("m").get<int>(),
                                            params.at("d").get<int>());
            case Variant::prob_fixed:
            case Variant::prob_robust: {
                std::vector<cplx> a0, a1;
                for (const json& e : params.at("psi0")) a0.push_back(complex_from_json(e));
                for (const json& e : params.at("psi1")) a1.push_back(complex_from_json(e));
                const StateVector psi0({2}, std::move(a0));
                const StateVector psi1({2}, std::move(a1));
                return variant == Variant::prob_fixed ? build_prob_fixed(psi0, psi1)
                                                      : build_prob_robust(psi0, psi1);
            }
        }
        throw argument_error("machine file: unknown variant");
    }();

    const auto layout = j.at("layout").get<std::vector<std::size_t>>();
    if (layout != fresh.layout)
        throw argument_error("machine file: layout disagrees with the recorded parameters");

    ComplexMatrix u = matrix_from_json(j.at("unitary"));
    if (u.rows() != fresh.total_dim() || u.cols() != fresh.total_dim())
        throw argument_error("machine file: unitary side disagrees with the layout");

    MachineParams p = fresh.params;
    if (is_probabilistic(variant)) {
        // candidates and gamma are taken from the file bit-exactly so parsed
        // machines reproduce runs bit-for-bit
        std::vector<cplx> a0, a1;
        for (const json& e : params.at("psi0")) a0.push_back(complex_from_json(e));
        for (const json& e : params.at("psi1")) a1.push_back(complex_from_json(e));
        p.psi0 = StateVector({2}, std::move(a0));
        p.psi1 = StateVector({2}, std::move(a1));
        p.gamma = params.at("gamma").get<double>();
    }
    if (j.contains("basis_conventions") &&
        j.at("basis_conventions").contains("phase_adjustment"))
        p.phase_adjustment = j.at("basis_conventions").at("phase_adjustment").get<double>();

    // parse-time unitarity gate is looser (1e-8) than the builders' 1e-10
    return CloningMachine(variant, std::move(p), fresh.layout, fresh.machine_dim, std::move(u),
                          fresh.domain_spec, fresh.success_projector, 1e-8, 1e-12);
}

}  // namespace detail

inline CloningMachine machine_from_json(const json& j) {
    try {
        return detail::machine_from_json_impl(j);
    } catch (const json::exception& e) {
        throw argument_error("machine file: missing or malformed field: " +
                             std::string(e.what()));
    }
}

inline void write_machine_file(const CloningMachine& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw argument_error("cannot open for writing: " + path);
    out << machine_to_json(m).dump(2) << "\n";
    if (!out) throw error("write failed: " + path);
}

inline CloningMachine read_machine_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open machine file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw argument_error("machine file is not valid JSON: " + std::string(e.what()));
    }
    return machine_from_json(j);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json report_to_json(const CloneReport& r) {
    json clones = json::array();
    for (const DensityMatrix& c : r.per_clone_states) clones.push_back(density_to_json(c));
    json out{
        {"machine_variant", r.machine_variant},
        {"input_descriptor", r.input_descriptor},
        {"blank_descriptor", r.blank_descriptor},
        {"per_clone_states", std::move(clones)},
        {"per_clone_fidelity", r.per_clone_fidelity},
        {"input_in_domain", r.input_in_domain},
    };
    if (r.shrink_factor) out["shrink_factor"] = *r.shrink_factor;
    if (r.success_probability) out["success_probability"] = *r.success_probability;
    if (r.blank_invariance_distance)
        out["blank_invariance_distance"] = *r.blank_invariance_distance;
    if (r.joint_clone_state) out["joint_clone_state"] = density_to_json(*r.joint_clone_state);
    if (r.seed) out["seed"] = *r.seed;
    return out;
}

inline json check_to_json(const CheckResult& c) {
    json out{{"name", c.name},         {"passed", c.passed},
             {"observed", c.observed}, {"tolerance", c.tolerance},
             {"details", c.details}};
    if (c.expected_lo == c.expected_hi)
        out["expected"] = c.expected_lo;
    else
        out["expected"] = json{{"lo", c.expected_lo}, {"hi", c.expected_hi}};
    return out;
}

inline json checks_to_json(const std::vector<CheckResult>& cs) {
    json arr = json::array();
    for (const CheckResult& c : cs) arr.push_back(check_to_json(c));
    return arr;
}

}  // namespace qclone
