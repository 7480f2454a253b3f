#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>

#include "qclone/machines.hpp"
#include "qclone/random.hpp"
#include "qclone/serialize.hpp"
#include "qclone/simulate.hpp"

using namespace qclone;

namespace {

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

struct FileGuard {
    std::string path;
    ~FileGuard() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("machine file round trip is bit-exact") {
    const std::string path = temp_path("qclone_rt.json");
    FileGuard guard{path};

    const CloningMachine m = build_quditNM_robust(1, 3, 2);
    write_machine_file(m, path);
    const CloningMachine back = read_machine_file(path);

    CHECK(back.variant == m.variant);
    CHECK(back.layout == m.layout);
    CHECK(back.machine_dim == m.machine_dim);
    CHECK(back.unitary.bit_equal(m.unitary));
}

TEST_CASE("probabilistic machine round trip keeps the candidates and gamma") {
    const std::string path = temp_path("qclone_prob_rt.json");
    FileGuard guard{path};

    // complex overlap so the phase adjustment is nontrivial
    const StateVector psi0 = StateVector::basis({2}, 0);
    const double r = 1.0 / std::sqrt(2.0);
    const StateVector psi1({2}, {cplx{0.5, 0.5}, cplx{r, 0.0}});
    const CloningMachine m = build_prob_robust(psi0, psi1);
    REQUIRE(m.params.phase_adjustment != 0.0);

    write_machine_file(m, path);
    const CloningMachine back = read_machine_file(path);
    CHECK(back.unitary.bit_equal(m.unitary));
    CHECK(back.params.gamma == m.params.gamma);
    CHECK(back.params.phase_adjustment == m.params.phase_adjustment);
    CHECK(back.params.psi0->bit_equal(*m.params.psi0));
    CHECK(back.params.psi1->bit_equal(*m.params.psi1));
    REQUIRE(back.success_projector.has_value());
    CHECK((*back.success_projector - *m.success_projector).max_abs() == 0.0);

    // the parsed machine reproduces the runs bit-for-bit, both candidates
    for (int which : {0, 1}) {
        const CloneReport a = run_postselect(m, which, m.designated_blank());
        const CloneReport b = run_postselect(back, which, back.designated_blank());
        CHECK(a.per_clone_states[0].bit_equal(b.per_clone_states[0]));
        CHECK(*a.success_probability == *b.success_probability);
    }
}

TEST_CASE("awkward doubles survive the JSON round trip bitwise") {
    json j = json::array();
    const std::vector<double> values = {1.0 / 3.0,  5e-324,        -0.0,
                                        0x1.fffffffffffffp-2,      2.0 / 3.0,
                                        std::sqrt(2.0) / 3.0,      1e308};
    for (double v : values) j.push_back(v);
    const json back = json::parse(j.dump());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double parsed = back[i].get<double>();
        CHECK(std::memcmp(&parsed, &values[i], sizeof(double)) == 0);
    }
}

TEST_CASE("parser rejects corrupted machine files") {
    const CloningMachine m = build_qubit12_fixed();
    json good = machine_to_json(m);

    json bad_version = good;
    bad_version["format_version"] = 2;
    CHECK_THROWS_AS(machine_from_json(bad_version), argument_error);

    json bad_unitary = good;
    bad_unitary["unitary"][0][0] = json::array({2.0, 0.0});
    CHECK_THROWS_AS(machine_from_json(bad_unitary), qclone::error);

    json bad_layout = good;
    bad_layout["layout"] = std::vector<std::size_t>{2, 2, 4};
    CHECK_THROWS_AS(machine_from_json(bad_layout), argument_error);

    json bad_variant = good;
    bad_variant["variant"] = "nonsense";
    CHECK_THROWS_AS(machine_from_json(bad_variant), argument_error);

    json missing = good;
    missing.erase("unitary");
    CHECK_THROWS_AS(machine_from_json(missing), argument_error);
}

TEST_CASE("parse validates unitarity at 1e-8") {
    const CloningMachine m = build_qubit12_fixed();
    json j = machine_to_json(m);
    // a 1e-6 dent in one entry must be caught
    const double dented = j["unitary"][0][0][0].get<double>() + 1e-6;
    j["unitary"][0][0] = json::array({dented, 0.0});
    CHECK_THROWS_AS(machine_from_json(j), qclone::error);
}

TEST_CASE("clone report serializes every populated field") {
    const CloningMachine m = build_qubit12_robust();
    CloneReport rep = run_pure(m, haar_random_state(2, 3), haar_random_state(2, 4));
    rep.seed = 77;
    const json j = report_to_json(rep);
    CHECK(j.at("machine_variant") == "qubit12-robust");
    CHECK(j.at("per_clone_states").size() == 2);
    CHECK(j.at("per_clone_fidelity").size() == 2);
    CHECK(j.contains("shrink_factor"));
    CHECK(j.at("seed") == 77);
    CHECK(j.at("input_in_domain") == true);

    // states restore numerically
    const ComplexMatrix c0 = matrix_from_json(j["per_clone_states"][0]["matrix"]);
    CHECK((c0 - rep.per_clone_states[0].matrix()).max_abs() == 0.0);
}

TEST_CASE("check results serialize with point or interval expectations") {
    const CheckResult point{"x", true, 1.0, 1.0, 1.0, 1e-10, "d"};
    const json jp = check_to_json(point);
    CHECK(jp.at("expected") == 1.0);

    const CheckResult interval{"y", true, 0.5, 0.0, 1.0, 0.0, "d"};
    const json ji = check_to_json(interval);
    CHECK(ji.at("expected").at("lo") == 0.0);
    CHECK(ji.at("expected").at("hi") == 1.0);
}

TEST_CASE("format_double emits shortest round-trip decimals") {
    for (double v : {2.0 / 3.0, 0.1, 1e-7, 123456.789, -0.0, 5e-324}) {
        const std::string s = format_double(v);
        // strtod, not stod: stod throws out_of_range on subnormals
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(std::memcmp(&back, &v, sizeof(double)) == 0);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("state round trip through JSON") {
    const StateVector s = haar_random_state(6, 11).reshaped({2, 3});
    const StateVector back = state_from_json(state_to_json(s));
    CHECK(back.bit_equal(s));
}
