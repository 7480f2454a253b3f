#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "qclone/random.hpp"
#include "qclone/verify.hpp"

using namespace qclone;

TEST_CASE("haar_random_state basics") {
    const StateVector unit = haar_random_state(1, 42);
    CHECK(unit.dim() == 1);
    CHECK(std::abs(std::abs(unit[0]) - 1.0) <= 1e-12);

    CHECK(haar_random_state(5, 123).bit_equal(haar_random_state(5, 123)));
    CHECK_FALSE(haar_random_state(5, 123).bit_equal(haar_random_state(5, 124)));

    CHECK_THROWS_AS(haar_random_state(0, 1), argument_error);
}

TEST_CASE("haar qubits have vanishing mean Bloch vector") {
    Rng rng(321);
    double sx = 0.0, sy = 0.0, sz = 0.0;
    const int samples = 10000;
    for (int t = 0; t < samples; ++t) {
        const auto b = bloch_vector(DensityMatrix::from_pure(haar_random_state(2, rng)));
        sx += b[0];
        sy += b[1];
        sz += b[2];
    }
    CHECK(std::abs(sx / samples) <= 0.05);
    CHECK(std::abs(sy / samples) <= 0.05);
    CHECK(std::abs(sz / samples) <= 0.05);
}

TEST_CASE("checks are deterministic given their seed") {
    const CheckResult a = check_shrink_qubit12(10, 99);
    const CheckResult b = check_shrink_qubit12(10, 99);
    CHECK(a.passed == b.passed);
    CHECK(a.observed == b.observed);  // bitwise
    CHECK(a.details == b.details);

    const CheckResult c = check_universality(1, 2, 2, 10, 7);
    const CheckResult d = check_universality(1, 2, 2, 10, 7);
    CHECK(c.observed == d.observed);
}

TEST_CASE("shrink check passes and reports eta 2/3") {
    const CheckResult r = check_shrink_qubit12(100, 42);
    CHECK(r.passed);
    CHECK(std::abs(r.observed - 2.0 / 3.0) <= 1e-10);
}

TEST_CASE("universality checks pass and record the constant fidelity") {
    auto recorded_fidelity = [](const CheckResult& r) {
        const std::string key = "fidelity ";
        const auto pos = r.details.find(key);
        REQUIRE(pos != std::string::npos);
        return std::stod(r.details.substr(pos + key.size()));
    };

    const CheckResult r = check_universality(1, 2, 2, 50, 42);
    CHECK(r.passed);
    CHECK(r.observed <= 1e-10);
    CHECK(std::abs(recorded_fidelity(r) - 5.0 / 6.0) <= 1e-10);

    // constants frozen from the independent expansion oracle
    const CheckResult qutrit = check_universality(1, 2, 3, 50, 42);
    CHECK(qutrit.passed);
    CHECK(std::abs(recorded_fidelity(qutrit) - 3.0 / 4.0) <= 1e-10);

    const CheckResult two_three = check_universality(2, 3, 2, 50, 42);
    CHECK(two_three.passed);
    CHECK(std::abs(recorded_fidelity(two_three) - 11.0 / 12.0) <= 1e-10);
}

TEST_CASE("blank invariance checks pass across the grid") {
    CHECK(check_blank_invariance(Variant::qubit12_robust, 1, 2, 2, 20, 42).passed);
    CHECK(check_blank_invariance(Variant::quditNM_robust, 1, 3, 2, 20, 42).passed);
    CHECK(check_blank_invariance(Variant::prob_robust, 1, 2, 2, 20, 42).passed);
    CHECK_THROWS_AS(check_blank_invariance(Variant::qubit12_fixed, 1, 2, 2, 5, 42),
                    unsupported_variant_error);
}

TEST_CASE("gamma check passes on the overlap grid") {
    const CheckResult r = check_prob_gamma({0.0, 0.25, 0.5, 0.75, 0.9}, 42);
    CHECK(r.passed);
    CHECK(r.observed <= 1e-10);
}

TEST_CASE("oracle equivalence and dimension checks pass") {
    CHECK(check_oracle_equivalence(42).passed);
    CHECK(check_machine_dims().passed);
}

TEST_CASE("oracle reduction matches a hand-computed case") {
    // clone of |0> under (1,2,2): diag(5/6, 1/6)
    const std::vector<cplx> out = oracle::output_state(StateVector::basis({2}, 0), 1, 2, 2);
    const ComplexMatrix rho = oracle::reduce_single_clone(out, 0, 2, 2, 2);
    CHECK(std::abs(rho(0, 0) - cplx{5.0 / 6.0, 0.0}) <= 1e-12);
    CHECK(std::abs(rho(1, 1) - cplx{1.0 / 6.0, 0.0}) <= 1e-12);
    CHECK(std::abs(rho(0, 1)) <= 1e-12);
}

TEST_CASE("negative controls fail as designed") {
    const CheckResult shrink = check_negctrl_shrink(42);
    CHECK_FALSE(shrink.passed);

    const CheckResult gamma = check_negctrl_gamma(42);
    CHECK_FALSE(gamma.passed);
    CHECK(gamma.observed > 0.01);  // the Gram mismatch is macroscopic
}

TEST_CASE("suites compose and reject unknown names") {
    const auto all = run_suite("all", 42);
    CHECK(all.size() >= 12);
    for (const CheckResult& c : all) {
        INFO(c.name << ": " << c.details);
        CHECK(c.passed);
    }

    const auto neg = run_suite("negative-controls", 42);
    REQUIRE(neg.size() == 2);
    for (const CheckResult& c : neg) CHECK_FALSE(c.passed);

    CHECK_THROWS_AS(run_suite("bogus", 42), argument_error);
}
