// Acceptance suite: every quantitative claim the library is built around, one
// pass/fail line per criterion, exit code = number of failures.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qclone/qclone.hpp"

using namespace qclone;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& label, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

StateVector tensor_power(const StateVector& psi, int n) {
    StateVector out = psi;
    for (int i = 1; i < n; ++i) out = tensor(out, psi);
    return out.reshaped({out.dim()});
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QCLONE_CLI_PATH) + " " + args;
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

}  // namespace

int main() {
    // 1. shrink factor 2/3, componentwise, 100 Haar inputs, both 1->2 machines
    criterion(1, "clone Bloch vectors equal (2/3) s for 100 Haar inputs (< 1 s)",
              [](std::string& detail) {
                  const auto t0 = std::chrono::steady_clock::now();
                  const CloningMachine fixed = build_qubit12_fixed();
                  const CloningMachine robust = build_qubit12_robust();
                  Rng rng(42);
                  double worst = 0.0;
                  for (int t = 0; t < 100; ++t) {
                      const StateVector psi = haar_random_state(2, rng);
                      const auto in_b = bloch_vector(DensityMatrix::from_pure(psi));
                      for (const CloningMachine* m : {&fixed, &robust}) {
                          const StateVector blank = is_robust(m->variant)
                                                        ? haar_random_state(2, rng)
                                                        : m->designated_blank();
                          for (const DensityMatrix& c :
                               run_pure(*m, psi, blank).per_clone_states) {
                              const auto cb = bloch_vector(c);
                              for (std::size_t k = 0; k < 3; ++k)
                                  worst = std::max(worst, std::abs(cb[k] -
                                                                   (2.0 / 3.0) * in_b[k]));
                          }
                      }
                  }
                  const double secs = seconds_since(t0);
                  detail = "worst component deviation " + fmt(worst) + ", " + fmt(secs) + " s";
                  return worst <= 1e-10 && secs < 1.0;
              });

    // 2. constant single-clone fidelity 5/6, confirmed by the expansion oracle
    criterion(2, "1->2 qubit clone fidelity equals 5/6 (oracle-confirmed)",
              [](std::string& detail) {
                  const CloningMachine fixed = build_qubit12_fixed();
                  const CloningMachine robust = build_qubit12_robust();
                  Rng rng(43);
                  double worst = 0.0;
                  for (int t = 0; t < 100; ++t) {
                      const StateVector psi = haar_random_state(2, rng);
                      const CloneReport rf = run_pure(fixed, psi, fixed.designated_blank());
                      const CloneReport rr =
                          run_pure(robust, psi, haar_random_state(2, rng));
                      for (const double f : rf.per_clone_fidelity)
                          worst = std::max(worst, std::abs(f - 5.0 / 6.0));
                      for (const double f : rr.per_clone_fidelity)
                          worst = std::max(worst, std::abs(f - 5.0 / 6.0));
                  }
                  const CheckResult oracle_check = check_oracle_equivalence(42);
                  detail = "worst |F - 5/6| " + fmt(worst) + ", oracle distance " +
                           fmt(oracle_check.observed);
                  return worst <= 1e-10 && oracle_check.passed;
              });

    // 3. blank invariance over the robust grid, 50 blanks each
    criterion(3, "blank invariance <= 1e-10 over the robust grid (< 30 s)",
              [](std::string& detail) {
                  const auto t0 = std::chrono::steady_clock::now();
                  Rng rng(44);
                  double worst = 0.0;
                  std::vector<CloningMachine> machines;
                  machines.push_back(build_qubit12_robust());
                  for (const auto& [n, m, d] : std::vector<std::tuple<int, int, int>>{
                           {1, 2, 2}, {1, 3, 2}, {2, 3, 2}, {1, 2, 3}})
                      machines.push_back(build_quditNM_robust(n, m, d));
                  for (const CloningMachine& m : machines) {
                      const StateVector psi =
                          haar_random_state(static_cast<std::size_t>(m.params.d), rng);
                      const StateVector input = tensor_power(psi, m.params.n);
                      worst = std::max(worst,
                                       blank_invariance_scan(m, input, 50, rng.raw()));
                  }
                  const double secs = seconds_since(t0);
                  detail = "worst trace distance " + fmt(worst) + ", " + fmt(secs) + " s";
                  return worst <= 1e-10 && secs < 30.0;
              });

    // 4. probabilistic success probability 1/(1+s) and exact post-selected clones
    criterion(4, "probabilistic cloning: p = 1/(1+s), post-selected fidelity >= 1 - 1e-10",
              [](std::string& detail) {
                  Rng rng(45);
                  double worst_p = 0.0;
                  double worst_f = 1.0;
                  for (const double s : {0.0, 0.25, 0.5, 0.75, 0.9}) {
                      const auto pair = random_pair_with_overlap(s, rng);
                      const CloningMachine fixed = build_prob_fixed(pair.first, pair.second);
                      const CloningMachine robust = build_prob_robust(pair.first, pair.second);
                      const double gamma = 1.0 / (1.0 + s);

                      std::vector<std::pair<const CloningMachine*, StateVector>> runs;
                      runs.emplace_back(&fixed, fixed.designated_blank());
                      runs.emplace_back(&robust, robust.designated_blank());
                      for (int b = 0; b < 3; ++b)
                          runs.emplace_back(&robust, haar_random_state(2, rng));

                      for (const auto& [m, blank] : runs)
                          for (int which : {0, 1}) {
                              const CloneReport rep = run_postselect(*m, which, blank);
                              worst_p = std::max(
                                  worst_p, std::abs(*rep.success_probability - gamma));
                              const StateVector& psi =
                                  which == 0 ? *m->params.psi0 : *m->params.psi1;
                              worst_f = std::min(
                                  worst_f, fidelity_pure(tensor(psi, psi),
                                                         *rep.joint_clone_state));
                          }
                  }
                  detail = "worst |p - gamma| " + fmt(worst_p) + ", worst fidelity " +
                           fmt(1.0 - worst_f) + " below 1";
                  return worst_p <= 1e-10 && worst_f >= 1.0 - 1e-10;
              });

    // 5. structural invariants: unitarity, defining Gram blocks, conditional
    //    machine families over 50 random blanks per robust machine
    criterion(5, "unitarity, Gram identity of defining blocks, orthonormal {X_j}",
              [](std::string& detail) {
                  Rng rng(46);
                  const auto pair = random_pair_with_overlap(0.5, rng);
                  std::vector<CloningMachine> machines = {
                      build_qubit12_fixed(),        build_qubit12_robust(),
                      build_quditNM_fixed(1, 2, 2), build_quditNM_robust(1, 2, 2),
                      build_quditNM_fixed(1, 3, 2), build_quditNM_robust(1, 3, 2),
                      build_quditNM_fixed(2, 3, 2), build_quditNM_robust(2, 3, 2),
                      build_quditNM_fixed(1, 2, 3), build_quditNM_robust(1, 2, 3),
                      build_prob_fixed(pair.first, pair.second),
                      build_prob_robust(pair.first, pair.second)};

                  double worst_unitary = 0.0, worst_gram = 0.0, worst_x = 0.0;
                  for (const CloningMachine& m : machines) {
                      worst_unitary = std::max(worst_unitary, unitarity_defect(m.unitary));
                      std::vector<StateVector> ins, outs;
                      for (const DomainPair& p : m.domain_spec) {
                          ins.push_back(p.first);
                          outs.push_back(p.second);
                      }
                      if (is_probabilistic(m.variant)) {
                          // non-orthogonal defining pairs: the isometry condition
                          // is Gram agreement, not a Gram identity
                          worst_gram = std::max(
                              worst_gram,
                              (gram_matrix(ins) - gram_matrix(outs)).max_abs());
                      } else {
                          const ComplexMatrix g = gram_matrix(outs);
                          worst_gram = std::max(
                              worst_gram,
                              (g - ComplexMatrix::identity(outs.size())).max_abs());
                      }
                      if (is_robust(m.variant) && !is_probabilistic(m.variant)) {
                          const auto ns = enumerate_occupations(m.params.n, m.params.d);
                          for (int t = 0; t < 50; ++t) {
                              const StateVector blank =
                                  haar_random_state(m.blank_dim(), rng);
                              for (const OccupationVector& n : ns) {
                                  const auto xs = conditional_machine_states(m, n, blank);
                                  const ComplexMatrix g = gram_matrix(xs);
                                  worst_x = std::max(
                                      worst_x,
                                      (g - ComplexMatrix::identity(xs.size())).max_abs());
                              }
                          }
                      }
                  }
                  detail = "unitarity " + fmt(worst_unitary) + ", Gram " + fmt(worst_gram) +
                           ", {X_j} " + fmt(worst_x);
                  return worst_unitary <= 1e-10 && worst_gram <= 1e-10 && worst_x <= 1e-10;
              });

    // 6. oracle equivalence on (1,2,2), (2,3,2), (1,2,3)
    criterion(6, "pipeline matches the brute-force expansion oracle",
              [](std::string& detail) {
                  Rng rng(47);
                  double worst = 0.0;
                  for (const auto& [n, m, d] : std::vector<std::tuple<int, int, int>>{
                           {1, 2, 2}, {2, 3, 2}, {1, 2, 3}}) {
                      const CloningMachine machine = build_quditNM_fixed(n, m, d);
                      for (int t = 0; t < 5; ++t) {
                          const StateVector psi =
                              haar_random_state(static_cast<std::size_t>(d), rng);
                          const CloneReport rep = run_pure(
                              machine, tensor_power(psi, n), machine.designated_blank());
                          const std::vector<cplx> oracle_out =
                              oracle::output_state(psi, n, m, d);
                          for (int c = 0; c < m; ++c) {
                              const DensityMatrix oc(
                                  {static_cast<std::size_t>(d)},
                                  oracle::reduce_single_clone(oracle_out, c, m, d,
                                                              machine_dim(n, m, d)));
                              worst = std::max(
                                  worst,
                                  trace_distance(
                                      rep.per_clone_states[static_cast<std::size_t>(c)], oc));
                          }
                      }
                  }
                  detail = "worst trace distance " + fmt(worst);
                  return worst <= 1e-10;
              });

    // 7. machine dimension formula vs enumeration, exact integers
    criterion(7, "machine_dim equals enumeration counts for M <= 5, d <= 4",
              [](std::string& detail) {
                  int checked = 0;
                  for (int d = 2; d <= 4; ++d)
                      for (int n = 1; n <= 4; ++n)
                          for (int m = n + 1; m <= 5; ++m) {
                              if (machine_dim(n, m, d) !=
                                  enumerate_occupations(m - n, d).size())
                                  return false;
                              ++checked;
                          }
                  detail = std::to_string(checked) + " grid points, exact equality";
                  return true;
              });

    // 8. mixed-blank linearity on 20 random cases
    criterion(8, "run_mixed_blank equals the convex mix of pure runs (20 cases)",
              [](std::string& detail) {
                  Rng rng(48);
                  std::vector<CloningMachine> machines;
                  machines.push_back(build_qubit12_robust());
                  machines.push_back(build_quditNM_robust(1, 3, 2));
                  machines.push_back(build_quditNM_robust(2, 3, 2));
                  machines.push_back(build_quditNM_robust(1, 2, 3));
                  double worst = 0.0;
                  for (int t = 0; t < 20; ++t) {
                      const CloningMachine& m =
                          machines[static_cast<std::size_t>(t) % machines.size()];
                      const StateVector psi =
                          haar_random_state(static_cast<std::size_t>(m.params.d), rng);
                      const StateVector input = tensor_power(psi, m.params.n);
                      const DensityMatrix blank = random_mixed_rank2(m.blank_dim(), rng);

                      const auto direct = run_mixed_blank(m, input, blank).per_clone_states;
                      const HermitianEigen eig = hermitian_eigen(blank.matrix());
                      std::vector<ComplexMatrix> mix(
                          static_cast<std::size_t>(m.params.m),
                          ComplexMatrix(static_cast<std::size_t>(m.params.d),
                                        static_cast<std::size_t>(m.params.d)));
                      for (std::size_t k = 0; k < eig.values.size(); ++k) {
                          if (eig.values[k] < 1e-14) continue;
                          std::vector<cplx> col(blank.dim());
                          for (std::size_t i = 0; i < blank.dim(); ++i)
                              col[i] = eig.vectors(i, k);
                          const auto pure =
                              run_pure(m, input, StateVector({blank.dim()}, std::move(col)))
                                  .per_clone_states;
                          for (std::size_t c = 0; c < mix.size(); ++c)
                              mix[c] = mix[c] + pure[c].matrix() * cplx{eig.values[k], 0.0};
                      }
                      for (std::size_t c = 0; c < mix.size(); ++c)
                          worst = std::max(
                              worst,
                              trace_distance(direct[c],
                                             DensityMatrix(
                                                 {static_cast<std::size_t>(m.params.d)},
                                                 mix[c])));
                  }
                  detail = "worst trace distance " + fmt(worst);
                  return worst <= 1e-10;
              });

    // 9. CLI round trip: bit-identical clones, and verify --suite all under 60 s
    criterion(9, "CLI build/parse round trip is bit-exact; verify all under 60 s",
              [](std::string& detail) {
                  const std::string path =
                      (std::filesystem::temp_directory_path() / "qclone_acceptance.json")
                          .string();
                  if (run_cli("build --variant qudit-robust --n 1 --m 3 --d 2 --out " + path +
                              " >/dev/null") != 0)
                      return false;
                  const CloningMachine in_memory = build_quditNM_robust(1, 3, 2);
                  const CloningMachine parsed = read_machine_file(path);
                  std::remove(path.c_str());
                  if (!parsed.unitary.bit_equal(in_memory.unitary)) return false;

                  const StateVector psi = haar_random_state(2, 4242);
                  const StateVector blank = haar_random_state(4, 4243);
                  const auto a = run_pure(in_memory, psi, blank).per_clone_states;
                  const auto b = run_pure(parsed, psi, blank).per_clone_states;
                  for (std::size_t c = 0; c < a.size(); ++c)
                      if (!a[c].bit_equal(b[c])) return false;

                  const auto t0 = std::chrono::steady_clock::now();
                  const int rc = run_cli("verify --suite all --seed 42 >/dev/null 2>&1");
                  const double secs = seconds_since(t0);
                  detail = "clones bit-identical; verify exit " + std::to_string(rc) + " in " +
                           fmt(secs) + " s";
                  return rc == 0 && secs < 60.0;
              });

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
