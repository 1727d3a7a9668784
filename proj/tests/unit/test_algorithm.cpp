// Copyright 2026 The isothc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "isothc/algorithm.hpp"
#include "isothc/errors.hpp"
#include "isothc/fit.hpp"
#include "test_util.hpp"

namespace isothc {
namespace {

ElectronicHamiltonian h2_rotated() {
  return rotate_to_h_eigenbasis(read_fcidump(testing::data_path("h2_sto6g.fcidump"))).hamiltonian;
}

ThcFactorization h2_exact() {
  ExactFactorizeOptions options;
  options.gauge_candidates = 256;
  return exact_factorize(h2_rotated(), options).thc;
}

FockDensity random_number_diagonal_density(const ModeLayout& layout, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(layout.dim(), layout.dim());
  for (int particles = 0; particles <= layout.n_modes(); ++particles) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.dim());
    for (auto x : fock::number_sector(layout.n_modes(), particles))
      v(static_cast<Eigen::Index>(x)) = cplx(normal(rng), normal(rng));
    v.normalize();
    m += v * v.adjoint() / static_cast<double>(layout.n_modes() + 1);
  }
  return FockDensity(layout, m);
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

TEST(StepSpec, Validation) {
  EXPECT_THROW((StepSpec{Variant::basic, 0.0}.validate()), DomainError);
  EXPECT_THROW((StepSpec{Variant::basic, -1.0}.validate()), DomainError);
  EXPECT_THROW((StepSpec{Variant::improved, 0.1, {0.0, NAN, 0.0}}.validate()), DomainError);
  EXPECT_NO_THROW((StepSpec{Variant::improved, 0.1}.validate()));
  EXPECT_EQ(parse_variant("improved"), Variant::improved);
  EXPECT_EQ(parse_variant(to_string(Variant::basic)), Variant::basic);
  EXPECT_THROW(parse_variant("fancy"), DomainError);
}

TEST(StepCount, RoundsAndRejects) {
  EXPECT_EQ(step_count(1.0, 0.1), 10);
  EXPECT_EQ(step_count(1.0, 0.02), 50);
  EXPECT_EQ(step_count(0.0, 0.3), 0);
  EXPECT_THROW(step_count(1.0, 0.3), DomainError);
  EXPECT_EQ(step_count(1.0, 0.3, 0.5), 3);
  EXPECT_THROW(step_count(1.0, 0.0), DomainError);
  EXPECT_THROW(step_count(-1.0, 0.1), DomainError);
}

TEST(HartreeFock, Occupations) {
  EXPECT_EQ(hartree_fock_state(3, 2, false).amplitudes()(0b011), cplx(1.0));
  EXPECT_EQ(hartree_fock_state(2, 2, true).amplitudes()(0b0101), cplx(1.0));
  EXPECT_EQ(hartree_fock_state(2, 2, true, 2).amplitudes()(0b0011), cplx(1.0));
  EXPECT_EQ(hartree_fock_state(3, 3, true, 1).amplitudes()(0b001011), cplx(1.0));
  EXPECT_THROW(hartree_fock_state(2, 3, false), DomainError);
  EXPECT_THROW(hartree_fock_state(2, 2, true, 1), DomainError);
  EXPECT_THROW(hartree_fock_state(2, 5, true), DomainError);
}

TEST(StepChannel, ZeroHamiltonianIsIdentity) {
  std::mt19937_64 rng(1);
  const ThcFactorization thc(random_coisometry(2, 3, rng), Eigen::MatrixXd::Zero(3, 3));
  const StepCircuit circuit(thc, Eigen::VectorXd::Zero(2), SpinMode::spinless, {Variant::improved, 0.3});
  const FockDensity rho = random_number_diagonal_density(circuit.layout().system_layout(), rng);
  const FockDensity ext = embed_system(rho, circuit.layout());
  EXPECT_LE(max_abs(step_channel(ext, circuit).matrix() - ext.matrix()), 1e-12);
}

TEST(StepChannel, NonDiagonalOneBodyIsRejected) {
  std::mt19937_64 rng(2);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  const ThcFactorization thc = exact_factorize(h).thc;
  EXPECT_THROW(StepCircuit(thc, h, SpinMode::spinless, {Variant::basic, 0.1}), DomainError);
}

TEST(StepChannel, TracePreservingAndVacuumSupported) {
  std::mt19937_64 rng(3);
  const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(2, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(2, 4, rng), h);
  for (Variant v : {Variant::basic, Variant::improved}) {
    const StepCircuit circuit(thc, h, SpinMode::spinful, {v, 0.2});
    const FockDensity rho = embed_system(random_number_diagonal_density(circuit.layout().system_layout(), rng),
                                         circuit.layout());
    const FockDensity out = step_channel(rho, circuit);
    EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-10);
    EXPECT_LE(ancilla_weight(out), 1e-12);
    EXPECT_TRUE(out.is_positive(1e-10));
  }
}

TEST(StepChannel, RejectsAncillaWeight) {
  std::mt19937_64 rng(4);
  const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(2, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(2, 3, rng), h);
  const StepCircuit circuit(thc, h, SpinMode::spinless, {Variant::basic, 0.1});
  const FockDensity bad = FockDensity::pure(FockState::basis_state(circuit.layout(), 0b100));
  EXPECT_THROW(step_channel(bad, circuit), DomainError);
}

TEST(StepChannel, FusedMatchesReference) {
  std::mt19937_64 rng(5);
  const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(3, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(3, 5, rng), h);
  for (Variant v : {Variant::basic, Variant::improved}) {
    const StepCircuit circuit(thc, h, SpinMode::spinless, {v, 0.37});
    const FockDensity rho = embed_system(random_number_diagonal_density(circuit.layout().system_layout(), rng),
                                         circuit.layout());
    const FockDensity fused = step_channel(rho, circuit, CircuitPath::fused);
    const FockDensity reference = step_channel(rho, circuit, CircuitPath::reference);
    EXPECT_LE(max_abs(fused.matrix() - reference.matrix()), 1e-12);
  }
}

TEST(StepChannel, ZeroPhasesReduceImprovedToBasic) {
  std::mt19937_64 rng(6);
  const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(2, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(2, 3, rng), h);
  const StepCircuit basic(thc, h, SpinMode::spinful, {Variant::basic, 0.25});
  const StepCircuit improved(thc, h, SpinMode::spinful, {Variant::improved, 0.25, {0.0, 0.0, 0.0}});
  EXPECT_LE(max_abs(basic.fused_unitary() - improved.fused_unitary()), 1e-12);
}

TEST(StepChannel, ExactH2StepIsClose) {
  const ElectronicHamiltonian h = h2_rotated();
  const ThcFactorization thc = h2_exact();
  const FockDensity rho = FockDensity::pure(hartree_fock_state(2, 2, true));
  EXPECT_LE(one_step_error(rho, thc, h, {Variant::basic, 1e-3}), 1e-5);
  EXPECT_LE(one_step_error(rho, thc, h, {Variant::improved, 1e-3}), 1e-6);
}

TEST(Evolve, ZeroTimeHasNoError) {
  const ElectronicHamiltonian h = h2_rotated();
  const EvolveResult r = evolve(hartree_fock_state(2, 2, true), h2_exact(), h, 0.0, {Variant::basic, 0.1});
  EXPECT_EQ(r.steps, 0);
  EXPECT_LE(r.error_vs_exact, 1e-14);
}

TEST(Evolve, CommutingInstanceIsExact) {
  std::mt19937_64 rng(7);
  const int n = 3;
  Eigen::MatrixXd eri = Eigen::MatrixXd::Zero(n * n, n * n);
  const Eigen::MatrixXd w = testing::random_symmetric(n, rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) eri(i * n + i, j * n + j) = w(i, j);
  const Eigen::Vector3d e(-1.0, 0.2, 0.9);
  const ElectronicHamiltonian h(0.4, Eigen::MatrixXd(e.asDiagonal()), eri);
  const ThcFactorization thc = exact_factorize(h).thc;
  ASSERT_EQ(thc.m(), n);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(1 << n);
  for (auto x : fock::number_sector(n, 2)) v(static_cast<Eigen::Index>(x)) = cplx(normal(rng), normal(rng));
  const FockState psi(ModeLayout{n, 0, false}, v.normalized());
  for (double tau : {0.5, 0.1}) {
    const EvolveResult r = evolve(psi, thc, h, 1.0, {Variant::basic, tau});
    EXPECT_LE(r.error_vs_exact, 1e-8) << tau;
  }
}

TEST(Evolve, ReferenceAndFusedPathsAgree) {
  const ElectronicHamiltonian h = h2_rotated();
  const ThcFactorization thc = h2_exact();
  EvolveOptions reference;
  reference.path = CircuitPath::reference;
  const FockState psi = hartree_fock_state(2, 2, true);
  const EvolveResult a = evolve(psi, thc, h, 0.5, {Variant::improved, 0.1});
  const EvolveResult b = evolve(psi, thc, h, 0.5, {Variant::improved, 0.1}, reference);
  EXPECT_EQ(a.steps, 5);
  EXPECT_LE(max_abs(a.rho_final.matrix() - b.rho_final.matrix()), 1e-12);
  EXPECT_NEAR(a.error_vs_exact, b.error_vs_exact, 1e-12);
}

TEST(TrotterBound, CommutingIsZeroAndScalesCubically) {
  const Eigen::MatrixXd h = Eigen::Vector2d(0.3, -0.8).asDiagonal();
  Eigen::MatrixXd eri = Eigen::MatrixXd::Zero(4, 4);
  eri(0, 3) = eri(3, 0) = 0.5;
  const ManyBodyOperator h_op = build_one_body_operator(h, SpinMode::spinless);
  const ManyBodyOperator diag_op = build_two_body_operator(eri, 2, SpinMode::spinless);
  EXPECT_LE(trotter_bound(h_op, diag_op, 0.1), 1e-14);

  std::mt19937_64 rng(8);
  const ElectronicHamiltonian r = testing::random_diagonal_h_hamiltonian(3, rng);
  const ManyBodyOperator rh = build_one_body_operator(r.h(), SpinMode::spinless);
  const ThcFactorization thc = factorization_from_u(random_coisometry(3, 4, rng), r);
  const ManyBodyOperator vp = projected_operator(thc, SpinMode::spinless);
  const double b1 = trotter_bound(rh, vp, 1e-2);
  EXPECT_GT(b1, 0.0);
  EXPECT_NEAR(b1 / trotter_bound(rh, vp, 5e-3), 8.0, 1e-9);
}

TEST(TrotterBound, DominatesSplittingError) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) {
    // Spinless N = 2 has a single pair state, where h and V' commute.
    const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(3, rng);
    const ThcFactorization thc = exact_factorize(h).thc;
    for (SpinMode spin : {SpinMode::spinless, SpinMode::spinful}) {
      const ManyBodyOperator h_op = build_one_body_operator(h.h(), spin);
      const ManyBodyOperator vp = projected_operator(thc, spin);
      for (double tau : {1e-2, 3e-3}) EXPECT_LE(splitting_error(h_op, vp, tau), trotter_bound(h_op, vp, tau));
    }
  }
}

TEST(ThcBound, ExactIsZeroAndBranchesAreOrdered) {
  std::mt19937_64 rng(10);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  EXPECT_LE(thc_bound(h, exact_factorize(h).thc, 1.0, SpinMode::spinless).value, 1e-12);
  const ThcFactorization truncated = factorization_from_u(random_coisometry(2, 2, rng), h);
  for (SpinMode spin : {SpinMode::spinless, SpinMode::spinful}) {
    const ThcBound b = thc_bound(h, truncated, 1.0, spin);
    ASSERT_TRUE(b.operator_norm_rate.has_value());
    EXPECT_LE(*b.operator_norm_rate, b.element_norm_rate);
    EXPECT_EQ(b.branch, ThcBoundBranch::operator_norm);
    EXPECT_NEAR(thc_bound(h, truncated, 2.0, spin).value, 2.0 * b.value, 1e-12);
  }
  const ThcBound capped = thc_bound(h, truncated, 1.0, SpinMode::spinful, 2);
  EXPECT_FALSE(capped.operator_norm_rate.has_value());
  EXPECT_EQ(capped.branch, ThcBoundBranch::element_norm);
}

TEST(ProjectionError, NoAncillasMeansNoLeak) {
  std::mt19937_64 rng(11);
  const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(2, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(2, 2, rng), h);
  const FockDensity rho = random_number_diagonal_density({2, 0, false}, rng);
  EXPECT_LE(projection_error_measured(thc, rho, {Variant::basic, 0.1}), 1e-12);
  EXPECT_LE(projection_error_bound(thc, {Variant::basic, 0.1}, SpinMode::spinless), 1e-12);
}

TEST(ProjectionError, LeadingOrdersAndBound) {
  const ThcFactorization thc = h2_exact();
  const FockDensity rho = FockDensity::pure(hartree_fock_state(2, 2, true));
  auto basic = [&](double tau) { return projection_error_measured(thc, rho, {Variant::basic, tau}); };
  auto improved = [&](double tau) { return projection_error_measured(thc, rho, {Variant::improved, tau}); };
  EXPECT_NEAR((basic(1e-2) / 1e-4) / (basic(1e-3) / 1e-6), 1.0, 0.2);
  EXPECT_NEAR((improved(1e-2) / 1e-6) / (improved(1e-3) / 1e-9), 1.0, 0.2);
  for (double tau : {1e-3, 1e-2, 1e-1}) {
    EXPECT_LE(basic(tau), projection_error_bound(thc, {Variant::basic, tau}, SpinMode::spinful) + 1e-12);
    EXPECT_LE(improved(tau), projection_error_bound(thc, {Variant::improved, tau}, SpinMode::spinful) + 1e-12);
  }
}

TEST(ProjectionError, ImprovedQuadraticCoefficientVanishes) {
  const ThcFactorization thc = h2_exact();
  const FockDensity rho = FockDensity::pure(hartree_fock_state(2, 2, true));
  // Least squares of eps(tau) on [tau^2, tau^3].
  std::vector<double> taus;
  for (int k = 0; k < 8; ++k) taus.push_back(1e-3 * std::pow(2.0, k));
  Eigen::MatrixXd a(taus.size(), 2);
  Eigen::VectorXd b(taus.size());
  for (std::size_t k = 0; k < taus.size(); ++k) {
    a(k, 0) = taus[k] * taus[k];
    a(k, 1) = a(k, 0) * taus[k];
    b(k) = projection_error_measured(thc, rho, {Variant::improved, taus[k]});
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  const double l1 = thc.vtilde().cwiseAbs().sum();
  EXPECT_LE(std::abs(coef(0)), 1e-6 * l1 * l1);
  EXPECT_GT(coef(1), 0.0);
}

TEST(PhaseSums, DefaultPhasesCancel) {
  for (const auto& s : phase_cancellation_sums(kDefaultPhases)) EXPECT_LT(std::abs(s), 1e-12);
  const auto zero = phase_cancellation_sums({0.0, 0.0, 0.0});
  EXPECT_NEAR(std::abs(zero[0]), 4.0, 1e-15);
  EXPECT_NEAR(std::abs(zero[2]), 8.0, 1e-15);
}

TEST(ErrorBudget, TermsArePositiveForGenericInstance) {
  std::mt19937_64 rng(12);
  const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(3, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(3, 4, rng), h);
  const ErrorBudget e = error_budget(h, thc, {Variant::basic, 0.05}, SpinMode::spinless);
  EXPECT_GE(e.eps_thc_rate, 0.0);
  EXPECT_GT(e.eps_tr, 0.0);
  EXPECT_GT(e.eps_pr, 0.0);
}

TEST(ErrorDecomposition, OneStepErrorWithinBounds) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 5; ++k) {
    const ElectronicHamiltonian h = testing::random_diagonal_h_hamiltonian(3, rng);
    const ThcFactorization thc = factorization_from_u(random_coisometry(3, 4, rng), h);
    const FockDensity rho = random_number_diagonal_density({3, 0, false}, rng);
    const ManyBodyOperator h_op = build_one_body_operator(h.h(), SpinMode::spinless);
    const ManyBodyOperator vp = projected_operator(thc, SpinMode::spinless);
    for (double tau : {1e-2, 1e-3}) {
      const StepSpec spec{Variant::basic, tau};
      const Eigen::MatrixXcd e = evolution_operator(h_op, tau / 2);
      const FockDensity shifted(rho.layout(), e * rho.matrix() * e.adjoint());
      const double bound = thc_bound(h, thc, tau, SpinMode::spinless).value + trotter_bound(h_op, vp, tau) +
                           projection_error_measured(thc, shifted, spec);
      EXPECT_LE(one_step_error(rho, thc, h, spec), bound + 1e-9);
    }
  }
}

}  // namespace
}  // namespace isothc
