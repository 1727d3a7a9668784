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

#include "isothc/errors.hpp"
#include "isothc/focksim.hpp"
#include "isothc/thc.hpp"
#include "test_util.hpp"

namespace isothc {
namespace {

using fock::BasisIndex;

FockState random_sector_state(const ModeLayout& layout, int particles, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(layout.dim());
  for (BasisIndex x : fock::number_sector(layout.n_modes(), particles))
    v(static_cast<Eigen::Index>(x)) = cplx(normal(rng), normal(rng));
  v.normalize();
  return FockState(layout, v);
}

FockState random_state(const ModeLayout& layout, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(layout.dim());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(normal(rng), normal(rng));
  v.normalize();
  return FockState(layout, v);
}

FockDensity random_sector_density(const ModeLayout& layout, int particles, std::mt19937_64& rng) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(layout.dim(), layout.dim());
  const double w[3] = {0.5, 0.3, 0.2};
  for (double weight : w) {
    const FockState s = random_sector_state(layout, particles, rng);
    m += weight * s.amplitudes() * s.amplitudes().adjoint();
  }
  return FockDensity(layout, m);
}

Eigen::MatrixXcd row_action_matrix(const ModeLayout& layout, const std::function<void(Eigen::MatrixXcd&)>& f) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(layout.dim(), layout.dim());
  f(u);
  return u;
}

/// <a^dag_p a_q> with Jordan-Wigner signs in the layout's own ordering.
cplx one_rdm(const FockDensity& rho, int p, int q) {
  cplx out = 0.0;
  const auto dim = static_cast<BasisIndex>(rho.layout().dim());
  for (BasisIndex y = 0; y < dim; ++y) {
    BasisIndex x = y;
    int sign = 1;
    if (!fock::annihilate(x, q, sign) || !fock::create(x, p, sign)) continue;
    out += static_cast<double>(sign) * rho.matrix()(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
  }
  return out;
}

// ---------------------------------------------------------------------------

TEST(CompleteIsometry, CanonicalEmbeddingCompletesToIdentity) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, 4);
  u(0, 0) = u(1, 1) = 1.0;
  EXPECT_LE((complete_isometry(u) - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CompleteIsometry, RandomCoisometryCompletesToOrthogonal) {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd u = random_coisometry(2, 3, rng);
  const Eigen::MatrixXd w = complete_isometry(u);
  EXPECT_LE((w * w.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(w.topRows(2), u);
  EXPECT_EQ(complete_isometry(u), w);
}

TEST(CompleteIsometry, SquareInputIsReturned) {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd o = testing::random_orthogonal(3, rng);
  EXPECT_EQ(complete_isometry(o), o);
  EXPECT_THROW(complete_isometry(2.0 * o), DomainError);
}

TEST(GivensDecompose, IdentityNeedsNoRotations) {
  const GivensSequence s = givens_decompose(Eigen::MatrixXd::Identity(4, 4), 2);
  EXPECT_TRUE(s.rotations.empty());
  EXPECT_EQ(s.residual_phases.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GivensDecompose, RotationCountAndReconstruction) {
  std::mt19937_64 rng(3);
  const struct {
    int m, n;
    std::size_t bound;
  } cases[] = {{3, 2, 3}, {4, 2, 5}, {5, 3, 9}, {4, 4, 6}};
  for (const auto& c : cases) {
    const Eigen::MatrixXd w = complete_isometry(random_coisometry(c.n, c.m, rng));
    const GivensSequence s = givens_decompose(w, c.n);
    EXPECT_LE(s.rotations.size(), c.bound);
    for (const GivensRotation& r : s.rotations) EXPECT_EQ(r.q(), r.p + 1);
    const Eigen::MatrixXcd got = single_particle_matrix(s);
    EXPECT_LE((got.topRows(c.n) - w.topRows(c.n).cast<cplx>()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(GivensDecompose, SignFlipsBecomeResidualPhases) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(3, 3);
  w(0, 0) = -1.0;
  const GivensSequence s = givens_decompose(w, 3);
  EXPECT_TRUE(s.rotations.empty());
  EXPECT_DOUBLE_EQ(s.residual_phases(0), M_PI);
  EXPECT_LE((single_particle_matrix(s) - w.cast<cplx>()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GivensSequence, JsonRoundTripAndAdjacency) {
  GivensSequence s;
  s.n_modes = 3;
  s.rotations = {{0, 0.3, 0.1}, {1, -0.2, 0.0}};
  s.residual_phases = Eigen::Vector3d(0.0, M_PI, 0.0);
  const GivensSequence back = GivensSequence::from_json(s.to_json());
  EXPECT_EQ(back.rotations.size(), 2u);
  EXPECT_DOUBLE_EQ(back.rotations[0].phi, 0.1);
  nlohmann::json bad = s.to_json();
  bad["rotations"][0]["q"] = 2;
  EXPECT_THROW(GivensSequence::from_json(bad), DomainError);
}

TEST(BasisRotation, QuarterTurnSwapsOccupation) {
  const ModeLayout layout{2, 0, false};
  GivensSequence s;
  s.n_modes = 2;
  s.rotations = {{0, M_PI / 2, 0.0}};
  s.residual_phases = Eigen::Vector2d::Zero();
  const FockState out = apply_basis_rotation(FockState::basis_state(layout, 0b01), s, Direction::forward);
  EXPECT_NEAR(std::abs(out.amplitudes()(0b10) - cplx(1.0)), 0.0, 1e-15);
  // Double occupancy is unchanged (det = 1).
  const FockState both = apply_basis_rotation(FockState::basis_state(layout, 0b11), s, Direction::forward);
  EXPECT_NEAR(std::abs(both.amplitudes()(0b11) - cplx(1.0)), 0.0, 1e-15);
}

TEST(BasisRotation, InverseUndoesForward) {
  std::mt19937_64 rng(4);
  const ModeLayout layout{2, 1, true};
  const GivensSequence s = givens_decompose(complete_isometry(random_coisometry(2, 3, rng)), 2);
  const FockState psi = random_state(layout, rng);
  const FockState there = apply_basis_rotation(psi, s, Direction::forward);
  const FockState back = apply_basis_rotation(there, s, Direction::inverse);
  EXPECT_LE((back.amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(there.amplitudes().norm(), 1.0, 1e-12);
}

TEST(BasisRotation, OneParticleAmplitudesTransformBySinglParticleMatrix) {
  std::mt19937_64 rng(5);
  const ModeLayout layout{4, 0, false};
  GivensSequence s;
  s.n_modes = 4;
  s.rotations = {{0, 0.4, 0.3}, {2, -1.1, -0.7}, {1, 0.9, 1.2}};
  s.residual_phases = Eigen::Vector4d(0.1, 0.0, -0.5, M_PI);
  const FockState psi = random_sector_state(layout, 1, rng);
  Eigen::VectorXcd one(4);
  for (int p = 0; p < 4; ++p) one(p) = psi.amplitudes()(1 << p);
  const FockState out = apply_basis_rotation(psi, s, Direction::forward);
  const Eigen::VectorXcd expect = single_particle_matrix(s) * one;
  for (int p = 0; p < 4; ++p) EXPECT_NEAR(std::abs(out.amplitudes()(1 << p) - expect(p)), 0.0, 1e-12);
  const Eigen::VectorXd n = occupation_numbers(out);
  for (int p = 0; p < 4; ++p) EXPECT_NEAR(n(p), std::norm(expect(p)), 1e-12);
}

TEST(BasisRotation, SpinSectorsAreIndependent) {
  std::mt19937_64 rng(6);
  const ModeLayout layout{2, 0, true};
  const GivensSequence s = givens_decompose(testing::random_orthogonal(2, rng), 2);
  const FockState psi = random_state(layout, rng);
  const FockState both = apply_basis_rotation(psi, s, Direction::forward, SpinSector::both);
  const FockState split = apply_basis_rotation(apply_basis_rotation(psi, s, Direction::forward, SpinSector::up), s,
                                               Direction::forward, SpinSector::down);
  EXPECT_LE((both.amplitudes() - split.amplitudes()).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(apply_basis_rotation(FockState::basis_state({2, 0, false}, 0), s, Direction::forward,
                                    SpinSector::down),
               DomainError);
}

// Rotation, diagonal kernel, and inverse rotation reproduce the dense
// exponential of the rotated two-body operator.
TEST(BasisRotation, RotatedDiagonalEvolutionMatchesDenseExponential) {
  std::mt19937_64 rng(7);
  for (bool spinful : {false, true}) {
    const int m = spinful ? 3 : 4;
    const ModeLayout layout{m, 0, spinful};
    const Eigen::MatrixXd w = testing::random_orthogonal(m, rng);
    const Eigen::MatrixXd vtilde = testing::random_symmetric(m, rng);
    const GivensSequence s = givens_decompose(w, m);
    const double tau = 0.37;
    const Eigen::VectorXd energies = diagonal_two_body_energies(layout, vtilde);
    const Eigen::MatrixXcd circuit = row_action_matrix(layout, [&](Eigen::MatrixXcd& x) {
      kernel::basis_rotation(x, layout, s, Direction::inverse, SpinSector::both);
      kernel::diagonal_phase(x, energies, tau);
      kernel::basis_rotation(x, layout, s, Direction::forward, SpinSector::both);
    });
    const ManyBodyOperator op =
        build_two_body_operator(recontract(w, vtilde), m, spinful ? SpinMode::spinful : SpinMode::spinless);
    const Eigen::MatrixXcd dense = (cplx(0.0, -tau) * op.dense().cast<cplx>()).exp();
    EXPECT_LE((circuit - dense).cwiseAbs().maxCoeff(), 1e-8) << "spinful=" << spinful;
  }
}

TEST(DiagonalTwoBody, VacuumAndSingleParticlesAreUnchanged) {
  std::mt19937_64 rng(8);
  const ModeLayout layout{2, 1, true};
  const Eigen::MatrixXd vtilde = testing::random_symmetric(3, rng);
  const Eigen::VectorXd e = diagonal_two_body_energies(layout, vtilde);
  EXPECT_EQ(e(0), 0.0);
  for (int p = 0; p < layout.n_modes(); ++p) EXPECT_EQ(e(1 << p), 0.0);
  const FockState one = random_sector_state(layout, 1, rng);
  EXPECT_LE((apply_diagonal_two_body(one, vtilde, 1.3).amplitudes() - one.amplitudes()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DiagonalTwoBody, PairPhaseIsPeriodic) {
  const ModeLayout layout{3, 0, false};
  Eigen::MatrixXd vtilde = Eigen::MatrixXd::Zero(3, 3);
  vtilde(0, 2) = vtilde(2, 0) = 0.8;
  vtilde(1, 1) = 5.0;  // no self pair for spinless modes
  const Eigen::VectorXd e = diagonal_two_body_energies(layout, vtilde);
  EXPECT_DOUBLE_EQ(e(0b101), 0.8);
  EXPECT_DOUBLE_EQ(e(0b010), 0.0);
  const double tau = 2 * M_PI / 0.8;
  const FockState psi = FockState::basis_state(layout, 0b101);
  EXPECT_NEAR(std::abs(apply_diagonal_two_body(psi, vtilde, tau).amplitudes()(0b101) - cplx(1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::arg(apply_diagonal_two_body(psi, vtilde, 1.0).amplitudes()(0b101)), -0.8, 1e-12);
}

TEST(DiagonalTwoBody, SpinfulSameOrbitalPairCounts) {
  const ModeLayout layout{1, 0, true};
  const Eigen::MatrixXd vtilde = Eigen::MatrixXd::Constant(1, 1, 0.6);
  EXPECT_DOUBLE_EQ(diagonal_two_body_energies(layout, vtilde)(0b11), 0.6);
}

TEST(DiagonalOneBody, PhasesMatchMatrixExponential) {
  std::mt19937_64 rng(9);
  const ModeLayout layout{3, 0, false};
  const Eigen::Vector3d h(0.3, -1.2, 0.7);
  EXPECT_NEAR(std::arg(apply_diagonal_one_body(FockState::basis_state(layout, 0b010), h, 0.5).amplitudes()(0b010)),
              0.6, 1e-15);
  EXPECT_EQ(apply_diagonal_one_body(FockState::basis_state(layout, 0), h, 0.5).amplitudes()(0), cplx(1.0));
  const FockState psi = random_state(layout, rng);
  const ManyBodyOperator op = build_one_body_operator(Eigen::MatrixXd(h.asDiagonal()), SpinMode::spinless);
  const Eigen::VectorXcd expect = (cplx(0.0, -0.5) * op.dense().cast<cplx>()).exp() * psi.amplitudes();
  EXPECT_LE((apply_diagonal_one_body(psi, h, 0.5).amplitudes() - expect).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(apply_diagonal_one_body(psi, Eigen::Vector2d::Zero(), 1.0), DomainError);
}

TEST(AncillaPhase, TrivialCases) {
  std::mt19937_64 rng(10);
  const ModeLayout layout{1, 2, false};
  const FockState psi = random_state(layout, rng);
  EXPECT_LE((phase_on_ancillas(psi, 0.0).amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((phase_on_ancillas(psi, 2 * M_PI).amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-14);
  const FockState vac = embed_system(FockState::basis_state(layout.system_layout(), 1), layout);
  EXPECT_LE((phase_on_ancillas(vac, 1.234).amplitudes() - vac.amplitudes()).cwiseAbs().maxCoeff(), 0.0);
  const FockState b = FockState::basis_state(layout, 0b110);
  EXPECT_NEAR(std::arg(phase_on_ancillas(b, 0.3).amplitudes()(0b110)), 0.6, 1e-15);
}

TEST(ResetAncillas, VacuumSupportedInputIsUnchanged) {
  std::mt19937_64 rng(11);
  const ModeLayout layout{2, 1, true};
  const FockDensity sys = random_sector_density(layout.system_layout(), 2, rng);
  const FockDensity rho = embed_system(sys, layout);
  EXPECT_LE((reset_ancillas(rho).matrix() - rho.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ResetAncillas, OccupiedAncillaIsEmptied) {
  const ModeLayout layout{1, 1, false};
  // rho_a = |1><1| on the system mode, ancilla occupied.
  const FockDensity rho = FockDensity::pure(FockState::basis_state(layout, 0b11));
  const FockDensity out = reset_ancillas(rho);
  EXPECT_NEAR(out.matrix()(0b01, 0b01).real(), 1.0, 1e-15);
  EXPECT_EQ(ancilla_weight(out), 0.0);
}

TEST(ResetAncillas, TracePreservingAndIdempotent) {
  std::mt19937_64 rng(12);
  const ModeLayout layout{2, 2, true};
  const FockDensity rho = random_sector_density(layout, 3, rng);
  const FockDensity once = reset_ancillas(rho);
  EXPECT_NEAR(once.matrix().trace().real(), 1.0, 1e-12);
  EXPECT_TRUE(once.is_positive());
  EXPECT_LE((reset_ancillas(once).matrix() - once.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ResetAncillas, PartialTraceKeepsSystemOneBodyDensity) {
  std::mt19937_64 rng(13);
  const ModeLayout layout{2, 1, true};
  const FockDensity rho = random_sector_density(layout, 3, rng);
  const FockDensity sys = trace_out_ancillas(rho);
  const ModeLayout s = layout.system_layout();
  for (int sp = 0; sp < 2; ++sp)
    for (int i = 0; i < 2; ++i)
      for (int sq = 0; sq < 2; ++sq)
        for (int j = 0; j < 2; ++j) {
          const cplx full = one_rdm(rho, layout.a_mode(sp, i), layout.a_mode(sq, j));
          const cplx reduced = one_rdm(sys, s.a_mode(sp, i), s.a_mode(sq, j));
          EXPECT_NEAR(std::abs(full - reduced), 0.0, 1e-12);
        }
}

TEST(ResetAncillas, OddParityCoherenceIsRejected) {
  const ModeLayout layout{1, 1, false};
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
  v(0) = v(1) = std::sqrt(0.5);
  EXPECT_THROW(reset_ancillas(FockDensity::pure(FockState(layout, v))), NumericalError);
}

TEST(TraceDistance, AnalyticCases) {
  const ModeLayout layout{1, 0, false};
  const FockDensity zero = FockDensity::pure(FockState::basis_state(layout, 0));
  const FockDensity one = FockDensity::pure(FockState::basis_state(layout, 1));
  EXPECT_NEAR(trace_distance(zero, zero), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(zero, one), 1.0, 1e-15);
  const double theta = 0.3;
  Eigen::VectorXcd v(2);
  v << std::cos(theta), cplx(0.0, std::sin(theta));
  const FockDensity mixed = FockDensity::pure(FockState(layout, v));
  const double c = std::cos(theta);
  EXPECT_NEAR(trace_distance(zero, mixed), std::sqrt(1 - c * c), 1e-14);
  EXPECT_NEAR(trace_distance(mixed, zero), trace_distance(zero, mixed), 1e-15);
  EXPECT_THROW(trace_distance(zero.matrix(), Eigen::MatrixXcd::Identity(4, 4)), DomainError);
}

TEST(ExactEvolution, IdentityEigenphaseAndComposition) {
  std::mt19937_64 rng(14);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  const ManyBodyOperator op = build_many_body_operator(h, SpinMode::spinful);
  const ModeLayout layout{2, 0, true};
  const FockState psi = random_state(layout, rng);
  EXPECT_LE((exact_evolution(op, psi, 0.0).amplitudes() - psi.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
  const FockState two = exact_evolution(op, exact_evolution(op, psi, 0.3), 0.4);
  const FockState direct = exact_evolution(op, psi, 0.7);
  EXPECT_LE((two.amplitudes() - direct.amplitudes()).cwiseAbs().maxCoeff(), 1e-10);
  const SpectralDecomposition& spec = op.spectrum();
  const FockState eigen(layout, spec.eigenvectors.col(5).cast<cplx>());
  const FockState evolved = exact_evolution(op, eigen, 1.5);
  EXPECT_LE((evolved.amplitudes() - std::polar(1.0, -1.5 * spec.eigenvalues(5)) * eigen.amplitudes())
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
  const Eigen::MatrixXcd u = evolution_operator(op, 0.9);
  EXPECT_LE((u * u.adjoint() - Eigen::MatrixXcd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Projection, VacuumBlockMatchesProjectedEvolutionToSecondOrder) {
  const ElectronicHamiltonian h = read_fcidump(testing::data_path("h2_sto6g.fcidump"));
  const ThcFactorization thc = exact_factorize(rotate_to_h_eigenbasis(h).hamiltonian).thc;
  const ModeLayout layout{2, 1, false};
  const GivensSequence s = givens_decompose(complete_isometry(thc.u()), 2);
  const Eigen::VectorXd energies = diagonal_two_body_energies(layout, thc.vtilde());
  const ManyBodyOperator vprime = build_two_body_operator(projected_interaction(thc), 2, SpinMode::spinless);
  auto defect = [&](double tau) {
    const Eigen::MatrixXcd u = row_action_matrix(layout, [&](Eigen::MatrixXcd& x) {
      kernel::basis_rotation(x, layout, s, Direction::inverse, SpinSector::both);
      kernel::diagonal_phase(x, energies, tau);
      kernel::basis_rotation(x, layout, s, Direction::forward, SpinSector::both);
    });
    Eigen::MatrixXcd block(4, 4);
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 4; ++y)
        block(x, y) = u(static_cast<Eigen::Index>(layout.embed_system(x)), static_cast<Eigen::Index>(layout.embed_system(y)));
    return (block - evolution_operator(vprime, tau)).cwiseAbs().maxCoeff();
  };
  const double r1 = defect(1e-2) / 1e-4;
  const double r2 = defect(5e-3) / 2.5e-5;
  EXPECT_GT(r1, 0.0);
  EXPECT_NEAR(r1 / r2, 1.0, 0.05);
}

TEST(FockState, InvariantsAreChecked) {
  const ModeLayout layout{1, 0, false};
  EXPECT_THROW(FockState(layout, Eigen::VectorXcd::Ones(2)), DomainError);
  EXPECT_THROW(FockDensity(layout, Eigen::MatrixXcd::Identity(2, 2)), DomainError);
  EXPECT_THROW(FockState::basis_state({21, 0, false}, 0), SizeError);
  EXPECT_THROW(FockDensity::pure(FockState::basis_state({15, 0, false}, 0)), SizeError);
}

}  // namespace
}  // namespace isothc
