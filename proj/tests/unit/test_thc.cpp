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
#include <sstream>

#include "isothc/errors.hpp"
#include "isothc/thc.hpp"
#include "test_util.hpp"

namespace isothc {
namespace {

using testing::data_path;

double eps_v(const ThcFactorization& thc, const ElectronicHamiltonian& h) {
  return approximation_errors(thc, h).eps_v;
}

ElectronicHamiltonian h2() { return read_fcidump(data_path("h2_sto6g.fcidump")); }

TEST(PairProducts, LayoutMatchesDefinition) {
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  const Eigen::MatrixXd p = pair_products(x);
  ASSERT_EQ(p.rows(), 4);
  EXPECT_DOUBLE_EQ(p(0 * 2 + 1, 2), 3.0 * 6.0);
  EXPECT_DOUBLE_EQ(p(1 * 2 + 1, 0), 16.0);
}

TEST(ThcFactorization, RejectsNonIsometricFactor) {
  EXPECT_THROW(ThcFactorization(Eigen::MatrixXd::Constant(1, 2, 1.0), Eigen::MatrixXd::Zero(2, 2)),
               DomainError);
}

TEST(ThcFactorization, RejectsAsymmetricKernel) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 2);
  v(0, 1) = 1.0;
  EXPECT_THROW(ThcFactorization(Eigen::MatrixXd::Identity(2, 2), v), DomainError);
}

TEST(ExactFactorize, SingleOrbital) {
  const ElectronicHamiltonian h(0.0, Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::MatrixXd::Constant(1, 1, 0.7));
  const ExactFactorization f = exact_factorize(h);
  ASSERT_EQ(f.thc.m(), 1);
  EXPECT_DOUBLE_EQ(std::abs(f.thc.u()(0, 0)), 1.0);
  EXPECT_NEAR(f.thc.vtilde()(0, 0), 0.7, 1e-15);
}

TEST(ExactFactorize, DiagonalInteractionUsesIdentityEmbedding) {
  const int n = 3;
  Eigen::MatrixXd d(n, n);
  d << 1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 3.0;
  Eigen::MatrixXd eri = Eigen::MatrixXd::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) eri(i * n + i, k * n + k) = d(i, k);
  const ElectronicHamiltonian h(0.0, Eigen::MatrixXd::Zero(n, n), eri);
  const ExactFactorization f = exact_factorize(h);
  ASSERT_EQ(f.thc.m(), n);
  EXPECT_LE((f.thc.u() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((f.thc.vtilde() - d).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ExactFactorize, RandomTensorsAreReproduced) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
    const ExactFactorization compressed = exact_factorize(h);
    EXPECT_EQ(compressed.thc.m(), 3);
    EXPECT_FALSE(compressed.rank_deficient);
    EXPECT_LE(eps_v(compressed.thc, h), 1e-10);
    const ExactFactorization full = exact_factorize(h, {false, 3});
    EXPECT_EQ(full.thc.m(), 4);
    EXPECT_LE(eps_v(full.thc, h), 1e-10);
    EXPECT_LE((projected_interaction(full.thc) - h.eri()).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(ContractVtilde, ZeroInteractionGivesZeroKernel) {
  std::mt19937_64 rng(1);
  const ElectronicHamiltonian h(0.0, testing::random_symmetric(2, rng), Eigen::MatrixXd::Zero(4, 4));
  const KernelContraction k = contract_vtilde(random_coisometry(2, 3, rng), h);
  EXPECT_EQ(k.vtilde.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ContractVtilde, IdentityOneBodyIsReproducedWithinResidual) {
  std::mt19937_64 rng(2);
  const ElectronicHamiltonian h(0.0, Eigen::MatrixXd::Identity(3, 3), testing::random_eri(3, rng));
  const Eigen::MatrixXd u = random_coisometry(3, 6, rng);
  const KernelContraction k = contract_vtilde(u, h);
  EXPECT_EQ(k.product_rank, 6);
  const Eigen::MatrixXd approx = u * k.htilde.asDiagonal() * u.transpose();
  EXPECT_NEAR((approx - Eigen::MatrixXd::Identity(3, 3)).norm(), k.h_residual, 1e-12);
  EXPECT_LE(k.h_residual, 1e-10);
}

TEST(ContractVtilde, IsAProjection) {
  std::mt19937_64 rng(3);
  const ElectronicHamiltonian h = testing::random_hamiltonian(3, rng);
  const Eigen::MatrixXd u = random_coisometry(3, 4, rng);
  const KernelContraction first = contract_vtilde(u, h);
  const ElectronicHamiltonian projected = h.with_eri(recontract(u, first.vtilde));
  const KernelContraction second = contract_vtilde(u, projected);
  EXPECT_LE((first.vtilde - second.vtilde).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ApproximationErrors, InvariantUnderSignedPermutations) {
  std::mt19937_64 rng(4);
  const ElectronicHamiltonian h = testing::random_hamiltonian(3, rng);
  const ThcFactorization thc = factorization_from_u(random_coisometry(3, 4, rng), h);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(4, 4);
  q(0, 2) = 1;
  q(1, 0) = -1;
  q(2, 3) = 1;
  q(3, 1) = -1;
  // Pair products are blind to column signs, so the kernel follows |q|.
  const Eigen::MatrixXd a = q.cwiseAbs();
  const ThcFactorization permuted(thc.u() * q, a.transpose() * thc.vtilde() * a);
  EXPECT_NEAR(eps_v(thc, h), eps_v(permuted, h), 1e-12);
}

TEST(ApproximationErrors, ZeroInteractionIsADomainError) {
  const ElectronicHamiltonian h(0.0, Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(4, 4));
  const ThcFactorization thc(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_THROW(approximation_errors(thc, h), DomainError);
}

TEST(ApproximationErrors, OneBodyErrorAbsentWithoutHtilde) {
  const ElectronicHamiltonian h = h2();
  const ThcFactorization bare(Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Zero(2, 2));
  EXPECT_FALSE(approximation_errors(bare, h).eps_h.has_value());
  EXPECT_NEAR(approximation_errors(bare, h).eps_v, 1.0, 1e-15);
}

TEST(LossGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
    const Eigen::MatrixXd u = random_coisometry(2, 3, rng);
    const Eigen::MatrixXd vtilde = contract_vtilde(u, h).vtilde;
    const Eigen::MatrixXd g = loss_gradient(u, vtilde, h);
    const double step = 1e-5;
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 3; ++a) {
        Eigen::MatrixXd up = u, dn = u;
        up(i, a) += step;
        dn(i, a) -= step;
        const double fd = (squared_residual(up, vtilde, h) - squared_residual(dn, vtilde, h)) / (2 * step);
        EXPECT_NEAR(g(i, a), fd, 1e-4 * std::max(1.0, std::abs(fd)));
      }
  }
}

TEST(LossGradient, VanishesAtExactFactorization) {
  std::mt19937_64 rng(6);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  const ExactFactorization f = exact_factorize(h);
  EXPECT_LE(loss_gradient(f.thc.u(), h).norm(), 1e-8);
}

TEST(LossGradient, ScalesQuadraticallyWithInteraction) {
  std::mt19937_64 rng(7);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  const Eigen::MatrixXd u = random_coisometry(2, 3, rng);
  const Eigen::MatrixXd g1 = loss_gradient(u, h);
  const Eigen::MatrixXd g3 = loss_gradient(u, h.with_eri(3.0 * h.eri()));
  EXPECT_LE((g3 - 9.0 * g1).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, g3.cwiseAbs().maxCoeff()));
}

TEST(Refine, ExactStartDoesNotDegrade) {
  std::mt19937_64 rng(8);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  RefineConfig cfg;
  cfg.rounds_phase1 = 50;
  cfg.rounds_phase2 = 50;
  const RefineResult r = refine(exact_factorize(h).thc, h, cfg);
  EXPECT_LE(r.final_eps_v, 1e-10);
}

TEST(Refine, H2ReachesExactnessAtRankThree) {
  const ElectronicHamiltonian h = h2();
  const RestartResult r = refine_with_restarts(h, 3, RefineConfig{}, 10, 1e-6);
  EXPECT_LE(r.best.final_eps_v, 1e-6);
  EXPECT_LE(r.restarts_run, 10);
  const ThcFactorization& thc = r.best.thc;
  EXPECT_LE((thc.u() * thc.u().transpose() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Refine, PerturbedStartImprovesTenfoldInPhaseOne) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd u0 = random_coisometry(3, 4, rng);
  const ElectronicHamiltonian h(0.0, testing::random_symmetric(3, rng),
                                recontract(u0, testing::random_symmetric(4, rng)));
  std::normal_distribution<double> noise(0.0, 1e-2);
  Eigen::MatrixXd u = u0;
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] += noise(rng);
  const ThcFactorization start = factorization_from_u(retract_to_coisometry(u), h);
  RefineConfig cfg;
  cfg.rounds_phase2 = 0;
  const RefineResult r = refine(start, h, cfg);
  EXPECT_GT(r.initial_eps_v, 1e-4);
  EXPECT_LE(r.eps_v_after_phase1, r.initial_eps_v / 10.0);
}

TEST(Refine, HistoryIsMonotoneAndDeterministic) {
  std::mt19937_64 rng(10);
  const ElectronicHamiltonian h = testing::random_hamiltonian(3, rng);
  std::mt19937_64 start_rng(1);
  const ThcFactorization start = factorization_from_u(random_coisometry(3, 4, start_rng), h);
  RefineConfig cfg;
  cfg.rounds_phase1 = 100;
  cfg.rounds_phase2 = 100;
  const RefineResult a = refine(start, h, cfg);
  const RefineResult b = refine(start, h, cfg);
  ASSERT_EQ(a.best_history.size(), 200u);
  for (std::size_t i = 1; i < a.best_history.size(); ++i) EXPECT_LE(a.best_history[i], a.best_history[i - 1]);
  EXPECT_LE(a.final_eps_v, a.initial_eps_v);
  EXPECT_EQ(a.final_eps_v, b.final_eps_v);
  EXPECT_EQ(a.thc.u(), b.thc.u());
}

TEST(Refine, ExactConstructionIsAFloor) {
  std::mt19937_64 rng(11);
  const ElectronicHamiltonian h = testing::random_hamiltonian(3, rng);
  RefineConfig cfg;
  cfg.rounds_phase1 = 100;
  cfg.rounds_phase2 = 0;
  const RefineResult r = refine(factorization_from_u(random_coisometry(3, 4, rng), h), h, cfg);
  EXPECT_LE(eps_v(exact_factorize(h).thc, h), r.final_eps_v + 1e-10);
}

TEST(RefineConfig, RejectsNonPositiveLearningRate) {
  RefineConfig cfg;
  cfg.lr_phase2 = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  EXPECT_THROW(RefineConfig::from_json({{"lr_phase1", -1.0}}), DomainError);
  EXPECT_EQ(RefineConfig::from_json(RefineConfig{}.to_json()).rounds_phase1, 1000);
}

TEST(BoundedLeastSquares, ActiveBoundIsRespected) {
  // min (x0 - 1)^2 + (x1 + 1)^2 with x >= 0.2.
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2);
  const Eigen::Vector2d b(1.0, -1.0);
  const BoundedLeastSquaresResult r = bounded_least_squares(a, b, 0.2);
  EXPECT_NEAR(r.x(0), 1.0, 1e-12);
  EXPECT_NEAR(r.x(1), 0.2, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.residual_norm, 1.2, 1e-12);
}

TEST(Isometrize, AlreadyIsometricFactorIsUnchanged) {
  ThcFactorFile f{Eigen::MatrixXd::Identity(3, 3), std::nullopt};
  const IsometrizeResult r = isometrize(f, {});
  EXPECT_LE((r.eta - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((r.thc.u() - f.x).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_FALSE(r.warning.has_value());
}

TEST(Isometrize, RecoversPlantedScaling) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> uniform(0.5, 2.0);
  const Eigen::MatrixXd u = random_coisometry(3, 5, rng);
  Eigen::VectorXd s(5);
  for (int a = 0; a < 5; ++a) s(a) = uniform(rng);
  const ThcFactorFile f{u * s.cwiseSqrt().cwiseInverse().asDiagonal(), std::nullopt};
  const IsometrizeResult r = isometrize(f, {});
  EXPECT_LE((r.eta - s).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_LE((r.thc.u() * r.thc.u().transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Isometrize, KernelFromWeightsOrHamiltonian) {
  std::mt19937_64 rng(13);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  const ExactFactorization exact = exact_factorize(h);
  const ThcFactorFile f{exact.thc.u() * 2.0, Eigen::MatrixXd(exact.thc.vtilde() / 16.0)};
  const IsometrizeResult from_w = isometrize(f, {});
  EXPECT_LE((from_w.eta - Eigen::VectorXd::Constant(3, 0.25)).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((from_w.thc.vtilde() - exact.thc.vtilde()).cwiseAbs().maxCoeff(), 1e-8);
  const IsometrizeResult from_h = isometrize(f, {}, &h);
  EXPECT_LE(from_h.thc.provenance().eps_v.value(), 1e-10);
}

TEST(Isometrize, PoorFitCarriesWarning) {
  ThcFactorFile g{Eigen::MatrixXd::Identity(2, 2) * 0.1, std::nullopt};
  IsometrizeConfig cfg;
  cfg.delta = 200.0;
  const IsometrizeResult r = isometrize(g, cfg);
  ASSERT_TRUE(r.warning.has_value());
  EXPECT_GT(r.residual, 1e-3);
}

TEST(Isometrize, RejectsNonPositiveDelta) {
  IsometrizeConfig cfg;
  cfg.delta = 0.0;
  EXPECT_THROW(isometrize({Eigen::MatrixXd::Identity(2, 2), std::nullopt}, cfg), DomainError);
}

TEST(NullspaceRepair, PositiveEtaNeedsNoChange) {
  const NullspaceRepairResult r = nullspace_repair(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, 2.0), 1e-8);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.zeta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(NullspaceRepair, RepairsAlongExactNullVector) {
  std::mt19937_64 rng(14);
  const Eigen::MatrixXd x = random_coisometry(2, 4, rng);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(pair_products(x), Eigen::ComputeFullV);
  const Eigen::VectorXd null = svd.matrixV().col(3);
  const Eigen::VectorXd good = Eigen::VectorXd::Ones(4);
  Eigen::Index worst;
  null.cwiseAbs().maxCoeff(&worst);
  const double c = -2.0 / null(worst);
  const Eigen::VectorXd eta = good + c * null;
  ASSERT_LT(eta.minCoeff(), 0.0);
  const NullspaceRepairResult r = nullspace_repair(x, eta, 1e-8);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.nullspace_dim, 1);
  EXPECT_GT(r.eta.minCoeff(), 0.0);
  EXPECT_LE(std::abs(r.residual_change), 1e-10);
}

TEST(NullspaceRepair, EmptyNullspaceIsInfeasible) {
  const NullspaceRepairResult r = nullspace_repair(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(1.0, -1.0), 0.0);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.nullspace_dim, 0);
  EXPECT_DOUBLE_EQ(r.eta(1), -1.0);
}

TEST(ThcIo, JsonRoundTrip) {
  std::mt19937_64 rng(15);
  const ElectronicHamiltonian h = testing::random_hamiltonian(2, rng);
  ThcProvenance p;
  p.eps_v = 1e-3;
  p.seed = 99;
  const ThcFactorization thc = factorization_from_u(random_coisometry(2, 3, rng), h).with_provenance(p);
  const ThcFactorization back = thc_from_json(nlohmann::json::parse(to_json(thc).dump()));
  EXPECT_EQ(back.u(), thc.u());
  EXPECT_EQ(back.vtilde(), thc.vtilde());
  EXPECT_EQ(*back.htilde(), *thc.htilde());
  EXPECT_EQ(back.provenance().seed.value(), 99u);
  EXPECT_FALSE(back.provenance().eps_h.has_value());
}

TEST(ThcIo, FactorFileFormats) {
  std::istringstream text("# X\n1 0 0.5\n0 1 0.5\n");
  const ThcFactorFile a = parse_factor_file(text);
  EXPECT_EQ(a.x.rows(), 2);
  EXPECT_EQ(a.x.cols(), 3);
  EXPECT_DOUBLE_EQ(a.x(1, 2), 0.5);
  std::istringstream json(R"({"n": 1, "m": 2, "x": [1, 2], "w": [1, 0, 0, 1]})");
  const ThcFactorFile b = parse_factor_file(json);
  EXPECT_DOUBLE_EQ(b.x(0, 1), 2.0);
  ASSERT_TRUE(b.w.has_value());
  std::istringstream ragged("1 2\n3\n");
  try {
    parse_factor_file(ragged);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

}  // namespace
}  // namespace isothc
