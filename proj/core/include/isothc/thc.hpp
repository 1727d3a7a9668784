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

// Isometric tensor hypercontraction.
//
// A factorization is a co-isometry u (N x M, u u^T = I_N) and a symmetric
// kernel vtilde (M x M) with
//
//   (ij|kl) ~= sum_{ab} u_ia u_ja vtilde_ab u_kb u_lb.
//
// In pair-matrix form this is V ~= P vtilde P^T where P is the N^2 x M
// "pair product" matrix P(i*N + j, a) = u_ia u_ja. For fixed u the best
// kernel in Frobenius norm is P^+ V (P^+)^T.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "isothc/hamiltonian.hpp"

namespace isothc {

struct ThcProvenance {
  std::optional<double> eps_v;
  std::optional<double> eps_h;
  std::optional<std::uint64_t> seed;
  nlohmann::json config = nlohmann::json::object();
};

/// Immutable isometric THC factorization. The constructor rejects a u whose
/// rows are not orthonormal to 1e-8 and a kernel that is not symmetric.
class ThcFactorization {
 public:
  ThcFactorization(Eigen::MatrixXd u, Eigen::MatrixXd vtilde,
                   std::optional<Eigen::VectorXd> htilde = std::nullopt,
                   ThcProvenance provenance = {});

  int n() const { return static_cast<int>(u_.rows()); }
  int m() const { return static_cast<int>(u_.cols()); }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& vtilde() const { return vtilde_; }
  const std::optional<Eigen::VectorXd>& htilde() const { return htilde_; }
  const ThcProvenance& provenance() const { return provenance_; }

  ThcFactorization with_provenance(ThcProvenance provenance) const;

 private:
  Eigen::MatrixXd u_;
  Eigen::MatrixXd vtilde_;
  std::optional<Eigen::VectorXd> htilde_;
  ThcProvenance provenance_;
};

/// Generic (non-isometric) THC factor as produced by external THC codes.
struct ThcFactorFile {
  Eigen::MatrixXd x;                 // N x M
  std::optional<Eigen::MatrixXd> w;  // M x M
};

// ---------------------------------------------------------------------------
// Contraction

/// P(i*N + j, a) = x_ia x_ja.
Eigen::MatrixXd pair_products(const Eigen::MatrixXd& x);

struct PseudoInverse {
  Eigen::MatrixXd pinv;
  int rank = 0;
};

/// SVD pseudoinverse; singular values below rcond * sigma_max are dropped.
PseudoInverse pseudo_inverse(const Eigen::MatrixXd& a, double rcond = 1e-10);

struct KernelContraction {
  Eigen::MatrixXd vtilde;
  Eigen::VectorXd htilde;
  int product_rank = 0;
  /// || h - sum_a u_ia u_ja htilde_a ||_2 (element-wise).
  double h_residual = 0.0;
};

/// Least-squares kernels for a fixed u: vtilde = P^+ V P^+T (symmetrized), htilde = P^+ vec(h).
KernelContraction contract_vtilde(const Eigen::MatrixXd& u, const ElectronicHamiltonian& hamiltonian);

/// P vtilde P^T as an N^2 x N^2 pair matrix.
Eigen::MatrixXd recontract(const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde);

/// Two-body tensor of <0_b| Vtilde |0_b>, i.e. sum u u vtilde u u, as a pair matrix.
Eigen::MatrixXd projected_interaction(const ThcFactorization& thc);

struct ApproximationErrors {
  double eps_v = 0.0;
  /// Absent when the factorization carries no htilde or h is identically zero.
  std::optional<double> eps_h;
};

/// Relative element-wise L2 errors of the recontracted V and h.
ApproximationErrors approximation_errors(const ThcFactorization& thc,
                                         const ElectronicHamiltonian& hamiltonian);

// ---------------------------------------------------------------------------
// Construction

struct ExactFactorization {
  ThcFactorization thc;
  int product_rank = 0;
  bool rank_deficient = false;
};

struct ExactFactorizeOptions {
  /// Shrink M from N^2 to the rank N(N+1)/2 of the pair-product map.
  bool compress_to_rank = true;
  std::uint64_t seed = 1;
  /// Full-rank gauges to draw; the one with the smallest ||vtilde||_F is kept.
  int gauge_candidates = 1;
};

/// Exact factorization from a generic co-isometry and the pseudoinverse
/// kernel. A diagonal interaction returns the identity embedding with M = N.
/// Every generic co-isometry is exact at full rank, so the choice among
/// several is made by kernel norm.
ExactFactorization exact_factorize(const ElectronicHamiltonian& hamiltonian,
                                   ExactFactorizeOptions options = {});

/// Nearest co-isometry in Frobenius norm: (u u^T)^{-1/2} u.
Eigen::MatrixXd retract_to_coisometry(const Eigen::MatrixXd& u);

Eigen::MatrixXd random_coisometry(int n, int m, std::mt19937_64& rng);

/// Factorization with kernels re-solved for u.
ThcFactorization factorization_from_u(const Eigen::MatrixXd& u,
                                      const ElectronicHamiltonian& hamiltonian);

// ---------------------------------------------------------------------------
// Refinement

/// || V - P(u) vtilde P(u)^T ||_F^2 at a fixed kernel.
double squared_residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde,
                        const ElectronicHamiltonian& hamiltonian);

/// Gradient of squared_residual with respect to u at a fixed kernel.
Eigen::MatrixXd loss_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde,
                              const ElectronicHamiltonian& hamiltonian);

/// Same, with the kernel first re-solved for u by contract_vtilde.
Eigen::MatrixXd loss_gradient(const Eigen::MatrixXd& u, const ElectronicHamiltonian& hamiltonian);

struct RefineConfig {
  int rounds_phase1 = 1000;
  double lr_phase1 = 0.001;
  int rounds_phase2 = 1000;
  double lr_phase2 = 0.0005;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
  nlohmann::json to_json() const;
  static RefineConfig from_json(const nlohmann::json& doc);
};

struct RefineResult {
  ThcFactorization thc;
  double initial_eps_v = 0.0;
  double final_eps_v = 0.0;
  double eps_v_after_phase1 = 0.0;
  /// Best-so-far eps_v after every round (non-increasing).
  std::vector<double> best_history;
};

/// Adam on u with alternating kernel re-solves and a polar retraction after
/// every step. Returns the best iterate seen, so final <= initial.
RefineResult refine(const ThcFactorization& start, const ElectronicHamiltonian& hamiltonian,
                    const RefineConfig& config);

struct RestartResult {
  RefineResult best;
  int best_restart = 0;
  int restarts_run = 0;
  std::vector<double> restart_eps_v;
};

/// Random co-isometry starts seeded from config.seed; stops early once a
/// restart reaches target_eps_v.
RestartResult refine_with_restarts(const ElectronicHamiltonian& hamiltonian, int m,
                                   const RefineConfig& config, int max_restarts,
                                   double target_eps_v = 0.0);

// ---------------------------------------------------------------------------
// Isometrization of generic THC factors

struct BoundedLeastSquaresResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;   // ||A x - b||_2
  double projected_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// min ||A x - b||^2 subject to x >= lower (element-wise), by accelerated
/// projected gradient followed by an active-set polish.
BoundedLeastSquaresResult bounded_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                double lower, int max_iterations = 50000,
                                                double tolerance = 1e-13);

struct IsometrizeConfig {
  double delta = 0.2;
  int max_iterations = 50000;
  double tolerance = 1e-13;
  double residual_warning = 1e-3;
};

struct IsometrizeResult {
  ThcFactorization thc;
  Eigen::VectorXd eta;
  /// || sum_a X_ij,a eta_a - delta_ij ||_2 before the polar correction.
  double residual = 0.0;
  /// max |u_polar - sqrt(eta) X| introduced by the final re-orthonormalization.
  double polar_correction = 0.0;
  std::optional<std::string> warning;
};

/// Scales the columns of X by sqrt(eta), eta >= delta, so that the rows
/// become orthonormal, then applies an exact polar correction. The kernel is
/// re-solved against `hamiltonian` when given, else taken as W / (eta eta^T),
/// else zero.
IsometrizeResult isometrize(const ThcFactorFile& factor, const IsometrizeConfig& config,
                            const ElectronicHamiltonian* hamiltonian = nullptr);

struct NullspaceRepairResult {
  bool feasible = false;
  Eigen::VectorXd eta;   // eta + zeta when feasible, the input otherwise
  Eigen::VectorXd zeta;
  int nullspace_dim = 0;
  /// Change of || A eta - vec(I) ||_2 caused by zeta.
  double residual_change = 0.0;
};

/// Moves eta along right-singular vectors of A (columns vec(x_a x_a^T)) whose
/// singular values are below `threshold` until every entry is >= margin,
/// via a linear program. Infeasibility is reported, never clamped.
NullspaceRepairResult nullspace_repair(const Eigen::MatrixXd& x, const Eigen::VectorXd& eta,
                                       double threshold, double margin = 1e-6);

// ---------------------------------------------------------------------------
// Interchange

nlohmann::json to_json(const ThcFactorization& thc);
ThcFactorization thc_from_json(const nlohmann::json& doc);
ThcFactorization read_thc(const std::string& path);

/// JSON {n, m, x, w?} or a whitespace-separated N x M matrix of X.
ThcFactorFile parse_factor_file(std::istream& in);
ThcFactorFile read_factor_file(const std::string& path);

}  // namespace isothc
