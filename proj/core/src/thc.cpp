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

#include "isothc/thc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "isothc/errors.hpp"

namespace isothc {

namespace {

double max_abs_or_one(const Eigen::MatrixXd& m) {
  return std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
}

Eigen::VectorXd flatten_row_major(const Eigen::MatrixXd& m) {
  Eigen::VectorXd out(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i * m.cols() + j) = m(i, j);
  return out;
}

Eigen::MatrixXd random_orthogonal(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(m, m);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < m; ++i) {
    if (r(i, i) < 0) q.col(i) *= -1.0;
  }
  return q;
}

}  // namespace

ThcFactorization::ThcFactorization(Eigen::MatrixXd u, Eigen::MatrixXd vtilde,
                                   std::optional<Eigen::VectorXd> htilde, ThcProvenance provenance)
    : u_(std::move(u)),
      vtilde_(std::move(vtilde)),
      htilde_(std::move(htilde)),
      provenance_(std::move(provenance)) {
  const Eigen::Index n = u_.rows();
  const Eigen::Index m = u_.cols();
  if (n == 0 || m < n) throw DomainError("THC rank M must satisfy M >= N >= 1");
  if (vtilde_.rows() != m || vtilde_.cols() != m) throw DomainError("vtilde must be M x M");
  if (htilde_ && htilde_->size() != m) throw DomainError("htilde must have length M");
  if (!u_.allFinite() || !vtilde_.allFinite()) throw DomainError("non-finite THC factors");
  const double defect =
      (u_ * u_.transpose() - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  if (defect > 1e-8) {
    throw DomainError("u is not a co-isometry (max |u u^T - I| = " + std::to_string(defect) + ")");
  }
  if ((vtilde_ - vtilde_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * max_abs_or_one(vtilde_)) {
    throw DomainError("vtilde is not symmetric");
  }
}

ThcFactorization ThcFactorization::with_provenance(ThcProvenance provenance) const {
  return ThcFactorization(u_, vtilde_, htilde_, std::move(provenance));
}

Eigen::MatrixXd pair_products(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd p(n * n, x.cols());
  for (Eigen::Index a = 0; a < x.cols(); ++a)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) p(i * n + j, a) = x(i, a) * x(j, a);
  return p;
}

PseudoInverse pseudo_inverse(const Eigen::MatrixXd& a, double rcond) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() ? rcond * s(0) : 0.0;
  PseudoInverse out;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) {
      inv(i) = 1.0 / s(i);
      ++out.rank;
    }
  }
  out.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  return out;
}

KernelContraction contract_vtilde(const Eigen::MatrixXd& u, const ElectronicHamiltonian& hamiltonian) {
  if (u.rows() != hamiltonian.n_orbitals()) {
    throw DomainError("u has " + std::to_string(u.rows()) + " rows, Hamiltonian has " +
                      std::to_string(hamiltonian.n_orbitals()) + " orbitals");
  }
  const Eigen::MatrixXd p = pair_products(u);
  const PseudoInverse pinv = pseudo_inverse(p);
  KernelContraction out;
  out.product_rank = pinv.rank;
  const Eigen::MatrixXd half = pinv.pinv * hamiltonian.eri();
  Eigen::MatrixXd vtilde = half * pinv.pinv.transpose();
  out.vtilde = 0.5 * (vtilde + vtilde.transpose());
  const Eigen::VectorXd h_vec = flatten_row_major(hamiltonian.h());
  out.htilde = pinv.pinv * h_vec;
  out.h_residual = (h_vec - p * out.htilde).norm();
  return out;
}

Eigen::MatrixXd recontract(const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde) {
  const Eigen::MatrixXd p = pair_products(u);
  return p * vtilde * p.transpose();
}

Eigen::MatrixXd projected_interaction(const ThcFactorization& thc) {
  return recontract(thc.u(), thc.vtilde());
}

ApproximationErrors approximation_errors(const ThcFactorization& thc,
                                         const ElectronicHamiltonian& hamiltonian) {
  if (thc.n() != hamiltonian.n_orbitals()) throw DomainError("factorization and Hamiltonian sizes differ");
  const double v_norm = hamiltonian.eri().norm();
  if (v_norm == 0.0) throw DomainError("eps_v undefined: ||V||_2 = 0");
  ApproximationErrors out;
  out.eps_v = (hamiltonian.eri() - recontract(thc.u(), thc.vtilde())).norm() / v_norm;
  const double h_norm = hamiltonian.h().norm();
  if (thc.htilde() && h_norm > 0.0) {
    const Eigen::MatrixXd h_approx =
        thc.u() * thc.htilde()->asDiagonal() * thc.u().transpose();
    out.eps_h = (hamiltonian.h() - h_approx).norm() / h_norm;
  }
  return out;
}

Eigen::MatrixXd retract_to_coisometry(const Eigen::MatrixXd& u) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(u * u.transpose());
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  if (lambda.size() == 0 || lambda(0) <= 1e-14 * std::max(1.0, lambda(lambda.size() - 1))) {
    throw DomainError("cannot retract: u does not have full row rank");
  }
  const Eigen::MatrixXd inv_sqrt = solver.eigenvectors() *
                                   lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
                                   solver.eigenvectors().transpose();
  return inv_sqrt * u;
}

Eigen::MatrixXd random_coisometry(int n, int m, std::mt19937_64& rng) {
  if (n < 1 || m < n) throw DomainError("random_coisometry needs M >= N >= 1");
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, m);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  return retract_to_coisometry(g);
}

ThcFactorization factorization_from_u(const Eigen::MatrixXd& u,
                                      const ElectronicHamiltonian& hamiltonian) {
  KernelContraction k = contract_vtilde(u, hamiltonian);
  return ThcFactorization(u, std::move(k.vtilde), std::move(k.htilde));
}

ExactFactorization exact_factorize(const ElectronicHamiltonian& hamiltonian,
                                   ExactFactorizeOptions options) {
  const int n = hamiltonian.n_orbitals();
  const double v_norm = hamiltonian.eri().norm();
  auto exact_enough = [&](const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde) {
    return (hamiltonian.eri() - recontract(u, vtilde)).norm() <= 1e-12 * std::max(v_norm, 1e-300);
  };

  // Already diagonal in the orbital basis: no extra modes needed.
  {
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    KernelContraction k = contract_vtilde(identity, hamiltonian);
    if (v_norm == 0.0 || exact_enough(identity, k.vtilde)) {
      return {ThcFactorization(identity, std::move(k.vtilde), std::move(k.htilde)), k.product_rank,
              false};
    }
  }

  const int symmetric_rank = n * (n + 1) / 2;
  const int m = options.compress_to_rank ? symmetric_rank : n * n;
  if (options.gauge_candidates < 1) throw DomainError("exact_factorize: gauge_candidates must be >= 1");
  std::optional<ExactFactorization> best;
  int full_rank = 0;
  for (int attempt = 0; full_rank < options.gauge_candidates && attempt < options.gauge_candidates + 16;
       ++attempt) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(attempt));
    Eigen::MatrixXd u = random_orthogonal(m, rng).topRows(n);
    KernelContraction k = contract_vtilde(u, hamiltonian);
    const bool deficient = k.product_rank < symmetric_rank;
    ExactFactorization candidate{
        ThcFactorization(std::move(u), std::move(k.vtilde), std::move(k.htilde)), k.product_rank,
        deficient};
    if (!deficient) ++full_rank;
    const bool better =
        !best || candidate.product_rank > best->product_rank ||
        (candidate.product_rank == best->product_rank &&
         candidate.thc.vtilde().norm() < best->thc.vtilde().norm());
    if (better) best = std::move(candidate);
  }
  return std::move(*best);
}

// ---------------------------------------------------------------------------

double squared_residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde,
                        const ElectronicHamiltonian& hamiltonian) {
  return (hamiltonian.eri() - recontract(u, vtilde)).squaredNorm();
}

Eigen::MatrixXd loss_gradient(const Eigen::MatrixXd& u, const Eigen::MatrixXd& vtilde,
                              const ElectronicHamiltonian& hamiltonian) {
  const Eigen::Index n = u.rows();
  const Eigen::Index m = u.cols();
  if (n != hamiltonian.n_orbitals() || vtilde.rows() != m || vtilde.cols() != m) {
    throw DomainError("loss_gradient: inconsistent shapes");
  }
  const Eigen::MatrixXd p = pair_products(u);
  const Eigen::MatrixXd r = hamiltonian.eri() - p * vtilde * p.transpose();
  // d||R||^2 = -2 <G, dP> with G = R P vtilde^T + R^T P vtilde.
  const Eigen::MatrixXd g = r * p * vtilde.transpose() + r.transpose() * p * vtilde;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    // Column a of G viewed as the N x N matrix G_a(i, j) = G(i*N + j, a).
    const Eigen::Map<const Eigen::MatrixXd> ga_t(g.col(a).data(), n, n);  // ga_t(j, i)
    grad.col(a) = -2.0 * (ga_t.transpose() * u.col(a) + ga_t * u.col(a));
  }
  return grad;
}

Eigen::MatrixXd loss_gradient(const Eigen::MatrixXd& u, const ElectronicHamiltonian& hamiltonian) {
  return loss_gradient(u, contract_vtilde(u, hamiltonian).vtilde, hamiltonian);
}

void RefineConfig::validate() const {
  if (!(lr_phase1 > 0.0) || !(lr_phase2 > 0.0)) throw DomainError("learning rates must be > 0");
  if (rounds_phase1 < 0 || rounds_phase2 < 0) throw DomainError("round counts must be >= 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw DomainError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw DomainError("adam_eps must be > 0");
}

nlohmann::json RefineConfig::to_json() const {
  return {{"rounds_phase1", rounds_phase1}, {"lr_phase1", lr_phase1},
          {"rounds_phase2", rounds_phase2}, {"lr_phase2", lr_phase2},
          {"adam_beta1", adam_beta1},       {"adam_beta2", adam_beta2},
          {"adam_eps", adam_eps},           {"seed", seed}};
}

RefineConfig RefineConfig::from_json(const nlohmann::json& doc) {
  RefineConfig c;
  c.rounds_phase1 = doc.value("rounds_phase1", c.rounds_phase1);
  c.lr_phase1 = doc.value("lr_phase1", c.lr_phase1);
  c.rounds_phase2 = doc.value("rounds_phase2", c.rounds_phase2);
  c.lr_phase2 = doc.value("lr_phase2", c.lr_phase2);
  c.adam_beta1 = doc.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = doc.value("adam_beta2", c.adam_beta2);
  c.adam_eps = doc.value("adam_eps", c.adam_eps);
  c.seed = doc.value("seed", c.seed);
  c.validate();
  return c;
}

RefineResult refine(const ThcFactorization& start, const ElectronicHamiltonian& hamiltonian,
                    const RefineConfig& config) {
  config.validate();
  if (start.n() != hamiltonian.n_orbitals()) throw DomainError("factorization and Hamiltonian sizes differ");
  const double v_norm_sq = hamiltonian.eri().squaredNorm();
  if (v_norm_sq == 0.0) throw DomainError("eps_v undefined: ||V||_2 = 0");

  Eigen::MatrixXd u = start.u();
  Eigen::MatrixXd first_moment = Eigen::MatrixXd::Zero(u.rows(), u.cols());
  Eigen::MatrixXd second_moment = Eigen::MatrixXd::Zero(u.rows(), u.cols());

  RefineResult out{start, 0.0, 0.0, 0.0, {}};
  Eigen::MatrixXd best_u = u;
  double best = std::numeric_limits<double>::infinity();
  const int total = config.rounds_phase1 + config.rounds_phase2;
  out.best_history.reserve(static_cast<std::size_t>(total));

  for (int round = 0; round <= total; ++round) {
    const Eigen::MatrixXd vtilde = contract_vtilde(u, hamiltonian).vtilde;
    const double loss = squared_residual(u, vtilde, hamiltonian) / v_norm_sq;
    if (!std::isfinite(loss)) {
      throw NumericalError("refine: non-finite loss at round " + std::to_string(round));
    }
    const double eps = std::sqrt(loss);
    if (round == 0) out.initial_eps_v = eps;
    if (eps < best) {
      best = eps;
      best_u = u;
    }
    if (round > 0) out.best_history.push_back(best);
    if (round == config.rounds_phase1) out.eps_v_after_phase1 = best;
    if (round == total) break;

    const Eigen::MatrixXd grad = loss_gradient(u, vtilde, hamiltonian) / v_norm_sq;
    if (!grad.allFinite()) {
      throw NumericalError("refine: non-finite gradient at round " + std::to_string(round));
    }
    const int t = round + 1;
    const double lr = round < config.rounds_phase1 ? config.lr_phase1 : config.lr_phase2;
    first_moment = config.adam_beta1 * first_moment + (1.0 - config.adam_beta1) * grad;
    second_moment =
        config.adam_beta2 * second_moment + (1.0 - config.adam_beta2) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(config.adam_beta1, t);
    const double c2 = 1.0 - std::pow(config.adam_beta2, t);
    const Eigen::MatrixXd step =
        (first_moment / c1).array() / ((second_moment / c2).array().sqrt() + config.adam_eps);
    u = retract_to_coisometry(u - lr * step);
  }

  KernelContraction k = contract_vtilde(best_u, hamiltonian);
  ThcFactorization candidate(best_u, k.vtilde, k.htilde);
  const ApproximationErrors errors = approximation_errors(candidate, hamiltonian);
  ThcProvenance provenance;
  provenance.eps_v = errors.eps_v;
  provenance.eps_h = errors.eps_h;
  provenance.seed = config.seed;
  provenance.config = config.to_json();
  out.thc = candidate.with_provenance(std::move(provenance));
  out.final_eps_v = errors.eps_v;
  return out;
}

RestartResult refine_with_restarts(const ElectronicHamiltonian& hamiltonian, int m,
                                   const RefineConfig& config, int max_restarts,
                                   double target_eps_v) {
  if (max_restarts < 1) throw DomainError("need at least one restart");
  std::mt19937_64 rng(config.seed);
  std::optional<RestartResult> out;
  std::vector<double> history;
  for (int r = 0; r < max_restarts; ++r) {
    const Eigen::MatrixXd u0 = random_coisometry(hamiltonian.n_orbitals(), m, rng);
    RefineResult result = refine(factorization_from_u(u0, hamiltonian), hamiltonian, config);
    history.push_back(result.final_eps_v);
    if (!out || result.final_eps_v < out->best.final_eps_v) {
      out = RestartResult{std::move(result), r, 0, {}};
    }
    if (out->best.final_eps_v <= target_eps_v) break;
  }
  out->restarts_run = static_cast<int>(history.size());
  out->restart_eps_v = std::move(history);
  return std::move(*out);
}

}  // namespace isothc
