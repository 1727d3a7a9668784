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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "isothc/errors.hpp"
#include "isothc/thc.hpp"

namespace isothc {

namespace {

struct Quadratic {
  Eigen::MatrixXd ata;
  Eigen::VectorXd atb;
  double btb = 0.0;

  double value(const Eigen::VectorXd& x) const {
    return std::max(0.0, x.dot(ata * x) - 2.0 * atb.dot(x) + btb);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return 2.0 * (ata * x - atb); }
};

Eigen::VectorXd project(const Eigen::VectorXd& x, double lower) {
  return x.cwiseMax(lower);
}

double projected_gradient_norm(const Quadratic& q, const Eigen::VectorXd& x, double lower) {
  return (x - project(x - q.gradient(x), lower)).cwiseAbs().maxCoeff();
}

// Solves the least-squares problem on the free set with the active set pinned
// at the bound. Returns nullopt if the solution leaves the feasible region.
std::optional<Eigen::VectorXd> polish(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& x, double lower) {
  const double slack = 1e-10 * (1.0 + std::abs(lower));
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) > lower + slack) free.push_back(i);
  Eigen::VectorXd out = Eigen::VectorXd::Constant(x.size(), lower);
  if (free.empty()) return out;
  Eigen::MatrixXd af(a.rows(), static_cast<Eigen::Index>(free.size()));
  for (std::size_t k = 0; k < free.size(); ++k) af.col(static_cast<Eigen::Index>(k)) = a.col(free[k]);
  const Eigen::VectorXd rhs = b - a * out;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(af);
  const Eigen::VectorXd z = cod.solve(rhs);
  for (std::size_t k = 0; k < free.size(); ++k) {
    if (z(static_cast<Eigen::Index>(k)) < lower) return std::nullopt;
    out(free[k]) = z(static_cast<Eigen::Index>(k));
  }
  return out;
}

struct LpResult {
  bool bounded = false;
  Eigen::VectorXd x;
};

// Dense tableau simplex for max c^T x, A x <= b, x >= 0 with b >= 0. Bland's
// rule prevents cycling.
LpResult simplex_max(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index n = a.cols();
  const Eigen::Index width = n + rows + 1;
  const double tol = 1e-12;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows + 1, width);
  t.topLeftCorner(rows, n) = a;
  t.block(0, n, rows, rows).setIdentity();
  t.col(width - 1).head(rows) = b;
  t.row(rows).head(n) = -c.transpose();
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = n + i;

  const int max_pivots = 100000;
  for (int pivot = 0; pivot < max_pivots; ++pivot) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < width - 1; ++j) {
      if (t(rows, j) < -tol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) {
      LpResult out;
      out.bounded = true;
      out.x = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::Index v = basis[static_cast<std::size_t>(i)];
        if (v < n) out.x(v) = t(i, width - 1);
      }
      return out;
    }
    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (t(i, enter) <= tol) continue;
      const double ratio = t(i, width - 1) / t(i, enter);
      const bool better = ratio < best_ratio - tol;
      const bool tie = !better && ratio <= best_ratio + tol && leave >= 0 &&
                       basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)];
      if (leave < 0 || better || tie) {
        best_ratio = leave < 0 || better ? ratio : best_ratio;
        leave = i;
      }
    }
    if (leave < 0) return {};
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
  }
  throw NumericalError("simplex: pivot limit reached");
}

Eigen::VectorXd identity_vector(Eigen::Index n) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) b(i * n + i) = 1.0;
  return b;
}

}  // namespace

BoundedLeastSquaresResult bounded_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                                double lower, int max_iterations,
                                                double tolerance) {
  if (a.rows() != b.size()) throw DomainError("bounded_least_squares: shape mismatch");
  if (max_iterations < 0) throw DomainError("bounded_least_squares: max_iterations < 0");
  Quadratic q{a.transpose() * a, a.transpose() * b, b.squaredNorm()};
  BoundedLeastSquaresResult out;
  const Eigen::Index m = a.cols();
  if (m == 0) {
    out.x = Eigen::VectorXd(0);
    out.residual_norm = b.norm();
    out.converged = true;
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q.ata, Eigen::EigenvaluesOnly);
  const double lipschitz = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 1e-300);
  const double scale = std::max(1.0, q.atb.cwiseAbs().maxCoeff());

  Eigen::VectorXd x = project(Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(a).solve(b), lower);
  Eigen::VectorXd y = x;
  double momentum = 1.0;
  double fx = q.value(x);
  int it = 0;
  for (; it < max_iterations; ++it) {
    if (projected_gradient_norm(q, x, lower) <= tolerance * scale) break;
    Eigen::VectorXd next = project(y - q.gradient(y) / lipschitz, lower);
    const double fnext = q.value(next);
    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (fnext > fx) {
      // Adaptive restart.
      momentum = 1.0;
      y = x;
      continue;
    }
    y = next + ((momentum - 1.0) / next_momentum) * (next - x);
    momentum = next_momentum;
    x = std::move(next);
    fx = fnext;
  }
  if (auto polished = polish(a, b, x, lower)) {
    if (q.value(*polished) <= fx + 1e-15 * std::max(1.0, q.btb)) x = *polished;
  }
  out.x = x;
  out.iterations = it;
  out.residual_norm = (a * x - b).norm();
  out.projected_gradient = projected_gradient_norm(q, x, lower);
  out.converged = out.projected_gradient <= std::max(tolerance, 1e-10) * scale;
  return out;
}

IsometrizeResult isometrize(const ThcFactorFile& factor, const IsometrizeConfig& config,
                            const ElectronicHamiltonian* hamiltonian) {
  if (!(config.delta > 0.0)) throw DomainError("isometrize: delta must be > 0");
  const Eigen::MatrixXd& x = factor.x;
  const Eigen::Index n = x.rows();
  const Eigen::Index m = x.cols();
  if (n == 0 || m < n) throw DomainError("isometrize: factor must be N x M with M >= N >= 1");
  if (factor.w && (factor.w->rows() != m || factor.w->cols() != m)) {
    throw DomainError("isometrize: W must be M x M");
  }
  if (hamiltonian && hamiltonian->n_orbitals() != n) {
    throw DomainError("isometrize: factor and Hamiltonian sizes differ");
  }

  const BoundedLeastSquaresResult bls = bounded_least_squares(
      pair_products(x), identity_vector(n), config.delta, config.max_iterations, config.tolerance);
  const Eigen::VectorXd& eta = bls.x;
  const Eigen::MatrixXd scaled = x * eta.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd u = retract_to_coisometry(scaled);

  Eigen::MatrixXd vtilde;
  std::optional<Eigen::VectorXd> htilde;
  if (hamiltonian) {
    KernelContraction k = contract_vtilde(u, *hamiltonian);
    vtilde = std::move(k.vtilde);
    htilde = std::move(k.htilde);
  } else if (factor.w) {
    const Eigen::VectorXd inv = eta.cwiseInverse();
    vtilde = inv.asDiagonal() * (*factor.w) * inv.asDiagonal();
    vtilde = 0.5 * (vtilde + vtilde.transpose()).eval();
  } else {
    vtilde = Eigen::MatrixXd::Zero(m, m);
  }

  IsometrizeResult out{ThcFactorization(u, std::move(vtilde), std::move(htilde)), eta, bls.residual_norm,
                       (u - scaled).cwiseAbs().maxCoeff(), std::nullopt};
  if (bls.residual_norm > config.residual_warning) {
    std::ostringstream msg;
    msg << "isometrize: constrained residual " << bls.residual_norm << " exceeds "
        << config.residual_warning;
    out.warning = msg.str();
  }
  if (hamiltonian && hamiltonian->eri().norm() > 0.0) {
    ThcProvenance provenance;
    const ApproximationErrors errors = approximation_errors(out.thc, *hamiltonian);
    provenance.eps_v = errors.eps_v;
    provenance.eps_h = errors.eps_h;
    provenance.config = {{"delta", config.delta}};
    out.thc = out.thc.with_provenance(std::move(provenance));
  }
  return out;
}

NullspaceRepairResult nullspace_repair(const Eigen::MatrixXd& x, const Eigen::VectorXd& eta,
                                       double threshold, double margin) {
  const Eigen::Index m = x.cols();
  if (eta.size() != m) throw DomainError("nullspace_repair: eta must have length M");
  if (threshold < 0.0) throw DomainError("nullspace_repair: threshold must be >= 0");
  if (!(margin > 0.0)) throw DomainError("nullspace_repair: margin must be > 0");

  NullspaceRepairResult out;
  out.eta = eta;
  out.zeta = Eigen::VectorXd::Zero(m);

  const Eigen::MatrixXd a = pair_products(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  std::vector<Eigen::Index> null_cols;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double sigma = k < s.size() ? s(k) : 0.0;
    if (sigma < threshold) null_cols.push_back(k);
  }
  out.nullspace_dim = static_cast<int>(null_cols.size());

  if (eta.minCoeff() > 0.0) {
    out.feasible = true;
    return out;
  }
  if (null_cols.empty()) return out;

  const Eigen::Index k = static_cast<Eigen::Index>(null_cols.size());
  Eigen::MatrixXd z(m, k);
  for (Eigen::Index c = 0; c < k; ++c) z.col(c) = svd.matrixV().col(null_cols[static_cast<std::size_t>(c)]);

  // Maximize t subject to eta + Z c >= t. With c = c+ - c- and t = t0 + s,
  // every constraint reads -Z c+ + Z c- + s <= eta - t0 with eta - t0 >= 1.
  const double t0 = eta.minCoeff() - 1.0;
  const double cap = margin - t0;
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m + 1, 2 * k + 1);
  lhs.block(0, 0, m, k) = -z;
  lhs.block(0, k, m, k) = z;
  lhs.col(2 * k).head(m).setOnes();
  lhs(m, 2 * k) = 1.0;
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = eta.array() - t0;
  rhs(m) = cap;
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(2 * k + 1);
  objective(2 * k) = 1.0;
  const LpResult lp = simplex_max(lhs, rhs, objective);
  if (!lp.bounded) return out;

  const Eigen::VectorXd coeff = lp.x.head(k) - lp.x.segment(k, k);
  const Eigen::VectorXd zeta = z * coeff;
  const Eigen::VectorXd repaired = eta + zeta;
  if (repaired.minCoeff() <= 0.0) return out;

  const Eigen::VectorXd b = identity_vector(x.rows());
  out.feasible = true;
  out.zeta = zeta;
  out.eta = repaired;
  out.residual_change = (a * repaired - b).norm() - (a * eta - b).norm();
  return out;
}

}  // namespace isothc
