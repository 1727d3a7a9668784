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

#include "isothc/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <vector>

#include "isothc/errors.hpp"
#include "isothc/fock_basis.hpp"

namespace isothc {

namespace {

using Triplet = Eigen::Triplet<double>;

// Spectral routines switch to Lanczos above this sector dimension.
constexpr Eigen::Index kDenseEigenLimit = 2000;
// ManyBodyOperator::spectrum() stores dense eigenvectors of the full space.
constexpr int kSpectrumModeCap = 12;

double max_abs_or_one(const Eigen::MatrixXd& m) {
  return std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
}

void check_mode_cap(int n_modes, int mode_cap) {
  if (n_modes > mode_cap) {
    throw SizeError("many-body operator needs " + std::to_string(n_modes) +
                    " modes, cap is " + std::to_string(mode_cap));
  }
}

}  // namespace

ElectronicHamiltonian::ElectronicHamiltonian(double core_energy, Eigen::MatrixXd h,
                                             Eigen::MatrixXd eri, HamiltonianMetadata metadata)
    : core_energy_(core_energy),
      h_(std::move(h)),
      eri_(std::move(eri)),
      metadata_(metadata) {
  const Eigen::Index n = h_.rows();
  if (h_.cols() != n) throw DomainError("h must be square");
  if (eri_.rows() != n * n || eri_.cols() != n * n) {
    throw DomainError("eri pair matrix must be N^2 x N^2 with N = " + std::to_string(n));
  }
  if (!h_.allFinite() || !eri_.allFinite()) throw DomainError("non-finite integrals");
  if ((h_ - h_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * max_abs_or_one(h_)) {
    throw DomainError("h is not symmetric");
  }
  if (eri_symmetry_defect(eri_) > 1e-12 * max_abs_or_one(eri_)) {
    throw DomainError("eri lacks 8-fold permutational symmetry");
  }
}

ElectronicHamiltonian ElectronicHamiltonian::with_eri(Eigen::MatrixXd eri) const {
  return ElectronicHamiltonian(core_energy_, h_, std::move(eri), metadata_);
}

ElectronicHamiltonian ElectronicHamiltonian::with_core_energy(double core_energy) const {
  return ElectronicHamiltonian(core_energy, h_, eri_, metadata_);
}

Eigen::MatrixXd symmetrize_eri(const Eigen::MatrixXd& eri) {
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(eri.rows()))));
  Eigen::MatrixXd out(eri.rows(), eri.cols());
  auto at = [&](int i, int j, int k, int l) { return eri(i * n + j, k * n + l); };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          out(i * n + j, k * n + l) =
              (at(i, j, k, l) + at(j, i, k, l) + at(i, j, l, k) + at(j, i, l, k) +
               at(k, l, i, j) + at(l, k, i, j) + at(k, l, j, i) + at(l, k, j, i)) /
              8.0;
        }
  return out;
}

double eri_symmetry_defect(const Eigen::MatrixXd& eri) {
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(eri.rows()))));
  auto at = [&](int i, int j, int k, int l) { return eri(i * n + j, k * n + l); };
  double defect = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double v = at(i, j, k, l);
          for (double w : {at(j, i, k, l), at(i, j, l, k), at(j, i, l, k), at(k, l, i, j),
                           at(l, k, i, j), at(k, l, j, i), at(l, k, j, i)}) {
            defect = std::max(defect, std::abs(v - w));
          }
        }
  return defect;
}

Eigen::MatrixXd transform_eri(const Eigen::MatrixXd& eri, const Eigen::MatrixXd& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index nn = n * n;
  // Transform the ket pair (kl) of every row, then the bra pair (ij) of every column.
  Eigen::MatrixXd half(nn, nn);
  for (Eigen::Index row = 0; row < nn; ++row) {
    Eigen::MatrixXd block = Eigen::Map<const Eigen::MatrixXd>(eri.row(row).eval().data(), n, n);
    // Row storage is (k*n + l) -> column-major map gives block(l, k).
    Eigen::MatrixXd rotated = basis.transpose() * block * basis;
    half.row(row) = Eigen::Map<const Eigen::RowVectorXd>(rotated.data(), nn);
  }
  Eigen::MatrixXd out(nn, nn);
  for (Eigen::Index col = 0; col < nn; ++col) {
    Eigen::MatrixXd block = Eigen::Map<const Eigen::MatrixXd>(half.col(col).eval().data(), n, n);
    Eigen::MatrixXd rotated = basis.transpose() * block * basis;
    out.col(col) = Eigen::Map<const Eigen::VectorXd>(rotated.data(), nn);
  }
  return out;
}

RotatedHamiltonian rotate_to_h_eigenbasis(const ElectronicHamiltonian& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian.h());
  Eigen::MatrixXd basis = solver.eigenvectors();
  for (Eigen::Index c = 0; c < basis.cols(); ++c) {
    Eigen::Index arg = 0;
    basis.col(c).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, c) < 0) basis.col(c) *= -1.0;
  }
  Eigen::MatrixXd h = solver.eigenvalues().asDiagonal();
  Eigen::MatrixXd eri = symmetrize_eri(transform_eri(hamiltonian.eri(), basis));
  return {ElectronicHamiltonian(hamiltonian.core_energy(), std::move(h), std::move(eri),
                                hamiltonian.metadata()),
          std::move(basis)};
}

// ---------------------------------------------------------------------------

struct ManyBodyOperator::Cache {
  std::once_flag once;
  SpectralDecomposition spectrum;
};

ManyBodyOperator::ManyBodyOperator(int n_modes, SpinMode spin, Eigen::SparseMatrix<double> matrix)
    : n_modes_(n_modes), spin_(spin), matrix_(std::move(matrix)), cache_(std::make_shared<Cache>()) {
  if (matrix_.rows() != dim() || matrix_.cols() != dim()) {
    throw DomainError("operator matrix does not match 2^n_modes");
  }
  matrix_.makeCompressed();
}

Eigen::SparseMatrix<double> ManyBodyOperator::sector_block(int n_particles) const {
  const auto states = fock::number_sector(n_modes_, n_particles);
  const auto positions = fock::sector_positions(n_modes_);
  std::vector<Triplet> triplets;
  for (Eigen::Index col = 0; col < matrix_.outerSize(); ++col) {
    if (fock::particle_count(static_cast<fock::BasisIndex>(col)) != n_particles) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, col); it; ++it) {
      if (fock::particle_count(static_cast<fock::BasisIndex>(it.row())) != n_particles) continue;
      triplets.emplace_back(positions[it.row()], positions[col], it.value());
    }
  }
  const auto size = static_cast<Eigen::Index>(states.size());
  Eigen::SparseMatrix<double> block(size, size);
  block.setFromTriplets(triplets.begin(), triplets.end());
  return block;
}

const SpectralDecomposition& ManyBodyOperator::spectrum() const {
  std::call_once(cache_->once, [this] {
    check_mode_cap(n_modes_, kSpectrumModeCap);
    const auto d = static_cast<Eigen::Index>(dim());
    SpectralDecomposition out{Eigen::VectorXd(d), Eigen::MatrixXd::Zero(d, d)};
    Eigen::Index offset = 0;
    for (int n = 0; n <= n_modes_; ++n) {
      const auto states = fock::number_sector(n_modes_, n);
      Eigen::MatrixXd block(sector_block(n));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
      const auto size = static_cast<Eigen::Index>(states.size());
      out.eigenvalues.segment(offset, size) = solver.eigenvalues();
      for (Eigen::Index r = 0; r < size; ++r) {
        out.eigenvectors.row(static_cast<Eigen::Index>(states[r])).segment(offset, size) =
            solver.eigenvectors().row(r);
      }
      offset += size;
    }
    cache_->spectrum = std::move(out);
  });
  return cache_->spectrum;
}

ManyBodyOperator ManyBodyOperator::operator+(const ManyBodyOperator& other) const {
  if (other.n_modes_ != n_modes_) throw DomainError("operator mode counts differ");
  return ManyBodyOperator(n_modes_, spin_, matrix_ + other.matrix_);
}

ManyBodyOperator ManyBodyOperator::operator-(const ManyBodyOperator& other) const {
  if (other.n_modes_ != n_modes_) throw DomainError("operator mode counts differ");
  return ManyBodyOperator(n_modes_, spin_, matrix_ - other.matrix_);
}

namespace {

struct ModeMap {
  int n_orbitals;
  int spins;
  int orbital(int mode) const { return mode % n_orbitals; }
  int spin(int mode) const { return mode / n_orbitals; }
  int mode(int orbital, int spin) const { return spin * n_orbitals + orbital; }
  int n_modes() const { return n_orbitals * spins; }
};

void add_one_body(const Eigen::MatrixXd& h, const ModeMap& map, std::vector<Triplet>& out) {
  const fock::BasisIndex dim = fock::BasisIndex{1} << map.n_modes();
  for (fock::BasisIndex x = 0; x < dim; ++x) {
    for (int q = 0; q < map.n_modes(); ++q) {
      fock::BasisIndex y = x;
      int sign = 1;
      if (!fock::annihilate(y, q, sign)) continue;
      const int sigma = map.spin(q);
      for (int pi = 0; pi < map.n_orbitals; ++pi) {
        const double coeff = h(pi, map.orbital(q));
        if (coeff == 0.0) continue;
        fock::BasisIndex z = y;
        int s = sign;
        if (!fock::create(z, map.mode(pi, sigma), s)) continue;
        out.emplace_back(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(x), s * coeff);
      }
    }
  }
}

// 1/2 sum V_{o(p)o(q)o(r)o(s)} a^dag_p a^dag_r a_s a_q with spin(p)=spin(q), spin(r)=spin(s).
void add_two_body(const Eigen::MatrixXd& eri, const ModeMap& map, std::vector<Triplet>& out) {
  const int n = map.n_orbitals;
  const int m = map.n_modes();
  const fock::BasisIndex dim = fock::BasisIndex{1} << m;
  for (fock::BasisIndex x = 0; x < dim; ++x) {
    for (int q = 0; q < m; ++q) {
      fock::BasisIndex x1 = x;
      int s1 = 1;
      if (!fock::annihilate(x1, q, s1)) continue;
      for (int s = 0; s < m; ++s) {
        fock::BasisIndex x2 = x1;
        int s2 = s1;
        if (!fock::annihilate(x2, s, s2)) continue;
        const int sigma_q = map.spin(q);
        const int sigma_s = map.spin(s);
        const int j = map.orbital(q);
        const int l = map.orbital(s);
        for (int k = 0; k < n; ++k) {
          fock::BasisIndex x3 = x2;
          int s3 = s2;
          if (!fock::create(x3, map.mode(k, sigma_s), s3)) continue;
          for (int i = 0; i < n; ++i) {
            const double coeff = eri(i * n + j, k * n + l);
            if (coeff == 0.0) continue;
            fock::BasisIndex x4 = x3;
            int s4 = s3;
            if (!fock::create(x4, map.mode(i, sigma_q), s4)) continue;
            out.emplace_back(static_cast<Eigen::Index>(x4), static_cast<Eigen::Index>(x),
                             0.5 * s4 * coeff);
          }
        }
      }
    }
  }
}

Eigen::SparseMatrix<double> from_triplets(int n_modes, const std::vector<Triplet>& triplets) {
  const Eigen::Index dim = Eigen::Index{1} << n_modes;
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(0.0);
  return m;
}

}  // namespace

ManyBodyOperator build_one_body_operator(const Eigen::MatrixXd& h, SpinMode spin, int mode_cap) {
  const ModeMap map{static_cast<int>(h.rows()), spin_factor(spin)};
  check_mode_cap(map.n_modes(), mode_cap);
  std::vector<Triplet> triplets;
  add_one_body(h, map, triplets);
  return ManyBodyOperator(map.n_modes(), spin, from_triplets(map.n_modes(), triplets));
}

ManyBodyOperator build_two_body_operator(const Eigen::MatrixXd& eri, int n_orbitals,
                                         SpinMode spin, int mode_cap) {
  if (eri.rows() != n_orbitals * n_orbitals || eri.cols() != eri.rows()) {
    throw DomainError("eri pair matrix shape does not match n_orbitals");
  }
  const ModeMap map{n_orbitals, spin_factor(spin)};
  check_mode_cap(map.n_modes(), mode_cap);
  std::vector<Triplet> triplets;
  add_two_body(eri, map, triplets);
  return ManyBodyOperator(map.n_modes(), spin, from_triplets(map.n_modes(), triplets));
}

ManyBodyOperator build_many_body_operator(const ElectronicHamiltonian& hamiltonian,
                                          SpinMode spin, int mode_cap) {
  const ModeMap map{hamiltonian.n_orbitals(), spin_factor(spin)};
  check_mode_cap(map.n_modes(), mode_cap);
  std::vector<Triplet> triplets;
  add_one_body(hamiltonian.h(), map, triplets);
  add_two_body(hamiltonian.eri(), map, triplets);
  if (hamiltonian.core_energy() != 0.0) {
    const Eigen::Index dim = Eigen::Index{1} << map.n_modes();
    for (Eigen::Index x = 0; x < dim; ++x) triplets.emplace_back(x, x, hamiltonian.core_energy());
  }
  return ManyBodyOperator(map.n_modes(), spin, from_triplets(map.n_modes(), triplets));
}

namespace {

// Lanczos with full reorthogonalization; returns the extreme Ritz values.
std::pair<double, double> lanczos_extremes(const Eigen::SparseMatrix<double>& a) {
  const Eigen::Index n = a.rows();
  const Eigen::Index max_steps = std::min<Eigen::Index>(n, 300);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd basis(n, max_steps + 1);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  basis.col(0) = v.normalized();
  std::vector<double> alpha, beta;
  double lo = 0.0, hi = 0.0;
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    Eigen::VectorXd w = a * basis.col(k);
    alpha.push_back(basis.col(k).dot(w));
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    }
    const double b = w.norm();
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (Eigen::Index i = 0; i <= k; ++i) {
      t(i, i) = alpha[i];
      if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[i - 1];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
    lo = solver.eigenvalues()(0);
    hi = solver.eigenvalues()(k);
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    const double res_lo = b * std::abs(solver.eigenvectors()(k, 0));
    const double res_hi = b * std::abs(solver.eigenvectors()(k, k));
    if (b < 1e-12 * scale || (res_lo < 1e-11 * scale && res_hi < 1e-11 * scale)) break;
    beta.push_back(b);
    basis.col(k + 1) = w / b;
  }
  return {lo, hi};
}

}  // namespace

std::pair<double, double> extreme_eigenvalues(const Eigen::SparseMatrix<double>& block) {
  if (block.rows() == 0) return {0.0, 0.0};
  if (block.rows() <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(Eigen::MatrixXd(block),
                                                          Eigen::EigenvaluesOnly);
    return {solver.eigenvalues()(0), solver.eigenvalues()(block.rows() - 1)};
  }
  return lanczos_extremes(block);
}

double ground_state_energy(const ElectronicHamiltonian& hamiltonian, int n_electrons,
                           SpinMode spin, int mode_cap) {
  const int n_modes = hamiltonian.n_orbitals() * spin_factor(spin);
  if (n_electrons < 0 || n_electrons > n_modes) {
    throw DomainError("n_electrons must lie in [0, " + std::to_string(n_modes) + "]");
  }
  const ManyBodyOperator op = build_many_body_operator(hamiltonian, spin, mode_cap);
  return extreme_eigenvalues(op.sector_block(n_electrons)).first;
}

double operator_norm(const ManyBodyOperator& op) {
  double norm = 0.0;
  for (int n = 0; n <= op.n_modes(); ++n) {
    const auto [lo, hi] = extreme_eigenvalues(op.sector_block(n));
    norm = std::max({norm, std::abs(lo), std::abs(hi)});
  }
  return norm;
}

NormSummary norm_summary(const ElectronicHamiltonian& hamiltonian, const Eigen::MatrixXd* vtilde,
                         bool exact_opnorms, SpinMode spin, int mode_cap) {
  NormSummary out;
  out.l1_h = hamiltonian.h().cwiseAbs().sum();
  out.l1_v = hamiltonian.eri().cwiseAbs().sum();
  if (vtilde) out.l1_vtilde = vtilde->cwiseAbs().sum();
  if (exact_opnorms) {
    out.opnorm_h = operator_norm(build_one_body_operator(hamiltonian.h(), spin, mode_cap));
    out.opnorm_v = operator_norm(
        build_two_body_operator(hamiltonian.eri(), hamiltonian.n_orbitals(), spin, mode_cap));
  }
  return out;
}

}  // namespace isothc
