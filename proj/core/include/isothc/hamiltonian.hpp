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

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace isothc {

enum class SpinMode { spinless, spinful };

/// Number of fermionic modes per spatial orbital.
constexpr int spin_factor(SpinMode spin) { return spin == SpinMode::spinful ? 2 : 1; }

/// Default cap on the number of modes for dense many-body constructions.
inline constexpr int kDefaultModeCap = 16;

struct HamiltonianMetadata {
  std::optional<int> n_electrons;
  std::optional<int> ms2;
};

/// Second-quantized electronic Hamiltonian over N real spatial orbitals,
///
///   H = core + sum_ij h_ij a^dag_i a_j + 1/2 sum_ijkl (ij|kl) a^dag_i a^dag_k a_l a_j
///
/// in chemists' notation (spin sums implied for the spinful operator).
///
/// The two-electron integrals are stored as the N^2 x N^2 "pair matrix"
/// eri(i*N + j, k*N + l) = (ij|kl). Construction checks h = h^T and the full
/// 8-fold permutational symmetry of (ij|kl) to 1e-12 relative to the largest
/// entry. Instances are immutable.
class ElectronicHamiltonian {
 public:
  ElectronicHamiltonian(double core_energy, Eigen::MatrixXd h, Eigen::MatrixXd eri,
                        HamiltonianMetadata metadata = {});

  int n_orbitals() const { return static_cast<int>(h_.rows()); }
  double core_energy() const { return core_energy_; }
  const Eigen::MatrixXd& h() const { return h_; }
  const Eigen::MatrixXd& eri() const { return eri_; }
  double eri(int i, int j, int k, int l) const {
    const int n = n_orbitals();
    return eri_(i * n + j, k * n + l);
  }
  const HamiltonianMetadata& metadata() const { return metadata_; }

  /// Same one-body part and core energy with a replaced pair matrix.
  ElectronicHamiltonian with_eri(Eigen::MatrixXd eri) const;
  ElectronicHamiltonian with_core_energy(double core_energy) const;

 private:
  double core_energy_;
  Eigen::MatrixXd h_;
  Eigen::MatrixXd eri_;
  HamiltonianMetadata metadata_;
};

/// Averages a pair matrix over the 8 real permutational images.
Eigen::MatrixXd symmetrize_eri(const Eigen::MatrixXd& eri);

/// Largest deviation between (ij|kl) and any of its 8 images.
double eri_symmetry_defect(const Eigen::MatrixXd& eri);

/// Applies an orbital rotation to a pair matrix: (ab|cd) = sum O_ia O_jb O_kc O_ld (ij|kl).
Eigen::MatrixXd transform_eri(const Eigen::MatrixXd& eri, const Eigen::MatrixXd& basis);

// ---------------------------------------------------------------------------
// Text and JSON interchange

/// Reads an FCIDUMP stream. Symmetry images are completed from every stored
/// value; duplicates that disagree by more than 1e-10 are a ParseError.
ElectronicHamiltonian parse_fcidump(std::istream& in);
ElectronicHamiltonian read_fcidump(const std::string& path);
void write_fcidump(std::ostream& out, const ElectronicHamiltonian& hamiltonian);

nlohmann::json to_json(const ElectronicHamiltonian& hamiltonian);
ElectronicHamiltonian hamiltonian_from_json(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Orbital basis

struct RotatedHamiltonian {
  ElectronicHamiltonian hamiltonian;
  /// Column a holds new orbital a in the old basis.
  Eigen::MatrixXd basis;
};

/// Rotates to the eigenbasis of h (ascending orbital energies). Each basis
/// column is sign-fixed so its largest-magnitude entry is positive.
RotatedHamiltonian rotate_to_h_eigenbasis(const ElectronicHamiltonian& hamiltonian);

// ---------------------------------------------------------------------------
// Many-body operators

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // columns, full Fock space
};

/// Real symmetric operator on the 2^m dimensional occupation basis. Mode
/// layout for spinful operators: mode = sigma * N + i (all up-spin modes
/// first). The spectral decomposition is computed lazily, once, and shared
/// between copies.
class ManyBodyOperator {
 public:
  ManyBodyOperator(int n_modes, SpinMode spin, Eigen::SparseMatrix<double> matrix);

  int n_modes() const { return n_modes_; }
  SpinMode spin() const { return spin_; }
  std::int64_t dim() const { return std::int64_t{1} << n_modes_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }
  /// Block of the operator inside the n-particle sector (ascending basis order).
  Eigen::SparseMatrix<double> sector_block(int n_particles) const;

  const SpectralDecomposition& spectrum() const;

  ManyBodyOperator operator+(const ManyBodyOperator& other) const;
  ManyBodyOperator operator-(const ManyBodyOperator& other) const;

 private:
  struct Cache;
  int n_modes_;
  SpinMode spin_;
  Eigen::SparseMatrix<double> matrix_;
  std::shared_ptr<Cache> cache_;
};

/// Full operator including core energy times identity.
ManyBodyOperator build_many_body_operator(const ElectronicHamiltonian& hamiltonian,
                                          SpinMode spin, int mode_cap = kDefaultModeCap);
/// sum_ij h_ij a^dag_i a_j (spin-summed when spinful).
ManyBodyOperator build_one_body_operator(const Eigen::MatrixXd& h, SpinMode spin,
                                         int mode_cap = kDefaultModeCap);
/// 1/2 sum (ij|kl) a^dag_i a^dag_k a_l a_j (spin-summed when spinful).
ManyBodyOperator build_two_body_operator(const Eigen::MatrixXd& eri, int n_orbitals,
                                         SpinMode spin, int mode_cap = kDefaultModeCap);

/// Lowest eigenvalue in the n_electrons sector.
double ground_state_energy(const ElectronicHamiltonian& hamiltonian, int n_electrons,
                           SpinMode spin, int mode_cap = kDefaultModeCap);

/// Largest |eigenvalue| over every number sector.
double operator_norm(const ManyBodyOperator& op);

/// Extreme eigenvalues of a symmetric matrix; dense below a size threshold,
/// Lanczos with full reorthogonalization above it.
std::pair<double, double> extreme_eigenvalues(const Eigen::SparseMatrix<double>& block);

// ---------------------------------------------------------------------------
// Norms

struct NormSummary {
  double l1_h = 0.0;
  double l1_v = 0.0;
  std::optional<double> l1_vtilde;
  std::optional<double> opnorm_h;
  std::optional<double> opnorm_v;
};

/// Element-wise L1 sums, and exact many-body operator norms of h and V alone
/// when requested. The core energy is excluded everywhere.
NormSummary norm_summary(const ElectronicHamiltonian& hamiltonian,
                         const Eigen::MatrixXd* vtilde, bool exact_opnorms,
                         SpinMode spin = SpinMode::spinless, int mode_cap = kDefaultModeCap);

}  // namespace isothc
