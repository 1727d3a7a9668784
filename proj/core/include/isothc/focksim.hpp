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

// Dense occupation-basis simulation of system (a) and ancilla (b) modes.
//
// Mode ordering inside each spin sector: a-modes first, then b-modes. The
// spinful layout is [a_up b_up a_dn b_dn]; system-only layouts coincide with
// the ManyBodyOperator layout (mode = sigma * N + i).
//
// Givens convention. A single-particle unitary W acts as
//
//   U(W) d^dag_q U(W)^dag = sum_p W_pq d^dag_p,   U(AB) = U(A) U(B),
//
// so one-particle amplitudes transform as psi -> W psi. The elementary
// rotation on adjacent modes (p, p+1) is
//
//   R(theta, phi) = [[cos theta, -sin theta e^{i phi}],
//                    [sin theta e^{-i phi},  cos theta]],
//
// acting on the (|10>, |01>) amplitudes (mode p occupied, mode p+1 occupied)
// and leaving |00>, |11> unchanged (det R = 1). theta = pi/2, phi = 0 maps
// |10> to +|01>.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include <nlohmann/json.hpp>

#include "isothc/fock_basis.hpp"
#include "isothc/hamiltonian.hpp"

namespace isothc {

using cplx = std::complex<double>;

inline constexpr int kDensityModeCap = 14;
inline constexpr int kStateModeCap = 20;

struct ModeLayout {
  int n_system = 0;
  int n_ancilla = 0;
  bool spinful = false;

  static ModeLayout system_only(int n_system, bool spinful) { return {n_system, 0, spinful}; }

  int spin_sectors() const { return spinful ? 2 : 1; }
  int sector_size() const { return n_system + n_ancilla; }
  int n_modes() const { return spin_sectors() * sector_size(); }
  std::int64_t dim() const { return std::int64_t{1} << n_modes(); }
  int a_mode(int sigma, int i) const { return sigma * sector_size() + i; }
  int b_mode(int sigma, int m) const { return sigma * sector_size() + n_system + m; }

  fock::BasisIndex ancilla_mask() const;
  ModeLayout system_layout() const { return system_only(n_system, spinful); }

  /// System basis string (mode = sigma * N + i) placed on the a-modes.
  fock::BasisIndex embed_system(fock::BasisIndex system_index) const;
  /// The a-mode occupations of an extended string in the system layout.
  fock::BasisIndex extract_system(fock::BasisIndex index) const;
  /// Sign of |x> = s(x) |x_a> (x) |x_b> for the a-before-b reordering.
  int reorder_sign(fock::BasisIndex index) const;

  /// Throws SizeError when n_modes() exceeds cap, DomainError on bad sizes.
  void validate(int cap) const;

  bool operator==(const ModeLayout&) const = default;
};

/// Normalized pure state (norm within 1e-10).
class FockState {
 public:
  FockState(ModeLayout layout, Eigen::VectorXcd amplitudes, int mode_cap = kStateModeCap);
  static FockState basis_state(ModeLayout layout, fock::BasisIndex index);

  const ModeLayout& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  nlohmann::json to_json() const;

 private:
  ModeLayout layout_;
  Eigen::VectorXcd amplitudes_;
};

/// Density matrix: Hermitian and unit trace within 1e-10. Positivity is
/// checked on demand by is_positive().
class FockDensity {
 public:
  FockDensity(ModeLayout layout, Eigen::MatrixXcd matrix, int mode_cap = kDensityModeCap);
  static FockDensity pure(const FockState& state);

  const ModeLayout& layout() const { return layout_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  bool is_positive(double tolerance = 1e-9) const;
  nlohmann::json to_json() const;

 private:
  ModeLayout layout_;
  Eigen::MatrixXcd matrix_;
};

// ---------------------------------------------------------------------------
// Basis rotations

struct GivensRotation {
  int p = 0;  // q = p + 1
  double theta = 0.0;
  double phi = 0.0;
  int q() const { return p + 1; }
};

/// Sector-local rotation circuit: rotations in application order, then the
/// residual phases e^{i phase_p n_p}.
struct GivensSequence {
  int n_modes = 0;
  std::vector<GivensRotation> rotations;
  Eigen::VectorXd residual_phases;

  nlohmann::json to_json() const;
  static GivensSequence from_json(const nlohmann::json& doc);
};

/// The single-particle matrix W implemented by the forward sequence.
Eigen::MatrixXcd single_particle_matrix(const GivensSequence& sequence);

/// Orthogonal M x M matrix whose first N rows are u. The remaining rows come
/// from Gram-Schmidt over canonical vectors, taking the largest residual
/// first (ties to the lowest index).
Eigen::MatrixXd complete_isometry(const Eigen::MatrixXd& u);

/// Adjacent-mode circuit whose single-particle matrix agrees with w on its
/// first n_relevant rows. Uses at most C(M,2) - C(M-N,2) rotations.
GivensSequence givens_decompose(const Eigen::MatrixXd& w, int n_relevant);

enum class Direction { forward, inverse };
enum class SpinSector { both, up, down };

FockState apply_basis_rotation(const FockState& state, const GivensSequence& sequence,
                               Direction direction, SpinSector sector = SpinSector::both);
FockDensity apply_basis_rotation(const FockDensity& rho, const GivensSequence& sequence,
                                 Direction direction, SpinSector sector = SpinSector::both);

// ---------------------------------------------------------------------------
// Diagonal layers

/// E(n) = 1/2 sum_{(a,s) != (b,g)} vtilde_ab n_as n_bg for every basis string,
/// with a, b sector-local mode indices (vtilde is sector_size x sector_size).
Eigen::VectorXd diagonal_two_body_energies(const ModeLayout& layout, const Eigen::MatrixXd& vtilde);

FockState apply_diagonal_two_body(const FockState& state, const Eigen::MatrixXd& vtilde, double tau);
FockDensity apply_diagonal_two_body(const FockDensity& rho, const Eigen::MatrixXd& vtilde, double tau);

/// Per-mode energies (length n_modes): phase exp(-i tau sum_p e_p n_p).
FockState apply_diagonal_one_body(const FockState& state, const Eigen::VectorXd& mode_energies,
                                  double tau);
FockDensity apply_diagonal_one_body(const FockDensity& rho, const Eigen::VectorXd& mode_energies,
                                    double tau);

/// Orbital energies (length n_system) repeated on every spin sector's a-modes.
Eigen::VectorXd system_mode_energies(const ModeLayout& layout, const Eigen::VectorXd& orbital_energies);

/// Multiplies every basis string by e^{i phi N_b}.
FockState phase_on_ancillas(const FockState& state, double phi);
FockDensity phase_on_ancillas(const FockDensity& rho, double phi);

// ---------------------------------------------------------------------------
// Ancillas and distances

/// Fermionic partial trace over the b-modes, returned on the system layout.
/// Throws NumericalError if rho has coherences between opposite parities.
FockDensity trace_out_ancillas(const FockDensity& rho);

/// tr_b(rho) (x) |0><0|_b.
FockDensity reset_ancillas(const FockDensity& rho);

/// System state or density placed on the b-vacuum of layout.
FockState embed_system(const FockState& state, const ModeLayout& layout);
FockDensity embed_system(const FockDensity& rho, const ModeLayout& layout);

/// Total weight outside the b-vacuum.
double ancilla_weight(const FockDensity& rho);

double trace_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);
double trace_distance(const FockDensity& rho, const FockDensity& sigma);

/// <n_p> for every mode.
Eigen::VectorXd occupation_numbers(const FockState& state);

// ---------------------------------------------------------------------------
// Exact dynamics

/// e^{-i H t} on the operator's full Fock space (cached eigendecomposition).
Eigen::MatrixXcd evolution_operator(const ManyBodyOperator& op, double t);
FockState exact_evolution(const ManyBodyOperator& op, const FockState& state, double t);
FockDensity exact_evolution(const ManyBodyOperator& op, const FockDensity& rho, double t);

// ---------------------------------------------------------------------------
// Row-action kernels: each replaces m by G m for the named Fock-space
// operator G. Vectors are single-column matrices; a density update rho ->
// G rho G^dag is conjugate(m) below.

namespace kernel {

void basis_rotation(Eigen::MatrixXcd& m, const ModeLayout& layout, const GivensSequence& sequence,
                    Direction direction, SpinSector sector);
void diagonal_phase(Eigen::MatrixXcd& m, const Eigen::VectorXd& energies, double tau);
void ancilla_phase(Eigen::MatrixXcd& m, const ModeLayout& layout, double phi);

/// Replaces a density matrix rho by G rho G^dag given the row action of G.
template <typename RowAction>
void conjugate(Eigen::MatrixXcd& rho, RowAction&& apply) {
  apply(rho);
  rho.adjointInPlace();
  apply(rho);
  rho.adjointInPlace();
}

}  // namespace kernel

}  // namespace isothc
