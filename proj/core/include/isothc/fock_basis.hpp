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

// Occupation-number basis helpers shared by the operator builders and the
// simulator. Basis index bit p is the occupation of mode p (mode 0 is the
// least significant bit). Jordan-Wigner ordering: a basis string is
// (c_0^dag)^{n_0} (c_1^dag)^{n_1} ... |vac>, so a_p picks up the parity of
// the occupied modes below p.

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace isothc::fock {

using BasisIndex = std::uint64_t;

inline bool is_occupied(BasisIndex x, int mode) { return ((x >> mode) & 1u) != 0; }

inline int particle_count(BasisIndex x) { return std::popcount(x); }

inline int parity_below(BasisIndex x, int mode) {
  return std::popcount(x & ((BasisIndex{1} << mode) - 1)) & 1;
}

/// Applies a_mode in place. Returns false (annihilated) when the mode is empty.
inline bool annihilate(BasisIndex& x, int mode, int& sign) {
  if (!is_occupied(x, mode)) return false;
  if (parity_below(x, mode)) sign = -sign;
  x &= ~(BasisIndex{1} << mode);
  return true;
}

/// Applies a^dag_mode in place. Returns false when the mode is already filled.
inline bool create(BasisIndex& x, int mode, int& sign) {
  if (is_occupied(x, mode)) return false;
  if (parity_below(x, mode)) sign = -sign;
  x |= BasisIndex{1} << mode;
  return true;
}

/// All basis indices of `n_modes` modes holding exactly `n_particles`, ascending.
std::vector<BasisIndex> number_sector(int n_modes, int n_particles);

/// Position of each basis index inside its own number sector.
std::vector<int> sector_positions(int n_modes);

}  // namespace isothc::fock
