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

#include "isothc/fock_basis.hpp"

namespace isothc::fock {

std::vector<BasisIndex> number_sector(int n_modes, int n_particles) {
  std::vector<BasisIndex> out;
  if (n_particles < 0 || n_particles > n_modes) return out;
  const BasisIndex dim = BasisIndex{1} << n_modes;
  for (BasisIndex x = 0; x < dim; ++x) {
    if (particle_count(x) == n_particles) out.push_back(x);
  }
  return out;
}

std::vector<int> sector_positions(int n_modes) {
  const BasisIndex dim = BasisIndex{1} << n_modes;
  std::vector<int> pos(dim);
  std::vector<int> next(n_modes + 1, 0);
  for (BasisIndex x = 0; x < dim; ++x) pos[x] = next[particle_count(x)]++;
  return pos;
}

}  // namespace isothc::fock
