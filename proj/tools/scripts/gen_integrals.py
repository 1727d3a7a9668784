#!/usr/bin/env python3
# Copyright 2026 The isothc Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the FCIDUMP assets under data/ (requires pyscf).

Prints the RHF and full-CI energies that the test suites freeze.
"""
import sys

from pyscf import fci, gto, scf
from pyscf.tools import fcidump


def dump(atom, path, unit="Angstrom"):
    mol = gto.M(atom=atom, basis="sto-6g", unit=unit, verbose=0)
    mf = scf.RHF(mol).run()
    fcidump.from_scf(mf, path, tol=1e-15)
    e_fci, _ = fci.FCI(mf).kernel()
    print(f"{path}: norb={mol.nao} nelec={mol.nelectron} "
          f"e_rhf={mf.e_tot:.12f} e_fci={e_fci:.12f}")


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "data"
    dump("H 0 0 0; H 0 0 0.7414", f"{out}/h2_sto6g.fcidump")
    dump("; ".join(f"H 0 0 {2.0 * i}" for i in range(4)),
         f"{out}/h4_chain_sto6g.fcidump", unit="Bohr")
    dump("; ".join(f"H 0 0 {2.0 * i}" for i in range(10)),
         f"{out}/h10_chain_sto6g.fcidump", unit="Bohr")
