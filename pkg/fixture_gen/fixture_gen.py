"""Generate the molecular fixtures committed under fixtures/.

One-time developer script: the test suites never invoke it, they read
its committed outputs. Each molecule produces an FCIDUMP (or a qubit
operator text file for the HF fragment) plus a JSON sidecar holding the
SCF and FCI energies used for cross-validation.

Usage:
    python3 fixture_gen/fixture_gen.py --molecule h3 --out fixtures
    python3 fixture_gen/fixture_gen.py --molecule all --out fixtures
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from basis_data import POPLE_631GS, STO3G
from fci import determinant_energy, fci_ground_energy
from integrals import (
    build_basis,
    eri_tensor,
    kinetic_matrix,
    nuclear_matrix,
    nuclear_repulsion,
    overlap_matrix,
)
from qubit_jw import jordan_wigner_hamiltonian, serialize
from scf import mo_transform, rhf, rohf

SQRT_HALF = 1 / math.sqrt(2)

MOLECULES = {
    "h2": {
        "atoms": [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, 0.735))],
        "basis": STO3G,
        "n_alpha": 1,
        "n_beta": 1,
    },
    "h3": {
        # linear chain, two 0.714 A bonds, doublet
        "atoms": [("H", (0.0, 0.0, 0.0)),
                  ("H", (0.0, 0.0, 0.714)),
                  ("H", (0.0, 0.0, 1.428))],
        "basis": STO3G,
        "n_alpha": 2,
        "n_beta": 1,
    },
    "h4": {
        # isosceles trapezoid, coordinates in angstrom
        "atoms": [("H", (SQRT_HALF, 0.0, 0.0)),
                  ("H", (0.0, SQRT_HALF, 0.0)),
                  ("H", (-0.3 - SQRT_HALF, 0.0, 0.0)),
                  ("H", (0.0, -0.3 - SQRT_HALF, 0.0))],
        "basis": STO3G,
        "n_alpha": 2,
        "n_beta": 2,
    },
    "hf_frag": {
        # hydrogen fluoride, r = 0.9168 A, 6-31G* with cartesian d
        "atoms": [("H", (0.0, 0.0, 0.0)), ("F", (0.0, 0.0, 0.9168))],
        "basis": POPLE_631GS,
        "n_alpha": 5,
        "n_beta": 5,
        # analog of a one-occupied-orbital MIFNO fragment: the 4th
        # occupied MO stays active together with the five lowest
        # virtuals, everything else is folded into the core
        "active_occupied": [3],
        "n_active_virtual": 5,
    },
}


def integral_suite(spec):
    basis = build_basis(spec["atoms"], spec["basis"])
    s = overlap_matrix(basis)
    hcore = kinetic_matrix(basis) + nuclear_matrix(basis, spec["atoms"])
    eri = eri_tensor(basis)
    e_nuc = nuclear_repulsion(spec["atoms"])
    return s, hcore, eri, e_nuc


def run_scf(spec, s, hcore, eri, e_nuc):
    na, nb = spec["n_alpha"], spec["n_beta"]
    if na == nb:
        return rhf(hcore, s, eri, e_nuc, na + nb)
    return rohf(hcore, s, eri, e_nuc, na, nb)


def active_space(h_mo, eri_mo, e_nuc, occupied, active):
    """Fold `occupied` (doubly filled) orbitals into core; keep `active`."""
    e_core = e_nuc
    for i in occupied:
        e_core += 2 * h_mo[i, i]
        for j in occupied:
            e_core += 2 * eri_mo[i, i, j, j] - eri_mo[i, j, j, i]
    n_act = len(active)
    h_eff = np.zeros((n_act, n_act))
    for a, p in enumerate(active):
        for b, q in enumerate(active):
            val = h_mo[p, q]
            for i in occupied:
                val += 2 * eri_mo[p, q, i, i] - eri_mo[p, i, i, q]
            h_eff[a, b] = val
    g_act = eri_mo[np.ix_(active, active, active, active)]
    return h_eff, g_act, e_core


def write_fcidump(path: Path, h_mo, eri_mo, e_core, n_electrons, ms2,
                  tol=1e-14):
    n = h_mo.shape[0]
    with open(path, "w") as out:
        out.write(f" &FCI NORB={n:4d},NELEC={n_electrons:3d},MS2={ms2:2d},\n")
        out.write("  ORBSYM=" + "1," * n + "\n")
        out.write("  ISYM=1,\n")
        out.write(" &END\n")
        for i in range(n):
            for j in range(i + 1):
                for k in range(i + 1):
                    l_top = j if k == i else k
                    for l in range(l_top + 1):
                        val = eri_mo[i, j, k, l]
                        if abs(val) > tol:
                            out.write(f" {val:.16g} {i + 1:4d} {j + 1:4d}"
                                      f" {k + 1:4d} {l + 1:4d}\n")
        for i in range(n):
            for j in range(i + 1):
                if abs(h_mo[i, j]) > tol:
                    out.write(f" {h_mo[i, j]:.16g} {i + 1:4d} {j + 1:4d}"
                              "    0    0\n")
        out.write(f" {e_core:.16g}    0    0    0    0\n")


def generate(name: str, out_dir: Path) -> dict:
    spec = MOLECULES[name]
    out_dir.mkdir(parents=True, exist_ok=True)
    s, hcore, eri, e_nuc = integral_suite(spec)
    e_scf, coeffs, _ = run_scf(spec, s, hcore, eri, e_nuc)
    h_mo, eri_mo = mo_transform(hcore, eri, coeffs)
    na, nb = spec["n_alpha"], spec["n_beta"]

    meta = {
        "molecule": name,
        "geometry_angstrom": [[sym, list(xyz)] for sym, xyz in spec["atoms"]],
        "scf_energy": e_scf,
        "n_alpha": na,
        "n_beta": nb,
    }

    if "active_occupied" in spec:
        occupied_all = list(range(na))
        active_occ = spec["active_occupied"]
        frozen = [i for i in occupied_all if i not in active_occ]
        n_mo = h_mo.shape[0]
        virtuals = list(range(na, na + spec["n_active_virtual"]))
        active = active_occ + virtuals
        if max(active) >= n_mo:
            raise RuntimeError("active space exceeds MO count")
        h_eff, g_act, e_core = active_space(h_mo, eri_mo, e_nuc, frozen, active)
        na_act = nb_act = len(active_occ)
        e_fci = fci_ground_energy(h_eff, g_act, e_core, na_act, nb_act)
        e_det = determinant_energy(h_eff, g_act, e_core, na_act, nb_act)
        if abs(e_det - e_scf) > 1e-8:
            raise RuntimeError(
                f"active-space determinant energy {e_det:.10f} does not "
                f"reproduce the SCF energy {e_scf:.10f}")

        qubit_op = jordan_wigner_hamiltonian(h_eff, g_act, e_core)
        op_path = out_dir / "hf_631gs_frag4.qubitop"
        op_path.write_text(serialize(qubit_op))
        write_fcidump(out_dir / "hf_631gs_frag4.fcidump", h_eff, g_act,
                      e_core, 2 * len(active_occ), 0)
        n_qubits = 2 * len(active)
        meta.update({
            "fci_energy": e_fci,
            "active_mos": active,
            "frozen_mos": frozen,
            "n_qubits": n_qubits,
            "reference_qubits": sorted(
                [2 * i for i in range(na_act)] + [2 * i + 1 for i in range(nb_act)]),
            "files": ["hf_631gs_frag4.qubitop", "hf_631gs_frag4.fcidump"],
        })
        meta_path = out_dir / "hf_631gs_frag4.meta.json"
    else:
        e_fci = fci_ground_energy(h_mo, eri_mo, e_nuc, na, nb)
        e_det = determinant_energy(h_mo, eri_mo, e_nuc, na, nb)
        if abs(e_det - e_scf) > 1e-8:
            raise RuntimeError(
                f"determinant energy {e_det:.10f} vs SCF {e_scf:.10f}")
        stem = {"h2": "h2_sto3g", "h3": "h3_sto3g",
                "h4": "h4_trapezoid_sto3g"}[name]
        write_fcidump(out_dir / f"{stem}.fcidump", h_mo, eri_mo, e_nuc,
                      na + nb, na - nb)
        meta.update({
            "fci_energy": e_fci,
            "n_qubits": 2 * h_mo.shape[0],
            "files": [f"{stem}.fcidump"],
        })
        meta_path = out_dir / f"{stem}.meta.json"

    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return meta


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--molecule", required=True,
                        choices=sorted(MOLECULES) + ["all"])
    parser.add_argument("--out", required=True, type=Path)
    args = parser.parse_args(argv)
    names = sorted(MOLECULES) if args.molecule == "all" else [args.molecule]
    for name in names:
        meta = generate(name, args.out)
        print(f"{name}: SCF {meta['scf_energy']:.10f}  "
              f"FCI {meta['fci_energy']:.10f}  -> {meta['files']}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
