"""Determinant-basis full CI for tiny active spaces.

Determinants are bitstrings over interleaved spin orbitals
(alpha = 2p, beta = 2p+1). The Hamiltonian is applied directly in second
quantization with explicit fermionic parities, so this route shares no
code with any qubit-mapping machinery and serves as an independent
cross-check of mapped spectra.
"""

from __future__ import annotations

import itertools
from typing import Dict, List

import numpy as np


def _parity(det: int, below: int) -> int:
    """+1/-1 for the number of occupied spin orbitals below index `below`."""
    mask = (1 << below) - 1
    return -1 if (det & mask).bit_count() % 2 else 1


def _annihilate(det: int, p: int):
    if not (det >> p) & 1:
        return None
    return det ^ (1 << p), _parity(det, p)


def _create(det: int, p: int):
    if (det >> p) & 1:
        return None
    return det ^ (1 << p), _parity(det, p)


def _sector(n_spatial: int, n_alpha: int, n_beta: int) -> List[int]:
    dets = []
    for alpha in itertools.combinations(range(n_spatial), n_alpha):
        for beta in itertools.combinations(range(n_spatial), n_beta):
            det = 0
            for p in alpha:
                det |= 1 << (2 * p)
            for p in beta:
                det |= 1 << (2 * p + 1)
            dets.append(det)
    return sorted(dets)


def _spin_orbital_terms(h_mo: np.ndarray, eri_mo: np.ndarray, tol=1e-14):
    """Expand spatial integrals into a†_i a_j and a†_i a†_j a_k a_l terms."""
    n = h_mo.shape[0]
    one_body = []
    for p in range(n):
        for q in range(n):
            if abs(h_mo[p, q]) > tol:
                for spin in (0, 1):
                    one_body.append((2 * p + spin, 2 * q + spin, h_mo[p, q]))
    two_body = []
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    val = eri_mo[p, q, r, s]
                    if abs(val) <= tol:
                        continue
                    for sp in (0, 1):
                        for sr in (0, 1):
                            i = 2 * p + sp
                            j = 2 * r + sr
                            k = 2 * s + sr
                            l = 2 * q + sp
                            if i == j or k == l:
                                continue
                            # 1/2 (pq|rs) a†_{p sp} a†_{r sr} a_{s sr} a_{q sp}
                            two_body.append((i, j, k, l, 0.5 * val))
    return one_body, two_body


def fci_ground_energy(h_mo: np.ndarray, eri_mo: np.ndarray, e_core: float,
                      n_alpha: int, n_beta: int) -> float:
    """Lowest eigenvalue of the (n_alpha, n_beta) sector plus the core shift."""
    n = h_mo.shape[0]
    dets = _sector(n, n_alpha, n_beta)
    index = {det: i for i, det in enumerate(dets)}
    dim = len(dets)
    one_body, two_body = _spin_orbital_terms(h_mo, eri_mo)

    mat = np.zeros((dim, dim))
    for col, det in enumerate(dets):
        amplitudes: Dict[int, float] = {}
        for i, j, val in one_body:
            step = _annihilate(det, j)
            if step is None:
                continue
            d1, s1 = step
            step = _create(d1, i)
            if step is None:
                continue
            d2, s2 = step
            amplitudes[d2] = amplitudes.get(d2, 0.0) + val * s1 * s2
        for i, j, k, l, val in two_body:
            step = _annihilate(det, l)
            if step is None:
                continue
            d1, s1 = step
            step = _annihilate(d1, k)
            if step is None:
                continue
            d2, s2 = step
            step = _create(d2, j)
            if step is None:
                continue
            d3, s3 = step
            step = _create(d3, i)
            if step is None:
                continue
            d4, s4 = step
            amplitudes[d4] = amplitudes.get(d4, 0.0) + val * s1 * s2 * s3 * s4
        for target, amp in amplitudes.items():
            row = index.get(target)
            if row is not None:
                mat[row, col] += amp

    vals = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    return float(vals[0]) + e_core


def determinant_energy(h_mo: np.ndarray, eri_mo: np.ndarray, e_core: float,
                       n_alpha: int, n_beta: int) -> float:
    """<D|H|D> for the aufbau determinant (sanity anchor against SCF)."""
    occ_a = list(range(n_alpha))
    occ_b = list(range(n_beta))
    e = e_core
    for i in occ_a + occ_b:
        e += h_mo[i, i]
    for spin_occ in (occ_a, occ_b):
        for i in spin_occ:
            for j in spin_occ:
                e += 0.5 * (eri_mo[i, i, j, j] - eri_mo[i, j, j, i])
    for i in occ_a:
        for j in occ_b:
            e += eri_mo[i, i, j, j]
    return e
