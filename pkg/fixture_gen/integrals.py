"""McMurchie-Davidson Gaussian integrals over contracted cartesian shells.

Produces overlap, kinetic, nuclear-attraction and two-electron integral
tensors good enough for the tiny bases shipped as fixtures. Two-electron
integrals are returned in chemists' notation (pq|rs) with full 8-fold
symmetry by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.special import hyp1f1

from basis_data import (
    ATOMIC_NUMBER,
    BOHR_PER_ANGSTROM,
    CARTESIAN_COMPONENTS,
)


@dataclass
class BasisFunction:
    """One contracted cartesian Gaussian: sum_k c_k N_k x^l y^m z^n e^{-a_k r^2}."""

    center: np.ndarray
    lmn: Tuple[int, int, int]
    exps: List[float]
    coefs: List[float]  # includes primitive and contraction normalization


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _primitive_norm(a: float, lmn) -> float:
    l, m, n = lmn
    num = (2 * a / math.pi) ** 1.5 * (4 * a) ** (l + m + n)
    den = (_double_factorial(2 * l - 1)
           * _double_factorial(2 * m - 1)
           * _double_factorial(2 * n - 1))
    return math.sqrt(num / den)


def build_basis(atoms, basis_table) -> List[BasisFunction]:
    """atoms: [(symbol, xyz_angstrom)]; returns contraction-normalized functions."""
    functions = []
    for symbol, xyz in atoms:
        center = np.asarray(xyz, dtype=float) * BOHR_PER_ANGSTROM
        for letter, primitives in basis_table[symbol]:
            for lmn in CARTESIAN_COMPONENTS[letter]:
                exps = [a for a, _ in primitives]
                coefs = [c * _primitive_norm(a, lmn) for a, c in primitives]
                bf = BasisFunction(center, lmn, exps, coefs)
                self_overlap = _contracted_overlap(bf, bf)
                scale = 1.0 / math.sqrt(self_overlap)
                bf.coefs = [c * scale for c in bf.coefs]
                functions.append(bf)
    return functions


def boys(n: int, t: float) -> float:
    return hyp1f1(n + 0.5, n + 1.5, -t) / (2 * n + 1)


@lru_cache(maxsize=None)
def _hermite_e(i: int, j: int, t: int, qx: float, a: float, b: float) -> float:
    """Hermite expansion coefficient E_t^{ij} for a primitive pair."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * qx * qx)
    if j == 0:
        return (_hermite_e(i - 1, j, t - 1, qx, a, b) / (2 * p)
                - q * qx / a * _hermite_e(i - 1, j, t, qx, a, b)
                + (t + 1) * _hermite_e(i - 1, j, t + 1, qx, a, b))
    return (_hermite_e(i, j - 1, t - 1, qx, a, b) / (2 * p)
            + q * qx / b * _hermite_e(i, j - 1, t, qx, a, b)
            + (t + 1) * _hermite_e(i, j - 1, t + 1, qx, a, b))


def _primitive_overlap(a, lmn1, ra, b, lmn2, rb) -> float:
    p = a + b
    s = 1.0
    for k in range(3):
        s *= _hermite_e(lmn1[k], lmn2[k], 0, ra[k] - rb[k], a, b)
    return s * (math.pi / p) ** 1.5


def _contracted_overlap(f1: BasisFunction, f2: BasisFunction) -> float:
    total = 0.0
    for a, ca in zip(f1.exps, f1.coefs):
        for b, cb in zip(f2.exps, f2.coefs):
            total += ca * cb * _primitive_overlap(a, f1.lmn, f1.center,
                                                  b, f2.lmn, f2.center)
    return total


def _primitive_kinetic(a, lmn1, ra, b, lmn2, rb) -> float:
    l2, m2, n2 = lmn2

    def s(dl, dm, dn):
        lmn = (l2 + dl, m2 + dm, n2 + dn)
        if min(lmn) < 0:
            return 0.0
        return _primitive_overlap(a, lmn1, ra, b, lmn, rb)

    term0 = b * (2 * (l2 + m2 + n2) + 3) * s(0, 0, 0)
    term1 = -2 * b * b * (s(2, 0, 0) + s(0, 2, 0) + s(0, 0, 2))
    term2 = -0.5 * (l2 * (l2 - 1) * s(-2, 0, 0)
                    + m2 * (m2 - 1) * s(0, -2, 0)
                    + n2 * (n2 - 1) * s(0, 0, -2))
    return term0 + term1 + term2


def _hermite_coulomb(t, u, v, n, p, dx, dy, dz, r2) -> float:
    if t == u == v == 0:
        return (-2.0 * p) ** n * boys(n, p * r2)
    if t > 0:
        val = dx * _hermite_coulomb(t - 1, u, v, n + 1, p, dx, dy, dz, r2)
        if t > 1:
            val += (t - 1) * _hermite_coulomb(t - 2, u, v, n + 1, p, dx, dy, dz, r2)
        return val
    if u > 0:
        val = dy * _hermite_coulomb(t, u - 1, v, n + 1, p, dx, dy, dz, r2)
        if u > 1:
            val += (u - 1) * _hermite_coulomb(t, u - 2, v, n + 1, p, dx, dy, dz, r2)
        return val
    val = dz * _hermite_coulomb(t, u, v - 1, n + 1, p, dx, dy, dz, r2)
    if v > 1:
        val += (v - 1) * _hermite_coulomb(t, u, v - 2, n + 1, p, dx, dy, dz, r2)
    return val


def _primitive_nuclear(a, lmn1, ra, b, lmn2, rb, rc) -> float:
    p = a + b
    rp = (a * ra + b * rb) / p
    d = rp - rc
    r2 = float(d @ d)
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        ex = _hermite_e(lmn1[0], lmn2[0], t, ra[0] - rb[0], a, b)
        if ex == 0.0:
            continue
        for u in range(lmn1[1] + lmn2[1] + 1):
            ey = _hermite_e(lmn1[1], lmn2[1], u, ra[1] - rb[1], a, b)
            if ey == 0.0:
                continue
            for v in range(lmn1[2] + lmn2[2] + 1):
                ez = _hermite_e(lmn1[2], lmn2[2], v, ra[2] - rb[2], a, b)
                if ez == 0.0:
                    continue
                val += ex * ey * ez * _hermite_coulomb(
                    t, u, v, 0, p, d[0], d[1], d[2], r2)
    return 2 * math.pi / p * val


def _primitive_eri(a, lmn1, ra, b, lmn2, rb, c, lmn3, rc, d, lmn4, rd) -> float:
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    rp = (a * ra + b * rb) / p
    rq = (c * rc + d * rd) / q
    dd = rp - rq
    r2 = float(dd @ dd)

    def e_list(l1, l2, x1, x2, e1, e2):
        return [_hermite_e(l1, l2, t, x1 - x2, e1, e2)
                for t in range(l1 + l2 + 1)]

    ex1 = e_list(lmn1[0], lmn2[0], ra[0], rb[0], a, b)
    ey1 = e_list(lmn1[1], lmn2[1], ra[1], rb[1], a, b)
    ez1 = e_list(lmn1[2], lmn2[2], ra[2], rb[2], a, b)
    ex2 = e_list(lmn3[0], lmn4[0], rc[0], rd[0], c, d)
    ey2 = e_list(lmn3[1], lmn4[1], rc[1], rd[1], c, d)
    ez2 = e_list(lmn3[2], lmn4[2], rc[2], rd[2], c, d)

    val = 0.0
    for t, e1 in enumerate(ex1):
        if e1 == 0.0:
            continue
        for u, e2 in enumerate(ey1):
            if e2 == 0.0:
                continue
            for v, e3 in enumerate(ez1):
                if e3 == 0.0:
                    continue
                for tau, f1 in enumerate(ex2):
                    if f1 == 0.0:
                        continue
                    for nu, f2 in enumerate(ey2):
                        if f2 == 0.0:
                            continue
                        for phi, f3 in enumerate(ez2):
                            if f3 == 0.0:
                                continue
                            sign = -1.0 if (tau + nu + phi) % 2 else 1.0
                            val += (e1 * e2 * e3 * f1 * f2 * f3 * sign
                                    * _hermite_coulomb(t + tau, u + nu, v + phi,
                                                       0, alpha,
                                                       dd[0], dd[1], dd[2], r2))
    return val * 2 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def _contract(func, f1, f2, *rest):
    total = 0.0
    for a, ca in zip(f1.exps, f1.coefs):
        for b, cb in zip(f2.exps, f2.coefs):
            total += ca * cb * func(a, f1.lmn, f1.center, b, f2.lmn, f2.center,
                                    *rest)
    return total


def overlap_matrix(basis) -> np.ndarray:
    n = len(basis)
    s = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            s[i, j] = s[j, i] = _contracted_overlap(basis[i], basis[j])
    return s


def kinetic_matrix(basis) -> np.ndarray:
    n = len(basis)
    t = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            t[i, j] = t[j, i] = _contract(_primitive_kinetic, basis[i], basis[j])
    return t


def nuclear_matrix(basis, atoms) -> np.ndarray:
    n = len(basis)
    v = np.zeros((n, n))
    centers = [(ATOMIC_NUMBER[sym], np.asarray(xyz) * BOHR_PER_ANGSTROM)
               for sym, xyz in atoms]
    for i in range(n):
        for j in range(i + 1):
            val = 0.0
            for charge, rc in centers:
                val -= charge * _contract(_primitive_nuclear,
                                          basis[i], basis[j], rc)
            v[i, j] = v[j, i] = val
    return v


def eri_tensor(basis) -> np.ndarray:
    """(pq|rs) over all contracted functions, filled through 8-fold symmetry."""
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                l_top = j if k == i else k
                for l in range(l_top + 1):
                    val = 0.0
                    for a, ca in zip(basis[i].exps, basis[i].coefs):
                        for b, cb in zip(basis[j].exps, basis[j].coefs):
                            for c, cc in zip(basis[k].exps, basis[k].coefs):
                                for d, cd in zip(basis[l].exps, basis[l].coefs):
                                    val += ca * cb * cc * cd * _primitive_eri(
                                        a, basis[i].lmn, basis[i].center,
                                        b, basis[j].lmn, basis[j].center,
                                        c, basis[k].lmn, basis[k].center,
                                        d, basis[l].lmn, basis[l].center)
                    for p, q, r, s in ((i, j, k, l), (j, i, k, l),
                                       (i, j, l, k), (j, i, l, k),
                                       (k, l, i, j), (l, k, i, j),
                                       (k, l, j, i), (l, k, j, i)):
                        eri[p, q, r, s] = val
    return eri


def nuclear_repulsion(atoms) -> float:
    centers = [(ATOMIC_NUMBER[sym], np.asarray(xyz) * BOHR_PER_ANGSTROM)
               for sym, xyz in atoms]
    e = 0.0
    for i in range(len(centers)):
        for j in range(i):
            zi, ri = centers[i]
            zj, rj = centers[j]
            e += zi * zj / np.linalg.norm(ri - rj)
    return e
