"""Minimal Jordan-Wigner mapper with a letter-tuple Pauli representation.

Deliberately written without bit masks so the fixture qubit operators
come from a representation unrelated to the main engine's symplectic
one. Spin orbitals are interleaved (alpha = 2p, beta = 2p+1) and qubit k
hosts spin orbital k.
"""

from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

PauliString = Tuple[str, ...]

_SINGLE = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("Y", "I"): (1, "Y"), ("Z", "I"): (1, "Z"),
    ("X", "X"): (1, "I"), ("Y", "Y"): (1, "I"), ("Z", "Z"): (1, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


class PauliSum:
    def __init__(self, n_qubits: int, terms: Dict[PauliString, complex] | None = None):
        self.n = n_qubits
        self.terms = dict(terms or {})

    @classmethod
    def constant(cls, n_qubits, value):
        return cls(n_qubits, {("I",) * n_qubits: value})

    def add(self, other: "PauliSum"):
        for string, coeff in other.terms.items():
            self.terms[string] = self.terms.get(string, 0) + coeff
        return self

    def __mul__(self, other: "PauliSum") -> "PauliSum":
        out: Dict[PauliString, complex] = {}
        for s1, c1 in self.terms.items():
            for s2, c2 in other.terms.items():
                phase = c1 * c2
                letters = []
                for a, b in zip(s1, s2):
                    f, letter = _SINGLE[(a, b)]
                    phase *= f
                    letters.append(letter)
                key = tuple(letters)
                out[key] = out.get(key, 0) + phase
        return PauliSum(self.n, out)

    def scaled(self, factor):
        return PauliSum(self.n, {s: c * factor for s, c in self.terms.items()})

    def cleaned(self, tol=1e-12):
        return PauliSum(self.n, {s: c for s, c in self.terms.items()
                                 if abs(c) > tol})


def _ladder(n_qubits: int, p: int, dagger: bool) -> PauliSum:
    """a†_p (dagger) or a_p as (X -+ iY)/2 behind a Z string on 0..p-1."""
    sign = -1j if dagger else 1j
    terms: Dict[PauliString, complex] = {}
    for letter, coeff in (("X", 0.5), ("Y", sign * 0.5)):
        string = ["I"] * n_qubits
        for k in range(p):
            string[k] = "Z"
        string[p] = letter
        terms[tuple(string)] = coeff
    return PauliSum(n_qubits, terms)


def jordan_wigner_hamiltonian(h_mo: np.ndarray, eri_mo: np.ndarray,
                              e_core: float, tol=1e-12) -> PauliSum:
    """Qubit operator of E_core + sum h a†a + 1/2 sum (pq|rs) a†a†aa."""
    n_spatial = h_mo.shape[0]
    n_qubits = 2 * n_spatial
    total = PauliSum.constant(n_qubits, complex(e_core))
    ladders: Dict[Tuple[int, bool], PauliSum] = {}

    def ladder(idx, dagger):
        key = (idx, dagger)
        if key not in ladders:
            ladders[key] = _ladder(n_qubits, idx, dagger)
        return ladders[key]

    for p in range(n_spatial):
        for q in range(n_spatial):
            if abs(h_mo[p, q]) <= tol:
                continue
            for spin in (0, 1):
                term = ladder(2 * p + spin, True) * ladder(2 * q + spin, False)
                total.add(term.scaled(h_mo[p, q]))
    for p in range(n_spatial):
        for q in range(n_spatial):
            for r in range(n_spatial):
                for s in range(n_spatial):
                    val = eri_mo[p, q, r, s]
                    if abs(val) <= tol:
                        continue
                    for sp in (0, 1):
                        for sr in (0, 1):
                            i, j = 2 * p + sp, 2 * r + sr
                            k, l = 2 * s + sr, 2 * q + sp
                            if i == j or k == l:
                                continue
                            term = (ladder(i, True) * ladder(j, True)
                                    * ladder(k, False) * ladder(l, False))
                            total.add(term.scaled(0.5 * val))
    return total.cleaned(tol)


def serialize(op: PauliSum) -> str:
    """Text form used by the engine: one '(re,im) <letters>' line per term."""
    lines = []
    for string in sorted(op.terms, key=lambda s: tuple("IXYZ".index(ch) for ch in s)):
        coeff = op.terms[string]
        ops = " ".join(f"{letter}{q}" for q, letter in enumerate(string)
                       if letter != "I") or "I"
        lines.append(f"({coeff.real!r},{coeff.imag!r}) {ops}")
    return "\n".join(lines) + "\n"
