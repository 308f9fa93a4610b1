"""Molecular-integral ingestion and second-quantized Hamiltonian assembly.

FCIDUMP files carry spatial-orbital integrals in chemists' notation with
1-based indices; spin orbitals are interleaved downstream
(alpha = 2p, beta = 2p+1), which fixes the reference-determinant bit
patterns used by the mappings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from .pauli import QubitOperator, dumps, loads


class FcidumpParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"FCIDUMP line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class MolecularIntegrals:
    """Spatial-orbital integrals: h_pq and chemists' (pq|rs) with 8-fold symmetry."""

    n_spatial_orbitals: int
    n_electrons: int
    ms2: int
    core_energy: float
    one_body: np.ndarray
    two_body: np.ndarray

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial_orbitals

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_electrons - self.ms2) // 2


# term key: tuple of (spin-orbital index, is_creation) applied left to right
LadderTerm = Tuple[Tuple[int, bool], ...]


@dataclass
class FermionOperator:
    """Sparse sum of ladder-operator products."""

    terms: Dict[LadderTerm, complex] = field(default_factory=dict)

    def add(self, term: LadderTerm, coeff: complex):
        if coeff == 0:
            return
        self.terms[term] = self.terms.get(term, 0) + coeff

    def max_index(self) -> int:
        return max((op[0] for term in self.terms for op in term), default=-1)

    def hermitian_conjugate(self) -> "FermionOperator":
        out = FermionOperator()
        for term, coeff in self.terms.items():
            conj = tuple((idx, not create) for idx, create in reversed(term))
            out.add(conj, coeff.conjugate())
        return out


def _parse_header(lines: List[str]):
    """Collect the namelist between &FCI and &END (or /)."""
    header_text = []
    body_start = None
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        header_text.append(stripped)
        if stripped.endswith("/") or stripped.upper().endswith("&END"):
            body_start = line_no
            break
    if body_start is None:
        raise FcidumpParseError("missing namelist terminator", len(lines))
    blob = " ".join(header_text)
    blob = blob.replace("&END", " ").replace("&end", " ").rstrip("/ ")
    if "&FCI" not in blob.upper():
        raise FcidumpParseError("missing &FCI namelist", 1)
    blob = blob[blob.upper().index("&FCI") + 4:]
    fields = {}
    for chunk in blob.replace(",", " , ").split(","):
        chunk = chunk.strip()
        if "=" not in chunk:
            continue
        key, _, value = chunk.partition("=")
        key = key.strip().upper()
        value = value.strip().split()[0] if value.strip() else ""
        if key in ("NORB", "NELEC", "MS2"):
            try:
                fields[key] = int(value)
            except ValueError:
                raise FcidumpParseError(f"bad integer for {key}", 1) from None
    for required in ("NORB", "NELEC"):
        if required not in fields:
            raise FcidumpParseError(f"header missing {required}", 1)
    fields.setdefault("MS2", 0)
    return fields, body_start


def parse_fcidump(text: str | bytes) -> MolecularIntegrals:
    """Parse an FCIDUMP byte/text stream into symmetric integral tensors."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    lines = text.splitlines()
    fields, body_start = _parse_header(lines)
    n = fields["NORB"]
    if n < 1:
        raise FcidumpParseError("NORB must be positive", 1)
    one_body = np.zeros((n, n))
    two_body = np.zeros((n, n, n, n))
    core = 0.0

    for line_no, line in enumerate(lines[body_start:], start=body_start + 1):
        stripped = line.strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 5:
            raise FcidumpParseError("expected 'value i j k l'", line_no)
        try:
            value = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpParseError("non-numeric entry", line_no) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n:
                raise FcidumpParseError(f"orbital index {idx} out of range",
                                        line_no)
        if i == j == k == l == 0:
            core = value
        elif k == 0 and l == 0:
            if j == 0:
                continue  # orbital energy record, ignored
            one_body[i - 1, j - 1] = value
            one_body[j - 1, i - 1] = value
        elif i and j and k and l:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            for a, b, c, d in ((p, q, r, s), (q, p, r, s),
                               (p, q, s, r), (q, p, s, r),
                               (r, s, p, q), (s, r, p, q),
                               (r, s, q, p), (s, r, q, p)):
                two_body[a, b, c, d] = value
        else:
            raise FcidumpParseError("mixed zero/nonzero index pattern", line_no)

    return MolecularIntegrals(n, fields["NELEC"], fields["MS2"], core,
                              one_body, two_body)


def build_second_quantized(m: MolecularIntegrals, tol: float = 1e-14
                           ) -> FermionOperator:
    """E_core + sum h_pq a†_p a_q + 1/2 sum (pq|rs) a†_p a†_r a_s a_q.

    Spatial indices are expanded over interleaved spin orbitals; terms
    whose ladder product vanishes identically (repeated creation or
    annihilation index) are skipped.
    """
    n = m.n_spatial_orbitals
    op = FermionOperator()
    if m.core_energy != 0.0:
        op.add((), complex(m.core_energy))
    for p in range(n):
        for q in range(n):
            val = m.one_body[p, q]
            if abs(val) <= tol:
                continue
            for spin in (0, 1):
                op.add(((2 * p + spin, True), (2 * q + spin, False)),
                       complex(val))
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s in range(n):
                    val = m.two_body[p, q, r, s]
                    if abs(val) <= tol:
                        continue
                    for sp in (0, 1):
                        for sr in (0, 1):
                            i, j = 2 * p + sp, 2 * r + sr
                            k, l = 2 * s + sr, 2 * q + sp
                            if i == j or k == l:
                                continue
                            op.add(((i, True), (j, True),
                                    (k, False), (l, False)),
                                   complex(0.5 * val))
    return op


def hartree_fock_occupation(m: MolecularIntegrals) -> List[int]:
    """Aufbau spin-orbital occupation bits (interleaved ordering)."""
    bits = [0] * m.n_spin_orbitals
    for p in range(m.n_alpha):
        bits[2 * p] = 1
    for p in range(m.n_beta):
        bits[2 * p + 1] = 1
    return bits


def load_qubit_hamiltonian(text: str | bytes,
                           n_qubits: int | None = None) -> QubitOperator:
    """Parse the one-term-per-line text format from pauli_core."""
    if isinstance(text, bytes):
        text = text.decode("ascii")
    return loads(text, n_qubits=n_qubits)


def save_qubit_hamiltonian(H: QubitOperator) -> str:
    return dumps(H)
