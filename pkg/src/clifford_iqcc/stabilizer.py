"""Tableau-based stabilizer simulator and Clifford compilation of Pauli rotations.

The tableau keeps 2N rows of (x_mask, z_mask, sign): rows 0..N-1 are
destabilizers, rows N..2N-1 stabilizers, in the usual CHP arrangement.
Masks are packed into uint64 scalars (one per row), so gate updates are
a handful of vector operations and Pauli expectations reduce to popcount
parities. Global phase is not tracked; relative phases between branch
states are recovered by the ancilla construction in the interior
optimizer, never from the tableau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .pauli import DimensionError, PauliWord, QubitOperator

HALF_PI = math.pi / 2

Gate = Tuple  # ("H", q) | ("S", q) | ("SDG", q) | ("X"|"Y"|"Z", q)
# | ("CNOT", c, t) | ("CP", c, PauliWord)

_GATES_1Q = {"H", "S", "SDG", "X", "Y", "Z"}


class NonHermitianError(ValueError):
    """Expectation value of a supposedly Hermitian operator came out complex."""


@dataclass
class CliffordCircuit:
    """Ordered Clifford gate list over a fixed register."""

    n_qubits: int
    gates: List[Gate] = field(default_factory=list)

    def add(self, *gate):
        name = gate[0]
        if name in _GATES_1Q:
            (q,) = gate[1:]
            self._check(q)
        elif name == "CNOT":
            c, t = gate[1:]
            self._check(c)
            self._check(t)
            if c == t:
                raise ValueError("CNOT control equals target")
        elif name == "CP":
            c, word = gate[1:]
            self._check(c)
            if word.n_qubits != self.n_qubits:
                raise DimensionError("controlled word size mismatch")
            if (word.x_mask | word.z_mask) >> c & 1:
                raise ValueError("control qubit inside controlled word support")
        else:
            raise ValueError(f"unknown gate {name!r}")
        self.gates.append(tuple(gate))

    def _check(self, q):
        if not 0 <= q < self.n_qubits:
            raise ValueError(f"qubit {q} out of range")

    def extend(self, other: "CliffordCircuit"):
        for gate in other.gates:
            self.gates.append(gate)

    def dump(self) -> str:
        """One gate per line: 'H 0', 'CNOT 0 1', 'CP 2 X0Z3'."""
        lines = []
        for gate in self.gates:
            if gate[0] == "CP":
                lines.append(f"CP {gate[1]} {gate[2].to_compact() or 'I'}")
            else:
                lines.append(" ".join(str(g) for g in gate))
        return "\n".join(lines) + ("\n" if lines else "")


class StabilizerState:
    """Stabilizer tableau of a Clifford-reachable N-qubit state.

    Mutable; one evaluation owns one instance. Candidate evaluations
    clone the shared reference tableau with copy() and run independently.
    """

    __slots__ = ("n_qubits", "x", "z", "r")

    def __init__(self, n_qubits: int):
        if not 1 <= n_qubits <= 64:
            raise ValueError("supported register size is 1..64 qubits")
        self.n_qubits = n_qubits
        # |0..0>: destabilizer i = X_i, stabilizer i = Z_i
        bits = np.left_shift(np.uint64(1), np.arange(n_qubits, dtype=np.uint64))
        self.x = np.concatenate([bits, np.zeros(n_qubits, dtype=np.uint64)])
        self.z = np.concatenate([np.zeros(n_qubits, dtype=np.uint64), bits])
        self.r = np.zeros(2 * n_qubits, dtype=np.uint8)

    def copy(self) -> "StabilizerState":
        out = StabilizerState.__new__(StabilizerState)
        out.n_qubits = self.n_qubits
        out.x = self.x.copy()
        out.z = self.z.copy()
        out.r = self.r.copy()
        return out

    # -- gate updates (conjugation rules in the canonical-Y convention) --------

    def _bit(self, arr, q):
        return (arr >> np.uint64(q)) & np.uint64(1)

    def _h(self, q):
        xb = self._bit(self.x, q)
        zb = self._bit(self.z, q)
        self.r ^= (xb & zb).astype(np.uint8)
        flip = (xb ^ zb) << np.uint64(q)
        self.x ^= flip
        self.z ^= flip

    def _s(self, q):
        xb = self._bit(self.x, q)
        zb = self._bit(self.z, q)
        self.r ^= (xb & zb).astype(np.uint8)
        self.z ^= xb << np.uint64(q)

    def _sdg(self, q):
        xb = self._bit(self.x, q)
        zb = self._bit(self.z, q)
        self.r ^= (xb & ~zb & np.uint64(1)).astype(np.uint8)
        self.z ^= xb << np.uint64(q)

    def _x(self, q):
        self.r ^= self._bit(self.z, q).astype(np.uint8)

    def _z(self, q):
        self.r ^= self._bit(self.x, q).astype(np.uint8)

    def _y(self, q):
        self.r ^= (self._bit(self.x, q) ^ self._bit(self.z, q)).astype(np.uint8)

    def _cnot(self, c, t):
        xc = self._bit(self.x, c)
        zc = self._bit(self.z, c)
        xt = self._bit(self.x, t)
        zt = self._bit(self.z, t)
        self.r ^= (xc & zt & (xt ^ zc ^ np.uint64(1))).astype(np.uint8)
        self.x ^= xc << np.uint64(t)
        self.z ^= zt << np.uint64(c)

    def _cpauli(self, c, word: PauliWord):
        # C(P) = prod over support of controlled single Paulis, then a
        # phase gate on the control for the word's scalar phase.
        for q in word.support():
            letter = word.letter(q)
            if letter == "X":
                self._cnot(c, q)
            elif letter == "Z":
                self._h(q)
                self._cnot(c, q)
                self._h(q)
            else:  # Y
                self._sdg(q)
                self._cnot(c, q)
                self._s(q)
        k = word.phase_exp
        if k == 1:  # diag(1, i) on control
            self._s(c)
        elif k == 2:
            self._z(c)
        elif k == 3:
            self._sdg(c)

    def apply_gate(self, gate: Gate):
        name = gate[0]
        if name == "H":
            self._h(gate[1])
        elif name == "S":
            self._s(gate[1])
        elif name == "SDG":
            self._sdg(gate[1])
        elif name == "X":
            self._x(gate[1])
        elif name == "Y":
            self._y(gate[1])
        elif name == "Z":
            self._z(gate[1])
        elif name == "CNOT":
            self._cnot(gate[1], gate[2])
        elif name == "CP":
            self._cpauli(gate[1], gate[2])
        else:
            raise ValueError(f"unknown gate {name!r}")
        return self

    def run(self, circuit: CliffordCircuit) -> "StabilizerState":
        if circuit.n_qubits != self.n_qubits:
            raise DimensionError("circuit register size mismatch")
        for gate in circuit.gates:
            self.apply_gate(gate)
        return self

    # -- expectation values -----------------------------------------------------

    def expectations(self, xs: np.ndarray, zs: np.ndarray) -> np.ndarray:
        """Exact expectations of canonical words given as mask arrays.

        Returns an int8 array in {-1, 0, +1}. A word anticommuting with
        any stabilizer generator has expectation 0; otherwise the word is
        a signed product of generators picked out by its anticommutation
        pattern with the destabilizers, and the sign is accumulated with
        exact mod-4 phase arithmetic.
        """
        n = self.n_qubits
        sx, sz = self.x[n:], self.z[n:]
        dx, dz = self.x[:n], self.z[:n]
        srows = np.arange(n)

        anti = (np.bitwise_count(xs[:, None] & sz[None, :])
                ^ np.bitwise_count(zs[:, None] & sx[None, :])) & 1
        alive = ~(anti.any(axis=1))
        result = np.zeros(len(xs), dtype=np.int8)
        if not alive.any():
            return result

        ax = xs[alive]
        az = zs[alive]
        sel = ((np.bitwise_count(ax[:, None] & dz[None, :])
                ^ np.bitwise_count(az[:, None] & dx[None, :])) & 1).astype(bool)

        acc_x = np.zeros(len(ax), dtype=np.uint64)
        acc_z = np.zeros(len(ax), dtype=np.uint64)
        # phase exponent of i, mod 4, including row signs (2 per minus)
        acc_k = np.zeros(len(ax), dtype=np.int64)
        for i in srows:
            pick = sel[:, i]
            if not pick.any():
                continue
            bx, bz = sx[i], sz[i]
            pax, paz = acc_x[pick], acc_z[pick]
            delta = (np.bitwise_count(pax & paz).astype(np.int64)
                     + int(bx & bz).bit_count()
                     - np.bitwise_count((pax ^ bx) & (paz ^ bz)).astype(np.int64)
                     + 2 * np.bitwise_count(paz & bx).astype(np.int64)
                     + 2 * int(self.r[self.n_qubits + i]))
            acc_k[pick] += delta
            acc_x[pick] = pax ^ bx
            acc_z[pick] = paz ^ bz

        if not (np.array_equal(acc_x, ax) and np.array_equal(acc_z, az)):
            raise AssertionError("stabilizer decomposition failed")
        k = acc_k & 3
        if (k & 1).any():
            raise AssertionError("non-real stabilizer product sign")
        result[alive] = np.where(k == 0, 1, -1).astype(np.int8)
        return result


def apply(state: StabilizerState, gate: Gate) -> StabilizerState:
    """Conjugate the tableau by one gate (in place; returns the state)."""
    return state.apply_gate(gate)


def expectation_pauli(state: StabilizerState, p: PauliWord) -> int:
    """Exact <p> on a stabilizer state; always one of -1, 0, +1."""
    if p.n_qubits != state.n_qubits:
        raise DimensionError("word size mismatch")
    if p.phase_exp % 2:
        raise ValueError("expectation of a non-Hermitian word (phase +-i)")
    sign = -1 if p.phase_exp == 2 else 1
    val = state.expectations(np.array([p.x_mask], dtype=np.uint64),
                             np.array([p.z_mask], dtype=np.uint64))[0]
    return sign * int(val)


def expectation_operator(state: StabilizerState, H: QubitOperator,
                         imag_tol: float = 1e-9) -> float:
    """<H> as sum of coefficient-weighted word expectations."""
    if H.n_qubits != state.n_qubits:
        raise DimensionError("operator size mismatch")
    xs, zs, coeffs = H.mask_arrays()
    if len(xs) == 0:
        return 0.0
    vals = state.expectations(xs, zs)
    total = complex(np.dot(coeffs, vals))
    if abs(total.imag) > imag_tol:
        raise NonHermitianError(
            f"imaginary expectation residue {total.imag:.3e}")
    return total.real


def prepare(circuit: CliffordCircuit) -> StabilizerState:
    """|0..0> evolved through the circuit."""
    return StabilizerState(circuit.n_qubits).run(circuit)


def _rz(circuit: CliffordCircuit, q: int, positive: bool):
    # Rz(pi/2) = H Sdg H Sdg H, Rz(-pi/2) = H S H S H (up to global phase)
    step = "SDG" if positive else "S"
    circuit.add("H", q)
    circuit.add(step, q)
    circuit.add("H", q)
    circuit.add(step, q)
    circuit.add("H", q)


def _rx(circuit: CliffordCircuit, q: int, positive: bool):
    # Rx(pi/2) = Sdg H Sdg, Rx(-pi/2) = S H S
    step = "SDG" if positive else "S"
    circuit.add(step, q)
    circuit.add("H", q)
    circuit.add(step, q)


def compile_exponential(p: PauliWord, angle: float) -> CliffordCircuit:
    """Clifford circuit for exp(-i*angle*p/2), angle in {+pi/2, -pi/2}.

    Basis-change layer (H for X, Rx(pi/2) for Y), CNOT ladder onto the
    last support qubit, central Rz realized as H/S sequences, mirrored
    un-compute. A word with phase -1 flips the sign of the angle; words
    with phase +-i are not Hermitian and are rejected.
    """
    if p.is_identity():
        raise ValueError("cannot exponentiate the identity word")
    if p.phase_exp % 2:
        raise ValueError("word phase must be +1 or -1")
    if not math.isclose(abs(angle), HALF_PI, rel_tol=0, abs_tol=1e-12):
        raise ValueError("only +-pi/2 rotations compile to Clifford gates")
    positive = (angle > 0) != (p.phase_exp == 2)

    circuit = CliffordCircuit(p.n_qubits)
    support = p.support()
    for q in support:
        letter = p.letter(q)
        if letter == "X":
            circuit.add("H", q)
        elif letter == "Y":
            _rx(circuit, q, positive=True)
    for a, b in zip(support, support[1:]):
        circuit.add("CNOT", a, b)
    _rz(circuit, support[-1], positive)
    for a, b in reversed(list(zip(support, support[1:]))):
        circuit.add("CNOT", a, b)
    for q in reversed(support):
        letter = p.letter(q)
        if letter == "X":
            circuit.add("H", q)
        elif letter == "Y":
            _rx(circuit, q, positive=False)
    return circuit
