"""Brute-force statevector backend: exact energies, scans, circuit playback.

Everything here is verification infrastructure. Pauli words act on the
2^N amplitude array by bit permutation and sign flips; no dense operator
matrix is ever materialized. Ground-state energies come from an
iterative Krylov (Lanczos-type) solver driven by apply_operator, with an
explicit residual check.
"""

from __future__ import annotations

import math
from typing import List, Sequence

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from .pauli import PauliWord, QubitOperator
from .stabilizer import CliffordCircuit

DEFAULT_QUBIT_CAP = 16

_I_POWERS = (1, 1j, -1, -1j)


class QubitCapError(ValueError):
    """Register too large for dense statevector work."""


def _check_cap(n_qubits: int, cap: int):
    if n_qubits > cap:
        raise QubitCapError(f"{n_qubits} qubits exceeds oracle cap {cap}")


def zero_state(n_qubits: int) -> np.ndarray:
    psi = np.zeros(2 ** n_qubits, dtype=complex)
    psi[0] = 1.0
    return psi


def _parity(values: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(values) & np.uint64(1)).astype(np.int8)


def apply_word(word: PauliWord, psi: np.ndarray) -> np.ndarray:
    """P|psi> via index XOR and (-1)^(b.z) signs; qubit 0 = LSB."""
    n = word.n_qubits
    idx = np.arange(2 ** n, dtype=np.uint64)
    src = idx ^ np.uint64(word.x_mask)
    signs = 1.0 - 2.0 * _parity(src & np.uint64(word.z_mask))
    k = (word.phase_exp + (word.x_mask & word.z_mask).bit_count()) & 3
    return _I_POWERS[k] * signs * psi[src]


def apply_operator(H: QubitOperator, psi: np.ndarray,
                   cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """H|psi> (unnormalized), term by term."""
    _check_cap(H.n_qubits, cap)
    out = np.zeros_like(psi)
    for word, coeff in H:
        out += coeff * apply_word(word, psi)
    return out


def expectation(H: QubitOperator, psi: np.ndarray,
                cap: int = DEFAULT_QUBIT_CAP) -> float:
    val = np.vdot(psi, apply_operator(H, psi, cap=cap))
    return val.real


def ground_energy(H: QubitOperator, cap: int = DEFAULT_QUBIT_CAP,
                  residual_tol: float = 1e-9) -> float:
    """Minimal eigenvalue via Lanczos iteration on the matrix-free operator.

    Falls back to dense diagonalization for tiny registers where the
    Krylov solver cannot run. Raises if the converged residual
    ||H psi - E psi|| exceeds residual_tol.
    """
    _check_cap(H.n_qubits, cap)
    dim = 2 ** H.n_qubits
    if dim <= 4:
        mat = np.zeros((dim, dim), dtype=complex)
        for word, coeff in H:
            for col in range(dim):
                e = np.zeros(dim, dtype=complex)
                e[col] = 1.0
                mat[:, col] += coeff * apply_word(word, e)
        vals = np.linalg.eigvalsh(mat)
        return float(vals[0])

    op = LinearOperator((dim, dim),
                        matvec=lambda v: apply_operator(H, v.astype(complex)),
                        dtype=complex)
    start = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
    vals, vecs = eigsh(op, k=1, which="SA", maxiter=5000, tol=0, v0=start)
    energy = float(vals[0])
    psi = vecs[:, 0]
    residual = np.linalg.norm(apply_operator(H, psi) - energy * psi)
    if residual > residual_tol:
        raise RuntimeError(f"Lanczos residual {residual:.2e} above tolerance")
    return energy


# -- circuit playback -----------------------------------------------------------

_H_FACTOR = 1 / math.sqrt(2)


def _apply_1q(psi: np.ndarray, q: int, mat) -> np.ndarray:
    n_states = psi.size
    step = 1 << q
    out = psi.copy()
    idx = np.arange(n_states)
    lo = idx[(idx >> q) & 1 == 0]
    hi = lo | step
    a, b = psi[lo], psi[hi]
    out[lo] = mat[0][0] * a + mat[0][1] * b
    out[hi] = mat[1][0] * a + mat[1][1] * b
    return out


def apply_gate(psi: np.ndarray, gate) -> np.ndarray:
    name = gate[0]
    if name == "H":
        return _apply_1q(psi, gate[1], ((_H_FACTOR, _H_FACTOR),
                                        (_H_FACTOR, -_H_FACTOR)))
    if name == "S":
        return _apply_1q(psi, gate[1], ((1, 0), (0, 1j)))
    if name == "SDG":
        return _apply_1q(psi, gate[1], ((1, 0), (0, -1j)))
    if name == "X":
        return _apply_1q(psi, gate[1], ((0, 1), (1, 0)))
    if name == "Y":
        return _apply_1q(psi, gate[1], ((0, -1j), (1j, 0)))
    if name == "Z":
        return _apply_1q(psi, gate[1], ((1, 0), (0, -1)))
    if name == "CNOT":
        c, t = gate[1], gate[2]
        idx = np.arange(psi.size)
        permuted = np.where((idx >> c) & 1 == 1, idx ^ (1 << t), idx)
        return psi[permuted]
    if name == "CP":
        c, word = gate[1], gate[2]
        idx = np.arange(psi.size, dtype=np.uint64)
        out = psi.copy()
        hi = idx[(idx >> np.uint64(c)) & np.uint64(1) == 1]
        src = hi ^ np.uint64(word.x_mask)
        signs = 1.0 - 2.0 * _parity(src & np.uint64(word.z_mask))
        k = (word.phase_exp + (word.x_mask & word.z_mask).bit_count()) & 3
        out[hi] = _I_POWERS[k] * signs * psi[src]
        return out
    raise ValueError(f"unknown gate {name!r}")


def apply_circuit(circuit: CliffordCircuit, psi: np.ndarray) -> np.ndarray:
    for gate in circuit.gates:
        psi = apply_gate(psi, gate)
    return psi


def apply_pauli_rotation(word: PauliWord, angle: float,
                         psi: np.ndarray) -> np.ndarray:
    """exp(-i*angle*word/2)|psi>, exact for any angle."""
    return math.cos(angle / 2) * psi \
        - 1j * math.sin(angle / 2) * apply_word(word, psi)


def circuit_unitary(circuit: CliffordCircuit) -> np.ndarray:
    """Dense unitary of a small Clifford circuit (columns = basis images)."""
    dim = 2 ** circuit.n_qubits
    cols = []
    for b in range(dim):
        e = np.zeros(dim, dtype=complex)
        e[b] = 1.0
        cols.append(apply_circuit(circuit, e))
    return np.stack(cols, axis=1)


def equal_up_to_global_phase(u: np.ndarray, v: np.ndarray,
                             atol: float = 1e-12) -> bool:
    flat_u, flat_v = u.ravel(), v.ravel()
    k = np.argmax(np.abs(flat_v))
    if abs(flat_v[k]) < atol:
        return bool(np.allclose(u, v, atol=atol))
    phase = flat_u[k] / flat_v[k]
    if abs(abs(phase) - 1) > 1e-9:
        return False
    return bool(np.allclose(flat_u, phase * flat_v, atol=atol))


def ansatz_state(final, cap: int = DEFAULT_QUBIT_CAP) -> np.ndarray:
    """Statevector of a compiled final circuit (prep + Pauli rotations)."""
    _check_cap(final.prep.n_qubits, cap)
    psi = apply_circuit(final.prep, zero_state(final.prep.n_qubits))
    for word, phi in final.rotations:
        psi = apply_pauli_rotation(word, phi, psi)
    return psi


def ansatz_energy(final, H: QubitOperator, cap: int = DEFAULT_QUBIT_CAP) -> float:
    """<H> of a compiled final circuit, evaluated exactly."""
    return expectation(H, ansatz_state(final, cap=cap), cap=cap)


def energy_scan(prep: CliffordCircuit, word: PauliWord, H: QubitOperator,
                angles: Sequence[float],
                cap: int = DEFAULT_QUBIT_CAP) -> List[float]:
    """<H> over a grid of rotation angles for prep followed by exp(-i*phi*word/2)."""
    _check_cap(H.n_qubits, cap)
    base = apply_circuit(prep, zero_state(prep.n_qubits))
    rotated = apply_word(word, base)
    out = []
    for phi in angles:
        psi = math.cos(phi / 2) * base - 1j * math.sin(phi / 2) * rotated
        out.append(expectation(H, psi, cap=cap))
    return out
