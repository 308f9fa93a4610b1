"""Re-optimization of interior generator angles with Clifford circuits only.

The angle of generator m is re-solved by writing the energy as a triple
sum over tail-operator terms and folded-head terms,

    E(phi) = sum_{q q' j} c_q c*_{q'} h_j <C| P_q' G†(phi) P_j G(phi) P_q |C>,

where the tail operator collects the rotations applied after step m and
the head Hamiltonian folds the rotations applied before it. Each matrix
element comes from one ancilla circuit: the ancilla selects P_q on its
|1> branch and P_q', P_j on its |0> branch (open controls realized by
X-conjugation), with the generator applied uncontrolled in between --
controlled Pauli layers are Clifford, a controlled rotation would not be.
The ancilla's <X> + i<Y> then reads off the branch overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

from .engine import HALF_PI, IterationRecord, fold, rotosolve_solve
from .pauli import PauliWord, QubitOperator
from .stabilizer import (
    CliffordCircuit,
    compile_exponential,
    expectation_pauli,
    prepare,
)

DEFAULT_JOB_BUDGET = 10_000_000

CLIFFORD_ANGLES = (0.0, HALF_PI, -HALF_PI)


@dataclass
class HadamardTestJob:
    """One (tail term, tail term, head term) combination at a Clifford angle."""

    q_term: Tuple[complex, PauliWord]
    q_prime_term: Tuple[complex, PauliWord]
    h_term: Tuple[complex, PauliWord]
    phi: float

    def __post_init__(self):
        if not _is_clifford_angle(self.phi):
            raise ValueError("job angle must be 0 or +-pi/2")


def _is_clifford_angle(phi: float) -> bool:
    return any(abs(phi - a) < 1e-12 for a in CLIFFORD_ANGLES)


def build_tail(records: Sequence[IterationRecord]) -> QubitOperator:
    """Expand prod_j (cos(phi_j/2) - i sin(phi_j/2) P_j) over the given records.

    Records must be ordered by iteration; the first record's factor sits
    leftmost. The result is unitary with at most 2^len(records) terms.
    """
    if not records:
        raise ValueError("build_tail needs the register size from a record")
    n = records[0].chosen.n_qubits
    return _tail_operator(records, n)


def _tail_operator(records: Sequence[IterationRecord], n_qubits: int
                   ) -> QubitOperator:
    acc = QubitOperator(n_qubits)
    acc._add_word(PauliWord.identity(n_qubits), 1.0)
    for rec in records:
        factor = QubitOperator(n_qubits)
        factor._add_word(PauliWord.identity(n_qubits),
                         math.cos(rec.phi / 2))
        factor._add_word(rec.chosen, -1j * math.sin(rec.phi / 2))
        acc = acc * factor
    return acc


def _lift_word(word: PauliWord, n_total: int) -> PauliWord:
    return PauliWord(n_total, word.x_mask, word.z_mask, word.phase_exp)


def _lift_circuit(circuit: CliffordCircuit, n_total: int) -> CliffordCircuit:
    lifted = CliffordCircuit(n_total)
    for gate in circuit.gates:
        if gate[0] == "CP":
            lifted.add("CP", gate[1], _lift_word(gate[2], n_total))
        else:
            lifted.add(*gate)
    return lifted


def hadamard_test(prep: CliffordCircuit, job: HadamardTestJob,
                  generator: Tuple[PauliWord, float]) -> complex:
    """Ancilla <X> + i<Y> for one job; equals <C|P_q' G† P_j G P_q|C>.

    The ancilla is qubit N. Gate order: H on the ancilla, P_q controlled
    on |1>, then an X-conjugated block holding P_q' and P_j as open
    controls with the uncontrolled generator rotation between them.
    """
    word_m, phi = generator
    if not _is_clifford_angle(phi) or abs(phi - job.phi) > 1e-12:
        raise ValueError("generator angle must match the job's Clifford angle")
    n = prep.n_qubits
    ancilla = n
    total = n + 1
    circuit = _lift_circuit(prep, total)
    circuit.add("H", ancilla)
    if not job.q_term[1].is_identity():
        circuit.add("CP", ancilla, _lift_word(job.q_term[1], total))
    circuit.add("X", ancilla)
    if not job.q_prime_term[1].is_identity():
        circuit.add("CP", ancilla, _lift_word(job.q_prime_term[1], total))
    if abs(phi) > 1e-12:
        circuit.extend(_lift_circuit(
            compile_exponential(word_m, phi), total))
    if not job.h_term[1].is_identity():
        circuit.add("CP", ancilla, _lift_word(job.h_term[1], total))
    circuit.add("X", ancilla)
    state = prepare(circuit)
    x_val = expectation_pauli(state, PauliWord(total, 1 << ancilla, 0))
    y_val = expectation_pauli(state, PauliWord(total, 1 << ancilla,
                                               1 << ancilla))
    return complex(x_val, y_val)


def interior_energy(m: int, records: Sequence[IterationRecord],
                    H0: QubitOperator, prep: CliffordCircuit, phi: float,
                    job_budget: int = DEFAULT_JOB_BUDGET) -> float:
    """Total ansatz energy with generator m's angle replaced by phi.

    phi is restricted to {0, +-pi/2} so every circuit stays Clifford.
    The job count |tail|^2 * |head| is checked against job_budget before
    any circuit runs.
    """
    if not 1 <= m <= len(records):
        raise ValueError("interior index out of range")
    if not _is_clifford_angle(phi):
        raise ValueError("interior evaluation requires a Clifford angle")
    head = H0
    for rec in records[:m - 1]:
        head = fold(head, rec.chosen, rec.phi)
    tail = _tail_operator(records[m:], H0.n_qubits)
    n_jobs = len(tail) * len(tail) * len(head)
    if n_jobs > job_budget:
        raise ValueError(
            f"{n_jobs} Hadamard-test jobs exceed the budget {job_budget}")
    generator = (records[m - 1].chosen, phi)

    tail_terms = sorted(tail, key=lambda wc: wc[0].sort_key())
    head_terms = sorted(head, key=lambda wc: wc[0].sort_key())
    total = 0.0 + 0.0j
    for q_word, c_q in tail_terms:
        for qp_word, c_qp in tail_terms:
            weight_qq = c_q * c_qp.conjugate()
            for h_word, h_coeff in head_terms:
                job = HadamardTestJob((c_q, q_word), (c_qp, qp_word),
                                      (h_coeff, h_word), phi)
                total += weight_qq * h_coeff * hadamard_test(prep, job,
                                                             generator)
    if abs(total.imag) > 1e-9:
        raise ArithmeticError(
            f"interior energy has imaginary residue {total.imag:.3e}")
    return total.real


def _interior_sinusoid(m, records, H0, prep, job_budget):
    e0 = interior_energy(m, records, H0, prep, 0.0, job_budget)
    ep = interior_energy(m, records, H0, prep, HALF_PI, job_budget)
    em = interior_energy(m, records, H0, prep, -HALF_PI, job_budget)
    return e0, ep, em


def interior_energy_at(phi: float, e0: float, ep: float, em: float) -> float:
    """Sinusoid through the three Clifford-angle energies, at any angle."""
    a_sin = 2 * e0 - ep - em
    a_cos = ep - em
    amplitude = 0.5 * math.hypot(a_sin, a_cos)
    offset = 0.5 * (ep + em)
    if amplitude == 0.0:
        return e0
    b = math.atan2(a_sin, a_cos)
    return amplitude * math.sin(phi + b) + offset


def reoptimize_interior(m: int, records: List[IterationRecord],
                        H0: QubitOperator, prep: CliffordCircuit,
                        job_budget: int = DEFAULT_JOB_BUDGET
                        ) -> Tuple[List[IterationRecord], float]:
    """Rotosolve generator m's angle in place of its recorded value.

    Returns the updated record list and the total energy at the new
    angle; the energy never increases since the closed-form minimum is
    at most the sinusoid's value at the current angle.
    """
    e0, ep, em = _interior_sinusoid(m, records, H0, prep, job_budget)
    phi_new, e_new = rotosolve_solve(e0, ep, em)
    e_current = interior_energy_at(records[m - 1].phi, e0, ep, em)
    if e_new > e_current + 1e-12:
        raise AssertionError("interior rotosolve increased the energy")
    updated = list(records)
    updated[m - 1] = replace(records[m - 1], phi=phi_new)
    return updated, e_new


def sweep_interior(records: List[IterationRecord], H0: QubitOperator,
                   prep: CliffordCircuit, passes: int = 1,
                   job_budget: int = DEFAULT_JOB_BUDGET
                   ) -> Tuple[List[IterationRecord], List[float]]:
    """Rotosolve every interior angle in order, optionally several times."""
    energies: List[float] = []
    current = list(records)
    for _ in range(passes):
        for m in range(1, len(current) + 1):
            current, energy = reoptimize_interior(m, current, H0, prep,
                                                  job_budget)
            energies.append(energy)
    return current, energies
