"""Iterative single-generator optimization loop with Hamiltonian folding.

Each iteration groups the current Hamiltonian's terms by flip indices,
enumerates odd-Y candidate words on every flip set, solves each
candidate's exact sinusoidal landscape from three Clifford-simulated
energies, folds the winner into the Hamiltonian as a similarity
transform, and repeats until the energy improvement drops below the
configured threshold.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .mappings import MappingKind
from .pauli import (
    DimensionError,
    FlipSet,
    PauliWord,
    QubitOperator,
    commutator,
    prune,
)
from .stabilizer import (
    CliffordCircuit,
    StabilizerState,
    compile_exponential,
    expectation_operator,
    expectation_pauli,
    prepare,
)

HALF_PI = math.pi / 2
GRADIENT_SCREEN = 1e-10


@dataclass
class EvaluatedCandidate:
    word: PauliWord
    phi: float
    energy: float
    gradient: float

    def order_key(self):
        return (self.energy, self.word.sort_key())


@dataclass
class DISEntry:
    """One flip-index set with its odd-Y candidate words."""

    flip_set: FlipSet
    candidates: List[PauliWord]
    representative: PauliWord
    gradient: float
    evaluated: List[EvaluatedCandidate] = field(default_factory=list)


@dataclass
class IterationRecord:
    m: int
    chosen: PauliWord
    phi: float
    energy: float
    n_terms: int
    dis_size: int
    selection_mode: str

    def to_json(self) -> str:
        return json.dumps({
            "iter": self.m,
            "pauli": self.chosen.to_compact() or "I",
            "n_qubits": self.chosen.n_qubits,
            "phi": self.phi,
            "energy": self.energy,
            "n_terms": self.n_terms,
            "dis_size": self.dis_size,
            "selection_mode": self.selection_mode,
        })

    @classmethod
    def from_json(cls, line: str) -> "IterationRecord":
        raw = json.loads(line)
        word = _word_from_compact(raw["pauli"], raw["n_qubits"])
        return cls(raw["iter"], word, raw["phi"], raw["energy"],
                   raw["n_terms"], raw["dis_size"], raw["selection_mode"])


def _word_from_compact(text: str, n_qubits: int) -> PauliWord:
    ops = {}
    if text != "I":
        token = ""
        for ch in text + "\0":
            if ch in "XYZ" or ch == "\0":
                if token:
                    ops[int(token[1:])] = token[0]
                token = ch
            else:
                token += ch
    return PauliWord.from_terms(n_qubits, ops)


@dataclass
class RunConfig:
    mapping: MappingKind = MappingKind.JW
    epsilon_conv: float = 1e-6
    max_iterations: int = 100
    selection_mode: str = "rotosolve"  # or "gradient"
    prune_eps: float = 1e-12
    max_candidate_rank: Optional[int] = None
    compression: bool = False
    multi_generator: bool = False
    multi_k: int = 1

    def __post_init__(self):
        if self.epsilon_conv <= 0:
            raise ValueError("epsilon_conv must be positive")
        if self.selection_mode not in ("rotosolve", "gradient"):
            raise ValueError("selection_mode must be rotosolve or gradient")
        if self.prune_eps < 0:
            raise ValueError("prune_eps must be non-negative")
        if self.multi_generator and self.multi_k < 1:
            raise ValueError("multi_k must be at least 1")


# -- candidate pool ---------------------------------------------------------------


def pool_size(n_qubits: int, kind: MappingKind) -> int:
    """Lower bound on the number of candidate words for a register.

    Sums C(N, ny) * C(N - ny, nx) over odd ny with nx from the mapping's
    minimum X count. Exact integer arithmetic, no overflow.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    n0 = kind.min_candidate_rank
    total = 0
    for ny in range(1, n_qubits + 1, 2):
        for nx in range(n0, n_qubits - ny + 1):
            total += math.comb(n_qubits, ny) * math.comb(n_qubits - ny, nx)
    return total


def _candidates_for_mask(n_qubits: int, mask: int, n0: int) -> List[PauliWord]:
    """Odd-Y words with X/Y exactly on the mask bits, at least n0 X's."""
    bits = []
    m = mask
    while m:
        low = m & -m
        bits.append(low.bit_length() - 1)
        m ^= low
    k = len(bits)
    out = []
    for ny in range(1, k + 1, 2):
        if k - ny < n0:
            continue
        for ys in itertools.combinations(bits, ny):
            z_mask = 0
            for q in ys:
                z_mask |= 1 << q
            out.append(PauliWord(n_qubits, mask, z_mask))
    return out


def rotosolve_solve(E0: float, Eplus: float, Eminus: float
                    ) -> Tuple[float, float]:
    """Closed-form minimum of the sinusoid fixed by energies at 0, +-pi/2.

    Returns (phi_min in [-pi, pi), minimal energy). A flat landscape
    (all three energies equal) returns (0, E0).
    """
    a_sin = 2 * E0 - Eplus - Eminus
    a_cos = Eplus - Eminus
    amplitude = 0.5 * math.hypot(a_sin, a_cos)
    offset = 0.5 * (Eplus + Eminus)
    if amplitude == 0.0:
        return 0.0, E0
    b = math.atan2(a_sin, a_cos)
    phi = -HALF_PI - b
    phi = (phi + math.pi) % (2 * math.pi) - math.pi
    energy = amplitude * math.sin(phi + b) + offset
    if energy > min(E0, Eplus, Eminus) + 1e-12:
        raise AssertionError("sinusoid minimum above a sampled energy")
    return phi, energy


def _as_state(ref: Union[CliffordCircuit, StabilizerState]) -> StabilizerState:
    if isinstance(ref, StabilizerState):
        return ref
    return prepare(ref)


def evaluate_candidate(p: PauliWord, H: QubitOperator,
                       ref: Union[CliffordCircuit, StabilizerState],
                       E0: float) -> Tuple[float, float, float]:
    """Rotosolve data for one generator: (phi_min, E_min, gradient).

    Both +-pi/2 rotations are compiled to Clifford circuits, applied on
    copies of the reference tableau, and the Hamiltonian expectation is
    taken exactly on each; the gradient is the sinusoid's derivative at
    phi = 0, (E+ - E-)/2.
    """
    base = _as_state(ref)
    plus = base.copy()
    plus.run(compile_exponential(p, HALF_PI))
    e_plus = expectation_operator(plus, H)
    minus = base.copy()
    minus.run(compile_exponential(p, -HALF_PI))
    e_minus = expectation_operator(minus, H)
    phi, energy = rotosolve_solve(E0, e_plus, e_minus)
    return phi, energy, 0.5 * (e_plus - e_minus)


class FastReferenceEvaluator:
    """Closed-form candidate energies on a computational-basis reference.

    With the reference fixed to a basis state |n>, a Pauli word has zero
    expectation unless it is diagonal, so for a candidate p with flip
    mask F only two ingredients survive in the +-pi/2 energies:

      * the commuting-part energy E_c = E0 - (diagonal terms of H that
        anticommute with p, evaluated at their reference eigenvalues),
        which depends on F alone, and
      * the slope <i p H_a> = c_p * G_F, where G_F sums the terms whose
        x mask equals F and the candidate-dependent factor c_p is just a
        sign fixed by p's Y count and reference parity.

    Every candidate of a flip group therefore shares one sinusoid
    amplitude and offset; members differ only in the sign of the slope.
    The values agree with the Clifford-circuit route to float precision
    while costing a few vectorized passes per iteration.
    """

    def __init__(self, H: QubitOperator, ref_mask: int, E0: float):
        self.n_qubits = H.n_qubits
        self.ref_mask = np.uint64(ref_mask)
        self.E0 = E0
        diag_z = []
        diag_c = []
        groups: Dict[int, Tuple[List[int], List[float]]] = {}
        for (x, z), coeff in H._terms.items():
            if x == 0:
                diag_z.append(z)
                diag_c.append(coeff.real)
            else:
                zs, cs = groups.setdefault(x, ([], []))
                zs.append(z)
                cs.append(coeff.real)
        self._diag_z = np.asarray(diag_z, dtype=np.uint64)
        self._diag_c = np.asarray(diag_c, dtype=np.float64)
        diag_parity = (np.bitwise_count(self._diag_z & self.ref_mask)
                       & np.uint64(1)).astype(bool)
        self._diag_signed = np.where(diag_parity, -self._diag_c, self._diag_c)
        self._groups = {}
        for x, (zs, cs) in groups.items():
            self._groups[x] = (np.asarray(zs, dtype=np.uint64),
                               np.asarray(cs, dtype=np.float64))
        self._cache: Dict[int, Tuple[float, float]] = {}

    def group_data(self, mask: int) -> Tuple[float, float]:
        """(E_c, G_F) for one flip mask."""
        got = self._cache.get(mask)
        if got is not None:
            return got
        f = np.uint64(mask)
        if len(self._diag_z):
            anti = (np.bitwise_count(self._diag_z & f) & np.uint64(1)) \
                .astype(bool)
            corr = float(self._diag_signed[anti].sum())
        else:
            corr = 0.0
        e_commuting = self.E0 - corr
        zs, cs = self._groups.get(mask, (np.zeros(0, np.uint64),
                                         np.zeros(0, np.float64)))
        ny = np.bitwise_count(zs & f).astype(np.int64)
        sign = np.where(ny % 4 == 0, 1.0, -1.0)
        ref_parity = (np.bitwise_count(zs & self.ref_mask)
                      & np.uint64(1)).astype(bool)
        sign = np.where(ref_parity, -sign, sign)
        slope = float(np.dot(cs, sign))
        self._cache[mask] = (e_commuting, slope)
        return e_commuting, slope

    def candidate_slope(self, word: PauliWord) -> float:
        """Exact d<H>/dphi at phi = 0 for one candidate word."""
        _, base = self.group_data(word.x_mask)
        return self._candidate_sign(word) * base

    def _candidate_sign(self, word: PauliWord) -> float:
        ny = word.z_mask.bit_count()
        sign = -1.0 if ((ny - 1) // 2) % 2 else 1.0
        if (word.z_mask & int(self.ref_mask)).bit_count() % 2:
            sign = -sign
        return sign

    def evaluate(self, word: PauliWord) -> Tuple[float, float, float]:
        """(phi_min, E_min, gradient) identical in value to the circuit route."""
        e_commuting, base = self.group_data(word.x_mask)
        slope = self._candidate_sign(word) * base
        phi, energy = rotosolve_solve(self.E0, e_commuting + slope,
                                      e_commuting - slope)
        return phi, energy, slope


def reference_bits(state: StabilizerState) -> Optional[List[int]]:
    """Occupation bits if the state is a computational-basis state, else None."""
    bits = []
    for q in range(state.n_qubits):
        val = expectation_pauli(
            state, PauliWord(state.n_qubits, 0, 1 << q))
        if val == 0:
            return None
        bits.append(0 if val == 1 else 1)
    return bits


def compress_support(H: QubitOperator, support: FlipSet,
                     ref: Sequence[int]) -> QubitOperator:
    """Evaluation-time restriction of H to a candidate's support.

    Terms flipping any qubit outside the support are dropped (they
    average to zero on a computational-basis reference); Z factors
    outside the support are replaced by their +-1 eigenvalues under the
    reference bits. Expectations taken against states that only differ
    from the reference inside the support are unchanged.
    """
    support_mask = 0
    for q in support:
        support_mask |= 1 << q
    ref_mask = 0
    for q, bit in enumerate(ref):
        if bit:
            ref_mask |= 1 << q
    out: Dict[Tuple[int, int], complex] = {}
    for (x, z), coeff in H._terms.items():
        if x & ~support_mask:
            continue
        z_out = z & ~support_mask
        if (z_out & ref_mask).bit_count() % 2:
            coeff = -coeff
        key = (x, z & support_mask)
        out[key] = out.get(key, 0) + coeff
    op = QubitOperator(H.n_qubits, out)
    op._drop_zeros()
    return op


def _fast_evaluator(H: QubitOperator,
                    ref: Union[CliffordCircuit, StabilizerState],
                    E0: float) -> Optional[FastReferenceEvaluator]:
    bits = reference_bits(_as_state(ref))
    if bits is None:
        return None
    mask = 0
    for q, bit in enumerate(bits):
        if bit:
            mask |= 1 << q
    return FastReferenceEvaluator(H, mask, E0)


def build_dis(H: QubitOperator, ref: Union[CliffordCircuit, StabilizerState],
              kind: MappingKind, cfg: RunConfig,
              E0: Optional[float] = None,
              ref_bits: Optional[Sequence[int]] = None,
              fast: Optional[FastReferenceEvaluator] = None
              ) -> List[DISEntry]:
    """Group H's terms by flip set and screen entries by the representative
    gradient (Y on the lowest flip index, X elsewhere). Cost is linear in
    the term count plus one Rotosolve evaluation per unique flip set; on
    a computational-basis reference the evaluation is closed-form.
    """
    if len(H) == 0:
        return []
    state = _as_state(ref)
    if E0 is None:
        E0 = expectation_operator(state, H)
    if fast is None:
        fast = _fast_evaluator(H, state, E0)
    n0 = kind.min_candidate_rank
    masks = sorted({x for (x, _z) in H._terms if x})
    entries: List[DISEntry] = []
    for mask in masks:
        rank = mask.bit_count()
        if cfg.max_candidate_rank is not None and rank > cfg.max_candidate_rank:
            continue
        candidates = _candidates_for_mask(H.n_qubits, mask, n0)
        if not candidates:
            continue
        low_bit = mask & -mask
        representative = PauliWord(H.n_qubits, mask, low_bit)
        if fast is not None:
            phi, energy, gradient = fast.evaluate(representative)
        else:
            h_eval = H
            if cfg.compression and ref_bits is not None:
                h_eval = compress_support(H, _mask_bits(mask), ref_bits)
            phi, energy, gradient = evaluate_candidate(representative, h_eval,
                                                       state, E0)
        if abs(gradient) <= GRADIENT_SCREEN:
            continue
        entry = DISEntry(_mask_bits(mask), candidates, representative,
                         gradient)
        entry.evaluated.append(
            EvaluatedCandidate(representative, phi, energy, gradient))
        entries.append(entry)
    return entries


def _mask_bits(mask: int) -> FlipSet:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def evaluate_entries(entries: List[DISEntry], H: QubitOperator,
                     ref: Union[CliffordCircuit, StabilizerState],
                     E0: float, cfg: RunConfig,
                     ref_bits: Optional[Sequence[int]] = None,
                     fast: Optional[FastReferenceEvaluator] = None):
    """Rotosolve every candidate of every entry (the rotosolve mode scan).

    Candidate evaluations are independent pure calls; they run as a
    deterministic sequential map so reductions are reproducible.
    """
    state = _as_state(ref)
    if fast is None:
        fast = _fast_evaluator(H, state, E0)
    for entry in entries:
        h_eval = H
        if fast is None and cfg.compression and ref_bits is not None:
            h_eval = compress_support(H, entry.flip_set, ref_bits)
        seen = {entry.representative}
        evaluated = list(entry.evaluated)
        for word in entry.candidates:
            if word in seen:
                continue
            if fast is not None:
                phi, energy, gradient = fast.evaluate(word)
            else:
                phi, energy, gradient = evaluate_candidate(word, h_eval,
                                                           state, E0)
            evaluated.append(EvaluatedCandidate(word, phi, energy, gradient))
        entry.evaluated = evaluated


def select_generator(entries: List[DISEntry], mode: str
                     ) -> Optional[EvaluatedCandidate]:
    """Pick the next generator from an evaluated DIS.

    rotosolve: global minimum energy over all evaluated candidates;
    gradient: the single evaluated candidate with the largest |gradient|
    (run() materializes per-candidate gradients before selecting). Ties
    break toward the lexicographically smallest word. Empty DIS signals
    convergence with None.
    """
    if not entries:
        return None
    pool = [cand for entry in entries for cand in entry.evaluated]
    if not pool:
        return None
    if mode == "rotosolve":
        return min(pool, key=EvaluatedCandidate.order_key)
    if mode == "gradient":
        return min(pool, key=lambda c: (-abs(c.gradient), c.word.sort_key()))
    raise ValueError(f"unknown selection mode {mode!r}")


def gradient_preselect(entries: List[DISEntry], H: QubitOperator,
                       ref: Union[CliffordCircuit, StabilizerState],
                       E0: float, cfg: RunConfig,
                       fast: Optional[FastReferenceEvaluator] = None
                       ) -> Optional[EvaluatedCandidate]:
    """Rank every candidate by |gradient| and Rotosolve only the top one.

    On a computational-basis reference the ranking pass is closed-form
    (every member of a flip group shares one gradient magnitude); any
    other Clifford reference falls back to the circuit-path gradient,
    which costs a full Rotosolve per candidate but keeps the selection
    rule intact.
    """
    state = _as_state(ref)
    if fast is None:
        fast = _fast_evaluator(H, state, E0)
    if fast is None:
        evaluate_entries(entries, H, state, E0, cfg)
        return select_generator(entries, "gradient")
    best: Optional[Tuple[Tuple, PauliWord, DISEntry]] = None
    for entry in entries:
        for word in entry.candidates:
            grad = fast.candidate_slope(word)
            if abs(grad) <= GRADIENT_SCREEN:
                continue
            key = (-abs(grad), word.sort_key())
            if best is None or key < best[0]:
                best = (key, word, entry)
    if best is None:
        return None
    _, word, entry = best
    phi, energy, grad = fast.evaluate(word)
    chosen = EvaluatedCandidate(word, phi, energy, grad)
    entry.evaluated = [chosen]
    return chosen


def fold(H: QubitOperator, p: PauliWord, phi: float,
         prune_eps: float = 1e-12) -> QubitOperator:
    """Similarity-transform H by exp(-i*phi*p/2):

        H' = H + 1/2 [(1 - cos phi) p - i sin phi] [H, p]

    computed with exact Pauli algebra and pruned. Coefficients of a real
    Hamiltonian stay exactly real; the spectrum is unchanged.
    """
    if H.n_qubits != p.n_qubits:
        raise DimensionError("operator/word size mismatch")
    cos_term = 1.0 - math.cos(phi)
    sin_term = math.sin(phi)
    if cos_term == 0.0 and sin_term == 0.0:
        return H
    comm = commutator(H, p)
    new = H + comm.scaled(-0.5j * sin_term) \
        + comm.word_product(p, front=True).scaled(0.5 * cos_term)
    if new.max_abs_imag() > 1e-12:
        raise AssertionError("folded Hamiltonian developed imaginary parts")
    return prune(new, prune_eps)


def add_commuting_generators(entries: List[DISEntry], k: int,
                             H: QubitOperator,
                             ref: Union[CliffordCircuit, StabilizerState],
                             E0: float, cfg: RunConfig
                             ) -> List[EvaluatedCandidate]:
    """Greedy mutually-commuting batch of up to k generators.

    Candidates are visited in ascending energy order; each accepted
    generator is folded before the next candidate's angle is re-solved,
    so later angles account for earlier rotations. k = 1 reduces to
    plain selection.
    """
    pool = sorted((cand for entry in entries for cand in entry.evaluated),
                  key=EvaluatedCandidate.order_key)
    if not pool:
        return []
    state = _as_state(ref)
    first = pool[0]
    chosen = [first]
    h_current = fold(H, first.word, first.phi, cfg.prune_eps)
    e_current = first.energy
    fast = _fast_evaluator(h_current, state, e_current)
    for cand in pool[1:]:
        if len(chosen) >= k:
            break
        if any(not cand.word.commutes(c.word) for c in chosen):
            continue
        if fast is not None:
            phi, energy, gradient = fast.evaluate(cand.word)
        else:
            phi, energy, gradient = evaluate_candidate(cand.word, h_current,
                                                       state, e_current)
        if energy >= e_current - 1e-15:
            continue
        resolved = EvaluatedCandidate(cand.word, phi, energy, gradient)
        chosen.append(resolved)
        h_current = fold(h_current, resolved.word, resolved.phi, cfg.prune_eps)
        e_current = energy
        fast = _fast_evaluator(h_current, state, e_current)
    return chosen


class RunResult(List[IterationRecord]):
    """Iteration records plus the stop reason (True unless the iteration
    cap cut the loop short)."""

    converged: bool = True


def run(H0: QubitOperator, ref: CliffordCircuit, cfg: RunConfig
        ) -> RunResult:
    """Full optimization loop; one IterationRecord per accepted generator.

    Stops when the DIS is empty, the best candidate improves the energy
    by less than epsilon_conv, or max_iterations is reached. The
    reference state never changes; all progress folds into the
    Hamiltonian.
    """
    state = prepare(ref)
    H = prune(H0, cfg.prune_eps)
    energy = expectation_operator(state, H)
    basis_bits = reference_bits(state)
    basis_mask = None
    if basis_bits is not None:
        basis_mask = 0
        for q, bit in enumerate(basis_bits):
            if bit:
                basis_mask |= 1 << q
    ref_bits = basis_bits if cfg.compression else None
    records = RunResult()
    records.converged = False
    for _ in range(cfg.max_iterations):
        fast = (FastReferenceEvaluator(H, basis_mask, energy)
                if basis_mask is not None else None)
        entries = build_dis(H, state, cfg.mapping, cfg, E0=energy,
                            ref_bits=ref_bits, fast=fast)
        if cfg.selection_mode == "rotosolve":
            evaluate_entries(entries, H, state, energy, cfg,
                             ref_bits=ref_bits, fast=fast)
            selected = select_generator(entries, "rotosolve")
        else:
            selected = gradient_preselect(entries, H, state, energy, cfg,
                                          fast=fast)
        if selected is None:
            records.converged = True
            break
        if energy - selected.energy < cfg.epsilon_conv:
            records.converged = True
            break
        dis_size = sum(len(entry.candidates) for entry in entries)
        if cfg.multi_generator and cfg.multi_k > 1:
            batch = add_commuting_generators(entries, cfg.multi_k, H, state,
                                             energy, cfg)
        else:
            batch = [selected]
        for cand in batch:
            H = fold(H, cand.word, cand.phi, cfg.prune_eps)
            energy = cand.energy
            records.append(IterationRecord(
                m=len(records) + 1,
                chosen=cand.word,
                phi=cand.phi,
                energy=cand.energy,
                n_terms=H.n_terms(include_identity=False),
                dis_size=dis_size,
                selection_mode=cfg.selection_mode,
            ))
    return records


@dataclass
class FinalCircuit:
    """Reference prep plus exponentiated generators at their optimal angles.

    Rotations are listed in application order: the last accepted
    generator acts first after the reference prep, the first one last.
    """

    prep: CliffordCircuit
    rotations: List[Tuple[PauliWord, float]]

    def dump(self) -> str:
        lines = self.prep.dump().splitlines()
        for word, phi in self.rotations:
            lines.append(f"ROT {phi!r} {word.to_compact() or 'I'}")
        return "\n".join(lines) + ("\n" if lines else "")


def compile_final_circuit(records: List[IterationRecord],
                          ref: CliffordCircuit) -> FinalCircuit:
    rotations = [(rec.chosen, rec.phi) for rec in reversed(records)]
    return FinalCircuit(ref, rotations)
