"""Fermion-to-qubit mappings and Clifford reference-state circuits.

All three mappings go through one Majorana-mode scheme: a mapping
supplies 2N anticommuting Pauli words (gamma_0 .. gamma_{2N-1}) with
    a_p   = (gamma_{2p} + i gamma_{2p+1}) / 2,
    a†_p  = (gamma_{2p} - i gamma_{2p+1}) / 2,
so the occupation operator is (1 + i gamma_{2p} gamma_{2p+1}) / 2 and the
all-zero qubit state is the shared vacuum.

The ternary-tree mapping builds its Majorana set in four steps: leaf
words of a breadth-first ternary tree (the all-Z path dropped), pairing
of adjacent leaves, a Hadamard relabeling of every qubit whose pair
product shows X instead of Z, and a final per-pair sign fix so each
occupation operator annihilates the vacuum. Pairs are indexed by the
single qubit where the two partners differ in their X/Y content, which
makes the assignment reproducible for any register size.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Sequence, Tuple

from .chem import FermionOperator
from .pauli import PauliWord, QubitOperator, prune
from .stabilizer import CliffordCircuit


class MappingKind(Enum):
    JW = "jw"
    BK = "bk"
    JKMN = "jkmn"

    @property
    def min_candidate_rank(self) -> int:
        """Lower bound n0 on the X count of pool candidates."""
        return 0 if self is MappingKind.JKMN else 1


@dataclass
class MajoranaSet:
    """2N pairwise anticommuting Hermitian words, two per spin orbital."""

    n_spin_orbitals: int
    gammas: List[PauliWord]

    def number_operator(self, orbital: int) -> QubitOperator:
        """a†_p a_p = (1 + i g_{2p} g_{2p+1}) / 2."""
        n = self.gammas[0].n_qubits
        pair = self.gammas[2 * orbital] * self.gammas[2 * orbital + 1]
        op = QubitOperator(n)
        op._add_word(PauliWord.identity(n), 0.5)
        op._add_word(pair, 0.5j)
        op._drop_zeros()
        return op


OccupationVector = Sequence[int]


# -- generic Majorana machinery --------------------------------------------------


def _ladder(ms: MajoranaSet, orbital: int, create: bool) -> QubitOperator:
    n = ms.gammas[0].n_qubits
    op = QubitOperator(n)
    op._add_word(ms.gammas[2 * orbital], 0.5)
    op._add_word(ms.gammas[2 * orbital + 1], -0.5j if create else 0.5j)
    op._drop_zeros()
    return op


def map_with_majoranas(f: FermionOperator, ms: MajoranaSet,
                       tol: float = 1e-12) -> QubitOperator:
    n_qubits = ms.gammas[0].n_qubits
    cache: Dict[Tuple[int, bool], QubitOperator] = {}

    def ladder(idx: int, create: bool) -> QubitOperator:
        key = (idx, create)
        if key not in cache:
            cache[key] = _ladder(ms, idx, create)
        return cache[key]

    total = QubitOperator(n_qubits)
    for term, coeff in f.terms.items():
        if not term:
            total._add_word(PauliWord.identity(n_qubits), coeff)
            continue
        product = ladder(*term[0])
        for idx, create in term[1:]:
            product = product * ladder(idx, create)
        total = total + product.scaled(coeff)
    return prune(total, tol)


def _check_orbital_range(f: FermionOperator, n_spin_orbitals: int):
    top = f.max_index()
    if top >= n_spin_orbitals:
        raise ValueError(
            f"operator touches spin orbital {top}, register has {n_spin_orbitals}")


# -- Jordan-Wigner ----------------------------------------------------------------


def jw_majoranas(n_spin_orbitals: int) -> MajoranaSet:
    gammas = []
    for p in range(n_spin_orbitals):
        z_string = (1 << p) - 1
        gammas.append(PauliWord(n_spin_orbitals, 1 << p, z_string))
        gammas.append(PauliWord(n_spin_orbitals, 1 << p, z_string | (1 << p)))
    return MajoranaSet(n_spin_orbitals, gammas)


def map_jw(f: FermionOperator, n_spin_orbitals: int) -> QubitOperator:
    """a†_p -> (X_p - iY_p)/2 times Z on 0..p-1."""
    _check_orbital_range(f, n_spin_orbitals)
    return map_with_majoranas(f, jw_majoranas(n_spin_orbitals))


# -- Bravyi-Kitaev ------------------------------------------------------------------


class _FenwickTree:
    """Binary-indexed partial-sum tree over orbitals 0..n-1 (root n-1)."""

    def __init__(self, n: int):
        self.n = n
        self.parent = [-1] * n
        self.children: List[List[int]] = [[] for _ in range(n)]
        self.interval_low = list(range(n))

        def build(left: int, right: int):
            if left >= right:
                return
            pivot = (left + right) >> 1
            self.parent[pivot] = right
            self.children[right].append(pivot)
            self.interval_low[pivot] = left
            build(left, pivot)
            build(pivot + 1, right)

        if n > 0:
            self.interval_low[n - 1] = 0
            build(0, n - 1)

    def ancestors(self, j: int) -> List[int]:
        out = []
        while self.parent[j] != -1:
            j = self.parent[j]
            out.append(j)
        return out

    def parity_set(self, j: int) -> List[int]:
        """Qubits whose subtree parities sum occupations of orbitals < j."""
        out = []
        x = j - 1
        while x >= 0:
            out.append(x)
            x = self.interval_low[x] - 1
        return out

    def subtree_sets(self) -> List[List[int]]:
        sets = [[q] for q in range(self.n)]

        def descend(q):
            acc = [q]
            for child in self.children[q]:
                acc.extend(descend(child))
            return acc

        return [descend(q) for q in range(self.n)]


def bk_majoranas(n_spin_orbitals: int) -> MajoranaSet:
    tree = _FenwickTree(n_spin_orbitals)
    n = n_spin_orbitals
    gammas = []
    for j in range(n):
        x_mask = 1 << j
        for q in tree.ancestors(j):
            x_mask |= 1 << q
        z_mask = 0
        for q in tree.parity_set(j):
            z_mask |= 1 << q
        even = PauliWord(n, x_mask, z_mask)
        occ = 1 << j
        for q in tree.children[j]:
            occ |= 1 << q
        odd = (even * PauliWord(n, 0, occ))
        odd = PauliWord(n, odd.x_mask, odd.z_mask, (odd.phase_exp + 1) & 3)
        gammas.extend([even, odd])
    return MajoranaSet(n, gammas)


def map_bk(f: FermionOperator, n_spin_orbitals: int) -> QubitOperator:
    """Standard binary-tree update/parity/flip construction."""
    _check_orbital_range(f, n_spin_orbitals)
    return map_with_majoranas(f, bk_majoranas(n_spin_orbitals))


def bk_encode_occupation(occ: OccupationVector) -> List[int]:
    """Qubit bits storing subtree parities of an occupation bit vector."""
    tree = _FenwickTree(len(occ))
    bits = [0] * len(occ)
    for q, members in enumerate(tree.subtree_sets()):
        bits[q] = sum(occ[i] for i in members) % 2
    return bits


# -- ternary-tree mapping -------------------------------------------------------------


def _ternary_leaf_words(n_qubits: int) -> List[Tuple[int, int]]:
    """(x_mask, z_mask) of all root-to-leaf path words, depth-first order.

    Node q's children are nodes 3q+1, 3q+2, 3q+3 while those stay below
    n_qubits; missing children are leaves. Branch order X, Y, Z at every
    node gives the lexicographic enumeration; the final all-Z path leaf
    is included here and dropped by the caller.
    """
    leaves = []

    def walk(node: int, x_mask: int, z_mask: int):
        for branch in range(3):
            child = 3 * node + 1 + branch
            if branch == 0:
                bx, bz = x_mask | (1 << node), z_mask
            elif branch == 1:
                bx, bz = x_mask | (1 << node), z_mask | (1 << node)
            else:
                bx, bz = x_mask, z_mask | (1 << node)
            if child < n_qubits:
                walk(child, bx, bz)
            else:
                leaves.append((bx, bz))

    walk(0, 0, 0)
    return leaves


def build_jkmn_majoranas(n_spin_orbitals: int) -> MajoranaSet:
    """Ternary-tree Majorana allocation tuned for the candidate-pool rules.

    Adjacent leaves pair up after the all-Z leaf is discarded. Qubits
    whose pair product carries X instead of Z are relabeled with
    Hadamards (conjugation swaps X and Z and negates Y). Pairs are then
    assigned to spin orbitals by the unique qubit where the partners'
    X/Y content differs, and the leading partner's sign is flipped
    whenever the pair's occupation operator fails to annihilate the
    vacuum.
    """
    n = n_spin_orbitals
    words = [PauliWord(n, x, z) for x, z in _ternary_leaf_words(n)[:-1]]
    if len(words) != 2 * n:
        raise AssertionError("ternary tree leaf count is off")

    def pair_products(ws):
        return [ws[2 * i] * ws[2 * i + 1] for i in range(n)]

    # Hadamard relabeling: iterate until every pair product is diagonal.
    for _ in range(n + 1):
        hadamard_qubits = 0
        for prod in pair_products(words):
            hadamard_qubits |= prod.x_mask & ~prod.z_mask
        if hadamard_qubits == 0:
            break
        relabeled = []
        for w in words:
            x = w.x_mask
            z = w.z_mask
            new_x = (x & ~hadamard_qubits) | (z & hadamard_qubits)
            new_z = (z & ~hadamard_qubits) | (x & hadamard_qubits)
            y_hits = (x & z & hadamard_qubits).bit_count()
            relabeled.append(PauliWord(n, new_x, new_z,
                                       (w.phase_exp + 2 * y_hits) & 3))
        words = relabeled
    else:
        raise AssertionError("ternary-tree relabeling did not stabilize")

    # Index pairs by the qubit where the partners' X/Y content differs:
    # equal x masks (forced by diagonal products), Y masks apart in one bit.
    slots: List[Tuple[PauliWord, PauliWord] | None] = [None] * n
    for i in range(n):
        a, b = words[2 * i], words[2 * i + 1]
        diff = (a.x_mask & a.z_mask) ^ (b.x_mask & b.z_mask)
        if (a.x_mask != b.x_mask or diff.bit_count() != 1
                or slots[diff.bit_length() - 1] is not None):
            raise AssertionError("ternary-tree pairing structure is off")
        slots[diff.bit_length() - 1] = (a, b)

    gammas: List[PauliWord] = []
    for pair in slots:
        a, b = pair
        prod = a * b
        if prod.x_mask:
            raise AssertionError("pair product not diagonal")
        # want <vac| i*a*b |vac> = -1 so the occupation operator is 0,
        # i.e. a diagonal product with phase exponent 1
        if prod.phase_exp == 3:
            a = PauliWord(n, a.x_mask, a.z_mask, (a.phase_exp + 2) & 3)
        elif prod.phase_exp != 1:
            raise AssertionError("pair product carries an even phase")
        gammas.extend([a, b])
    return MajoranaSet(n, gammas)


def map_jkmn(f: FermionOperator, n_spin_orbitals: int) -> QubitOperator:
    _check_orbital_range(f, n_spin_orbitals)
    return map_with_majoranas(f, build_jkmn_majoranas(n_spin_orbitals))


def map_operator(f: FermionOperator, n_spin_orbitals: int,
                 kind: MappingKind) -> QubitOperator:
    if kind is MappingKind.JW:
        return map_jw(f, n_spin_orbitals)
    if kind is MappingKind.BK:
        return map_bk(f, n_spin_orbitals)
    return map_jkmn(f, n_spin_orbitals)


# -- reference states -----------------------------------------------------------------


def reference_circuit(occ: OccupationVector, kind: MappingKind) -> CliffordCircuit:
    """Clifford prep of the occupation-number eigenstate for a mapping.

    JW applies X on occupied spin orbitals; BK applies X where the
    encoded subtree parity is odd; the ternary-tree mapping reads X/Y
    gates off the product of even Majoranas over occupied orbitals
    (global phase dropped).
    """
    n = len(occ)
    circuit = CliffordCircuit(n)
    if kind is MappingKind.JW:
        for q, bit in enumerate(occ):
            if bit:
                circuit.add("X", q)
    elif kind is MappingKind.BK:
        for q, bit in enumerate(bk_encode_occupation(occ)):
            if bit:
                circuit.add("X", q)
    else:
        ms = build_jkmn_majoranas(n)
        word = PauliWord.identity(n)
        for orbital, bit in enumerate(occ):
            if bit:
                word = word * ms.gammas[2 * orbital]
        for q in word.support():
            letter = word.letter(q)
            if letter in ("X", "Y"):
                circuit.add(letter, q)
    return circuit
