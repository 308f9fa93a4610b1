"""Symplectic-binary Pauli words and sparse qubit operators.

A Pauli word on N qubits is stored as two N-bit integers (x_mask, z_mask)
plus a phase from {1, i, -1, -i}:

    qubit k carries  I if neither bit set, X if x only,
                     Z if z only, Y if both.

The unphased word with masks (x, z) denotes the Hermitian tensor product
with an actual Y (not XZ) wherever both bits are set; the stored phase
multiplies that. Multiplication is a mask XOR plus exact phase
bookkeeping mod 4, so products of millions of words stay cheap and exact.
"""

from __future__ import annotations

import math
from typing import Dict, Iterable, Iterator, Tuple

import numpy as np

# Ordering used for deterministic tie-breaking: per-qubit letter codes.
_LETTER_CODE = {"I": 0, "X": 1, "Y": 2, "Z": 3}
_CODE_LETTER = "IXYZ"

FlipSet = Tuple[int, ...]


class DimensionError(ValueError):
    """Raised when two operators act on different qubit counts."""


def _check_same_size(a, b):
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")


def _phase_delta(ax: int, az: int, bx: int, bz: int) -> int:
    """Exponent k of i**k picked up by multiplying two unphased words."""
    x = ax ^ bx
    z = az ^ bz
    k = (ax & az).bit_count() + (bx & bz).bit_count() - (x & z).bit_count()
    k += 2 * (az & bx).bit_count()
    return k & 3


class PauliWord:
    """An N-qubit Pauli word with a phase in {1, i, -1, -i}.

    Immutable. The phase is stored as an exponent of i (mod 4); the
    canonical form used as a QubitOperator key has exponent 0.
    """

    __slots__ = ("n_qubits", "x_mask", "z_mask", "phase_exp")

    def __init__(self, n_qubits: int, x_mask: int = 0, z_mask: int = 0,
                 phase_exp: int = 0):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        mask = (1 << n_qubits) - 1
        if x_mask & ~mask or z_mask & ~mask:
            raise ValueError("mask bits outside qubit range")
        self.n_qubits = n_qubits
        self.x_mask = x_mask
        self.z_mask = z_mask
        self.phase_exp = phase_exp & 3

    # -- construction helpers -------------------------------------------------

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliWord":
        return cls(n_qubits, 0, 0, 0)

    @classmethod
    def from_string(cls, letters: str, phase: complex = 1) -> "PauliWord":
        """Build from a dense letter string, qubit 0 first (e.g. 'XZI')."""
        x = z = 0
        for k, ch in enumerate(letters):
            if ch in ("X", "Y"):
                x |= 1 << k
            if ch in ("Z", "Y"):
                z |= 1 << k
            if ch not in "IXYZ":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(len(letters), x, z, _phase_to_exp(phase))

    @classmethod
    def from_terms(cls, n_qubits: int, ops: Dict[int, str],
                   phase: complex = 1) -> "PauliWord":
        """Build from {qubit: letter}; unlisted qubits are identity."""
        x = z = 0
        for q, ch in ops.items():
            if not 0 <= q < n_qubits:
                raise ValueError(f"qubit index {q} out of range")
            if ch in ("X", "Y"):
                x |= 1 << q
            if ch in ("Z", "Y"):
                z |= 1 << q
            if ch not in "XYZ":
                raise ValueError(f"invalid Pauli letter {ch!r}")
        return cls(n_qubits, x, z, _phase_to_exp(phase))

    # -- basic queries ---------------------------------------------------------

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase_exp]

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def weight(self) -> int:
        """Number of non-identity factors (the word's rank)."""
        return (self.x_mask | self.z_mask).bit_count()

    def support(self) -> FlipSet:
        return _bits(self.x_mask | self.z_mask)

    def letter(self, q: int) -> str:
        code = ((self.x_mask >> q) & 1) | (((self.z_mask >> q) & 1) << 1)
        return "IXZY"[code]  # code 3 = both bits = Y

    def canonical(self) -> "PauliWord":
        """Same masks with phase +1."""
        if self.phase_exp == 0:
            return self
        return PauliWord(self.n_qubits, self.x_mask, self.z_mask, 0)

    def sort_key(self) -> bytes:
        """Deterministic lexicographic key, qubit 0 most significant, I<X<Y<Z."""
        return bytes(_LETTER_CODE[self.letter(q)] for q in range(self.n_qubits))

    # -- algebra ---------------------------------------------------------------

    def __mul__(self, other: "PauliWord") -> "PauliWord":
        _check_same_size(self, other)
        k = _phase_delta(self.x_mask, self.z_mask, other.x_mask, other.z_mask)
        return PauliWord(self.n_qubits,
                         self.x_mask ^ other.x_mask,
                         self.z_mask ^ other.z_mask,
                         self.phase_exp + other.phase_exp + k)

    def commutes(self, other: "PauliWord") -> bool:
        _check_same_size(self, other)
        k = (self.x_mask & other.z_mask).bit_count() \
            + (self.z_mask & other.x_mask).bit_count()
        return k % 2 == 0

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliWord)
                and self.n_qubits == other.n_qubits
                and self.x_mask == other.x_mask
                and self.z_mask == other.z_mask
                and self.phase_exp == other.phase_exp)

    def __hash__(self):
        return hash((self.n_qubits, self.x_mask, self.z_mask, self.phase_exp))

    def __repr__(self):
        pre = {0: "", 1: "i*", 2: "-", 3: "-i*"}[self.phase_exp]
        return f"{pre}{self.to_compact() or 'I'}"

    def to_compact(self) -> str:
        """Letter-index form without the phase, e.g. 'X0Z2'; '' for identity."""
        return "".join(f"{self.letter(q)}{q}" for q in _bits(self.x_mask | self.z_mask))


def _phase_to_exp(phase: complex) -> int:
    for k, val in enumerate((1, 1j, -1, -1j)):
        if phase == val:
            return k
    raise ValueError(f"phase must be one of 1, i, -1, -i, got {phase!r}")


def _bits(mask: int) -> Tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def multiply(a: PauliWord, b: PauliWord) -> PauliWord:
    """Exact product a*b including the accumulated phase."""
    return a * b


def commutes(a: PauliWord, b: PauliWord) -> bool:
    """True iff the symplectic form of the two mask pairs is even."""
    return a.commutes(b)


def flip_indices(p: PauliWord) -> FlipSet:
    """Qubits where the word carries X or Y (the x_mask bits)."""
    return _bits(p.x_mask)


class QubitOperator:
    """Sparse complex-weighted sum of phase-canonical Pauli words.

    Keys are (x_mask, z_mask) pairs; any input word's phase is folded
    into its coefficient. Treat instances as immutable once built -- all
    arithmetic helpers return new operators, which keeps sharing across
    worker threads safe and lets mask arrays be cached for vectorized
    expectation evaluation.
    """

    __slots__ = ("n_qubits", "_terms", "_cache")

    def __init__(self, n_qubits: int,
                 terms: Dict[Tuple[int, int], complex] | None = None):
        if n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        self.n_qubits = n_qubits
        self._terms: Dict[Tuple[int, int], complex] = dict(terms or {})
        self._cache = None

    # -- construction ----------------------------------------------------------

    @classmethod
    def zero(cls, n_qubits: int) -> "QubitOperator":
        return cls(n_qubits)

    @classmethod
    def from_pairs(cls, n_qubits: int,
                   pairs: Iterable[Tuple[PauliWord, complex]]) -> "QubitOperator":
        op = cls(n_qubits)
        for word, coeff in pairs:
            op._add_word(word, coeff)
        op._drop_zeros()
        return op

    def _add_word(self, word: PauliWord, coeff: complex):
        if word.n_qubits != self.n_qubits:
            raise DimensionError("word size does not match operator")
        key = (word.x_mask, word.z_mask)
        self._terms[key] = self._terms.get(key, 0) + coeff * word.phase
        self._cache = None

    def _drop_zeros(self):
        self._terms = {k: c for k, c in self._terms.items() if c != 0}
        self._cache = None

    # -- queries ---------------------------------------------------------------

    def __len__(self):
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[PauliWord, complex]]:
        for (x, z), c in self._terms.items():
            yield PauliWord(self.n_qubits, x, z), c

    def coefficient(self, word: PauliWord) -> complex:
        c = self._terms.get((word.x_mask, word.z_mask), 0)
        return c * word.phase.conjugate() if c else 0

    def n_terms(self, include_identity: bool = True) -> int:
        n = len(self._terms)
        if not include_identity and (0, 0) in self._terms:
            n -= 1
        return n

    def max_abs_imag(self) -> float:
        return max((abs(c.imag) for c in self._terms.values()), default=0.0)

    def mask_arrays(self):
        """(xs, zs, coeffs) as numpy arrays, cached. Requires N <= 64."""
        if self._cache is None:
            if self.n_qubits > 64:
                raise ValueError("mask arrays limited to 64 qubits")
            xs = np.fromiter((k[0] for k in self._terms), dtype=np.uint64,
                             count=len(self._terms))
            zs = np.fromiter((k[1] for k in self._terms), dtype=np.uint64,
                             count=len(self._terms))
            cs = np.fromiter(self._terms.values(), dtype=np.complex128,
                             count=len(self._terms))
            self._cache = (xs, zs, cs)
        return self._cache

    # -- arithmetic -------------------------------------------------------------

    def __add__(self, other: "QubitOperator") -> "QubitOperator":
        _check_same_size(self, other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            terms[key] = terms.get(key, 0) + c
        out = QubitOperator(self.n_qubits, terms)
        out._drop_zeros()
        return out

    def scaled(self, factor: complex) -> "QubitOperator":
        return QubitOperator(self.n_qubits,
                             {k: c * factor for k, c in self._terms.items()})

    def word_product(self, word: PauliWord, front: bool) -> "QubitOperator":
        """word*H (front) or H*word (back), exact phases."""
        out: Dict[Tuple[int, int], complex] = {}
        wx, wz, wp = word.x_mask, word.z_mask, word.phase_exp
        for (x, z), c in self._terms.items():
            if front:
                k = _phase_delta(wx, wz, x, z)
            else:
                k = _phase_delta(x, z, wx, wz)
            key = (x ^ wx, z ^ wz)
            val = c * (1, 1j, -1, -1j)[(k + wp) & 3]
            out[key] = out.get(key, 0) + val
        op = QubitOperator(self.n_qubits, out)
        op._drop_zeros()
        return op

    def __mul__(self, other: "QubitOperator") -> "QubitOperator":
        _check_same_size(self, other)
        out: Dict[Tuple[int, int], complex] = {}
        for (ax, az), ca in self._terms.items():
            for (bx, bz), cb in other._terms.items():
                k = _phase_delta(ax, az, bx, bz)
                key = (ax ^ bx, az ^ bz)
                out[key] = out.get(key, 0) + ca * cb * (1, 1j, -1, -1j)[k]
        op = QubitOperator(self.n_qubits, out)
        op._drop_zeros()
        return op

    def hermitian_conjugate(self) -> "QubitOperator":
        return QubitOperator(self.n_qubits,
                             {k: c.conjugate() for k, c in self._terms.items()})

    def __repr__(self):
        body = " + ".join(f"({c:.6g})*{PauliWord(self.n_qubits, x, z)!r}"
                          for (x, z), c in list(self._terms.items())[:6])
        more = "" if len(self._terms) <= 6 else f" ... ({len(self._terms)} terms)"
        return f"QubitOperator[{self.n_qubits}q: {body}{more}]"


def commutator(H: QubitOperator, p: PauliWord) -> QubitOperator:
    """[H, p] = Hp - pH; only terms anticommuting with p survive, as 2*h*(P*p)."""
    if H.n_qubits != p.n_qubits:
        raise DimensionError("operator/word size mismatch")
    px, pz, pp = p.x_mask, p.z_mask, p.phase_exp
    out: Dict[Tuple[int, int], complex] = {}
    for (x, z), c in H._terms.items():
        if ((x & pz).bit_count() + (z & px).bit_count()) % 2 == 0:
            continue
        k = _phase_delta(x, z, px, pz)
        key = (x ^ px, z ^ pz)
        out[key] = out.get(key, 0) + 2 * c * (1, 1j, -1, -1j)[(k + pp) & 3]
    op = QubitOperator(H.n_qubits, out)
    op._drop_zeros()
    return op


def prune(H: QubitOperator, eps: float) -> QubitOperator:
    """Drop terms with |coefficient| < eps (eps=0 drops exact zeros only)."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0:
        kept = {k: c for k, c in H._terms.items() if c != 0}
    else:
        kept = {k: c for k, c in H._terms.items() if abs(c) >= eps}
    return QubitOperator(H.n_qubits, kept)


def max_term_count(n_qubits: int) -> int:
    """Largest possible non-identity term count of a real-coefficient Hamiltonian.

    Counts N-qubit words with an even number of Y factors,
    sum_m C(N, 2m) * 3^(N-2m), minus one for the identity. The identity is
    excluded so the ceiling matches the conventional quoted maxima
    (2079 at N=6, 32895 at N=8, 8390655 at N=12); the raw even-Y count is
    one larger. Python integers are unbounded, so no overflow is possible.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be positive")
    total = sum(math.comb(n_qubits, 2 * m) * 3 ** (n_qubits - 2 * m)
                for m in range(n_qubits // 2 + 1))
    return total - 1


# -- text serialization --------------------------------------------------------
#
# One term per line:  (<re>,<im>) <letter><index> ...
# The identity word is written as the bare token 'I'. Floats are written
# with repr() so decimal round-trips are exact.


class OperatorParseError(ValueError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def dumps(H: QubitOperator) -> str:
    lines = []
    for (x, z), c in sorted(H._terms.items(),
                            key=lambda kv: PauliWord(H.n_qubits, *kv[0]).sort_key()):
        word = PauliWord(H.n_qubits, x, z)
        ops = " ".join(f"{word.letter(q)}{q}" for q in _bits(x | z)) or "I"
        lines.append(f"({c.real!r},{c.imag!r}) {ops}")
    return "\n".join(lines) + ("\n" if lines else "")


def loads(text: str, n_qubits: int | None = None) -> QubitOperator:
    """Parse the text format; qubit count inferred from the largest index."""
    entries = []
    max_q = -1
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            coeff_part, _, ops_part = line.partition(") ")
            if not coeff_part.startswith("("):
                raise ValueError("expected '(re,im)' coefficient")
            re_s, im_s = coeff_part[1:].split(",")
            coeff = complex(float(re_s), float(im_s))
        except ValueError as exc:
            raise OperatorParseError(str(exc), line_no) from None
        ops: Dict[int, str] = {}
        tokens = ops_part.split()
        if not tokens:
            raise OperatorParseError("missing Pauli word", line_no)
        if tokens != ["I"]:
            for tok in tokens:
                letter, idx_s = tok[0], tok[1:]
                if letter not in "XYZ" or not idx_s.isdigit():
                    raise OperatorParseError(f"bad Pauli token {tok!r}", line_no)
                q = int(idx_s)
                if q in ops:
                    raise OperatorParseError(
                        f"duplicate qubit index {q}", line_no)
                ops[q] = letter
                max_q = max(max_q, q)
        entries.append((coeff, ops))
    n = n_qubits if n_qubits is not None else max(max_q + 1, 1)
    op = QubitOperator(n)
    for coeff, ops in entries:
        op._add_word(PauliWord.from_terms(n, ops), coeff)
    op._drop_zeros()
    return op
