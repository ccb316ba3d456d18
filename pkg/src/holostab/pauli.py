"""Signed n-qubit Pauli operators in symplectic form.

A :class:`PauliOp` stores an operator as ``i**phase * P_1 (x) ... (x) P_n`` where
each single-qubit factor is selected by one bit of ``x`` and one bit of ``z``::

    (x, z) = (0, 0) -> I    (1, 0) -> X    (1, 1) -> Y    (0, 1) -> Z

``Y`` is stored as a genuine Hermitian ``Y`` (not ``XZ``), so every Hermitian
Pauli carries ``phase`` 0 (``+``) or 2 (``-``).  Bit ``q`` of a mask refers to
qubit ``q`` (0-based); qubit 0 is the leftmost character of the text form.
Masks are Python integers, so any qubit count is supported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "PauliOp",
    "WeightedTerm",
    "PauliSum",
    "RotatingPair",
    "Membership",
    "mul",
    "commutes",
    "weight",
    "conjugate_rotation",
    "partial_rotation_terms",
    "group_membership",
]

_LETTERS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_CHARS = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliOp:
    """An n-qubit Pauli operator ``i**phase * sigma(x, z)``.

    Parameters
    ----------
    n : int
        Number of qubits.
    x, z : int
        Bit masks; bit ``q`` set means an X (resp. Z) component on qubit ``q``.
    phase : int
        Power of ``i`` multiplying the tensor product, reduced mod 4.
    """

    n: int
    x: int = 0
    z: int = 0
    phase: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"qubit count must be positive, got {self.n}")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError(f"masks do not fit in {self.n} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    # -- construction -----------------------------------------------------
    @classmethod
    def identity(cls, n: int) -> PauliOp:
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> PauliOp:
        """Parse text such as ``"ZZI"``, ``"-XIX"``, ``"−YZ"`` or ``"+iXZ"``."""
        s = label.strip().replace("−", "-")
        phase = 0
        if s and s[0] in "+-":
            phase = 2 if s[0] == "-" else 0
            s = s[1:]
        if s.startswith("i"):
            phase += 1
            s = s[1:]
        if not s:
            raise ValueError(f"empty Pauli string in {label!r}")
        x = z = 0
        for q, ch in enumerate(s):
            try:
                bx, bz = _LETTERS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r} in {label!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(len(s), x, z, phase)

    @classmethod
    def from_sparse(cls, n: int, factors: dict[int, str], phase: int = 0) -> PauliOp:
        """Build from ``{qubit: letter}`` with 0-based qubit indices."""
        x = z = 0
        for q, ch in factors.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} out of range for n={n}")
            bx, bz = _LETTERS[ch]
            x |= bx << q
            z |= bz << q
        return cls(n, x, z, phase)

    @classmethod
    def single(cls, n: int, q: int, letter: str) -> PauliOp:
        return cls.from_sparse(n, {q: letter})

    # -- views --------------------------------------------------------------
    @property
    def letters(self) -> str:
        return "".join(
            _CHARS[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n)
        )

    @property
    def label(self) -> str:
        return _PHASE_PREFIX[self.phase] + self.letters

    @property
    def coefficient(self) -> complex:
        return (1, 1j, -1, -1j)[self.phase]

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def letter(self, q: int) -> str:
        return _CHARS[((self.x >> q) & 1, (self.z >> q) & 1)]

    def support(self) -> list[int]:
        m = self.x | self.z
        return [q for q in range(self.n) if (m >> q) & 1]

    def unsigned(self) -> PauliOp:
        """Same masks with phase +1."""
        return PauliOp(self.n, self.x, self.z, 0)

    def symplectic(self) -> int:
        """Pack as a single ``2n``-bit integer (x in the low bits)."""
        return self.x | (self.z << self.n)

    def __neg__(self) -> PauliOp:
        return PauliOp(self.n, self.x, self.z, self.phase + 2)

    def __mul__(self, other: PauliOp) -> PauliOp:
        return mul(self, other)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliOp({self.label!r})"


def _check_size(a: PauliOp, b: PauliOp) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")


def _require_hermitian(*ops: PauliOp) -> None:
    for p in ops:
        if not p.is_hermitian:
            raise ValueError(f"{p.label} is not Hermitian")


def mul(a: PauliOp, b: PauliOp) -> PauliOp:
    """Group product ``a * b`` with exact phase."""
    _check_size(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # Rewrite each factor as i^(x.z) X^x Z^z, commute Z^za past X^xb, fold back.
    k = (
        a.phase
        + b.phase
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliOp(a.n, x, z, k)


def commutes(a: PauliOp, b: PauliOp) -> bool:
    _check_size(a, b)
    return (_popcount(a.x & b.z) + _popcount(a.z & b.x)) % 2 == 0


def weight(p: PauliOp) -> int:
    return _popcount(p.x | p.z)


def conjugate_rotation(gen: PauliOp, angle_sign: int, q: PauliOp) -> PauliOp:
    """Return ``U q U^dag`` for ``U = exp(-i * angle_sign * pi/4 * gen)``.

    When ``gen`` and ``q`` anticommute the result is the single Pauli
    ``-i * angle_sign * gen * q``; otherwise ``q`` is returned unchanged.
    """
    _check_size(gen, q)
    _require_hermitian(gen, q)
    if angle_sign not in (1, -1):
        raise ValueError(f"angle_sign must be +1 or -1, got {angle_sign}")
    if commutes(gen, q):
        return q
    r = mul(gen, q)
    return PauliOp(r.n, r.x, r.z, r.phase + (3 if angle_sign == 1 else 1))


@dataclass(frozen=True)
class WeightedTerm:
    """A real coefficient times a phase-free Hermitian Pauli."""

    coeff: float
    pauli: PauliOp

    def __post_init__(self):
        c = float(self.coeff)
        if c != c or c in (float("inf"), float("-inf")):
            raise ValueError("term coefficient must be finite")
        if self.pauli.phase != 0:
            raise ValueError(
                f"term Pauli must carry phase +1 (fold the sign into coeff): {self.pauli.label}"
            )
        object.__setattr__(self, "coeff", c)

    @classmethod
    def signed(cls, coeff: float, pauli: PauliOp) -> WeightedTerm:
        """Fold the (Hermitian) sign of ``pauli`` into ``coeff``."""
        _require_hermitian(pauli)
        return cls(coeff * (-1.0 if pauli.phase == 2 else 1.0), pauli.unsigned())

    def __str__(self) -> str:
        return f"{self.coeff:+g}*{self.pauli.letters}"


class PauliSum:
    """An ordered sum of :class:`WeightedTerm` with distinct Pauli masks."""

    __slots__ = ("terms", "n")

    def __init__(self, terms: Iterable[WeightedTerm], n: int | None = None):
        terms = tuple(terms)
        if n is None:
            if not terms:
                raise ValueError("empty PauliSum needs an explicit qubit count")
            n = terms[0].pauli.n
        seen = set()
        for t in terms:
            if t.pauli.n != n:
                raise ValueError(f"qubit count mismatch: {t.pauli.n} vs {n}")
            key = (t.pauli.x, t.pauli.z)
            if key in seen:
                raise ValueError(f"duplicate term {t.pauli.letters}")
            seen.add(key)
        self.terms = terms
        self.n = n

    @classmethod
    def from_labels(cls, pairs: Iterable[tuple[float, str]]) -> PauliSum:
        return cls(WeightedTerm.signed(c, PauliOp.from_label(s)) for c, s in pairs)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, i: int) -> WeightedTerm:
        return self.terms[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliSum) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, self.terms))

    def as_dict(self) -> dict[str, float]:
        """``{letters: coeff}``; order-insensitive comparison helper."""
        return {t.pauli.letters: t.coeff for t in self.terms}

    def one_norm(self) -> float:
        return sum(abs(t.coeff) for t in self.terms)

    def __str__(self) -> str:
        return " ".join(str(t) for t in self.terms) or "0"

    def __repr__(self) -> str:
        return f"PauliSum({self})"


class RotatingPair(NamedTuple):
    """A term split into its cos- and sin-ramped parts.

    ``cos_term`` carries the incoming coefficient on the incoming Pauli and
    ``sin_term`` the same magnitude on the fully rotated Pauli (sign folded in).
    """

    cos_term: WeightedTerm
    sin_term: WeightedTerm

    def at(self, f: float) -> tuple[WeightedTerm, WeightedTerm]:
        c, s = math.cos(f * math.pi / 2), math.sin(f * math.pi / 2)
        return (
            WeightedTerm(self.cos_term.coeff * c, self.cos_term.pauli),
            WeightedTerm(self.sin_term.coeff * s, self.sin_term.pauli),
        )


def partial_rotation_terms(gen: PauliOp, angle_sign: int, term: WeightedTerm) -> RotatingPair:
    """Split ``exp(-i s pi f gen/4) (c P) exp(+i s pi f gen/4)`` into cos/sin parts.

    Raises if ``gen`` commutes with the term (nothing rotates).
    """
    if commutes(gen, term.pauli):
        raise ValueError(f"{gen.label} commutes with {term.pauli.letters}; nothing to rotate")
    rotated = conjugate_rotation(gen, angle_sign, term.pauli)
    return RotatingPair(term, WeightedTerm.signed(term.coeff, rotated))


class Membership(NamedTuple):
    """``p == phase * prod(gens[i] for i with bits[i] == 1)`` (product in index order)."""

    bits: tuple[int, ...]
    phase: complex


def group_membership(p: PauliOp, gens: Sequence[PauliOp]) -> Membership | None:
    """Decompose ``p`` over ``gens`` by GF(2) elimination; ``None`` if outside the group.

    The generators need not be independent; the first decomposition found is
    returned.
    """
    for g in gens:
        _check_size(p, g)
    basis: list[tuple[int, int, int]] = []  # (pivot bit, vector, combination mask)
    for i, g in enumerate(gens):
        v, combo = g.symplectic(), 1 << i
        for piv, bv, bc in basis:
            if (v >> piv) & 1:
                v ^= bv
                combo ^= bc
        if v:
            basis.append((v.bit_length() - 1, v, combo))
            basis.sort(key=lambda e: -e[0])
    v, combo = p.symplectic(), 0
    for piv, bv, bc in basis:
        if (v >> piv) & 1:
            v ^= bv
            combo ^= bc
    if v:
        return None
    bits = tuple((combo >> i) & 1 for i in range(len(gens)))
    prod = PauliOp.identity(p.n)
    for b, g in zip(bits, gens):
        if b:
            prod = mul(prod, g)
    return Membership(bits, (1, 1j, -1, -1j)[(p.phase - prod.phase) % 4])
