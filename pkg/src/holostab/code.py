"""Stabilizer codes: validation, syndromes, lookup decoding, codeword bases."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .pauli import PauliOp, commutes, group_membership, mul
from .statevec import MAX_DENSE_QUBITS, apply_pauli

__all__ = [
    "StabilizerCode",
    "ValidationReport",
    "ErrorSet",
    "SyndromeTable",
    "CodeFormatError",
    "validate",
    "syndrome",
    "local_error_set",
    "default_local_errors",
    "build_decoder",
    "codeword_basis",
    "code_projector_trace",
    "correctability_matrix",
    "parse_code",
    "format_code",
    "load_code",
    "product_code",
]

MAX_DECODER_SYNDROME_BITS = 20


@dataclass(frozen=True)
class StabilizerCode:
    """An ``[[n, k, d]]`` stabilizer code with explicitly supplied logicals."""

    n: int
    k: int
    generators: tuple[PauliOp, ...]
    logical_x: tuple[PauliOp, ...]
    logical_z: tuple[PauliOp, ...]
    distance: int | None = None
    name: str = ""

    def __post_init__(self):
        for attr in ("generators", "logical_x", "logical_z"):
            ops = tuple(getattr(self, attr))
            object.__setattr__(self, attr, ops)
            for p in ops:
                if p.n != self.n:
                    raise ValueError(f"{attr} entry {p.label} has {p.n} qubits, code has {self.n}")

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    @property
    def dimension(self) -> int:
        """Code-space dimension ``K = 2**k``."""
        return 1 << self.k


@dataclass
class ValidationReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


def _minus_identity_in_group(gens: Sequence[PauliOp]) -> bool:
    """Look for a product of generators equal to ``-I`` (only dependent sets can)."""
    if not gens:
        return False
    basis: list[tuple[int, int, int]] = []
    kernel: list[int] = []
    for i, g in enumerate(gens):
        v, combo = g.symplectic(), 1 << i
        for piv, bv, bc in basis:
            if (v >> piv) & 1:
                v ^= bv
                combo ^= bc
        if v:
            basis.append((v.bit_length() - 1, v, combo))
            basis.sort(key=lambda e: -e[0])
        else:
            kernel.append(combo)
    if len(kernel) > 12:
        raise ValueError("generator set too degenerate to check for -I")
    n = gens[0].n
    for r in range(1, len(kernel) + 1):
        for pick in itertools.combinations(kernel, r):
            combo = 0
            for c in pick:
                combo ^= c
            prod = PauliOp.identity(n)
            for i, g in enumerate(gens):
                if (combo >> i) & 1:
                    prod = mul(prod, g)
            if prod.phase != 0:
                return True
    return False


def _independent(gens: Sequence[PauliOp]) -> bool:
    for i, g in enumerate(gens):
        if group_membership(g, gens[:i]) is not None:
            return False
    return True


def validate(code: StabilizerCode) -> ValidationReport:
    """Check every structural invariant of ``code``; never raises."""
    rep = ValidationReport()
    gens, lx, lz = code.generators, code.logical_x, code.logical_z
    if not 0 <= code.k <= code.n:
        rep.problems.append(f"k={code.k} outside [0, n={code.n}]")
    if len(gens) != code.n - code.k:
        rep.problems.append(f"expected n-k={code.n - code.k} generators, got {len(gens)}")
    for i, g in enumerate(gens):
        if g.phase != 0:
            rep.problems.append(f"generator {i + 1} ({g.label}) must carry phase +1")
        if g.is_identity:
            rep.problems.append(f"generator {i + 1} is the identity")
    for i, j in itertools.combinations(range(len(gens)), 2):
        if not commutes(gens[i], gens[j]):
            rep.problems.append(f"generators {i + 1} and {j + 1} anticommute")
    if not _independent(gens):
        rep.problems.append("generators are not independent")
    if _minus_identity_in_group(gens):
        rep.problems.append("-I lies in the stabilizer group")
    if len(lx) != code.k or len(lz) != code.k:
        rep.problems.append(f"expected {code.k} logical X and Z operators, got {len(lx)}/{len(lz)}")
    for name, ops in (("X", lx), ("Z", lz)):
        for i, op in enumerate(ops):
            if not op.is_hermitian:
                rep.problems.append(f"logical {name}{i + 1} is not Hermitian")
            for j, g in enumerate(gens):
                if not commutes(op, g):
                    rep.problems.append(f"logical {name}{i + 1} anticommutes with generator {j + 1}")
            if group_membership(op, gens) is not None:
                rep.problems.append(f"logical {name}{i + 1} lies in the stabilizer group")
    for i, a in enumerate(lx):
        for j, b in enumerate(lz):
            anti = not commutes(a, b)
            if anti != (i == j):
                rep.problems.append(
                    f"logical X{i + 1} and Z{j + 1} should {'anti' if i == j else ''}commute"
                )
    for ops, name in ((lx, "X"), (lz, "Z")):
        for i, j in itertools.combinations(range(len(ops)), 2):
            if not commutes(ops[i], ops[j]):
                rep.problems.append(f"logical {name}{i + 1} and {name}{j + 1} anticommute")
    return rep


def syndrome(code: StabilizerCode, e: PauliOp) -> tuple[int, ...]:
    """Bit ``j`` is 1 iff ``e`` anticommutes with generator ``j``."""
    if e.n != code.n:
        raise ValueError(f"error has {e.n} qubits, code has {code.n}")
    return tuple(0 if commutes(e, g) else 1 for g in code.generators)


@dataclass(frozen=True)
class ErrorSet:
    elements: tuple[PauliOp, ...]
    label: str = ""

    def __post_init__(self):
        keys = [(p.x, p.z) for p in self.elements]
        if len(set(keys)) != len(keys):
            raise ValueError("error set contains duplicates (up to phase)")

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def union(self, other: ErrorSet) -> ErrorSet:
        seen = {(p.x, p.z) for p in self.elements}
        extra = tuple(p for p in other if (p.x, p.z) not in seen)
        return ErrorSet(self.elements + extra, f"{self.label}+{other.label}")


def local_error_set(
    code: StabilizerCode, max_weight: int, pauli_filter: Iterable[str] | None = None
) -> ErrorSet:
    """Non-identity Hermitian Paulis of weight ``1..max_weight``.

    ``max_weight == 0`` yields the trivial set ``{I}``.
    """
    if max_weight < 0:
        raise ValueError("max_weight must be non-negative")
    letters = sorted(set(pauli_filter)) if pauli_filter is not None else ["X", "Y", "Z"]
    if not set(letters) <= {"X", "Y", "Z"}:
        raise ValueError(f"pauli_filter must be a subset of XYZ, got {letters}")
    tag = "".join(letters)
    if max_weight == 0:
        return ErrorSet((PauliOp.identity(code.n),), "weight<=0")
    out = []
    for w in range(1, min(max_weight, code.n) + 1):
        for qubits in itertools.combinations(range(code.n), w):
            for word in itertools.product(letters, repeat=w):
                out.append(PauliOp.from_sparse(code.n, dict(zip(qubits, word))))
    label = f"weight<={max_weight}" + ("" if tag == "XYZ" else f"[{tag}]")
    return ErrorSet(tuple(out), label)


@dataclass(frozen=True)
class SyndromeTable:
    """Minimum-weight lookup decoder."""

    code: StabilizerCode
    table: dict[tuple[int, ...], PauliOp]

    def correction(self, s: Sequence[int]) -> PauliOp:
        return self.table[tuple(int(b) for b in s)]

    def residue(self, e: PauliOp) -> PauliOp:
        """``correction(syndrome(e)) * e``; a stabilizer iff ``e`` is corrected."""
        return mul(self.correction(syndrome(self.code, e)), e)

    def corrects(self, e: PauliOp) -> bool:
        return group_membership(self.residue(e), self.code.generators) is not None

    def __len__(self) -> int:
        return len(self.table)


def build_decoder(code: StabilizerCode) -> SyndromeTable:
    """Fill every syndrome with a minimum-weight correction.

    Searches weight 0, 1, 2, ... and within one weight keeps the
    lexicographically smallest Pauli string (``I < X < Y < Z``).
    """
    m = code.num_generators
    if m > MAX_DECODER_SYNDROME_BITS:
        raise ValueError(f"lookup table needs 2^{m} entries; limit is 2^{MAX_DECODER_SYNDROME_BITS}")
    # per-qubit, per-letter syndrome bitmask (bit j <-> generator j)
    single = {}
    for q in range(code.n):
        for ch in "XYZ":
            s = syndrome(code, PauliOp.single(code.n, q, ch))
            single[q, ch] = sum(b << j for j, b in enumerate(s))
    found: dict[int, str] = {0: "I" * code.n}
    total = 1 << m
    for w in range(1, code.n + 1):
        if len(found) == total:
            break
        best: dict[int, str] = {}
        for qubits in itertools.combinations(range(code.n), w):
            for word in itertools.product("XYZ", repeat=w):
                s = 0
                for q, ch in zip(qubits, word):
                    s ^= single[q, ch]
                if s in found:
                    continue
                chars = ["I"] * code.n
                for q, ch in zip(qubits, word):
                    chars[q] = ch
                label = "".join(chars)
                if s not in best or label < best[s]:
                    best[s] = label
        found.update(best)
    table = {
        tuple((s >> j) & 1 for j in range(m)): PauliOp.from_label(label)
        for s, label in sorted(found.items())
    }
    return SyndromeTable(code, table)


def default_local_errors(code: StabilizerCode, decoder: SyndromeTable | None = None) -> ErrorSet:
    """Correctable Paulis of weight <= floor((d-1)/2) (weight 1 when d is unknown).

    For the repetition code this keeps exactly the single bit flips.
    """
    w = (code.distance - 1) // 2 if code.distance else 1
    decoder = decoder or build_decoder(code)
    cands = local_error_set(code, max(w, 1))
    keep = tuple(e for e in cands if decoder.corrects(e))
    return ErrorSet(keep, f"correctable weight<={max(w, 1)}")


def _project_code(code: StabilizerCode, psi: np.ndarray) -> np.ndarray:
    for g in code.generators:
        psi = 0.5 * (psi + apply_pauli(g, psi))
    return psi


def code_projector_trace(code: StabilizerCode) -> float:
    """``Tr prod_j (I + S_j)/2`` computed over the stabilizer group, no dense matrices."""
    m = code.num_generators
    if m > 24:
        raise ValueError("too many generators to enumerate the group")
    prod = PauliOp.identity(code.n)
    acc = 1.0  # identity term
    prev = 0
    for i in range(1, 1 << m):
        gray = i ^ (i >> 1)
        flip = (gray ^ prev).bit_length() - 1
        prev = gray
        prod = mul(prod, code.generators[flip])
        if prod.is_identity:
            acc += prod.coefficient.real
    return acc * 2.0 ** (code.n - m)


def codeword_basis(code: StabilizerCode) -> np.ndarray:
    """Orthonormal code-space basis as columns of a ``(2**n, 2**k)`` array.

    Column ``b`` is ``prod_i Xbar_i^{b_i} |0...0>_L`` with logical qubit 0 the
    most significant bit of ``b``; ``|0...0>_L`` is the projection of the
    first computational seed with non-zero overlap, phased so its first
    largest-magnitude amplitude is real positive.
    """
    if code.n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense codewords limited to n <= {MAX_DENSE_QUBITS}")
    dim = 1 << code.n
    K = code.dimension
    trace = code_projector_trace(code)
    if abs(trace - K) > 1e-9:
        raise ValueError(f"code projector has rank {trace:g}, expected {K}")
    zero = None
    for seed in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[seed] = 1.0
        v = _project_code(code, v)
        for lz in code.logical_z:
            v = 0.5 * (v + apply_pauli(lz, v))
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            zero = v / nv
            break
    if zero is None:
        raise ValueError("code space is empty; generators are inconsistent")
    top = np.flatnonzero(np.abs(zero) > np.abs(zero).max() - 1e-9)[0]
    zero *= abs(zero[top]) / zero[top]
    cols = []
    for b in range(K):
        v = zero
        for i, lx in enumerate(code.logical_x):
            if (b >> (code.k - 1 - i)) & 1:
                v = apply_pauli(lx, v)
        cols.append(v)
    basis = np.stack(cols, axis=1)
    gram = basis.conj().T @ basis
    if not np.allclose(gram, np.eye(K), atol=1e-10):
        raise ValueError("codeword basis is not orthonormal; logical operators inconsistent")
    return basis


def correctability_matrix(
    code: StabilizerCode, errors: Sequence[PauliOp], basis: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    """Error-correction condition check on the code space.

    Returns ``(alpha, residual)`` where ``V^dag E_i^dag E_j V ~ alpha_ij * I`` and
    ``residual`` is the largest entrywise deviation from that form.
    """
    V = codeword_basis(code) if basis is None else basis
    K = V.shape[1]
    applied = [apply_pauli(e, V) for e in errors]
    m = len(errors)
    alpha = np.zeros((m, m), dtype=complex)
    resid = 0.0
    for i in range(m):
        for j in range(m):
            block = applied[i].conj().T @ applied[j]
            a = np.trace(block) / K
            alpha[i, j] = a
            resid = max(resid, float(np.abs(block - a * np.eye(K)).max()))
    return alpha, resid


class CodeFormatError(ValueError):
    """Malformed code file; message carries the 1-based line number."""


def parse_code(text: str, name: str = "") -> StabilizerCode:
    """Parse the line-oriented code format (``n``, ``k``, ``d``, ``stab``, ``logx``, ``logz``)."""
    n = k = d = None
    stabs, lxs, lzs = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        if len(parts) != 2:
            raise CodeFormatError(f"line {lineno}: expected '<key> <value>', got {raw.strip()!r}")
        val = parts[1]
        try:
            if key in ("n", "k", "d"):
                iv = int(val)
                if key == "n":
                    n = iv
                elif key == "k":
                    k = iv
                else:
                    d = iv
            elif key in ("stab", "logx", "logz"):
                p = PauliOp.from_label(val)
                if n is not None and p.n != n:
                    raise ValueError(f"Pauli has {p.n} qubits, expected {n}")
                {"stab": stabs, "logx": lxs, "logz": lzs}[key].append(p)
            else:
                raise ValueError(f"unknown key {parts[0]!r}")
        except ValueError as exc:
            raise CodeFormatError(f"line {lineno}: {exc}") from None
    if n is None or k is None:
        raise CodeFormatError("missing 'n' or 'k' line")
    try:
        return StabilizerCode(n, k, tuple(stabs), tuple(lxs), tuple(lzs), d, name)
    except ValueError as exc:
        raise CodeFormatError(str(exc)) from None


def format_code(code: StabilizerCode) -> str:
    lines = [f"n {code.n}", f"k {code.k}"]
    if code.distance is not None:
        lines.append(f"d {code.distance}")
    lines += [f"stab {g.letters}" for g in code.generators]
    lines += [f"logx {p.label}" for p in code.logical_x]
    lines += [f"logz {p.label}" for p in code.logical_z]
    return "\n".join(lines) + "\n"


def load_code(path: str | Path) -> StabilizerCode:
    path = Path(path)
    return parse_code(path.read_text(encoding="utf-8"), name=path.stem)


def _embed(p: PauliOp, offset: int, n: int) -> PauliOp:
    return PauliOp(n, p.x << offset, p.z << offset, p.phase)


def product_code(*codes: StabilizerCode, name: str = "") -> StabilizerCode:
    """Independent blocks side by side (block 1 occupies the lowest qubits)."""
    n = sum(c.n for c in codes)
    gens, lx, lz = [], [], []
    off = 0
    for c in codes:
        gens += [_embed(g, off, n) for g in c.generators]
        lx += [_embed(p, off, n) for p in c.logical_x]
        lz += [_embed(p, off, n) for p in c.logical_z]
        off += c.n
    dists = [c.distance for c in codes]
    d = min(dists) if all(x is not None for x in dists) else None
    return StabilizerCode(n, sum(c.k for c in codes), tuple(gens), tuple(lx), tuple(lz), d, name)
