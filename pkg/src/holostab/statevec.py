"""Dense state-vector primitives: Pauli action, rotations, dense matrices.

Basis index convention: qubit 0 (leftmost in Pauli text) is the most
significant bit of the computational-basis index, so ``|q0 q1 ... q_{n-1}>``
reads left to right like the Pauli labels and ``np.kron`` ordering.

Arrays may be a single state ``(2**n,)`` or a frame of states ``(2**n, m)``.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .pauli import PauliOp, PauliSum

__all__ = [
    "MAX_DENSE_QUBITS",
    "state_masks",
    "apply_pauli",
    "apply_rotation",
    "pauli_matrix",
    "pauli_sum_matrix",
    "basis_state",
]

MAX_DENSE_QUBITS = 14


def _reverse_bits(v: int, n: int) -> int:
    out = 0
    for q in range(n):
        if (v >> q) & 1:
            out |= 1 << (n - 1 - q)
    return out


def state_masks(p: PauliOp) -> tuple[int, int]:
    """X and Z masks in basis-index bit order."""
    return _reverse_bits(p.x, p.n), _reverse_bits(p.z, p.n)


@lru_cache(maxsize=4096)
def _action(n: int, xs: int, zs: int, phase: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ xs
    parity = np.bitwise_count(src & zs) & 1
    ph = (1, 1j, -1, -1j)[phase % 4]
    factors = np.where(parity == 1, -ph, ph).astype(complex)
    src.setflags(write=False)
    factors.setflags(write=False)
    return src, factors


def pauli_action(p: PauliOp) -> tuple[np.ndarray, np.ndarray]:
    """``(src, factor)`` with ``(P psi)[i] = factor[i] * psi[src[i]]``."""
    if p.n > MAX_DENSE_QUBITS:
        raise ValueError(f"dense action limited to n <= {MAX_DENSE_QUBITS}, got {p.n}")
    xs, zs = state_masks(p)
    # sigma(x, z) = i^{x.z} X^x Z^z
    return _action(p.n, xs, zs, p.phase + bin(p.x & p.z).count("1"))


def _check_dim(n: int, psi: np.ndarray) -> None:
    if psi.shape[0] != 1 << n:
        raise ValueError(f"state dimension {psi.shape[0]} does not match n={n}")


def apply_pauli(p: PauliOp, psi: np.ndarray) -> np.ndarray:
    _check_dim(p.n, psi)
    src, fac = pauli_action(p)
    if psi.ndim == 1:
        return fac * psi[src]
    return fac[:, None] * psi[src]


def apply_rotation(gen: PauliOp, angle_sign: int, psi: np.ndarray, f: float = 1.0) -> np.ndarray:
    """Apply ``exp(-i * angle_sign * (pi/4) * f * gen)``."""
    th = math.pi / 4 * f
    return math.cos(th) * psi - 1j * angle_sign * math.sin(th) * apply_pauli(gen, psi)


def pauli_matrix(p: PauliOp) -> np.ndarray:
    return apply_pauli(p, np.eye(1 << p.n, dtype=complex))


def pauli_sum_matrix(h: PauliSum) -> np.ndarray:
    out = np.zeros((1 << h.n, 1 << h.n), dtype=complex)
    for t in h:
        out += t.coeff * pauli_matrix(t.pauli)
    return out


def basis_state(bits: str) -> np.ndarray:
    """Computational basis state from a bit string like ``"010"``."""
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v
