from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from holostab.pauli import PauliOp, PauliSum, mul
from holostab.statevec import (
    apply_pauli,
    apply_rotation,
    basis_state,
    pauli_matrix,
    pauli_sum_matrix,
)

_M = {
    "I": np.eye(2),
    "X": np.array([[0, 1], [1, 0]]),
    "Y": np.array([[0, -1j], [1j, 0]]),
    "Z": np.diag([1, -1]),
}


def dense(p: PauliOp) -> np.ndarray:
    return p.coefficient * reduce(np.kron, (_M[c] for c in p.letters))


words = st.integers(1, 5).flatmap(lambda n: st.text(alphabet="IXYZ", min_size=n, max_size=n))


class TestConventions:
    def test_qubit_zero_is_most_significant(self):
        # X on qubit 0 of |00> gives |10> = index 2
        out = apply_pauli(PauliOp.from_label("XI"), basis_state("00"))
        assert out[2] == 1

    def test_z_signs(self):
        assert apply_pauli(PauliOp.from_label("IZ"), basis_state("01"))[1] == -1

    def test_basis_state(self):
        v = basis_state("101")
        assert v[5] == 1 and np.count_nonzero(v) == 1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_pauli(PauliOp.from_label("XX"), np.zeros(8))


class TestDenseAgreement:
    @given(words, st.sampled_from([0, 1, 2, 3]))
    def test_matrix_matches_kron(self, w, phase):
        p = PauliOp.from_label(w)
        p = PauliOp(p.n, p.x, p.z, phase)
        np.testing.assert_allclose(pauli_matrix(p), dense(p), atol=1e-15)

    @settings(max_examples=50)
    @given(words, st.integers(0, 2**32 - 1))
    def test_frame_matches_columns(self, w, seed):
        p = PauliOp.from_label(w)
        rng = np.random.default_rng(seed)
        F = rng.standard_normal((1 << p.n, 3)) + 1j * rng.standard_normal((1 << p.n, 3))
        got = apply_pauli(p, F)
        for j in range(3):
            np.testing.assert_allclose(got[:, j], apply_pauli(p, F[:, j]))

    @given(words, words)
    def test_action_is_homomorphism(self, a, b):
        if len(a) != len(b):
            return
        pa, pb = PauliOp.from_label(a), PauliOp.from_label(b)
        np.testing.assert_allclose(pauli_matrix(mul(pa, pb)), pauli_matrix(pa) @ pauli_matrix(pb), atol=1e-14)

    @pytest.mark.parametrize("s", [1, -1])
    @pytest.mark.parametrize("f", [0.0, 0.3, 1.0, 2.0])
    def test_rotation_matches_expm(self, s, f):
        g = PauliOp.from_label("XZY")
        v = np.random.default_rng(3).standard_normal(8) + 0j
        want = expm(-1j * s * np.pi / 4 * f * dense(g)) @ v
        np.testing.assert_allclose(apply_rotation(g, s, v, f), want, atol=1e-13)

    def test_sum_matrix(self):
        h = PauliSum.from_labels([(-1, "ZZI"), (0.5, "IYZ")])
        np.testing.assert_allclose(
            pauli_sum_matrix(h), -dense(PauliOp.from_label("ZZI")) + 0.5 * dense(PauliOp.from_label("IYZ"))
        )
