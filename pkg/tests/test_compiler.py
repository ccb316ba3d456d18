import json
import math
import re
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from holostab.circuit import parse_circuit
from holostab.code import local_error_set
from holostab.compiler import (
    RampSpec,
    RewriteError,
    SynthesisError,
    frozen_schedule,
    gap_report,
    hamiltonian_at,
    max_weight,
    parse_terms,
    rewrite_generators,
    schedule_from_json,
    schedule_to_json,
    stage_spectrum,
    synthesize,
    validate_schedule,
)
from holostab.pauli import PauliOp, PauliSum, conjugate_rotation
from holostab.statevec import apply_pauli, pauli_matrix, pauli_sum_matrix

from conftest import CORPUS, circuit, cnot_schedules, code, schedule


def two_block(*terms):
    """``(coeff, "X1X3X4X6", "Z1")`` -> 14-letter Pauli; digits are 1-based qubits per block."""
    out = []
    for coeff, b1, b2 in terms:
        chars = ["I"] * 14
        for off, spec in ((0, b1), (7, b2)):
            for letter, q in re.findall(r"([XYZ])(\d)", spec):
                chars[off + int(q) - 1] = letter
        out.append((coeff, "".join(chars)))
    return dict((s, float(c)) for c, s in out)


STEANE_X = ["X1X3X4X6", "X2X3X6X7", "X1X3X5X7"]
STEANE_Z = [s.replace("X", "Z") for s in STEANE_X]
STEANE = STEANE_X + STEANE_Z


def d(ps: PauliSum) -> dict:
    return {k: v for k, v in ps.as_dict().items() if v != 0}


def at_f(sched, stage, f):
    """H at ramp value ``f`` inside a 1-based stage (cosine ramp inverted)."""
    st_ = sched.stages[stage - 1]
    s = math.acos(1 - 2 * f) / math.pi
    return hamiltonian_at(sched, sched.boundaries[stage - 1] + s * st_.duration)


class TestRamps:
    @pytest.mark.parametrize("family", ["linear", "cosine", "bump"])
    def test_endpoints_and_monotone(self, family):
        r = RampSpec(family, 1.0)
        assert r(0.0) == 0.0 and r(1.0) == pytest.approx(1.0, abs=1e-15)
        grid = r(np.linspace(0, 1, 501))
        assert np.all(np.diff(grid) >= -1e-15)

    @pytest.mark.parametrize("family", ["cosine", "bump"])
    def test_flat_ends(self, family):
        r = RampSpec(family, 1.0)
        assert r.derivative(0.0) == pytest.approx(0, abs=1e-12)
        assert r.derivative(1.0) == pytest.approx(0, abs=1e-12)

    @given(st.floats(0.01, 0.99))
    def test_derivative_matches_finite_difference(self, s):
        for fam in ("linear", "cosine", "bump"):
            r = RampSpec(fam, 1.0)
            h = 1e-6
            assert r.derivative(s) == pytest.approx((r(s + h) - r(s - h)) / (2 * h), rel=1e-5, abs=1e-8)

    @pytest.mark.parametrize("bad", [("quintic", 1.0), ("cosine", -1.0), ("cosine", math.inf)])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            RampSpec(*bad)


class TestRepetitionSchedule:
    def test_six_stages_two_breaks(self, rep3_xbar):
        assert len(rep3_xbar.stages) == 6
        broken = [st.index for st in rep3_xbar.stages if st.break_info]
        assert broken == [3, 4]
        assert all(st.break_info.c_b == 0.5 for st in rep3_xbar.stages if st.break_info)

    def test_default_break_is_smallest_index(self, rep3_xbar):
        assert rep3_xbar.stages[2].break_info.index == 0

    def test_override_reproduces_reference_choice(self, rep3, rep3_xbar):
        s = synthesize(rep3, rep3_xbar.circuit, break_override={3: 1, 4: 1})
        assert s.stages[2].break_info.index == 1
        assert s.stages == schedule("repetition3", "repetition3_xbar", "last").stages

    @pytest.mark.parametrize(
        "stage, terms",
        [
            (1, [(-1.0, "ZZI", "cos"), (1.0, "YZI", "sin"), (-1.0, "IZZ", None)]),
            (2, [(1.0, "YZI", "cos"), (1.0, "ZZI", "sin"), (-1.0, "IZZ", None)]),
            (3, [(1.0, "ZZI", "cos"), (-1.0, "ZYI", "sin"), (-0.5, "IZZ", "cos"), (0.5, "IYZ", "sin")]),
            (4, [(-1.0, "ZYI", "cos"), (-1.0, "ZZI", "sin"), (0.5, "IYZ", "cos"), (0.5, "IZZ", "sin")]),
        ],
    )
    def test_stage_formulas(self, stage, terms):
        s = schedule("repetition3", "repetition3_xbar", "last")
        assert s.stages[stage - 1].symbolic() == terms

    @pytest.mark.parametrize(
        "boundary, expected",
        [
            (0, {"ZZI": -1, "IZZ": -1}),
            (1, {"YZI": 1, "IZZ": -1}),
            (2, {"ZZI": 1, "IZZ": -0.5}),  # break already applied
            (3, {"ZYI": -1, "IYZ": 0.5}),
            (4, {"ZZI": -1, "IZZ": 1}),  # restored
            (6, {"ZZI": -1, "IZZ": -1}),
        ],
    )
    def test_boundary_hamiltonians(self, boundary, expected):
        s = schedule("repetition3", "repetition3_xbar", "last")
        assert d(hamiltonian_at(s, s.boundaries[boundary])) == expected

    def test_stage_one_midpoint(self, rep3_xbar):
        h = at_f(rep3_xbar, 1, 0.5)
        r = math.sqrt(2) / 2
        assert [t.coeff for t in h] == pytest.approx([-r, r, -1])

    def test_out_of_range(self, rep3_xbar):
        with pytest.raises(ValueError):
            hamiltonian_at(rep3_xbar, rep3_xbar.total_time + 1)

    def test_max_weight(self, rep3_xbar):
        assert max_weight(rep3_xbar).overall == 2


class TestSynthesisErrors:
    def test_logical_generator(self, rep3):
        with pytest.raises(SynthesisError, match="logical operator"):
            synthesize(rep3, circuit("repetition3", "repetition3_zbar"))

    def test_logical_generator_even_with_override(self, rep3):
        with pytest.raises(SynthesisError, match="logical operator"):
            synthesize(rep3, circuit("repetition3", "repetition3_zbar"), skip_audit=True)

    def test_trivial_gate(self, rep3):
        with pytest.raises(SynthesisError, match="trivial"):
            synthesize(rep3, parse_circuit("RZZ 1 2", 3), skip_audit=True)

    def test_audit_failure_blocks(self, rep3):
        # Y errors on qubit 1 are not correctable on the bit-flip code
        with pytest.raises(SynthesisError, match="not fault tolerant"):
            synthesize(rep3, circuit("repetition3", "repetition3_xbar"), e_local=local_error_set(rep3, 1))

    def test_skip_audit_recorded(self, rep3):
        s = synthesize(rep3, circuit("repetition3", "repetition3_xbar"), skip_audit=True)
        assert s.meta()["audit"] == "skipped by override"

    def test_bad_break_override(self, rep3):
        with pytest.raises(SynthesisError):
            synthesize(rep3, circuit("repetition3", "repetition3_xbar"), break_override={3: 5})

    @pytest.mark.parametrize("c_b", [0.0, 1.0, -0.2])
    def test_c_b_range(self, rep3, c_b):
        with pytest.raises(ValueError):
            synthesize(rep3, circuit("repetition3", "repetition3_xbar"), c_b=c_b)


class TestSpectrum:
    def test_stage_one(self, rep3_xbar):
        assert sorted(stage_spectrum(rep3_xbar, 1).energies) == [-2, 0, 0, 2]

    def test_stage_three(self, rep3_xbar):
        t = stage_spectrum(rep3_xbar, 3)
        assert sorted(t.energies) == [-1.5, -0.5, 0.5, 1.5]
        assert t.ground_energy == -1.5
        assert list(t.rows())[0][2]

    def test_gaps_rep3(self, rep3_xbar):
        gaps = gap_report(rep3_xbar)
        assert [g.coupled_gap for g in gaps] == [2, 2, 1, 1, 2, 2]
        assert [g.ground_gap for g in gaps] == [2, 2, 1, 1, 2, 2]

    @pytest.mark.parametrize(
        "code_name, circ, policy",
        [("repetition3", "repetition3_xbar", "first"), ("steane", "steane_xbar", "first"),
         ("steane", "steane_hbar", "first"), ("steane_pair", "steane_cnot", "last")],
    )
    def test_coupled_gap_lower_bound(self, code_name, circ, policy):
        for g in gap_report(schedule(code_name, circ, policy)):
            assert g.coupled_gap >= (1 if g.broken else 2)
            assert g.broken == (g.n_anticommuting % 2 == 0)

    @pytest.mark.parametrize(
        "code_name, circ", [("repetition3", "repetition3_xbar"), ("steane", "steane_xbar"), ("steane", "steane_hbar")]
    )
    def test_dense_spectrum_invariance(self, code_name, circ):
        s = schedule(code_name, circ)
        for l, st_ in enumerate(s.stages, 1):
            want = np.sort(np.repeat(stage_spectrum(s, l).energies, 1 << (s.n - len(st_.incoming))))
            for f in (0.0, 0.2, 0.5, 0.8, 1.0):
                got = np.linalg.eigvalsh(pauli_sum_matrix(st_.terms_at(f)))
                np.testing.assert_allclose(got, want, atol=1e-9)

    @pytest.mark.parametrize("code_name, circ", [("steane", "steane_xbar"), ("steane", "steane_hbar")])
    def test_gate_generator_off_diagonal_on_ground_space(self, code_name, circ):
        s = schedule(code_name, circ)
        for st_ in s.stages:
            h = pauli_sum_matrix(st_.terms_at(0.0))
            w, v = np.linalg.eigh(h)
            g0 = v[:, np.isclose(w, w[0])]
            block = g0.conj().T @ pauli_matrix(st_.gate.generator) @ g0
            assert np.abs(block).max() < 1e-12


class TestChaining:
    @pytest.mark.parametrize(
        "code_name, circ", [("repetition3", "repetition3_xbar"), ("steane", "steane_hbar")]
    )
    def test_full_angle_consistency(self, code_name, circ):
        s = schedule(code_name, circ)
        for st_ in s.stages:
            g = st_.gate
            for t, out in zip(st_.incoming, st_.outgoing()):
                rotated = conjugate_rotation(g.generator, g.angle_sign, t.pauli)
                sign = -1.0 if rotated.phase == 2 else 1.0
                assert (out.pauli, out.coeff) == (rotated.unsigned(), sign * t.coeff)

    @pytest.mark.parametrize(
        "code_name, circ", [("repetition3", "repetition3_xbar"), ("steane", "steane_xbar"), ("steane", "steane_hbar")]
    )
    def test_corpus_schedules_validate(self, code_name, circ):
        assert validate_schedule(schedule(code_name, circ)).ok

    def test_truncation_breaks_cyclicity(self, rep3_xbar):
        cut = replace(rep3_xbar, stages=rep3_xbar.stages[:3])
        rep = validate_schedule(cut)
        assert not rep.ok and any("cyclic" in p for p in rep.problems)

    def test_tampered_partner_detected(self, rep3_xbar):
        st0 = rep3_xbar.stages[0]
        bad = replace(st0, partners=(None,) + st0.partners[1:])
        rep = validate_schedule(replace(rep3_xbar, stages=(bad,) + rep3_xbar.stages[1:]))
        assert not rep.ok

    def test_frozen_schedule(self, rep3):
        s = frozen_schedule(rep3, 3.0)
        assert d(hamiltonian_at(s, 1.5)) == {"ZZI": -1, "IZZ": -1}
        assert validate_schedule(s).ok


class TestSteaneCnot:
    def test_stage_count(self):
        naive, _ = cnot_schedules()
        assert len(naive.stages) == 63

    def test_h_t4(self):
        naive, _ = cnot_schedules()
        want = two_block(
            *[(-1, s, "") for s in STEANE],
            (-1, "", "X2X3X6X7"), (-1, "", "Z2Z3Z6Z7"),
            (-1, "", "Z1X3X4X6"), (-1, "", "Z1X3X5X7"),
            (-1, "", "Y1Z3Z4Z6"), (-1, "", "Y1Z3Z5Z7"),
        )
        assert d(naive.stages[3].outgoing()) == want

    def test_stage_five(self):
        naive, _ = cnot_schedules()
        st5 = naive.stages[4]
        assert str(st5.gate) == "RZZ 1 8"
        assert len(st5.anticommuting) == 4
        broken = st5.incoming[st5.break_info.index]
        assert broken.pauli.letters == next(iter(two_block((-1, "", "Y1Z3Z5Z7"))))
        got = {(letters, tag): c for c, letters, tag in st5.symbolic() if tag}
        want = {}
        for c, b1, b2, tag in [
            (-1, "X1X3X4X6", "", "cos"), (1, "Y1X3X4X6", "Z1", "sin"),
            (-1, "X1X3X5X7", "", "cos"), (1, "Y1X3X5X7", "Z1", "sin"),
            (-1, "", "Y1Z3Z4Z6", "cos"), (-1, "Z1", "X1Z3Z4Z6", "sin"),
            (-0.5, "", "Y1Z3Z5Z7", "cos"), (-0.5, "Z1", "X1Z3Z5Z7", "sin"),
        ]:
            (letters, coeff), = two_block((c, b1, b2)).items()
            want[letters, tag] = coeff
        assert got == want

    def test_h_t5(self):
        naive, _ = cnot_schedules()
        want = two_block(
            *[(-1, s, "") for i, s in enumerate(STEANE) if i not in (0, 2)],
            (-1, "", "X2X3X6X7"), (-1, "", "Z2Z3Z6Z7"),
            (-1, "", "Z1X3X4X6"), (-1, "", "Z1X3X5X7"),
            (1, "Y1X3X4X6", "Z1"), (1, "Y1X3X5X7", "Z1"),
            (-1, "Z1", "X1Z3Z4Z6"), (-1, "Z1", "X1Z3Z5Z7"),
        )
        assert d(naive.stages[4].outgoing()) == want

    def test_h_after_first_pair(self):
        naive, _ = cnot_schedules()
        want = two_block(
            *[(-1, s, "") for i, s in enumerate(STEANE) if i not in (0, 2)],
            *[(-1, "", s) for i, s in enumerate(STEANE) if i not in (3, 5)],
            (-1, "X1X3X4X6", "X1"), (-1, "X1X3X5X7", "X1"),
            (-1, "Z1", "Z1Z3Z4Z6"), (-1, "Z1", "Z1Z3Z5Z7"),
        )
        assert d(naive.stages[8].outgoing()) == want

    def test_h_t3_first_form(self):
        naive, _ = cnot_schedules()
        want = two_block(
            (-1, "X1X3X4X6", "X1X3"), (-1, "X2X3X6X7", "X2X3"), (-1, "X1X3X5X7", "X1X3"),
            *[(-1, s, "") for s in STEANE_Z],
            *[(-1, "", s) for s in STEANE_X],
            (-1, "Z1Z3", "Z1Z3Z4Z6"), (-1, "Z2Z3", "Z2Z3Z6Z7"), (-1, "Z1Z3", "Z1Z3Z5Z7"),
        )
        assert d(naive.stages[26].outgoing()) == want

    def test_naive_final_is_weight_eight_form(self):
        naive, _ = cnot_schedules()
        want = two_block(
            *[(-1, s, s) for s in STEANE_X],
            *[(-1, s, "") for s in STEANE_Z],
            *[(-1, "", s) for s in STEANE_X],
            *[(-1, s, s) for s in STEANE_Z],
        )
        assert d(naive.final_terms) == want

    def test_rewrite_file_is_second_form(self):
        after, terms = parse_terms((CORPUS / "steane_cnot_rewrite.terms").read_text())
        want = two_block(
            (-1, "X1X3X4X6", "X4X6"), (-1, "X2X3X6X7", "X6X7"), (-1, "X1X3X5X7", "X5X7"),
            *[(-1, s, "") for s in STEANE_Z],
            *[(-1, "", s) for s in STEANE_X],
            (-1, "Z4Z6", "Z1Z3Z4Z6"), (-1, "Z6Z7", "Z2Z3Z6Z7"), (-1, "Z5Z7", "Z1Z3Z5Z7"),
        )
        assert after == 27 and d(terms) == want

    def test_weights(self):
        naive, rewritten = cnot_schedules()
        assert max_weight(naive).overall == 8
        assert max_weight(rewritten).overall == 6

    def test_cyclicity(self):
        naive, rewritten = cnot_schedules()
        assert not validate_schedule(naive).ok
        assert validate_schedule(rewritten).ok
        initial = two_block(*[(-1, s, "") for s in STEANE], *[(-1, "", s) for s in STEANE])
        assert d(rewritten.final_terms) == initial

    def test_rewrite_preserves_ground_projector(self):
        naive, rewritten = cnot_schedules()
        old, new = naive.stages[26].outgoing(), rewritten.stages[27].incoming
        rng = np.random.default_rng(7)
        v = rng.standard_normal((1 << 14, 3)) + 1j * rng.standard_normal((1 << 14, 3))

        def project(terms, v):
            for t in terms:
                v = 0.5 * (v - np.sign(t.coeff) * apply_pauli(t.pauli, v))
            return v

        np.testing.assert_allclose(project(old, v), project(new, v), atol=1e-10)


class TestRewrite:
    def test_identity_rewrite(self, rep3_xbar):
        same = rewrite_generators(rep3_xbar, 2, rep3_xbar.stages[1].outgoing())
        assert same is rep3_xbar

    def test_group_mismatch(self, rep3_xbar):
        with pytest.raises(RewriteError, match="outside"):
            rewrite_generators(rep3_xbar, 0, PauliSum.from_labels([(-1, "ZZZ"), (-1, "IZZ")]))

    def test_sign_violation(self, rep3_xbar):
        with pytest.raises(RewriteError, match="eigenvalue"):
            rewrite_generators(rep3_xbar, 0, PauliSum.from_labels([(1, "ZIZ"), (-1, "IZZ")]))

    def test_equivalent_set_accepted(self, rep3_xbar):
        s = rewrite_generators(rep3_xbar, 0, PauliSum.from_labels([(-1, "ZIZ"), (-1, "IZZ")]))
        assert s.rewrites and s.stages[0].incoming.as_dict() == {"ZIZ": -1, "IZZ": -1}

    def test_term_count(self, rep3_xbar):
        with pytest.raises(RewriteError):
            rewrite_generators(rep3_xbar, 0, PauliSum.from_labels([(-1, "ZIZ")]))

    def test_parse_terms_errors(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_terms("after 3\n-1 ZZ extra\n")


class TestJson:
    @pytest.mark.parametrize(
        "code_name, circ, policy",
        [("repetition3", "repetition3_xbar", "last"), ("steane", "steane_hbar", "first")],
    )
    def test_round_trip_byte_identical(self, code_name, circ, policy):
        s = schedule(code_name, circ, policy)
        text = schedule_to_json(s)
        back = schedule_from_json(text)
        assert schedule_to_json(back) == text
        assert validate_schedule(back).ok
        assert back.stages == s.stages

    def test_cnot_with_rewrite_round_trip(self):
        _, rewritten = cnot_schedules()
        text = schedule_to_json(rewritten)
        back = schedule_from_json(text)
        assert schedule_to_json(back) == text and validate_schedule(back).ok

    def test_schema(self, rep3_xbar):
        doc = json.loads(schedule_to_json(rep3_xbar))
        assert doc["schema_version"] == 1
        st1 = doc["stages"][0]
        assert st1["terms"][0] == {"coefficient": -1.0, "pauli": "ZZI", "partner": "-YZI"}
        assert doc["stages"][2]["break"] == {"term": 1, "c_b": 0.5}

    def test_wrong_schema(self, rep3_xbar):
        doc = json.loads(schedule_to_json(rep3_xbar))
        doc["schema_version"] = 99
        with pytest.raises(ValueError):
            schedule_from_json(json.dumps(doc))
