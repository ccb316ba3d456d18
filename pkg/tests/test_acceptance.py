"""Acceptance criteria 1-10, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines; criterion 8
(n = 14 evolution, about half an hour) needs ``--runslow``.
"""

import math
import time
from functools import reduce

import numpy as np
import pytest
from scipy.linalg import expm

from holostab.circuit import apply_circuit, audit_fault_tolerance, expand_macros, parse_circuit
from holostab.code import correctability_matrix, local_error_set
from holostab.compiler import (
    gap_report,
    hamiltonian_at,
    max_weight,
    parse_terms,
    rewrite_generators,
    stage_spectrum,
    synthesize,
    validate_schedule,
)
from holostab.pauli import PauliOp, conjugate_rotation, group_membership, mul
from holostab.sim import (
    CALIBRATED_DURATIONS,
    CALIBRATED_STEPS_PER_UNIT,
    FT_DURATIONS,
    SimOptions,
    compare_up_to_phase,
    convergence_sweep,
    ft_matrix,
    holonomy,
)
from holostab.statevec import apply_pauli, pauli_sum_matrix

from conftest import CORPUS, circuit, cnot_schedules, code, schedule


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
        assert ok, detail

    return emit


def terms(h):
    return {t.pauli.letters: t.coeff for t in h if t.coeff != 0}


def close(a, b, tol=1e-12):
    return a.keys() == b.keys() and all(abs(a[k] - b[k]) <= tol for k in a)


def test_criterion_1_rep3_formulas(report):
    t0 = time.perf_counter()
    s = synthesize(code("repetition3"), circuit("repetition3", "repetition3_xbar"), break_override={3: 1, 4: 1})
    problems = []
    if len(s.stages) != 6:
        problems.append(f"{len(s.stages)} stages")
    breaks = {st.index: st.break_info.c_b for st in s.stages if st.break_info}
    if breaks != {3: 0.5, 4: 0.5}:
        problems.append(f"breaks {breaks}")

    # displayed formulas, as functions of the ramp angle a = f * pi / 2
    displayed = {
        1: lambda c, n: {"ZZI": -c, "YZI": n, "IZZ": -1.0},
        2: lambda c, n: {"YZI": c, "ZZI": n, "IZZ": -1.0},
        3: lambda c, n: {"ZZI": c, "ZYI": -n, "IZZ": -0.5 * c, "IYZ": 0.5 * n},
        4: lambda c, n: {"ZYI": -c, "ZZI": -n, "IYZ": 0.5 * c, "IZZ": 0.5 * n},
    }
    if not close(terms(hamiltonian_at(s, 0.0)), {"ZZI": -1.0, "IZZ": -1.0}):
        problems.append("H(0)")
    for l, formula in displayed.items():
        st = s.stages[l - 1]
        for u in (0.1, 0.25, 0.5, 0.75, 0.9):
            a = st.ramp(u) * math.pi / 2
            want = {k: v for k, v in formula(math.cos(a), math.sin(a)).items() if v != 0}
            if not close(terms(hamiltonian_at(s, s.boundaries[l - 1] + u * st.duration)), want):
                problems.append(f"stage {l} at s={u}")
    # boundary values after each stage, before and after the break bookkeeping
    restored = {1: {"YZI": 1, "IZZ": -1}, 2: {"ZZI": 1, "IZZ": -1}, 3: {"ZYI": -1, "IYZ": 1},
                4: {"ZZI": -1, "IZZ": 1}, 6: {"ZZI": -1, "IZZ": -1}}
    for l, want in restored.items():
        if not close(terms(s.stages[l - 1].outgoing()), want):
            problems.append(f"H(t{l}) restored")
    if not close(terms(s.stages[2].incoming), {"ZZI": 1, "IZZ": -1}) or s.stages[2].scale(1) != 0.5:
        problems.append("H(t2) with break")
    st4_end = {t.pauli.letters: t.coeff * s.stages[3].scale(j) for j, t in enumerate(s.stages[3].outgoing())}
    if not close(st4_end, {"ZZI": -1, "IZZ": 0.5}):
        problems.append("H(t4) with break")
    dt = time.perf_counter() - t0
    ok = not problems and dt < 1.0
    report(1, ok, f"{len(s.stages)} stages, breaks {sorted(breaks)}, {dt:.2f} s" + (f", {problems}" if problems else ""))


def test_criterion_2_gap_bounds(report):
    t0 = time.perf_counter()
    rep3 = gap_report(schedule("repetition3", "repetition3_xbar"))
    coupled = [g.coupled_gap for g in rep3]
    exact = all(float(g).is_integer() for g in coupled)
    spec_ground = [stage_spectrum(schedule("repetition3", "repetition3_xbar"), l).ground_energy for l in range(1, 7)]
    dt = time.perf_counter() - t0
    worst = {}
    for name, circ, pol in [("steane", "steane_xbar", "first"), ("steane", "steane_hbar", "first"),
                            ("steane_pair", "steane_cnot", "last")]:
        worst[circ] = min(g.coupled_gap for g in gap_report(schedule(name, circ, pol)))
    _, cnot_rw = cnot_schedules()
    worst["steane_cnot+rewrite"] = min(g.coupled_gap for g in gap_report(cnot_rw))
    ok = coupled == [2, 2, 1, 1, 2, 2] and exact and min(worst.values()) >= 1 and dt < 1.0
    report(2, ok, f"rep3 gaps {coupled}, ground energies {spec_ground}, min elsewhere {worst}, {dt:.2f} s")


def test_criterion_3_spectrum_invariance(report):
    worst = 0.0
    for name, circ in [("repetition3", "repetition3_xbar"), ("steane", "steane_xbar"), ("steane", "steane_hbar")]:
        s = schedule(name, circ)
        for l, st in enumerate(s.stages, 1):
            table = stage_spectrum(s, l)
            want = np.sort(np.repeat(table.energies, 1 << (s.n - len(st.incoming))))
            for f in (0.0, 0.25, 0.5, 0.75, 1.0):
                got = np.linalg.eigvalsh(pauli_sum_matrix(st.terms_at(f)))
                worst = max(worst, float(np.abs(got - want).max()))
    report(3, worst <= 1e-9, f"max eigenvalue deviation {worst:.1e}")


def test_criterion_4_holonomy(report):
    out = {}
    for name, circ in [("repetition3", "repetition3_xbar"), ("steane", "steane_xbar")]:
        t0 = time.perf_counter()
        rep = holonomy(schedule(name, circ).with_durations(CALIBRATED_DURATIONS[circ]))
        out[circ] = (rep.infidelity, rep.leakage, time.perf_counter() - t0)
    ok = all(i <= 1e-3 and lk <= 1e-4 for i, lk, _ in out.values())
    ok &= out["steane_xbar"][2] < 60
    detail = ", ".join(f"{c} T={CALIBRATED_DURATIONS[c]:g}: infidelity {i:.1e} leakage {lk:.1e} {t:.1f} s"
                       for c, (i, lk, t) in out.items())
    report(4, ok, detail)


def test_criterion_5_convergence(report):
    s = schedule("repetition3", "repetition3_xbar")
    pts = convergence_sweep(s, [5.0, 20.0, 80.0])
    inf = [p.infidelity for p in pts]
    decreasing = inf[0] > inf[1] > inf[2]
    # asymptotic regime starts around T = 20 (calibrated from the sweep)
    ratio = inf[1] / inf[2]
    report(5, decreasing and ratio >= 4, f"infidelity {[f'{x:.2e}' for x in inf]}, ratio(20/80) {ratio:.0f}")


def test_criterion_6_fault_tolerance(report):
    rep3 = schedule("repetition3", "repetition3_xbar").with_durations(FT_DURATIONS["repetition3_xbar"])
    errs = list(local_error_set(code("repetition3"), 1, "X")) + list(local_error_set(code("repetition3"), 1, "Z"))
    r3 = ft_matrix(rep3, errs)
    x_ok = all(e.passed for e in r3.entries if "X" in e.events[0].error.letters)
    z_flagged = all(not e.passed and e.residue_kind == "logical" for e in r3.entries
                    if "Z" in e.events[0].error.letters)
    t0 = time.perf_counter()
    st = schedule("steane", "steane_xbar").with_durations(FT_DURATIONS["steane_xbar"])
    rs = ft_matrix(st, local_error_set(code("steane"), 1))
    dt = time.perf_counter() - t0
    oracle = max(e.oracle_infidelity for e in r3.entries + rs.entries)
    ok = x_ok and z_flagged and rs.ok and len(rs.entries) == 21 * 15 and oracle <= 1e-3
    report(6, ok, f"rep3 X pass {x_ok}, Z flagged {z_flagged}; steane {len(rs.entries) - len(rs.failures)}/"
                  f"{len(rs.entries)} pass in {dt:.0f} s; worst oracle mismatch {oracle:.1e}")


def test_criterion_7_cnot_weights(report):
    t0 = time.perf_counter()
    naive = synthesize(code("steane_pair"), circuit("steane_pair", "steane_cnot"), break_policy="last")
    rewritten = rewrite_generators(naive, *parse_terms((CORPUS / "steane_cnot_rewrite.terms").read_text()))
    rw = rewritten.rewrites[0]
    old, new = naive.stages[26].outgoing(), rewritten.stages[27].incoming
    def signed(t):
        # stabilizer -sign(c) P of a term c P
        return PauliOp(t.pauli.n, t.pauli.x, t.pauli.z, 2 if t.coeff > 0 else 0)

    olds = [signed(t) for t in old]
    group_ok = all(
        (m := group_membership(signed(t), olds)) is not None and m.phase == 1 for t in new
    )
    rng = np.random.default_rng(0)
    v = rng.standard_normal((1 << 14, 2)) + 0j

    def project(ts, v):
        for t in ts:
            v = 0.5 * (v - np.sign(t.coeff) * apply_pauli(t.pauli, v))
        return v

    ground_ok = np.allclose(project(old, v), project(new, v), atol=1e-10)
    valid = validate_schedule(rewritten).ok
    w = (max_weight(naive).overall, max_weight(rewritten).overall)
    dt = time.perf_counter() - t0
    ok = w == (8, 6) and group_ok and ground_ok and valid and dt < 5 and rw is not None
    report(7, ok, f"max weight {w[0]} -> {w[1]}, group {group_ok}, ground space {ground_ok}, "
                  f"cyclic {valid}, {dt:.1f} s")


def test_criterion_8_cnot_holonomy(report, request):
    if not request.config.getoption("--runslow"):
        with request.getfixturevalue("capsys").disabled():
            print("\ncriterion 8: SKIPPED (n = 14 evolution; pass --runslow)")
        pytest.skip("long-running; pass --runslow")
    _, s = cnot_schedules()
    t0 = time.perf_counter()
    opts = SimOptions(steps_per_unit=CALIBRATED_STEPS_PER_UNIT["steane_cnot"])
    rep = holonomy(s.with_durations(CALIBRATED_DURATIONS["steane_cnot"]), opts=opts)
    dt = time.perf_counter() - t0
    cnot = np.eye(4)[[0, 1, 3, 2]]
    target_ok = compare_up_to_phase(cnot, rep.target) < 1e-12
    ok = rep.infidelity <= 1e-2 and target_ok and dt <= 1800
    report(8, ok, f"T={CALIBRATED_DURATIONS['steane_cnot']:g}: infidelity {rep.infidelity:.1e}, "
                  f"leakage {rep.leakage:.1e}, {dt / 60:.1f} min")


def test_criterion_9_audit(report):
    steane = code("steane")
    passes = {c: audit_fault_tolerance(steane, circuit("steane", c), local_error_set(steane, 1)).ok
              for c in ("steane_xbar", "steane_hbar")}
    rep3 = code("repetition3")
    z = audit_fault_tolerance(rep3, circuit("repetition3", "repetition3_zbar"), local_error_set(rep3, 1, "X"))
    rejected = not z.gates_ok and all("logical operator" in why for _, _, why in z.gate_issues)
    report(9, all(passes.values()) and rejected, f"steane {passes}, rep3 Z rejected at check (a): {rejected}")


_M = {"I": np.eye(2), "X": np.array([[0, 1], [1, 0]]), "Y": np.array([[0, -1j], [1j, 0]]), "Z": np.diag([1, -1])}


def _dense(p):
    return p.coefficient * reduce(np.kron, (_M[c] for c in p.letters))


def _random_pauli(rng, n, hermitian=False):
    p = PauliOp.from_label("".join(rng.choice(list("IXYZ"), n)))
    return PauliOp(n, p.x, p.z, int(rng.choice([0, 2] if hermitian else [0, 1, 2, 3])))


def test_criterion_10_algebra(report):
    rng = np.random.default_rng(2024)
    assoc = 0
    for _ in range(1000):
        n = int(rng.integers(1, 5))
        a, b, c = (_random_pauli(rng, n) for _ in range(3))
        left = mul(mul(a, b), c)
        if left == mul(a, mul(b, c)) and np.allclose(_dense(left), _dense(a) @ _dense(b) @ _dense(c), atol=1e-12):
            assoc += 1
    conj = 0.0
    for _ in range(300):
        n = int(rng.integers(1, 4))
        g, q = _random_pauli(rng, n, True), _random_pauli(rng, n, True)
        s = int(rng.choice([1, -1]))
        U = expm(-1j * s * np.pi / 4 * _dense(g))
        conj = max(conj, float(np.abs(_dense(conjugate_rotation(g, s, q)) - U @ _dense(q) @ U.conj().T).max()))
    steane = code("steane")
    _, resid = correctability_matrix(steane, list(local_error_set(steane, 1)))
    H1 = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    cnot = np.eye(4)[[0, 1, 3, 2]]
    macro = 0.0
    for text, n, target in [("H 1", 1, H1), ("X 1", 1, _M["X"]), ("CNOT 1 2", 2, cnot)]:
        U = apply_circuit(expand_macros(parse_circuit(text, n, expand=False)), np.eye(1 << n, dtype=complex))
        macro = max(macro, compare_up_to_phase(target, U))
    ok = assoc == 1000 and conj <= 1e-12 and resid <= 1e-12 and macro <= 1e-12
    report(10, ok, f"associativity {assoc}/1000, conjugation error {conj:.1e}, "
                   f"correctability residual {resid:.1e}, macro infidelity {macro:.1e}")
