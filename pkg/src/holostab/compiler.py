"""Compile an audited Clifford circuit into a piecewise adiabatic schedule.

Each gate ``g = exp(-i s pi/4 G)`` becomes one stage during which every term
anticommuting with ``G`` is rotated by ``g**f`` as ``f`` ramps from 0 to 1,
i.e. ``c P -> c cos(f pi/2) P + c sin(f pi/2) P'`` with ``P' = g P g^dag``.
When an even number of terms anticommute, one of them (the *break* term) is
scaled by ``1 - C_b`` for the duration of the stage so every pair of
eigenspaces coupled by ``G`` stays separated by a gap of at least ``2 C_b``.

Coefficients carry all signs; the stabilizer represented by term ``j`` is
``-sign(c_j) P_j`` and the energy of sign label ``s`` is
``sum_j -|c_j| s_j``.  The ground space is always the all ``+1`` label.
"""

from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from .circuit import Circuit, Gate, audit_fault_tolerance, expand_macros
from .code import ErrorSet, StabilizerCode, default_local_errors
from .pauli import (
    PauliOp,
    PauliSum,
    WeightedTerm,
    commutes,
    conjugate_rotation,
    group_membership,
    partial_rotation_terms,
    weight,
)

__all__ = [
    "RampSpec",
    "BreakInfo",
    "Stage",
    "Schedule",
    "SpectrumTable",
    "StageGap",
    "WeightReport",
    "SynthesisError",
    "RewriteError",
    "synthesize",
    "frozen_schedule",
    "hamiltonian_at",
    "stage_spectrum",
    "gap_report",
    "max_weight",
    "rewrite_generators",
    "validate_schedule",
    "parse_terms",
    "schedule_to_json",
    "schedule_from_json",
]

SCHEMA_VERSION = 1
DEFAULT_DURATION = 50.0
DEFAULT_BREAK = 0.5
MAX_SPECTRUM_TERMS = 24


class SynthesisError(ValueError):
    pass


class RewriteError(ValueError):
    pass


# -- ramps ------------------------------------------------------------------

def _bump_h(s):
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


@dataclass(frozen=True)
class RampSpec:
    """Interpolation ``f: [0, 1] -> [0, 1]`` and stage duration.

    ``linear``: ``f = s``.  ``cosine``: ``f = (1 - cos(pi s))/2``, first
    derivative zero at both ends.  ``bump``: ``h(s)/(h(s) + h(1-s))`` with
    ``h(s) = exp(-1/s)``, all derivatives zero at both ends.
    """

    family: str = "cosine"
    duration: float = DEFAULT_DURATION

    def __post_init__(self):
        if self.family not in ("linear", "cosine", "bump"):
            raise ValueError(f"unknown ramp family {self.family!r}")
        if not self.duration >= 0 or math.isinf(self.duration):
            raise ValueError(f"ramp duration must be finite and non-negative, got {self.duration}")
        object.__setattr__(self, "duration", float(self.duration))

    def __call__(self, s):
        s = np.clip(s, 0.0, 1.0)
        if self.family == "linear":
            out = np.asarray(s, dtype=float)
        elif self.family == "cosine":
            out = 0.5 * (1.0 - np.cos(np.pi * s))
        else:
            a, b = _bump_h(s), _bump_h(1.0 - s)
            out = a / (a + b)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, s):
        """``df/ds``."""
        s = np.clip(s, 0.0, 1.0)
        if self.family == "linear":
            out = np.ones_like(np.asarray(s, dtype=float))
        elif self.family == "cosine":
            out = 0.5 * np.pi * np.sin(np.pi * s)
        else:
            s = np.asarray(s, dtype=float)
            a, b = _bump_h(s), _bump_h(1.0 - s)
            with np.errstate(divide="ignore", invalid="ignore"):
                da = np.where(s > 0, a / s**2, 0.0)
                db = np.where(s < 1, b / (1.0 - s) ** 2, 0.0)
            out = (da * b + a * db) / (a + b) ** 2
        return float(out) if np.ndim(out) == 0 else out


# -- stages -----------------------------------------------------------------

@dataclass(frozen=True)
class BreakInfo:
    index: int  # 0-based term index
    c_b: float = DEFAULT_BREAK


@dataclass(frozen=True)
class Stage:
    """One gate's adiabatic segment.

    ``incoming`` holds the restored (unit-magnitude) terms at the stage start;
    ``partners[j]`` is the fully rotated term for ``j`` in ``anticommuting``
    (``None`` for pass-through terms).  ``gate`` is ``None`` only for frozen
    test stages, where the Hamiltonian is constant.
    """

    index: int
    gate: Gate | None
    incoming: PauliSum
    anticommuting: tuple[int, ...]
    partners: tuple[WeightedTerm | None, ...]
    break_info: BreakInfo | None
    ramp: RampSpec

    @property
    def commuting(self) -> tuple[int, ...]:
        a = set(self.anticommuting)
        return tuple(j for j in range(len(self.incoming)) if j not in a)

    @property
    def duration(self) -> float:
        return self.ramp.duration

    def scale(self, j: int) -> float:
        """Magnitude factor applied to term ``j`` while the stage is active."""
        b = self.break_info
        return 1.0 - b.c_b if b is not None and b.index == j else 1.0

    def active_coefficients(self) -> np.ndarray:
        return np.array([t.coeff * self.scale(j) for j, t in enumerate(self.incoming)])

    def terms_at(self, f: float) -> PauliSum:
        """Interpolated Hamiltonian at ramp value ``f`` (break applied)."""
        if f == 1.0:
            c, s = 0.0, 1.0
        else:
            c, s = math.cos(f * math.pi / 2), math.sin(f * math.pi / 2)
        out = []
        for j, t in enumerate(self.incoming):
            k = self.scale(j)
            p = self.partners[j]
            if p is None:
                out.append(WeightedTerm(t.coeff * k, t.pauli))
                continue
            if c != 0.0:
                out.append(WeightedTerm(t.coeff * k * c, t.pauli))
            if s != 0.0:
                out.append(WeightedTerm(p.coeff * k * s, p.pauli))
        return PauliSum(out, self.incoming.n)

    def outgoing(self) -> PauliSum:
        """Terms at the stage end with the break restored."""
        return PauliSum(
            (t if p is None else p for t, p in zip(self.incoming, self.partners)),
            self.incoming.n,
        )

    def symbolic(self) -> list[tuple[float, str, str | None]]:
        """``(coefficient, Pauli letters, 'cos' | 'sin' | None)`` per displayed term."""
        out = []
        for j, t in enumerate(self.incoming):
            k = self.scale(j)
            p = self.partners[j]
            if p is None:
                out.append((t.coeff * k, t.pauli.letters, None))
            else:
                out.append((t.coeff * k, t.pauli.letters, "cos"))
                out.append((p.coeff * k, p.pauli.letters, "sin"))
        return out

    def one_norm_bound(self) -> float:
        """``max_f sum |coeff|`` over the stage."""
        a = set(self.anticommuting)
        coeffs = np.abs(self.active_coefficients())
        return float(sum(coeffs[j] * (math.sqrt(2) if j in a else 1.0) for j in range(len(coeffs))))


@dataclass(frozen=True)
class Schedule:
    code: StabilizerCode
    circuit: Circuit
    initial_terms: PauliSum
    stages: tuple[Stage, ...]
    rewrites: tuple[tuple[int, PauliSum], ...] = ()
    metadata: tuple[tuple[str, str], ...] = ()

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def boundaries(self) -> np.ndarray:
        """``t_0 = 0, t_1, ..., t_p = T``."""
        return np.concatenate([[0.0], np.cumsum([st.duration for st in self.stages])])

    @property
    def total_time(self) -> float:
        return float(self.boundaries[-1])

    def rewrite_at(self, boundary: int) -> PauliSum | None:
        for q, terms in self.rewrites:
            if q == boundary:
                return terms
        return None

    @property
    def final_terms(self) -> PauliSum:
        terms = self.stages[-1].outgoing() if self.stages else self.initial_terms
        r = self.rewrite_at(len(self.stages))
        return r if r is not None else terms

    def meta(self) -> dict[str, str]:
        return dict(self.metadata)

    def scaled(self, factor: float) -> Schedule:
        """Uniformly rescale every stage duration."""
        return replace(
            self,
            stages=tuple(
                replace(st, ramp=RampSpec(st.ramp.family, st.duration * factor)) for st in self.stages
            ),
        )

    def with_durations(self, duration: float) -> Schedule:
        return replace(
            self,
            stages=tuple(replace(st, ramp=RampSpec(st.ramp.family, duration)) for st in self.stages),
        )


def _initial_terms(code: StabilizerCode) -> PauliSum:
    return PauliSum((WeightedTerm.signed(-1.0, g) for g in code.generators), code.n)


def _signed_stabilizers(terms: PauliSum) -> list[PauliOp]:
    """``S_j = -sign(c_j) P_j``."""
    return [t.pauli if t.coeff < 0 else -t.pauli for t in terms]


def _check_rewrite(old: PauliSum, new: PauliSum) -> None:
    if len(new) != len(old):
        raise RewriteError(f"rewrite must keep {len(old)} terms, got {len(new)}")
    if new.n != old.n:
        raise RewriteError("rewrite terms act on a different number of qubits")
    s_old, s_new = _signed_stabilizers(old), _signed_stabilizers(new)
    for j, s in enumerate(s_new):
        m = group_membership(s, s_old)
        if m is None:
            raise RewriteError(f"new term {j + 1} ({s.letters}) is outside the current stabilizer group")
        if m.phase != 1:
            raise RewriteError(
                f"new term {j + 1} ({s.label}) has eigenvalue {m.phase} on the ground space; "
                "its coefficient sign must be flipped"
            )
    for j, s in enumerate(s_old):
        m = group_membership(s, s_new)
        if m is None or m.phase != 1:
            raise RewriteError(f"current term {j + 1} ({s.letters}) is not generated by the new set")


def _build_stage(
    index: int, gate: Gate, terms: PauliSum, ramp: RampSpec, break_choice, c_b: float
) -> Stage:
    G, sign = gate.generator, gate.angle_sign
    anti = tuple(j for j, t in enumerate(terms) if not commutes(G, t.pauli))
    if not anti:
        if group_membership(G, [t.pauli for t in terms]) is not None:
            raise SynthesisError(
                f"stage {index} ({gate}): generator lies in the current stabilizer group; "
                "the gate is trivial and cannot move the code space"
            )
        raise SynthesisError(
            f"stage {index} ({gate}): generator commutes with every term but is outside the "
            "group: it is a logical operator, so the scheme is inapplicable"
        )
    partners = [None] * len(terms)
    for j in anti:
        partners[j] = partial_rotation_terms(G, sign, terms[j]).sin_term
    brk = None
    if len(anti) % 2 == 0:
        if isinstance(break_choice, int):
            b = break_choice
            if b not in anti:
                raise SynthesisError(
                    f"stage {index}: break term {b + 1} does not anticommute with {gate}"
                )
        elif break_choice == "last":
            b = anti[-1]
        else:
            b = anti[0]
        brk = BreakInfo(b, c_b)
    return Stage(index, gate, terms, anti, tuple(partners), brk, ramp)


def synthesize(
    code: StabilizerCode,
    circuit: Circuit,
    ramp: RampSpec | None = None,
    *,
    durations: Mapping[int, float] | None = None,
    break_policy: str = "first",
    break_override: Mapping[int, int] | None = None,
    c_b: float = DEFAULT_BREAK,
    rewrites: Mapping[int, PauliSum] | None = None,
    e_local: ErrorSet | None = None,
    skip_audit: bool = False,
) -> Schedule:
    """Build the stage-by-stage schedule for ``circuit`` on ``code``.

    Parameters
    ----------
    ramp : RampSpec
        Family and default per-stage duration.
    durations : mapping
        Per-stage duration overrides keyed by 1-based stage index.
    break_policy : {"first", "last"}
        Which anticommuting term is weakened on even stages.
    break_override : mapping
        1-based stage index -> 0-based term index, taking precedence.
    c_b : float
        Degeneracy-breaking strength in (0, 1).
    rewrites : mapping
        Number of completed gates -> replacement generating set spliced in at
        that boundary (see :func:`rewrite_generators`).
    e_local : ErrorSet
        Local error set for the audit; defaults to :func:`default_local_errors`.
    skip_audit : bool
        Compile even if the fault-tolerance audit fails (recorded in metadata).
    """
    ramp = ramp or RampSpec()
    if not 0.0 < c_b < 1.0:
        raise ValueError(f"c_b must lie in (0, 1), got {c_b}")
    if break_policy not in ("first", "last"):
        raise ValueError(f"break_policy must be 'first' or 'last', got {break_policy!r}")
    if circuit.n != code.n:
        raise ValueError(f"circuit has {circuit.n} qubits, code has {code.n}")
    circuit = expand_macros(circuit)
    durations = dict(durations or {})
    break_override = dict(break_override or {})
    rewrites = dict(rewrites or {})
    meta = {"break_policy": break_policy, "c_b": repr(c_b)}
    if skip_audit:
        meta["audit"] = "skipped by override"
    else:
        rep = audit_fault_tolerance(code, circuit, e_local or default_local_errors(code))
        if not rep.gates_ok:
            stage, gate, why = rep.gate_issues[0]
            raise SynthesisError(f"stage {stage} [{gate}]: {why}")
        if not rep.containment_ok:
            q, e, f, _ = rep.containment_failures[0]
            raise SynthesisError(
                f"circuit is not fault tolerant: {e.letters} after gate {q} propagates to "
                f"uncorrectable {f.label} (pass skip_audit=True to override)"
            )
        meta["audit"] = "passed"
    terms = _initial_terms(code)
    stages = []
    kept_rewrites = []
    for l, gate in enumerate(circuit.gates, 1):
        if l - 1 in rewrites:
            new = rewrites[l - 1]
            _check_rewrite(terms, new)
            if new != terms:
                kept_rewrites.append((l - 1, new))
                terms = new
        dur = durations.get(l, ramp.duration)
        choice = break_override.get(l, break_policy)
        st = _build_stage(l, gate, terms, RampSpec(ramp.family, dur), choice, c_b)
        stages.append(st)
        terms = st.outgoing()
    p = len(circuit)
    if p in rewrites:
        _check_rewrite(terms, rewrites[p])
        if rewrites[p] != terms:
            kept_rewrites.append((p, rewrites[p]))
    extra = set(rewrites) - set(range(p + 1))
    if extra:
        raise RewriteError(f"rewrite boundaries {sorted(extra)} outside 0..{p}")
    return Schedule(
        code, circuit, _initial_terms(code), tuple(stages), tuple(kept_rewrites), tuple(sorted(meta.items()))
    )


def frozen_schedule(code: StabilizerCode, duration: float, terms: PauliSum | None = None) -> Schedule:
    """A single constant-Hamiltonian stage (no gate); used to test the integrator."""
    terms = terms or _initial_terms(code)
    st = Stage(1, None, terms, (), (None,) * len(terms), None, RampSpec("linear", duration))
    return Schedule(code, Circuit(code.n), terms, (st,), (), (("audit", "frozen test stage"),))


def hamiltonian_at(schedule: Schedule, t: float) -> PauliSum:
    """``H(t)``; at a stage boundary the post-boundary form is returned."""
    bounds = schedule.boundaries
    T = float(bounds[-1])
    if not 0.0 <= t <= T:
        raise ValueError(f"t={t} outside [0, {T}]")
    if t == T:
        return schedule.final_terms
    l = bisect.bisect_right(bounds, t)  # stage l (1-based) spans [bounds[l-1], bounds[l])
    st = schedule.stages[l - 1]
    s = (t - bounds[l - 1]) / st.duration
    return st.terms_at(st.ramp(s))


# -- spectra and gaps ---------------------------------------------------------

@dataclass(frozen=True)
class SpectrumTable:
    """Energies of every sign label for one stage (label 0 is the ground label)."""

    stage: int
    labels: np.ndarray  # (2**m, m) entries +-1
    energies: np.ndarray
    magnitudes: np.ndarray
    anticommuting: tuple[int, ...]

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    def rows(self):
        for i, (s, e) in enumerate(zip(self.labels, self.energies)):
            yield tuple(int(v) for v in s), float(e), i == 0


def _sign_labels(m: int) -> np.ndarray:
    idx = np.arange(1 << m)[:, None]
    bits = (idx >> np.arange(m - 1, -1, -1)[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def stage_spectrum(schedule: Schedule, stage_index: int) -> SpectrumTable:
    """Enumerate ``eps_s = sum_j -|c_j| s_j`` for a 1-based stage index."""
    st = schedule.stages[stage_index - 1]
    m = len(st.incoming)
    if m > MAX_SPECTRUM_TERMS:
        raise ValueError(f"2^{m} labels exceeds the enumeration limit 2^{MAX_SPECTRUM_TERMS}")
    mags = np.abs(st.active_coefficients())
    labels = _sign_labels(m)
    energies = -(labels * mags[None, :]).sum(axis=1)
    return SpectrumTable(stage_index, labels, energies, mags, st.anticommuting)


@dataclass(frozen=True)
class StageGap:
    stage: int
    ground_gap: float
    coupled_gap: float
    n_anticommuting: int
    broken: bool


def gap_report(schedule: Schedule) -> list[StageGap]:
    """Per stage: ground gap and the smallest gap between eigenspaces the gate couples."""
    out = []
    for l, st in enumerate(schedule.stages, 1):
        spec = stage_spectrum(schedule, l)
        e = spec.energies
        ground = float((e[1:] - e[0]).min()) if len(e) > 1 else math.inf
        a = list(st.anticommuting)
        if a:
            # partner label flips every anticommuting sign: |eps_a - eps_b| = 2|sum_A C_j s_j|
            coupled = float(np.abs(2 * (spec.labels[:, a] * spec.magnitudes[a]).sum(axis=1)).min())
        else:
            coupled = math.inf
        out.append(StageGap(l, ground, coupled, len(a), st.break_info is not None))
    return out


# -- weights ----------------------------------------------------------------

@dataclass(frozen=True)
class WeightReport:
    overall: int
    per_stage: tuple[int, ...]

    def __str__(self) -> str:
        return f"max weight {self.overall}"


def max_weight(schedule: Schedule) -> WeightReport:
    per = []
    for st in schedule.stages:
        ws = [weight(t.pauli) for t in st.incoming]
        ws += [weight(p.pauli) for p in st.partners if p is not None]
        per.append(max(ws, default=0))
    boundary_terms = [schedule.initial_terms, schedule.final_terms] + [t for _, t in schedule.rewrites]
    extra = max((weight(t.pauli) for s in boundary_terms for t in s), default=0)
    return WeightReport(max(per + [extra]), tuple(per))


def terms_before(schedule: Schedule, boundary: int) -> PauliSum:
    """Terms in force just before any rewrite at ``boundary`` (gates completed)."""
    if boundary == 0:
        return schedule.initial_terms
    return schedule.stages[boundary - 1].outgoing()


def rewrite_generators(schedule: Schedule, boundary: int, new_terms: PauliSum) -> Schedule:
    """Swap in another generating set of the same group at ``boundary`` and recompile the rest.

    The new set must generate the same stabilizer group with every new
    stabilizer ``+1`` on the current ground space.
    """
    if not 0 <= boundary <= len(schedule.stages):
        raise RewriteError(f"boundary {boundary} outside 0..{len(schedule.stages)}")
    current = terms_before(schedule, boundary)
    _check_rewrite(current, new_terms)
    if new_terms == current:
        return schedule
    meta = schedule.meta()
    rewrites = {q: t for q, t in schedule.rewrites if q < boundary}
    rewrites[boundary] = new_terms
    overrides = {
        st.index: st.break_info.index for st in schedule.stages if st.break_info is not None
    }
    durations = {st.index: st.duration for st in schedule.stages}
    family = schedule.stages[0].ramp.family if schedule.stages else "cosine"
    out = synthesize(
        schedule.code,
        schedule.circuit,
        RampSpec(family),
        durations=durations,
        break_policy=meta.get("break_policy", "first"),
        break_override={k: v for k, v in overrides.items() if k <= boundary},
        c_b=float(meta.get("c_b", DEFAULT_BREAK)),
        rewrites=rewrites,
        skip_audit=True,
    )
    return replace(out, metadata=schedule.metadata)


# -- validation ---------------------------------------------------------------

@dataclass
class ScheduleReport:
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.ok


def validate_schedule(schedule: Schedule) -> ScheduleReport:
    """Check chaining, break bookkeeping, ramp end points and cyclicity."""
    rep = ScheduleReport()
    terms = schedule.initial_terms
    if schedule.initial_terms != _initial_terms(schedule.code):
        rep.problems.append("initial terms differ from -sum_j S_j of the code")
    for l, st in enumerate(schedule.stages, 1):
        r = schedule.rewrite_at(l - 1)
        if r is not None:
            try:
                _check_rewrite(terms, r)
            except RewriteError as exc:
                rep.problems.append(f"rewrite before stage {l}: {exc}")
            terms = r
        if st.incoming != terms:
            rep.problems.append(f"stage {l}: incoming terms do not chain from stage {l - 1}")
        if any(abs(abs(t.coeff) - 1.0) > 1e-12 for t in st.incoming):
            rep.problems.append(f"stage {l}: incoming coefficients are not restored to magnitude 1")
        f0, f1 = st.ramp(0.0), st.ramp(1.0)
        grid = st.ramp(np.linspace(0.0, 1.0, 101))
        if f0 != 0.0 or abs(f1 - 1.0) > 1e-15 or np.any(np.diff(grid) < -1e-15):
            rep.problems.append(f"stage {l}: ramp is not a monotone map 0 -> 1")
        if st.gate is None:
            terms = st.outgoing()
            continue
        G, sign = st.gate.generator, st.gate.angle_sign
        anti = tuple(j for j, t in enumerate(st.incoming) if not commutes(G, t.pauli))
        if anti != st.anticommuting:
            rep.problems.append(f"stage {l}: anticommuting set {st.anticommuting} should be {anti}")
        for j, t in enumerate(st.incoming):
            want = (
                partial_rotation_terms(G, sign, t).sin_term if j in anti else None
            )
            if st.partners[j] != want:
                rep.problems.append(f"stage {l}: term {j + 1} partner is not the full-angle rotation")
        even = len(anti) % 2 == 0
        b = st.break_info
        if even and b is None:
            rep.problems.append(f"stage {l}: even anticommuting set without degeneracy break")
        if not even and b is not None:
            rep.problems.append(f"stage {l}: odd anticommuting set must not carry a break")
        if b is not None and (b.index not in anti or not 0.0 < b.c_b < 1.0):
            rep.problems.append(f"stage {l}: invalid break {b}")
        terms = st.outgoing()
    r = schedule.rewrite_at(len(schedule.stages))
    if r is not None:
        try:
            _check_rewrite(terms, r)
        except RewriteError as exc:
            rep.problems.append(f"final rewrite: {exc}")
        terms = r
    if terms.as_dict() != schedule.initial_terms.as_dict():
        rep.problems.append("final Hamiltonian differs from the initial one (evolution is not cyclic)")
    return rep


# -- text and JSON formats -----------------------------------------------------

def parse_terms(text: str) -> tuple[int | None, PauliSum]:
    """Parse ``after <gates>`` plus ``<coeff> <pauli>`` lines into a rewrite."""
    after = None
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0].lower() == "after":
                after = int(parts[1])
            elif len(parts) == 2:
                pairs.append((float(parts[0]), parts[1]))
            else:
                raise ValueError(f"expected '<coeff> <pauli>', got {line!r}")
        except (ValueError, IndexError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return after, PauliSum.from_labels(pairs)


def _terms_json(terms: PauliSum) -> list[dict]:
    return [{"coefficient": t.coeff, "pauli": t.pauli.letters} for t in terms]


def _terms_from_json(items, n: int) -> PauliSum:
    return PauliSum((WeightedTerm(d["coefficient"], PauliOp.from_label(d["pauli"])) for d in items), n)


def schedule_to_dict(schedule: Schedule) -> dict:
    code = schedule.code
    stages = []
    for st in schedule.stages:
        terms = []
        for t, p in zip(st.incoming, st.partners):
            partner = None
            if p is not None:
                # sign of the rotated Pauli relative to the incoming coefficient
                partner = ("-" if (p.coeff < 0) != (t.coeff < 0) else "+") + p.pauli.letters
            terms.append({"coefficient": t.coeff, "pauli": t.pauli.letters, "partner": partner})
        stages.append({
            "index": st.index,
            "gate": None if st.gate is None else str(st.gate),
            "ramp": {"family": st.ramp.family, "duration": st.duration},
            "break": None if st.break_info is None
            else {"term": st.break_info.index + 1, "c_b": st.break_info.c_b},
            "anticommuting": [j + 1 for j in st.anticommuting],
            "terms": terms,
        })
    return {
        "schema_version": SCHEMA_VERSION,
        "code": {
            "name": code.name,
            "n": code.n,
            "k": code.k,
            "d": code.distance,
            "generators": [g.label for g in code.generators],
            "logical_x": [p.label for p in code.logical_x],
            "logical_z": [p.label for p in code.logical_z],
        },
        "metadata": dict(schedule.metadata),
        "total_time": schedule.total_time,
        "initial_terms": _terms_json(schedule.initial_terms),
        "rewrites": [{"after_gate": q, "terms": _terms_json(t)} for q, t in schedule.rewrites],
        "stages": stages,
    }


def schedule_to_json(schedule: Schedule) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=2) + "\n"


def _gate_from_text(text: str, n: int) -> Gate:
    mnem, *args = text.split()
    kind = {"S": "SG"}.get(mnem, mnem)
    return Gate(kind, tuple(int(a) - 1 for a in args), n)


def schedule_from_json(text: str | dict) -> Schedule:
    d = json.loads(text) if isinstance(text, str) else text
    if d.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schedule schema_version {d.get('schema_version')!r}")
    c = d["code"]
    n = c["n"]
    code = StabilizerCode(
        n, c["k"],
        tuple(PauliOp.from_label(s) for s in c["generators"]),
        tuple(PauliOp.from_label(s) for s in c["logical_x"]),
        tuple(PauliOp.from_label(s) for s in c["logical_z"]),
        c["d"], c["name"],
    )
    stages, gates = [], []
    for sd in d["stages"]:
        gate = None if sd["gate"] is None else _gate_from_text(sd["gate"], n)
        if gate is not None:
            gates.append(gate)
        incoming = _terms_from_json(sd["terms"], n)
        partners = []
        for td, t in zip(sd["terms"], incoming):
            ps = td["partner"]
            if ps is None:
                partners.append(None)
            else:
                p = PauliOp.from_label(ps)
                partners.append(WeightedTerm(t.coeff * (-1.0 if p.phase == 2 else 1.0), p.unsigned()))
        b = sd["break"]
        stages.append(Stage(
            sd["index"], gate, incoming,
            tuple(j - 1 for j in sd["anticommuting"]), tuple(partners),
            None if b is None else BreakInfo(b["term"] - 1, b["c_b"]),
            RampSpec(sd["ramp"]["family"], sd["ramp"]["duration"]),
        ))
    return Schedule(
        code,
        Circuit(n, tuple(gates)),
        _terms_from_json(d["initial_terms"], n),
        tuple(stages),
        tuple((r["after_gate"], _terms_from_json(r["terms"], n)) for r in d["rewrites"]),
        tuple(sorted(d["metadata"].items())),
    )
