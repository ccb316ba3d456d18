"""``holostab`` command line: audit, compile, gaps, weights, simulate, fttest, sweep.

Exit status: 0 pass, 1 verdict failure, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .circuit import CircuitFormatError, audit_fault_tolerance, load_circuit
from .code import CodeFormatError, StabilizerCode, default_local_errors, load_code, local_error_set
from .compiler import (
    RampSpec,
    RewriteError,
    Schedule,
    SynthesisError,
    gap_report,
    max_weight,
    parse_terms,
    rewrite_generators,
    schedule_from_json,
    schedule_to_json,
    synthesize,
    validate_schedule,
)
from .sim import (
    FTReport,
    HolonomyReport,
    NormDriftError,
    SimOptions,
    SweepPoint,
    convergence_sweep,
    ft_csv,
    ft_matrix,
    holonomy,
    sweep_csv,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
CORPUS_ENV = "HOLOSTAB_CORPUS"


class InputError(Exception):
    pass


def corpus_dir() -> Path:
    env = os.environ.get(CORPUS_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("holostab") / "corpus"))


def resolve(path: str) -> Path:
    """A literal path, or a file name looked up in the corpus directory."""
    p = Path(path)
    if p.exists():
        return p
    q = corpus_dir() / path
    if q.exists():
        return q
    raise InputError(f"{path}: no such file (also looked in {corpus_dir()})")


# -- report rendering ----------------------------------------------------------

@dataclass(frozen=True)
class Report:
    """A command result with text, JSON and CSV renderings."""

    kind: str
    payload: dict
    text: str
    csv_text: str | None = None


def emit_report(report: Report, fmt: str = "text") -> bytes:
    if fmt == "text":
        out = report.text
    elif fmt == "json":
        out = json.dumps({"schema_version": SCHEMA_VERSION, "report": report.kind, **report.payload}, indent=2)
    elif fmt == "csv":
        if report.csv_text is None:
            raise InputError(f"{report.kind} report has no CSV form")
        out = report.csv_text
    else:
        raise InputError(f"unknown format {fmt!r}")
    return (out if out.endswith("\n") else out + "\n").encode()


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _matrix_text(m: np.ndarray) -> str:
    def z(v):
        return f"{v.real:+.4f}{v.imag:+.4f}j"

    return "\n".join("  " + "  ".join(z(v) for v in row) for row in m)


def audit_report(rep) -> Report:
    payload = {
        "gates_ok": rep.gates_ok,
        "containment_ok": rep.containment_ok,
        "gate_issues": [{"stage": s, "gate": g, "diagnostic": d} for s, g, d in rep.gate_issues],
        "containment_failures": [
            {"after_gate": q, "error": e.letters, "propagated": f.label, "residue": r.label}
            for q, e, f, r in rep.containment_failures
        ],
    }
    return Report("audit", payload, rep.summary())


def gaps_report(gaps) -> Report:
    rows = [(g.stage, g.ground_gap, g.coupled_gap) for g in gaps]
    lines = [f"{'stage':>5} | {'ground_gap':>10} | {'coupled_gap':>11}"]
    lines += [f"{s:>5} | {a:>10g} | {b:>11g}" for s, a, b in rows]
    payload = {"stages": [
        {"stage": g.stage, "ground_gap": g.ground_gap, "coupled_gap": g.coupled_gap,
         "n_anticommuting": g.n_anticommuting, "broken": g.broken}
        for g in gaps
    ]}
    return Report("gaps", payload, "\n".join(lines), _csv(["stage", "ground_gap", "coupled_gap"], rows))


def weights_report(naive, rewritten=None) -> Report:
    payload = {"max_weight": naive.overall, "per_stage": list(naive.per_stage)}
    text = f"max weight {naive.overall}"
    if rewritten is not None:
        payload["rewritten_max_weight"] = rewritten.overall
        payload["rewritten_per_stage"] = list(rewritten.per_stage)
        text = f"max weight {naive.overall} → {rewritten.overall}"
    rows = [(i + 1, w) for i, w in enumerate(naive.per_stage)]
    return Report("weights", payload, text, _csv(["stage", "max_weight"], rows))


def holonomy_report(rep: HolonomyReport, tol: float) -> Report:
    d = rep.to_dict()
    d["tolerance"] = tol
    d["verdict"] = "pass" if rep.infidelity <= tol else "fail"
    text = "\n".join([
        "gamma =",
        _matrix_text(rep.gamma),
        f"infidelity {rep.infidelity:.3e} (tolerance {tol:g})",
        f"leakage {rep.leakage:.3e}",
        f"dynamical phase {rep.dynamical_phase:.6f}",
        f"verdict {d['verdict']}",
    ])
    return Report("holonomy", d, text)


def ft_report(rep: FTReport) -> Report:
    entries = [{
        "event": e.event_text, "boundary": e.boundary, "syndrome": "".join(map(str, e.syndrome)),
        "correction": e.correction.letters, "infidelity": e.infidelity,
        "oracle_infidelity": e.oracle_infidelity, "residue": e.residue.label,
        "residue_kind": e.residue_kind, "verdict": e.verdict,
    } for e in rep.entries]
    fails = rep.failures
    lines = [f"{len(rep.entries)} trials, {len(fails)} failures (tolerance {rep.tolerance:g})"]
    for e in fails[:20]:
        lines.append(
            f"  FAIL {e.event_text}: syndrome {''.join(map(str, e.syndrome))}, correction "
            f"{e.correction.letters}, infidelity {e.infidelity:.3g}, {e.residue_kind} residue {e.residue.label}"
        )
    return Report("fttest", {"tolerance": rep.tolerance, "entries": entries}, "\n".join(lines), ft_csv(rep))


def sweep_report(points: Sequence[SweepPoint]) -> Report:
    payload = {"points": [
        {"T": p.duration, "total_time": p.total_time, "infidelity": p.infidelity, "leakage": p.leakage}
        for p in points
    ]}
    text = sweep_csv(points)
    return Report("sweep", payload, text, text)


# -- argument handling -----------------------------------------------------------

def _load_inputs(args) -> tuple[StabilizerCode, object]:
    code_path = resolve(args.code)
    try:
        code = load_code(code_path)
    except CodeFormatError as exc:
        raise InputError(f"{code_path}: {exc}") from None
    if getattr(args, "circuit", None) is None:
        return code, None
    circ_path = resolve(args.circuit)
    try:
        circ = load_circuit(circ_path, code.n)
    except CircuitFormatError as exc:
        raise InputError(f"{circ_path}: {exc}") from None
    return code, circ


def _parse_breaks(items) -> dict[int, int]:
    out = {}
    for item in items or ():
        try:
            stage, term = item.split("=")
            out[int(stage)] = int(term) - 1
        except ValueError:
            raise InputError(f"--break expects STAGE=TERM (1-based), got {item!r}") from None
    return out


def _load_rewrite(path: str):
    p = resolve(path)
    try:
        after, terms = parse_terms(p.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"{p}: {exc}") from None
    if after is None:
        raise InputError(f"{p}: missing 'after <gates>' line")
    return after, terms


def _build_schedule(args, *, with_rewrite: bool = True) -> Schedule:
    if getattr(args, "schedule", None):
        p = resolve(args.schedule)
        try:
            return schedule_from_json(p.read_text(encoding="utf-8"))
        except (ValueError, KeyError) as exc:
            raise InputError(f"{p}: {exc}") from None
    if args.code is None or args.circuit is None:
        raise InputError("give CODE and CIRCUIT, or --schedule")
    code, circ = _load_inputs(args)
    try:
        sched = synthesize(
            code, circ, RampSpec(args.ramp, args.duration),
            break_policy=args.break_policy, break_override=_parse_breaks(args.brk),
            c_b=args.c_b, skip_audit=args.skip_audit,
        )
    except SynthesisError as exc:
        raise _Verdict(str(exc)) from None
    rw = getattr(args, "rewrite", None)
    if with_rewrite and rw:
        after, terms = _load_rewrite(rw)
        try:
            sched = rewrite_generators(sched, after, terms)
        except RewriteError as exc:
            raise InputError(f"rewrite: {exc}") from None
    return sched


class _Verdict(Exception):
    """A well-formed input that fails a check (exit 1)."""


def _opts(args) -> SimOptions:
    return SimOptions(steps_per_unit=args.steps_per_unit, infidelity_tolerance=args.tolerance)


def cmd_audit(args) -> tuple[Report, bool]:
    code, circ = _load_inputs(args)
    errs = default_local_errors(code) if args.max_weight is None else local_error_set(code, args.max_weight)
    rep = audit_fault_tolerance(code, circ, errs)
    return audit_report(rep), rep.ok


def cmd_compile(args) -> tuple[Report, bool]:
    sched = _build_schedule(args)
    rep = validate_schedule(sched)
    text = schedule_to_json(sched)
    payload = json.loads(text)
    r = Report("schedule", payload, text.rstrip("\n"))
    if not rep.ok:
        print("\n".join(f"warning: {p}" for p in rep.problems), file=sys.stderr)
    return r, True


def cmd_gaps(args) -> tuple[Report, bool]:
    gaps = gap_report(_build_schedule(args))
    return gaps_report(gaps), all(g.coupled_gap >= 1 for g in gaps)


def cmd_weights(args) -> tuple[Report, bool]:
    naive = _build_schedule(args, with_rewrite=False)
    rewritten = None
    if getattr(args, "rewrite", None):
        after, terms = _load_rewrite(args.rewrite)
        try:
            rewritten = max_weight(rewrite_generators(naive, after, terms))
        except RewriteError as exc:
            raise InputError(f"rewrite: {exc}") from None
    return weights_report(max_weight(naive), rewritten), True


def cmd_simulate(args) -> tuple[Report, bool]:
    sched = _build_schedule(args)
    try:
        rep = holonomy(sched, opts=_opts(args))
    except ValueError as exc:
        raise _Verdict(str(exc)) from None
    return holonomy_report(rep, args.tolerance), rep.infidelity <= args.tolerance


def cmd_fttest(args) -> tuple[Report, bool]:
    sched = _build_schedule(args)
    code = sched.code
    if args.paulis:
        errs = local_error_set(code, 1, args.paulis)
    else:
        errs = default_local_errors(code)
    bounds = None
    if args.boundaries:
        bounds = [int(b) for b in args.boundaries.split(",")]
    rep = ft_matrix(sched, errs, _opts(args), boundaries=bounds)
    return ft_report(rep), rep.ok


def cmd_sweep(args) -> tuple[Report, bool]:
    sched = _build_schedule(args)
    try:
        durations = [float(x) for x in args.durations.split(",")]
    except ValueError:
        raise InputError(f"--durations expects comma-separated numbers, got {args.durations!r}") from None
    pts = convergence_sweep(sched, durations, _opts(args))
    return sweep_report(pts), True


COMMANDS = {
    "audit": cmd_audit,
    "compile": cmd_compile,
    "gaps": cmd_gaps,
    "weights": cmd_weights,
    "simulate": cmd_simulate,
    "fttest": cmd_fttest,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="holostab",
        description="Compile Clifford circuits on stabilizer codes into holonomic adiabatic schedules.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, circuit=True, schedule_ok=False):
        nargs = "?" if schedule_ok else None
        sp.add_argument("code", nargs=nargs, help="code file (path or corpus name)")
        if circuit:
            sp.add_argument("circuit", nargs=nargs, help="circuit file (path or corpus name)")
        sp.add_argument("--format", choices=("text", "json", "csv"), default="text")
        sp.add_argument("--out", help="write the report here instead of stdout")

    def synth(sp):
        sp.add_argument("--ramp", choices=("linear", "cosine", "bump"), default="cosine")
        sp.add_argument("--duration", type=float, default=50.0, help="per-stage duration")
        sp.add_argument("--break-policy", choices=("first", "last"), default="first")
        sp.add_argument("--break", dest="brk", action="append", metavar="STAGE=TERM",
                        help="force the break term of a stage (1-based, repeatable)")
        sp.add_argument("--c-b", type=float, default=0.5)
        sp.add_argument("--rewrite", help="generator rewrite file ('after <gates>' + terms)")
        sp.add_argument("--skip-audit", action="store_true")
        sp.add_argument("--schedule", help="load a compiled schedule JSON instead")

    def sim(sp):
        sp.add_argument("--steps-per-unit", type=int, default=64)
        sp.add_argument("--tolerance", type=float, default=1e-3)

    a = sub.add_parser("audit", help="fault-tolerance audit of a circuit")
    common(a)
    a.add_argument("--max-weight", type=int, help="use all Paulis up to this weight as E_local")
    for name, helptext in (
        ("compile", "emit the schedule JSON"),
        ("gaps", "per-stage ground and coupled-pair gaps"),
        ("weights", "maximum Pauli weight (with --rewrite: before → after)"),
        ("simulate", "holonomy of the compiled schedule"),
        ("fttest", "single-error fault-tolerance trial matrix"),
        ("sweep", "holonomy infidelity against stage duration"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp, schedule_ok=True)
        synth(sp)
        if name in ("simulate", "fttest", "sweep"):
            sim(sp)
        if name == "fttest":
            sp.add_argument("--paulis", help="restrict E_local to weight-1 Paulis with these letters")
            sp.add_argument("--boundaries", help="comma-separated injection boundaries")
        if name == "sweep":
            sp.add_argument("--durations", default="5,20,80")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, ok = COMMANDS[args.command](args)
        data = emit_report(report, args.format)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (_Verdict, NormDriftError, RuntimeError) as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
