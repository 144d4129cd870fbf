"""Command-line front end.

Subcommands::

    mixedlink analyze FILE [--n N] [--json]
    mixedlink pullback FILE --a A --b B [--out PATH] [--json]
    mixedlink certify [FILE] [--pullback-of F --a A --b B] [--radius R ...]
                      [--samples N] [--seed S] [--check CHECK] [--json]
                      [--emit-samples PATH]
    mixedlink identity-check [FILE] --which WHICH [--pullback-of F --a A --b B]
                             [--trials N] [--seed S] [--json]
    mixedlink sample FILE [--radius R] [--samples N] [--seed S] [--out PATH]

FILE holds one polynomial in the input grammar; ``-`` reads stdin.
``--a``/``--b`` take one integer (used for every coordinate) or a comma list.

Exit codes: 0 certified / pass, 1 usage or parse error, 2 inconclusive,
3 violated / identity failed.

JSON report schema (``certify --json``): the top level is
``{"command": "certify", "input": {...}, "reports": [REPORT, ...]}`` where each
REPORT has the stable fields

    check       "transversality" | "contact" | "openbook"
    verdict     "certified-on-samples" | "violated" | "inconclusive"
    margin      number or null (min_sv, min |C|, or min 4ρ·dθ(R_c)/k)
    samples     number of samples the verdict is based on
    config      the SampleConfig echo, including "radius"
    stats       min/max/quantiles of the certified quantity
    diagnostics seed and sampling counters, flags
    witness     optional {"point": [[re, im], ...], "value": number, ...}
    c_threshold optional, openbook only

Sample CSV (``--emit-samples``): header ``re_w1,im_w1,…,C,dthetaR,min_sv``.
Rows come from the link samples (dthetaR empty, θ is undefined on K_r) and,
when the openbook check runs, from the tube samples. dthetaR is 4ρ·dθ(R).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import geometry, identities, kernels
from .covering import CoveringError, CoveringSpec, covering_degree, pullback, transform_weights
from .grammar import ParseError, parse, serialize
from .homogeneity import detect_weights
from .link_certifier import (
    CERTIFIED,
    INCONCLUSIVE,
    VIOLATED,
    CertificationReport,
    SampleConfig,
    certify_holomorphic_like,
    certify_open_book,
    draw_samples,
    transversality_check,
)
from .mixed_poly import DegenerateInputError, MixedPolynomial
from .newton_boundary import classify_face_type, is_convenient, nondegeneracy_probe

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_VIOLATED = 3

CHECKS = ("transversality", "contact", "openbook")
DEFAULT_RADII = (0.25, 0.5, 1.0)

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["check", "verdict", "margin", "samples", "config"],
    "properties": {
        "check": {"enum": list(CHECKS)},
        "verdict": {"enum": [CERTIFIED, VIOLATED, INCONCLUSIVE]},
        "margin": {"type": ["number", "null"]},
        "samples": {"type": "integer", "minimum": 0},
        "config": {
            "type": "object",
            "required": ["radius", "n_samples", "seed"],
            "properties": {"radius": {"type": "number", "exclusiveMinimum": 0}},
        },
        "stats": {"type": "object", "additionalProperties": {"type": "number"}},
        "diagnostics": {"type": "object"},
        "witness": {
            "type": "object",
            "required": ["point", "value"],
            "properties": {
                "point": {
                    "type": "array",
                    "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
                },
                "value": {"type": "number"},
            },
        },
        "c_threshold": {"type": "number", "minimum": 0},
    },
}

CERTIFY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "input", "reports"],
    "properties": {
        "command": {"const": "certify"},
        "input": {"type": "object"},
        "reports": {"type": "array", "items": REPORT_SCHEMA},
    },
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input helpers


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str, n: int | None = None) -> MixedPolynomial:
    text = _read_text(path).strip()
    try:
        return parse(text, n)
    except ParseError as exc:
        raise UsageError(f"{path}: parse error: {exc}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or comma list, got {text!r}") from None


def _spec(n: int, a: list[int] | None, b: list[int] | None) -> CoveringSpec:
    if a is None or b is None:
        raise UsageError("--a and --b are both required")
    try:
        return CoveringSpec.from_args(n, a[0] if len(a) == 1 else a, b[0] if len(b) == 1 else b)
    except CoveringError as exc:
        raise UsageError(f"invalid covering: {exc}") from None


def _emit(obj, as_json: bool, lines: Sequence[str]) -> None:
    if as_json:
        print(json.dumps(obj, sort_keys=True, indent=2))
    else:
        for line in lines:
            print(line)


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    return repr(float(x))


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    p = _load(args.file, args.n)
    if args.n is not None and p.n != args.n:
        raise UsageError(f"--n {args.n} does not match the polynomial's dimension {p.n}")
    try:
        hom = detect_weights(p)
    except DegenerateInputError as exc:
        raise UsageError(f"degenerate input: {exc}") from None
    conv = is_convenient(p)
    out: dict = {"polynomial": serialize(p), "n": p.n, "homogeneity": hom.to_dict(), "convenience": {
        "convenient": conv.convenient, "missing_axes": conv.missing}}
    lines = [f"polynomial: {serialize(p)}", f"n: {p.n}"]
    if hom.radial:
        lines.append(f"radial: Q={list(hom.radial.weights)} m_r={hom.radial.degree}")
    else:
        lines.append("radial: none")
    if hom.polar:
        lines.append(f"polar: P={list(hom.polar.weights)} m_p={hom.polar.degree}")
    else:
        lines.append("polar: none")
    lines.append(f"strongly polar: {hom.strongly_polar} (positive: {hom.strongly_polar_positive})")
    lines.extend(f"note: {note}" for note in hom.notes)
    if conv.convenient:
        nb = classify_face_type(p)
        probe = nondegeneracy_probe(p)
        out["newton_boundary"] = nb.to_dict()
        out["probe"] = probe.to_dict()
        lines.append(f"convenient: yes; face type {nb.overall.label}")
        for face in nb.top_faces:
            lines.append(f"  face P={list(face.normal)}: {face.face_poly.to_text()} -> {face.classification.label}")
        lines.append(f"{probe.status}; min residual {_fmt(probe.min_residual)}"
                     + ("; SUSPECTED DEGENERATE" if probe.suspected_degenerate else ""))
    else:
        msg = "not convenient: axes " + ",".join(str(j) for j in conv.missing) + " missing"
        out["convenience"]["message"] = msg
        lines.append(msg)
    _emit(out, args.json, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# pullback


def cmd_pullback(args) -> int:
    f = _load(args.file)
    spec = _spec(f.n, args.a, args.b)
    g = pullback(f, spec)
    text = serialize(g, "w")
    out: dict = {"pullback": text, "covering": spec.to_dict(), "covering_degree": covering_degree(spec)}
    lines = [text] if args.out is None else [f"wrote {args.out}"]
    lines.append(f"covering degree {covering_degree(spec)}")
    try:
        hom = detect_weights(f)
    except DegenerateInputError as exc:
        raise UsageError(f"degenerate input: {exc}") from None
    if hom.radial is not None and hom.polar is not None and hom.polar.degree != 0:
        tw = transform_weights(hom.radial.weights, hom.radial.degree, hom.polar.weights, hom.polar.degree, spec)
        out["weights"] = {
            "radial": list(tw.radial_cleared),
            "rdeg": tw.radial_degree,
            "polar": list(tw.polar_cleared),
            "pdeg": tw.polar_degree,
        }
        lines.append(f"radial weights {list(tw.radial_cleared)}, polar weights {list(tw.polar_cleared)}")
        lines.append(f"rdeg {tw.radial_degree}, pdeg {tw.polar_degree}")
    if args.out is not None:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    _emit(out, args.json, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# certify


def _certify_inputs(args) -> tuple[MixedPolynomial, MixedPolynomial, CoveringSpec, dict]:
    """(g, f, spec, echo); without --pullback-of, f = g under the identity covering."""
    if args.pullback_of is None and args.file is None:
        raise UsageError("give a polynomial FILE or --pullback-of F with --a/--b")
    if args.pullback_of is not None:
        f = _load(args.pullback_of)
        spec = _spec(f.n, args.a, args.b)
        g = pullback(f, spec)
        if args.file is not None and _load(args.file, g.n) != g:
            raise UsageError("FILE is not the pull-back of --pullback-of under the given covering")
        echo = {"f": serialize(f), "covering": spec.to_dict(), "g": serialize(g, "w")}
    else:
        if args.a is not None or args.b is not None:
            raise UsageError("--a/--b require --pullback-of")
        g = _load(args.file)
        f, spec = g, CoveringSpec.homogeneous_spec(g.n, 1, 0)
        echo = {"g": serialize(g)}
    if g.is_zero():
        raise UsageError("degenerate input: zero polynomial")
    if g.n < 2:
        raise UsageError("certification needs n >= 2")
    return g, f, spec, echo


def _csv_rows(g: MixedPolynomial, ss, with_theta: bool) -> list[list]:
    if not ss.samples:
        return []
    W = ss.points
    val, gz, gzb = kernels.eval_grad(g.numeric(), W)
    C, _ = geometry.c_total_batch(W, gz, gzb)
    theta = None
    if with_theta:
        rho = np.sum(np.abs(W) ** 2, axis=1)
        theta = 4 * rho * geometry.reeb_pairing_batch(W, val, gz, gzb)
    rows = []
    for i, s in enumerate(ss.samples):
        row: list = []
        for c in s.point:
            row += [repr(float(c.real)), repr(float(c.imag))]
        row += [repr(float(C[i])), "" if theta is None else repr(float(theta[i])), repr(s.jacobian_min_sv)]
        rows.append(row)
    return rows


def _exit_for(reports: Sequence[CertificationReport]) -> int:
    verdicts = {r.verdict for r in reports}
    if VIOLATED in verdicts:
        return EXIT_VIOLATED
    if INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def run_certify(g, f, spec, radii, checks, base_kwargs, expected_sign, csv_rows=None) -> list[CertificationReport]:
    """Reports in (radius, check) order; the link sample set is shared between checks."""
    reports = []
    for r in radii:
        cfg = SampleConfig(radius=r, **base_kwargs)
        link = None
        if {"transversality", "contact"} & set(checks) or csv_rows is not None:
            link = draw_samples(g, cfg)
            if csv_rows is not None:
                csv_rows.extend(_csv_rows(g, link, with_theta=False))
        for check in checks:
            if check == "transversality":
                reports.append(transversality_check(g, cfg, samples=link))
            elif check == "contact":
                reports.append(certify_holomorphic_like(g, cfg, expected_sign, samples=link))
            else:
                rep = certify_open_book(f, spec, cfg)
                reports.append(rep)
                if csv_rows is not None:
                    csv_rows.extend(_csv_rows(g, draw_samples(g, cfg, tube=True), with_theta=True))
    return reports


def cmd_certify(args) -> int:
    g, f, spec, echo = _certify_inputs(args)
    checks = CHECKS if args.check == "all" else (args.check,)
    radii = tuple(args.radius) if args.radius else DEFAULT_RADII
    if any(r <= 0 for r in radii):
        raise UsageError("radii must be positive")
    sphere = None
    if args.sphere_weights is not None:
        sphere = tuple(args.sphere_weights)
        if len(sphere) != g.n or min(sphere) < 1:
            raise UsageError(f"--sphere-weights needs {g.n} positive integers")
    kwargs = {"n_samples": args.samples, "seed": args.seed, "sphere_weights": sphere, "tube_delta": args.tube_delta}
    if args.samples < 1 or args.tube_delta <= 0:
        raise UsageError("--samples must be >= 1 and --tube-delta positive")
    expected = 1 if args.expected_sign == "+" else -1
    rows: list | None = [] if args.emit_samples else None
    reports = run_certify(g, f, spec, radii, checks, kwargs, expected, rows)
    if rows is not None:
        header = [f"{part}_w{j}" for j in range(1, g.n + 1) for part in ("re", "im")] + ["C", "dthetaR", "min_sv"]
        with open(args.emit_samples, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    echo["radii"] = list(radii)
    echo["checks"] = list(checks)
    echo["expected_sign"] = args.expected_sign
    doc = {"command": "certify", "input": echo, "reports": [r.to_dict() for r in reports]}
    lines = []
    for r in reports:
        d = r.to_dict()
        line = f"r={_fmt(d['config']['radius'])} {d['check']}: {d['verdict']} margin={_fmt(d['margin'])} samples={d['samples']}"
        if "c_threshold" in d:
            line += f" c_threshold={_fmt(d['c_threshold'])}"
        if "witness" in d:
            w = d["witness"]
            pt = ", ".join(f"{re!r}{'-' if im < 0 else '+'}{abs(im)!r}i" for re, im in w["point"])
            line += f" witness=({pt}) value={_fmt(w['value'])}"
        lines.append(line)
    _emit(doc, args.json, lines)
    return _exit_for(reports)


# ---------------------------------------------------------------------------
# identity-check


def cmd_identity(args) -> int:
    g = _load(args.file) if args.file is not None else None
    f = spec = None
    if args.pullback_of is not None:
        f = _load(args.pullback_of)
        spec = _spec(f.n, args.a, args.b)
    try:
        if args.which in ("cab", "positivity"):
            if f is None:
                raise identities.InapplicableIdentity(f"{args.which} needs --pullback-of F with --a/--b")
            if not f.is_holomorphic() or not spec.homogeneous:
                raise identities.InapplicableIdentity(f"{args.which} needs holomorphic f and a homogeneous covering")
            suite = identities.cab_suite if args.which == "cab" else identities.positivity_suite
            res = suite(f, spec, args.trials, args.seed, g)
        else:
            if g is None:
                if f is None:
                    raise UsageError("give a polynomial FILE")
                g = pullback(f, spec)
            if args.which == "euler":
                res = identities.euler_suite(g)
            elif args.which == "fourform":
                res = identities.fourform_suite(g, args.trials, args.seed)
            else:
                res = identities.chainrule_suite(g, args.trials, args.seed)
    except (identities.InapplicableIdentity, DegenerateInputError, CoveringError) as exc:
        raise UsageError(f"{args.which}: {exc}") from None
    status = "pass" if res.passed else "FAIL"
    lines = [f"{res.which}: {status} max_rel_err={_fmt(res.max_rel_err)} threshold={_fmt(res.threshold)} trials={res.trials}"]
    _emit(res.to_dict(), args.json, lines)
    return EXIT_OK if res.passed else EXIT_VIOLATED


# ---------------------------------------------------------------------------
# sample


def cmd_sample(args) -> int:
    g = _load(args.file)
    if g.is_zero() or g.n < 2:
        raise UsageError("sampling needs a non-zero polynomial in n >= 2 variables")
    cfg = SampleConfig(radius=args.radius, n_samples=args.samples, seed=args.seed)
    ss = draw_samples(g, cfg, tube=args.tube)
    rows = _csv_rows(g, ss, with_theta=args.tube)
    header = [f"{part}_w{j}" for j in range(1, g.n + 1) for part in ("re", "im")] + ["C", "dthetaR", "min_sv"]
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if args.out:
            fh.close()
    print(json.dumps(ss.diagnostics(), sort_keys=True), file=sys.stderr)
    return EXIT_OK if ss.samples else EXIT_INCONCLUSIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mixedlink", description="Contact-geometric analysis of mixed polynomial links.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="weights, Newton boundary, non-degeneracy probe")
    p.add_argument("file")
    p.add_argument("--n", type=int, default=None, help="expected number of variables")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pullback", help="pull back along a mixed cyclic covering")
    p.add_argument("file")
    p.add_argument("--a", type=_int_list, required=True)
    p.add_argument("--b", type=_int_list, required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pullback)

    p = sub.add_parser("certify", help="sampled certification on the link")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--pullback-of", dest="pullback_of", default=None)
    p.add_argument("--a", type=_int_list, default=None)
    p.add_argument("--b", type=_int_list, default=None)
    p.add_argument("--radius", type=float, nargs="+", default=None)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", choices=CHECKS + ("all",), default="all")
    p.add_argument("--expected-sign", choices=("+", "-"), default="+")
    p.add_argument("--sphere-weights", type=_int_list, default=None)
    p.add_argument("--tube-delta", type=float, default=0.1)
    p.add_argument("--emit-samples", default=None, metavar="PATH")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("identity-check", help="randomised identity suites")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--which", choices=("euler", "cab", "fourform", "positivity", "chainrule"), required=True)
    p.add_argument("--pullback-of", dest="pullback_of", default=None)
    p.add_argument("--a", type=_int_list, default=None)
    p.add_argument("--b", type=_int_list, default=None)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_identity)

    p = sub.add_parser("sample", help="dump link (or tube) samples as CSV")
    p.add_argument("file")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tube", action="store_true", help="sample {|g| = δ} ∩ S_r instead of K_r")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap to 1
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, CoveringError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
