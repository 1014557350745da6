"""``stable-stats`` command line.

Every subcommand writes one JSON document (or a CSV table) to stdout.
Exit status: 0 on success, 1 when a verification fails or a scan is
unstable, 2 on usage, parse or cap errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, asdict

from .charpoly import CharPoly, ExpansionError, product_expand
from .conjugacy import ClassSpecError, LabelError, parse_class_spec
from .families import AmbientFamily, make_family
from .field import FieldError, FieldSpec, field_make
from .linalg import DEFAULT_CAP, EnumerationCapError
from .stats import MomentResult, Statistic, exact_joint_moment, mc_estimate, stability_scan

__all__ = ["RESULT_SCHEMA", "RunConfig", "UsageError", "build_parser", "main", "run"]

_RATIONAL = {
    "type": "object",
    "properties": {"num": {"type": "string", "pattern": r"^-?\d+$"}, "den": {"type": "string", "pattern": r"^\d+$"}},
    "required": ["num", "den"],
    "additionalProperties": False,
}
_ESTIMATE = {
    "type": "object",
    "properties": {
        "mean": {"type": "number"},
        "stderr": {"type": "number"},
        "samples": {"type": "integer"},
    },
    "required": ["mean", "stderr", "samples"],
    "additionalProperties": False,
}

RESULT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "config": {"type": "object"},
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "n": {"type": "integer"},
                    "mode": {"enum": ["exact", "mc"]},
                    "value": {"oneOf": [_RATIONAL, _ESTIMATE]},
                    "factors": {"type": "array", "items": {"type": "string"}},
                },
                "required": ["n", "mode", "value", "factors"],
            },
        },
        "verdict": {"enum": ["stable", "unstable", "n/a"]},
    },
    "required": ["config", "results", "verdict"],
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    family: str = "gl"
    p: int | None = None
    k: int | None = None
    modulus: list[int] | None = None
    classes: list[str] | None = None
    n: list[int] | None = None
    mode: str = "exact"
    samples: int | None = None
    seed: int | None = None
    format: str = "json"
    cap: int = DEFAULT_CAP
    d: int | None = None
    lhs: str | None = None
    rhs: str | None = None
    only: list[int] | None = None

    def to_json(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if v is not None}
        if self.p is not None:
            out["q"] = self.p ** (self.k or 1)
        if self.command not in ("expect", "moment"):
            out.pop("mode", None)
        if self.mode == "exact":
            out.pop("samples", None)
            out.pop("seed", None)
        return out


def parse_q(text: str) -> tuple[int, int]:
    """Split a prime power into (p, k)."""
    try:
        q = int(text)
    except ValueError:
        raise UsageError(f"--q must be an integer, got {text!r}") from None
    for p in range(2, q + 1):
        if q % p == 0:
            k, r = 0, q
            while r % p == 0:
                r //= p
                k += 1
            if r != 1:
                break
            return p, k
    raise UsageError(f"--q must be a prime power, got {text!r}")


def parse_n(text: str) -> list[int]:
    """``5`` or an inclusive range ``2..6``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"--n must be an integer or a range a..b, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise UsageError(f"bad range for --n: {text!r}")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stable-stats", description="Subspace-restriction statistics of finite groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, classes: bool = True, n: bool = True):
        sp.add_argument("--family", choices=["gl", "sym", "sp"], default="gl")
        sp.add_argument("--q", help="field order (prime power <= 9); required for gl and sp")
        sp.add_argument("--modulus", help="ascending coefficients of the field modulus, e.g. 1,1,1")
        sp.add_argument("--format", choices=["json", "csv"], default="json")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest group or Grassmannian to enumerate")
        if classes:
            sp.add_argument("--class", dest="classes", action="append", default=[], metavar="SPEC")
        if n:
            sp.add_argument("--n", required=True, help="size, or inclusive range a..b")

    for name, text in [("expect", "E[X_C] for one class"), ("moment", "E[X_C1 ... X_Cr]")]:
        sp = sub.add_parser(name, help=text)
        common(sp)
        sp.add_argument("--mode", choices=["exact", "mc"], default="exact")
        sp.add_argument("--samples", type=int)
        sp.add_argument("--seed", type=int)

    sp = sub.add_parser("scan", help="exact moments over a range of n, with a stability verdict")
    common(sp)

    sp = sub.add_parser("classes", help="conjugacy classes of G_d")
    common(sp, classes=False, n=False)
    sp.add_argument("--d", type=int, required=True)

    sp = sub.add_parser("expand", help="expand X_lhs * X_rhs in the X_C basis")
    common(sp, classes=False, n=False)
    sp.add_argument("--lhs", required=True)
    sp.add_argument("--rhs", required=True)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--only", type=int, action="append", help="check number (repeatable)")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, format=args.format)
    if args.command == "verify":
        cfg.only = args.only
        return cfg
    cfg.family, cfg.cap = args.family, args.cap
    if cfg.cap < 1:
        raise UsageError("--cap must be positive")
    if args.q is not None:
        cfg.p, cfg.k = parse_q(args.q)
    elif cfg.family != "sym":
        raise UsageError(f"--q is required for --family {cfg.family}")
    if args.modulus:
        try:
            cfg.modulus = [int(c) for c in args.modulus.split(",")]
        except ValueError:
            raise UsageError(f"--modulus must be comma-separated integers, got {args.modulus!r}") from None
    if args.command in ("expect", "moment", "scan"):
        cfg.classes = list(args.classes)
        cfg.n = parse_n(args.n)
        if not cfg.classes:
            raise UsageError("at least one --class is required")
        if args.command == "expect" and len(cfg.classes) != 1:
            raise UsageError("expect takes exactly one --class; use moment for products")
    if args.command in ("expect", "moment"):
        cfg.mode = args.mode
        if cfg.mode == "mc":
            if args.samples is None or args.seed is None:
                raise UsageError("--mode mc needs --samples and --seed")
            if args.samples < 2:
                raise UsageError("--samples must be at least 2")
            if not 0 <= args.seed < 2**64:
                raise UsageError("--seed must be an unsigned 64-bit integer")
            cfg.samples, cfg.seed = args.samples, args.seed
    if args.command == "classes":
        if args.d < 0:
            raise UsageError("--d must be non-negative")
        cfg.d = args.d
    if args.command == "expand":
        cfg.lhs, cfg.rhs = args.lhs, args.rhs
    return cfg


def _family(cfg: RunConfig) -> tuple[AmbientFamily, FieldSpec | None]:
    field = None if cfg.p is None else field_make(cfg.p, cfg.k, cfg.modulus)
    return make_family(cfg.family, None if cfg.family == "sym" else field), field


def _stats(cfg: RunConfig, family: AmbientFamily, field, specs: list[str]) -> list[Statistic]:
    out = []
    for spec in specs:
        label = parse_class_spec(spec, field)
        if label.family != cfg.family:
            raise UsageError(f"class {spec!r} does not belong to family {cfg.family}")
        out.append(Statistic(family, label))
    return out


def _document(cfg: RunConfig, results: list[MomentResult], verdict: str = "n/a", **extra) -> dict:
    doc = {"config": cfg.to_json(), "results": [r.to_json() for r in results], "verdict": verdict}
    doc.update(extra)
    return doc


def _csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _results_csv(results: list[MomentResult], verdict: str) -> str:
    rows = []
    for r in results:
        f = " * ".join(str(x) for x in r.factors)
        if r.mode == "exact":
            rows.append([r.n, r.mode, f, r.value.numerator, r.value.denominator, "", "", "", verdict])
        else:
            rows.append([r.n, r.mode, f, "", "", repr(r.mean), repr(r.stderr), r.samples, verdict])
    return _csv(["n", "mode", "factors", "num", "den", "mean", "stderr", "samples", "verdict"], rows)


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute a validated config; returns (exit status, output text)."""
    if cfg.command == "verify":
        from .acceptance import CHECKS, run_checks

        bad = [i for i in cfg.only or [] if i not in CHECKS]
        if bad:
            raise UsageError(f"no such check: {bad[0]} (have {min(CHECKS)}..{max(CHECKS)})")
        checks = run_checks(cfg.only)
        status = 0 if all(c.passed for c in checks) else 1
        if cfg.format == "csv":
            return status, _csv(["id", "passed", "title", "detail"], [[c.id, c.passed, c.title, c.detail] for c in checks])
        payload = [{"id": c.id, "title": c.title, "passed": c.passed, "detail": c.detail} for c in checks]
        return status, json.dumps(_document(cfg, [], checks=payload), indent=2)

    family, field = _family(cfg)

    if cfg.command == "classes":
        infos = family.class_list(cfg.d, cfg.cap)
        order = family.group_order(cfg.d)
        rows = [[str(i.label), i.size, str(i.representative)] for i in infos]
        if cfg.format == "csv":
            return 0, _csv(["label", "size", "representative"], rows)
        table = [{"label": lab, "size": size, "representative": rep} for lab, size, rep in rows]
        return 0, json.dumps(_document(cfg, [], classes=table, group_order=order), indent=2)

    if cfg.command == "expand":
        a, b = (s.label for s in _stats(cfg, family, field, [cfg.lhs, cfg.rhs]))
        try:
            poly: CharPoly = product_expand(family, a, b, cfg.cap)
        except ExpansionError as exc:
            if "not expanded" in str(exc):
                raise UsageError(str(exc)) from None
            return 1, json.dumps(_document(cfg, [], error=str(exc)), indent=2)
        terms = poly.to_json()
        if cfg.format == "csv":
            return 0, _csv(["label", "numerator", "denominator"], [[t["label"], t["numerator"], t["denominator"]] for t in terms])
        return 0, json.dumps(_document(cfg, [], expansion=terms), indent=2)

    stats = _stats(cfg, family, field, cfg.classes)
    verdict, status = "n/a", 0
    if cfg.command == "scan":
        scan = stability_scan(stats, cfg.n, cfg.cap)
        results, verdict = scan.results, scan.verdict
        status = 1 if verdict == "unstable" else 0
    elif cfg.mode == "mc":
        results = [mc_estimate(stats, n, cfg.samples, cfg.seed) for n in cfg.n]
    else:
        results = [exact_joint_moment(stats, n, cfg.cap) for n in cfg.n]
    if cfg.format == "csv":
        return status, _results_csv(results, verdict)
    return status, json.dumps(_document(cfg, results, verdict), indent=2)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        status, text = run(config_from_args(args))
    except ClassSpecError as exc:
        print(f"stable-stats: class spec error {exc}", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"stable-stats: {exc}", file=sys.stderr)
        return 2
    except (UsageError, LabelError, FieldError, ValueError) as exc:
        print(f"stable-stats: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
