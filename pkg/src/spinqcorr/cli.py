"""``spinqcorr`` command line: sweeps, single points and validation suites.

Exit codes: 0 success, 1 validation failure, 2 sweep finished with failed
points, 64 bad usage, 73 output not writable.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .correlators import DEFAULT_CORRELATOR_SPEC, correlators
from .errors import SpinQCorrError
from .lmg import lmg_closed_measures, lmg_lqu_published, lmg_validate
from .measures import (
    closed_measures_xxz,
    deficit_report,
    lqu,
    negativity,
    tdd_report,
)
from .states import lmg_alpha, lmg_pair_state, xxz_state
from .sweep import (
    DETECTION_FACTOR,
    DETECTION_WINDOW,
    SweepConfig,
    detect_critical_points,
    run_sweep,
)
from .validation import ED_TOL, SUITES, CLOSED_FORM_TOL, run_suite

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_CANTCREAT = 73

CSV_COLUMNS = ("param", "regime", "N", "I", "D", "U", "dN", "dI", "dD", "dU")

log = logging.getLogger("spinqcorr")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def atomic_write(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


# ---------------------------------------------------------------------------
# sweep

def sweep_csv(records, measures) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        cells = [_fmt(rec.param), rec.regime.value]
        for prefix in ("", "d"):
            for label in ("N", "I", "D", "U"):
                if label not in measures:
                    cells.append("")
                elif not rec.ok:
                    cells.append("ERR")
                else:
                    src = rec.values if prefix == "" else rec.derivatives
                    cells.append("" if src is None else _fmt(src.by_label(label)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _parse_measures(text: str) -> tuple[str, ...]:
    items = tuple(m.strip().upper() for m in text.split(",") if m.strip())
    bad = [m for m in items if m not in ("N", "I", "D", "U")]
    if bad or not items:
        raise UsageError(f"--measures takes a comma list from N,I,D,U, got {text!r}")
    # canonical order keeps CSV and manifest stable
    return tuple(m for m in ("N", "I", "D", "U") if m in items)


def _manifest(command: str, cfg: SweepConfig, detection: dict, extra: dict | None = None) -> dict:
    data = {
        "command": command,
        "config": cfg.to_dict(),
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "tolerances": {
            "quadrature_abs_tol": DEFAULT_CORRELATOR_SPEC.abs_tol,
            "quadrature_rel_tol": DEFAULT_CORRELATOR_SPEC.rel_tol,
            "tail_cutoff": DEFAULT_CORRELATOR_SPEC.tail_cutoff,
            "singularity_window": DEFAULT_CORRELATOR_SPEC.singularity_window,
            **detection,
        },
    }
    if extra:
        data.update(extra)
    return data


def cmd_sweep(args) -> int:
    detection = {"detection_factor": args.factor, "detection_window": args.window}
    if args.manifest:
        try:
            saved = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
            cfg = SweepConfig.from_dict(saved["config"])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read manifest {args.manifest!r}: {exc}") from exc
        detection = {
            "detection_factor": saved.get("tolerances", {}).get("detection_factor", args.factor),
            "detection_window": saved.get("tolerances", {}).get("detection_window", args.window),
        }
    else:
        missing = [name for name in ("start", "stop", "step") if getattr(args, name) is None]
        if missing:
            raise UsageError("sweep needs --from, --to and --step (or --manifest)")
        try:
            cfg = SweepConfig(
                model=args.model,
                r=args.r,
                param_min=args.start,
                param_max=args.stop,
                step=args.step,
                derivative_step=args.derivative_step,
                measures=_parse_measures(args.measures),
                include_boundaries=args.include_boundaries,
            )
        except SpinQCorrError as exc:
            raise UsageError(str(exc)) from exc

    records = run_sweep(cfg)
    failed = [rec for rec in records if not rec.ok]
    for rec in failed:
        log.error("point %s failed: %s", _fmt(rec.param), rec.error)

    reports = []
    if args.detect and sum(rec.ok for rec in records) >= 5:
        reports = [
            {"location": rep.location, "kind": rep.kind, "measure": rep.measure,
             "magnitude": rep.magnitude, "threshold": rep.threshold}
            for rep in detect_critical_points(
                records, cfg.measures,
                factor=detection["detection_factor"], window=detection["detection_window"],
            )
        ]

    out = Path(args.out)
    csv_path = out.with_name(out.name + ".csv")
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest = _manifest("sweep", cfg, detection, {
        "rows": len(records),
        "failed_points": len(failed),
        "critical_points": reports if args.detect else None,
    })
    try:
        atomic_write(csv_path, sweep_csv(records, cfg.measures))
        atomic_write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"spinqcorr: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CANTCREAT

    print(f"wrote {csv_path} ({len(records)} rows, {len(failed)} failed)")
    for rep in reports:
        print(f"  {rep['kind']:<16} {rep['measure']}  at {rep['location']:+.4f}  magnitude {rep['magnitude']:.3e}")
    return EXIT_PARTIAL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# point

def _basis(rep) -> dict:
    return {"theta": rep.best_basis.theta, "phi": rep.best_basis.phi, "value": rep.best_value}


def _state_dict(s) -> dict:
    return {"a": s.a, "b": s.b, "c": s.c, "d": s.d, "z": float(complex(s.z).real), "w": float(complex(s.w).real)}


def point_report(model: str, value: float, r: int = 1) -> dict:
    if model == "xxz":
        c = correlators(value, r)
        state = xxz_state(c)
        dr, tr = deficit_report(state), tdd_report(state)
        return {
            "model": "xxz", "delta": value, "r": r, "regime": c.regime.value,
            "correlators": {"zz": c.zz, "xx": c.xx},
            "state": _state_dict(state),
            "closed": closed_measures_xxz(c).as_dict(),
            "definitional": {"negativity": negativity(state), "deficit": dr.best_value,
                             "tdd": tr.best_value, "lqu": lqu(state)},
            "optimal_bases": {"deficit": _basis(dr), "tdd": _basis(tr)},
        }
    point = lmg_validate(value)
    state = lmg_pair_state(value)
    dr, tr = deficit_report(state), tdd_report(state)
    return {
        "model": "lmg", "lambda": value, "alpha": lmg_alpha(value),
        "state": _state_dict(state),
        "closed": lmg_closed_measures(value).as_dict(),
        "definitional": point.definitional.as_dict(),
        "lqu": {"definitional": point.definitional.lqu, "published": lmg_lqu_published(value),
                "finding": point.lqu_finding},
        "optimal_bases": {"deficit": _basis(dr), "tdd": _basis(tr)},
    }


def cmd_point(args) -> int:
    if args.model == "xxz":
        if args.delta is None or args.lam is not None:
            raise UsageError("point --model xxz needs --delta")
        value = args.delta
    else:
        if args.lam is None or args.delta is not None:
            raise UsageError("point --model lmg needs --lambda")
        value = args.lam
    if not math.isfinite(value):
        raise UsageError("parameter must be finite")
    try:
        report = point_report(args.model, value, args.r)
    except SpinQCorrError as exc:
        if "must" in str(exc) or "non-negative" in str(exc):
            raise UsageError(str(exc)) from exc
        print(f"spinqcorr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    print(json.dumps(report, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate

def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"--n takes a comma list of even ring sizes, got {text!r}") from exc
    if len(sizes) < 2 or any(n % 2 or not 4 <= n <= 16 for n in sizes):
        raise UsageError(f"--n needs at least two even sizes in [4, 16], got {text!r}")
    return sizes


def cmd_validate(args) -> int:
    names = []
    for chunk in args.suite or ["all"]:
        names.extend(x.strip() for x in chunk.split(",") if x.strip())
    if "all" in names:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; choose from {', '.join(SUITES)}")
    sizes = _parse_sizes(args.n) if args.n else None

    results = []
    for name in names:
        kwargs = {}
        if name == "ed":
            scheme = args.scheme
            if sizes is not None:
                kwargs["sizes"] = sizes
                if scheme == "regime" and len(sizes) != 3:
                    scheme = "quadratic"  # Aitken needs three sizes
            kwargs["scheme"] = scheme
        result = run_suite(name, **kwargs)
        results.append(result)
        _print_suite(result)

    payload = {
        "tool_version": __version__,
        "tolerances": {"closed_forms": CLOSED_FORM_TOL, "ed": ED_TOL, "lmg": 1e-8},
        "suites": [res.to_dict() for res in results],
        "passed": all(res.passed for res in results),
    }
    if args.json:
        try:
            atomic_write(Path(args.json), json.dumps(payload, indent=2) + "\n")
        except OSError as exc:
            print(f"spinqcorr: cannot write report: {exc}", file=sys.stderr)
            return EXIT_CANTCREAT
    return EXIT_OK if payload["passed"] else EXIT_VALIDATION


def _print_suite(result) -> None:
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.name}: {len(result.rows)} checks, max residual {result.max_residual:.3e}")
    for row in result.rows:
        if not row["pass"]:
            where = ", ".join(f"{k}={row[k]}" for k in ("delta", "lambda", "r", "measure") if k in row)
            print(f"    residual {row['residual']:.3e} > {row['tol']:.0e}  ({where})")
    for line in result.findings:
        print(f"    {line}")


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="spinqcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="sweep a parameter and write CSV + manifest")
    sw.add_argument("--model", choices=("xxz", "lmg"), default="xxz")
    sw.add_argument("--r", type=int, choices=(1, 2), default=1, help="site separation (xxz)")
    sw.add_argument("--from", dest="start", type=float)
    sw.add_argument("--to", dest="stop", type=float)
    sw.add_argument("--step", type=float)
    sw.add_argument("--derivative-step", type=float, default=None)
    sw.add_argument("--measures", default="N,I,D,U")
    sw.add_argument("--include-boundaries", action="store_true",
                    help="allow grid points on delta = +-1 / lambda = 1")
    sw.add_argument("--out", default="sweep", help="output prefix (default: sweep)")
    sw.add_argument("--manifest", help="rerun the sweep recorded in this manifest")
    sw.add_argument("--detect", action="store_true", help="run critical-point detection")
    sw.add_argument("--factor", type=float, default=DETECTION_FACTOR)
    sw.add_argument("--window", type=int, default=DETECTION_WINDOW)
    sw.set_defaults(func=cmd_sweep)

    pt = sub.add_parser("point", help="inspect one parameter value (JSON)")
    pt.add_argument("--model", choices=("xxz", "lmg"), default="xxz")
    pt.add_argument("--r", type=int, choices=(1, 2), default=1)
    pt.add_argument("--delta", type=float)
    pt.add_argument("--lambda", dest="lam", type=float)
    pt.set_defaults(func=cmd_point)

    va = sub.add_parser("validate", help="run oracle-equivalence suites")
    va.add_argument("--suite", action="append", help=f"one or more of {', '.join(SUITES)}, or all")
    va.add_argument("--n", help="ED ring sizes, e.g. 12,14,16")
    va.add_argument("--scheme", choices=("regime", "linear", "quadratic", "aitken"), default="regime",
                    help="ED extrapolation scheme")
    va.add_argument("--json", help="also write the report as JSON")
    va.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"spinqcorr: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
