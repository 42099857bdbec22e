"""Command line front end.

Exit codes: 0 success, 2 usage error, 3 internal invariant violation,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence, TextIO

from . import dtseries as dt
from .errors import CheckFailed, FanError, LocalDTError
from .motivic import MotivicSeries, render_series, render_weight
from .nctrace import build_certificate, expand_certificate, gluing_difference
from .numeric import fn_gluing_check, second_order_check
from .toric import atlas_report, fan_from_json, hirzebruch_fan, p2_fan

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_VERIFY = 4

DEFAULT_ORDER = 8
DEFAULT_MAX_ORDER = 16
DEFAULT_SEED = 20240229
CACHE_ENV = "LOCAL_DT_CACHE_DIR"
CACHE_FORMAT_VERSION = 1
CACHE_FILE = "series-cache.json"


class UsageError(Exception):
    pass


class InvariantViolation(Exception):
    pass


class VerificationFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


class SeriesCache:
    """Single JSON file keyed by ``kind:order``; discarded on a format-version mismatch."""

    def __init__(self, directory: Path | None):
        self.path = directory / CACHE_FILE if directory else None

    @classmethod
    def from_env(cls) -> SeriesCache:
        d = os.environ.get(CACHE_ENV)
        base = Path(d) if d else Path.home() / ".cache" / "localdt"
        return cls(base)

    def _load(self) -> dict[str, object]:
        if self.path is None or not self.path.exists():
            return {}
        try:
            doc = json.loads(self.path.read_text(encoding="utf-8"))
        except (OSError, ValueError):
            return {}
        if doc.get("format_version") != CACHE_FORMAT_VERSION:
            return {}
        return dict(doc.get("entries", {}))

    def get(self, key: str) -> MotivicSeries | None:
        entry = self._load().get(key)
        if entry is None:
            return None
        try:
            return MotivicSeries.from_json(entry)  # type: ignore[arg-type]
        except (KeyError, ValueError, TypeError):
            return None

    def put(self, key: str, series: MotivicSeries) -> None:
        if self.path is None:
            return
        entries = self._load()
        entries[key] = series.to_json()
        doc = {"format_version": CACHE_FORMAT_VERSION, "entries": entries}
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.path.parent, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, sort_keys=True)
            os.replace(tmp, self.path)
        except OSError:
            pass


def _surface_series(surface: str, order: int) -> MotivicSeries:
    if surface == "c3":
        return dt.c3_series(order)
    return dt.hilb_series_closed(dt.SurfaceKind.parse(surface), order)


def _surface_class(surface: str):
    if surface == "c3":
        return dt.C3_CLASS
    return dt.threefold_class(dt.SurfaceKind.parse(surface))


def _check_surface(text: str) -> str:
    t = text.strip().lower()
    if t == "c3":
        return t
    try:
        return str(dt.SurfaceKind.parse(t))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {v}")
    return v


def _pos_int(text: str) -> int:
    v = _nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _pos_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _f_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split("..")) if ".." in text else (int(text), int(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a range like -3..3, got {text!r}") from exc
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _eps_list(text: str) -> list[Fraction]:
    try:
        return [Fraction(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="localdt", description="Motivic DT series of local toric surfaces.")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("series", help="print Z_{omega_S}(t) or the C^3 series")
    p.add_argument("--surface", type=_check_surface, default="p2")
    p.add_argument("--order", type=_nonneg_int, default=DEFAULT_ORDER)
    p.add_argument("--max-order", type=_nonneg_int, default=DEFAULT_MAX_ORDER)
    p.add_argument("--format", choices=("json", "plain"), default="plain")
    p.add_argument("--specialize", choices=("none", "euler"), default="none")
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("punctual", help="print the punctual series Exp(K(t))")
    p.add_argument("--order", type=_nonneg_int, default=DEFAULT_ORDER)
    p.add_argument("--max-order", type=_nonneg_int, default=DEFAULT_MAX_ORDER)
    p.add_argument("--format", choices=("json", "plain"), default="plain")
    p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("strata", help="per-partition classes of Hilb^n")
    p.add_argument("--surface", type=_check_surface, default="p2")
    p.add_argument("-n", type=_nonneg_int, required=True)
    p.add_argument("--format", choices=("json", "plain"), default="plain")

    p = sub.add_parser("fan", help="toric atlas report")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--surface", type=_check_surface)
    src.add_argument("--file", type=Path)
    p.add_argument("--format", choices=("json", "plain"), default="plain")

    p = sub.add_parser("verify-gluing", help="certificates and numeric gluing checks")
    p.add_argument("--f", dest="f_range", type=_f_range, default=(-3, 3))
    p.add_argument("--size", type=_pos_int, default=3)
    p.add_argument("--trials", type=_pos_int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=_pos_float, default=1e-8)
    p.add_argument("--eps", type=_eps_list, default=[Fraction(1, 4), Fraction(1, 2), Fraction(1)])
    p.add_argument("--format", choices=("json", "plain"), default="plain")

    p = sub.add_parser("euler-check", help="Euler specialization against MacMahon powers")
    p.add_argument("--order", type=_nonneg_int, default=DEFAULT_ORDER)
    p.add_argument("--format", choices=("json", "plain"), default="plain")
    return parser


def _normalize_argv(argv: Sequence[str]) -> list[str]:
    # "--f -3..3": argparse would read "-3..3" as an option
    out: list[str] = []
    it = iter(argv)
    for a in it:
        if a == "--f":
            nxt = next(it, None)
            out.append("--f" if nxt is None else f"--f={nxt}")
        else:
            out.append(a)
    return out


def _cached_series(kind: str, order: int, compute: Callable[[], MotivicSeries], use_cache: bool) -> MotivicSeries:
    cache = SeriesCache.from_env() if use_cache else SeriesCache(None)
    key = f"{kind}:{order}"
    hit = cache.get(key)
    if hit is not None and hit.order == order:
        return hit
    series = compute()
    cache.put(key, series)
    return series


def _emit_series(series: MotivicSeries, fmt: str, specialize: str, out: TextIO) -> None:
    if specialize == "euler":
        values = dt.euler_specialize_series(series)
        if fmt == "json":
            out.write(json.dumps({"var": "t", "order": series.order, "euler": values}) + "\n")
        else:
            out.write(", ".join(str(v) for v in values) + "\n")
        return
    if fmt == "json":
        out.write(series.dumps() + "\n")
    else:
        out.write(render_series(series) + "\n")


def run_series(args: argparse.Namespace, out: TextIO) -> int:
    if args.order > args.max_order:
        raise UsageError(f"order {args.order} exceeds the cap {args.max_order}")
    series = _cached_series(
        f"series/{args.surface}", args.order, lambda: _surface_series(args.surface, args.order), not args.no_cache
    )
    if not series.is_unital():
        raise InvariantViolation("generating function is not unital")
    _emit_series(series, args.format, args.specialize, out)
    return EXIT_OK


def run_punctual(args: argparse.Namespace, out: TextIO) -> int:
    if args.order > args.max_order:
        raise UsageError(f"order {args.order} exceeds the cap {args.max_order}")
    series = _cached_series("punctual", args.order, lambda: dt.punctual_series(args.order), not args.no_cache)
    _emit_series(series, args.format, "none", out)
    return EXIT_OK


def run_strata(args: argparse.Namespace, out: TextIO) -> int:
    if args.n > 8:
        raise UsageError("strata reports support n <= 8")
    report = dt.strata_report(_surface_class(args.surface), args.n)
    if args.format == "json":
        out.write(json.dumps(report, sort_keys=True) + "\n")
    else:
        from .motivic import MotivicWeight

        for entry in report["strata"]:  # type: ignore[union-attr]
            gamma = entry["gamma"]
            label = " ".join(f"{i}^{g}" for i, g in gamma.items()) or "()"
            out.write(f"gamma {label}: {render_weight(MotivicWeight.from_json(entry['class']))}\n")
        out.write(f"total: {render_weight(MotivicWeight.from_json(report['total']))}\n")  # type: ignore[arg-type]
        out.write(f"residual: {render_weight(MotivicWeight.from_json(report['residual']))}\n")  # type: ignore[arg-type]
    if report["residual"]:
        raise InvariantViolation("strata sum differs from the series coefficient")
    return EXIT_OK


def run_fan(args: argparse.Namespace, out: TextIO) -> int:
    if args.file is not None:
        try:
            fan = fan_from_json(args.file.read_text(encoding="utf-8"))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"invalid fan file: {exc}") from exc
    else:
        surface = args.surface or "p2"
        if surface == "c3":
            raise UsageError("C^3 has no compact toric surface fan")
        kind = dt.SurfaceKind.parse(surface)
        fan = p2_fan() if kind.tag == "P2" else hirzebruch_fan(kind.k)
    report = atlas_report(fan)
    if any(ch["omega"] != 1 for ch in report["charts"]):  # type: ignore[index]
        raise InvariantViolation("chart frame does not normalize the 3-form")
    if args.format == "json":
        out.write(json.dumps(report, sort_keys=True) + "\n")
        return EXIT_OK
    out.write(f"rays: {report['rays3']}\n")
    for row in report["relations"]:  # type: ignore[union-attr]
        out.write(f"relation: {tuple(row)}\n")
    out.write(f"self-intersections: {report['self_intersections']}\n")
    for ch in report["charts"]:  # type: ignore[union-attr]
        out.write(f"chart {tuple(ch['cone'])}: order {tuple(ch['order'])}\n")
    for tr in report["transitions"]:  # type: ignore[union-attr]
        out.write(json.dumps(tr) + "\n")
    return EXIT_OK


def run_verify_gluing(args: argparse.Namespace, out: TextIO) -> int:
    if args.seed is None:
        if args.format == "json":
            raise UsageError("--seed is required with --format json")
        args.seed = DEFAULT_SEED
    lo, hi = args.f_range
    rows = []
    ok = True
    for f in range(lo, hi + 1):
        cert = build_certificate(f)
        exact = expand_certificate(cert) == gluing_difference(f)
        rep = second_order_check(gluing_difference(f), args.size, args.trials, args.tol, args.seed,
                                 raise_on_failure=False, name=f"f={f}")
        passed = exact and rep.passed
        ok = ok and passed
        rows.append({"f": f, "terms": len(cert), "exact": exact, "max_residual":
                     max(rep.max_value_residual, rep.max_gradient_residual), "passed": passed,
                     "failing_seed": (rep.value_failures or rep.gradient_failures or [None])[0]})
    fn_rows = []
    for eps in args.eps:
        try:
            rep = fn_gluing_check(args.size, eps, args.trials, args.tol, args.seed, raise_on_failure=False)
        except LocalDTError as exc:
            ok = False
            fn_rows.append({"eps": str(eps), "passed": False, "error": str(exc)})
            continue
        ok = ok and rep.passed
        fn_rows.append({"eps": str(eps), "passed": rep.passed, "max_residual":
                        max(rep.max_value_residual, rep.max_gradient_residual),
                        "closed_form_residual": rep.extra["closed_form_residual"],
                        "failing_seed": (rep.value_failures or rep.gradient_failures or [None])[0]})
    if args.format == "json":
        out.write(json.dumps({"seed": args.seed, "size": args.size, "trials": args.trials,
                              "certificates": rows, "fn_gluing": fn_rows, "passed": ok}, sort_keys=True) + "\n")
    else:
        out.write(f"{'f':>4} {'terms':>5} {'exact':>5} {'max residual':>13}  status\n")
        for r in rows:
            out.write(f"{r['f']:>4} {r['terms']:>5} {str(r['exact']):>5} {r['max_residual']:>13.3e}  "
                      f"{'pass' if r['passed'] else 'FAIL seed=' + str(r['failing_seed'])}\n")
        for r in fn_rows:
            if "error" in r:
                out.write(f"F_n gluing eps={r['eps']}: FAIL ({r['error']})\n")
            else:
                out.write(f"F_n gluing eps={r['eps']}: max residual {r['max_residual']:.3e}, closed form "
                          f"{r['closed_form_residual']:.3e}  {'pass' if r['passed'] else 'FAIL'}\n")
    if not ok:
        raise VerificationFailed("gluing verification failed")
    return EXIT_OK


def run_euler_check(args: argparse.Namespace, out: TextIO) -> int:
    if args.order > 10:
        raise UsageError("euler-check supports order <= 10")
    checks = [dt.euler_check(dt.c3_series(args.order), 1, "c3"),
              dt.euler_check(dt.hilb_series_closed(dt.P2, args.order), 3, "p2"),
              dt.euler_check(dt.hilb_series_closed(dt.Fn(1), args.order), 4, "fn")]
    conventions = {c.convention for c in checks}
    ok = all(c.passed for c in checks) and len(conventions) == 1
    if args.format == "json":
        out.write(json.dumps({"checks": [{"label": c.label, "chi": c.chi, "specialized": list(c.specialized),
                                          "convention": c.convention, "passed": c.passed} for c in checks],
                              "passed": ok}, sort_keys=True) + "\n")
    else:
        for c in checks:
            out.write(f"{c.label} (chi={c.chi}): {', '.join(map(str, c.specialized))}  "
                      f"[{c.convention}] {'pass' if c.passed else 'FAIL'}\n")
    if not ok:
        raise VerificationFailed("Euler specialization law failed")
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace, TextIO], int]] = {
    "series": run_series,
    "punctual": run_punctual,
    "strata": run_strata,
    "fan": run_fan,
    "verify-gluing": run_verify_gluing,
    "euler-check": run_euler_check,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    if any(a in ("-h", "--help") for a in argv):
        try:
            build_parser().parse_args(_normalize_argv(argv))
        except SystemExit:
            return EXIT_OK
    try:
        args = build_parser().parse_args(_normalize_argv(argv))
        return COMMANDS[args.verb](args, out)
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except FanError as exc:
        err.write(f"error: invalid fan: {exc}\n")
        return EXIT_USAGE
    except InvariantViolation as exc:
        err.write(f"invariant violation: {exc}\n")
        return EXIT_INVARIANT
    except (VerificationFailed, CheckFailed) as exc:
        err.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except LocalDTError as exc:
        err.write(f"internal error: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
