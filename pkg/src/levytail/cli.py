"""Command-line front end.

Subcommands: ``simulate``, ``curve``, ``sweep``, ``analyze``, ``convergence``
and ``bound``. Every output file is written next to a ``.manifest.json``
recording the command, resolved options, input digest and tool version.
Exit codes: 0 success, 1 usage error, 2 input/output error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .coupling import EXACT_CONSTANTS, LevyTriplet, theorem_bound
from .errors import InfiniteSecondMomentError, QuadratureError
from .estimator import (
    IncrementSeries,
    cutoff_sweep,
    default_alpha_grid,
    default_cutoff_grid,
    distance_curve,
    extract_increments,
    interquartile_range,
    nondimensionalize,
    split_tails,
)
from .measures import PowerLawTail, StableTailMeasure
from .simulate import SimulationConfig, convergence_experiment, sample_gaussian_jumps, sample_power_law_jumps

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3
_MISSING = {"", "na", "nan", "null", "none", "-"}


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x) -> str:
    """Round-trip safe text for a number (17 significant digits)."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _json_ready(obj):
    if isinstance(obj, dict):
        return {k: _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else fmt(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _json_ready(obj.tolist())
    return obj


class _Outputs:
    """Collects output files in temporaries and moves them into place together."""

    def __init__(self, out_dir: Path, command: str, config: dict, digest: str | None):
        self.out_dir = out_dir
        self.command = command
        self.config = config
        self.digest = digest
        self.pending: list[tuple[Path, Path]] = []

    def _temp(self, name: str) -> tuple[io.TextIOWrapper, Path]:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=self.out_dir)
        return os.fdopen(fd, "w", newline="", encoding="utf-8"), Path(tmp)

    def csv(self, name: str, header: list[str], rows) -> None:
        fh, tmp = self._temp(name)
        with fh:
            writer = csv.writer(fh, lineterminator="\n")
            if header:
                writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) if isinstance(v, (float, np.floating, int, np.integer)) and not isinstance(v, bool) else v for v in row])
        self.pending.append((tmp, self.out_dir / name))

    def json(self, name: str, payload: dict) -> None:
        fh, tmp = self._temp(name)
        with fh:
            json.dump(_json_ready(payload), fh, indent=2, sort_keys=True)
            fh.write("\n")
        self.pending.append((tmp, self.out_dir / name))

    def commit(self) -> list[Path]:
        manifest = {
            "command": self.command,
            "config": self.config,
            "seed": self.config.get("seed"),
            "input_sha256": self.digest,
            "version": __version__,
            "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
            "outputs": [dst.name for _, dst in self.pending],
        }
        self.json(f"{self.command}.manifest.json", manifest)
        written = []
        for tmp, dst in self.pending:
            os.replace(tmp, dst)
            written.append(dst)
        self.pending.clear()
        return written

    def discard(self) -> None:
        for tmp, _ in self.pending:
            try:
                tmp.unlink()
            except OSError:
                pass
        self.pending.clear()


def read_series(path: str, column: str | None = None) -> tuple[np.ndarray, str]:
    """Read one numeric column from a CSV file; returns values and SHA-256 digest."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    digest = hashlib.sha256(raw).hexdigest()
    rows = list(csv.reader(io.StringIO(raw.decode("utf-8-sig"))))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path} contains no data")

    def is_number(text):
        try:
            float(text)
            return True
        except ValueError:
            return False

    first = rows[0]
    has_header = not all(is_number(c) or c.strip().lower() in _MISSING for c in first)
    header = [c.strip() for c in first] if has_header else None
    body = rows[1:] if has_header else rows
    if column is None:
        idx = 0
    elif header is not None and column in header:
        idx = header.index(column)
    else:
        try:
            idx = int(column)
        except ValueError:
            raise InputError(f"column {column!r} not found in {path}") from None
    values, dropped = [], 0
    offset = 2 if has_header else 1
    for k, row in enumerate(body):
        cell = row[idx].strip() if idx < len(row) else ""
        if cell.lower() in _MISSING:
            dropped += 1
            continue
        try:
            values.append(float(cell))
        except ValueError:
            raise InputError(f"non-numeric value {cell!r} at row {k + offset} of {path}") from None
    if dropped:
        print(f"warning: dropped {dropped} rows with missing values", file=sys.stderr)
    return np.asarray(values, dtype=float), digest


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:step`` inclusive grid or a comma separated list."""
    try:
        if ":" in text:
            lo, hi, step = (float(t) for t in text.split(":"))
            if not step > 0 or hi < lo:
                raise ValueError
            return default_alpha_grid(lo, hi, step)
        return np.unique([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise UsageError(f"invalid grid {text!r}; use lo:hi:step or a comma list") from None


def parse_rho_grid(text: str) -> np.ndarray:
    """``lo:hi:count`` log-spaced cutoffs or a comma separated list."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            lo, hi, count = float(lo), float(hi), int(count)
            if not (0 < lo <= hi) or count < 1:
                raise ValueError
            return np.geomspace(lo, hi, count)
        return np.unique([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise UsageError(f"invalid cutoff grid {text!r}; use lo:hi:count or a comma list") from None


def parse_measure(text: str):
    """``stable:alpha=1.4,c_minus=1,c_plus=1`` or ``powerlaw:alpha=1.6,rho0=0.5``."""
    try:
        kind, _, rest = text.partition(":")
        opts = {}
        for item in filter(None, rest.split(",")):
            key, _, value = item.partition("=")
            opts[key.strip()] = value.strip() if key.strip() == "side" else float(value)
        if kind == "stable":
            return StableTailMeasure(**opts)
        if kind == "powerlaw":
            return PowerLawTail(**opts)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid measure {text!r}: {exc}") from None
    raise UsageError(f"unknown measure kind {kind!r}; use stable or powerlaw")


def resolve_threads(value: int | None) -> int:
    if value is not None:
        return max(1, value)
    env = os.environ.get("LEVYTAIL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError("LEVYTAIL_THREADS must be an integer") from None
    return 1


def _load_increments(args) -> tuple[IncrementSeries, str]:
    values, digest = read_series(args.input, args.column)
    if args.increments_given:
        if values.size < 1:
            raise InputError("no increments in input")
        incr = IncrementSeries(values, interquartile_range(values), False, values.size + 1)
    else:
        if values.size < 2:
            raise InputError("need at least two observations")
        incr = extract_increments(values)
    if not args.no_normalize:
        incr = nondimensionalize(incr)
    return incr, digest


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_simulate(args) -> list[Path]:
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if args.dist == "powerlaw":
        if not (args.alpha0 > 0 and args.rho0 > 0):
            raise UsageError("--alpha0 and --rho0 must be positive")
        _, raw = sample_power_law_jumps(args.n, args.alpha0, args.rho0, args.seed)
    else:
        if not args.sigma > 0:
            raise UsageError("--sigma must be positive")
        _, raw = sample_gaussian_jumps(args.n, args.sigma, args.seed)
    out = _Outputs(Path(args.out_dir), "simulate", _config(args), None)
    try:
        out.csv(args.name, [], ([v] for v in raw))
        return out.commit()
    except BaseException:
        out.discard()
        raise


def _sides(side: str) -> list[str]:
    return {"pos": ["positive"], "neg": ["negative"], "both": ["positive", "negative"]}[side]


def cmd_curve(args) -> list[Path]:
    incr, digest = _load_increments(args)
    grid = parse_grid(args.alpha_grid)
    out = _Outputs(Path(args.out_dir), "curve", _config(args), digest)
    try:
        summary = {}
        for side in _sides(args.side):
            pos, neg = split_tails(incr, args.rho)
            sample = pos if side == "positive" else neg
            if sample.n == 0:
                summary[side] = {"n_points": 0, "flag": "empty exceedance set"}
                continue
            curve = distance_curve(sample, args.rho, grid, args.s)
            out.csv(f"curve_{side}.csv", ["alpha", "w_tilde"], zip(curve.alpha_grid, curve.values))
            summary[side] = {
                "alpha_hat": curve.alpha_hat,
                "min_value": curve.min_value,
                "n_points": curve.n_points,
                "rho": curve.rho,
                "s": curve.s,
                "iqr": incr.iqr,
            }
        out.json("curve_summary.json", summary)
        return out.commit()
    except BaseException:
        out.discard()
        raise


def _run_sweeps(args, command: str) -> list[Path]:
    incr, digest = _load_increments(args)
    grid = parse_grid(args.alpha_grid)
    workers = resolve_threads(args.threads)
    out = _Outputs(Path(args.out_dir), command, _config(args), digest)
    try:
        best = {}
        for side in _sides(args.side):
            cutoffs = parse_rho_grid(args.rho_grid) if args.rho_grid else default_cutoff_grid(incr, side)
            res = cutoff_sweep(incr, side, cutoffs, grid, args.s, args.min_points, workers=workers)
            long_rows = []
            for row, curve in zip(res.locus, res.curves):
                if curve is None:
                    continue
                long_rows.extend((row.rho, a, v, row.n_points) for a, v in zip(curve.alpha_grid, curve.values))
            out.csv(f"sweep_{side}.csv", ["rho", "alpha", "w_tilde", "n_points"], long_rows)
            out.csv(
                f"locus_{side}.csv",
                ["rho", "alpha_hat", "min_value", "n_points", "reliable"],
                ((r.rho, r.alpha_hat, r.min_value, r.n_points, "true" if r.reliable else "false") for r in res.locus),
            )
            if res.global_best is None:
                best[side] = {"flag": "no reliable cutoff"}
            else:
                rho, alpha, d = res.global_best
                best[side] = {"rho_star": rho, "alpha_star": alpha, "d_star": d}
            best[side]["iqr"] = incr.iqr
        out.json(f"{command}_best.json", best)
        return out.commit()
    except BaseException:
        out.discard()
        raise


def cmd_sweep(args) -> list[Path]:
    return _run_sweeps(args, "sweep")


def cmd_analyze(args) -> list[Path]:
    args.side = "both"
    return _run_sweeps(args, "analyze")


def cmd_convergence(args) -> list[Path]:
    alphas = [float(a) for a in args.alpha0.split(",")]
    n_list = tuple(int(float(n)) for n in args.n_list.split(","))
    workers = resolve_threads(args.threads)
    reports = []
    for a0 in alphas:
        try:
            cfg = SimulationConfig(
                alpha0=a0, rho0=args.rho0, n_list=n_list, m=args.m, seed=args.seed,
                s=args.s, normalize=not args.no_normalize, workers=workers,
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        reports.append(convergence_experiment(cfg))
    out = _Outputs(Path(args.out_dir), "convergence", _config(args), None)
    try:
        header = ["alpha0", "statistic"]
        for n in n_list:
            header += [f"alpha_hat_n{n}", f"w_star_n{n}"]
        rows = []
        for rep in reports:
            for stat, a, w in (("mean", rep.alpha_mean, rep.w_mean), ("var", rep.alpha_var, rep.w_var)):
                row = [rep.config.alpha0, stat]
                for j in range(len(n_list)):
                    row += [a[j], w[j]]
                rows.append(row)
        out.csv("table1.csv", header, rows)
        pairs = reports[0].quotient_pairs
        labels = [f"{int(round(math.log10(a)))}_{int(round(math.log10(b)))}" for a, b in pairs]
        for name, attr, letter in (("table2.csv", "q_quotients", "Q"), ("table3.csv", "r_quotients", "R")):
            out.csv(
                name,
                ["alpha0", "theoretical_rate"] + [f"{letter}_{lab}" for lab in labels],
                ([rep.config.alpha0, rep.theoretical_rate, *getattr(rep, attr)] for rep in reports),
            )
        return out.commit()
    except BaseException:
        out.discard()
        raise


def cmd_bound(args) -> list[Path]:
    nu1, nu2 = parse_measure(args.measure1), parse_measure(args.measure2)
    t1 = LevyTriplet(args.a1, args.A1, nu1)
    t2 = LevyTriplet(args.a2, args.A2, nu2)
    res = theorem_bound(t1, t2, args.x1, args.x2, args.ell, args.lam, args.s)
    out = _Outputs(Path(args.out_dir), "bound", _config(args), None)
    try:
        out.json(
            "bound.json",
            {
                "Q1": res.q1,
                "Q2": res.q2,
                "bound": res.bound,
                "semimetric": res.semimetric,
                "small_jump_variances": list(res.small_jumps),
                "constants": EXACT_CONSTANTS.as_dict(),
            },
        )
        return out.commit()
    except BaseException:
        out.discard()
        raise


def _analysis_options(p: argparse.ArgumentParser, sweep: bool) -> None:
    p.add_argument("--input", required=True, help="CSV file with the series (or increments)")
    p.add_argument("--column", default=None, help="column name or 0-based index")
    p.add_argument("--increments-given", action="store_true", help="input already holds increments")
    p.add_argument("--no-normalize", action="store_true", help="skip division by the IQR")
    p.add_argument("--alpha-grid", default="0.5:8:0.01", help="lo:hi:step or comma list")
    p.add_argument("--s", type=float, default=1.0, help="truncation level")
    p.add_argument("--out-dir", default=".")
    if sweep:
        p.add_argument("--rho-grid", default=None, help="lo:hi:count (log-spaced) or comma list")
        p.add_argument("--min-points", type=int, default=30)
        p.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levytail", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="draw i.i.d. jumps")
    p.add_argument("--dist", choices=["powerlaw", "gaussian"], default="powerlaw")
    p.add_argument("--alpha0", type=float, default=1.6)
    p.add_argument("--rho0", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--name", default="increments.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("curve", help="distance curve at one cutoff")
    _analysis_options(p, sweep=False)
    p.add_argument("--side", choices=["pos", "neg", "both"], default="pos")
    p.add_argument("--rho", type=float, required=True)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("sweep", help="distance curves over a cutoff grid")
    _analysis_options(p, sweep=True)
    p.add_argument("--side", choices=["pos", "neg", "both"], default="pos")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analyze", help="cutoff sweeps on both tails with global best")
    _analysis_options(p, sweep=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("convergence", help="Monte Carlo convergence tables")
    p.add_argument("--alpha0", default="1.4,1.8,3.0", help="comma list of exponents")
    p.add_argument("--rho0", type=float, default=0.5)
    p.add_argument("--n-list", default="100,1000,10000,100000")
    p.add_argument("--m", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("bound", help="explicit path-space bound for two jump diffusions")
    p.add_argument("--measure1", required=True, help="e.g. stable:alpha=1.4,c_minus=1,c_plus=1")
    p.add_argument("--measure2", required=True)
    p.add_argument("--a1", type=float, default=0.0, help="drift of the first process")
    p.add_argument("--a2", type=float, default=0.0)
    p.add_argument("--A1", type=float, default=0.0, help="diffusion variance of the first process")
    p.add_argument("--A2", type=float, default=0.0)
    p.add_argument("--x1", type=float, default=0.0)
    p.add_argument("--x2", type=float, default=0.0)
    p.add_argument("--ell", type=float, default=1.0, help="one-sided Lipschitz constant")
    p.add_argument("--lam", type=float, default=1.0, help="intensity")
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        written = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"input/output error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError, InfiniteSecondMomentError, QuadratureError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
