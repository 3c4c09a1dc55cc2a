"""Command-line front end: ``geophase run | verify | sweep``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__, berry, position, verify
from .config import MAX_DIM, ConfigError, LoopConfig, load_config
from .errors import GeophaseError, PreconditionError

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
PHASE_HEADER = ["n", "gamma_wilson", "gamma_closed", "gamma_D", "gamma_S", "discrepancy", "dim", "K", "converged"]
SWEEP_HEADER = ["level", "dim", "K", "gamma_wilson", "delta_prev"]
CONVERGENCE_TOL = 1e-4
MAX_DOUBLINGS = 3


def fmt(x) -> str:
    """12 significant digits, lowercase exponent; integers and flags verbatim."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    s = f"{float(x):.12g}"
    return "0" if s == "-0" else s


def write_atomic(path: Path, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


# ------------------------------------------------------------------ compute


def wilson_table(cfg: LoopConfig, dim: int, samples: int) -> tuple[np.ndarray, "berry.ParamLoop"]:
    """Per-segment Wilson contributions (K, L) for the configured levels."""
    loop = cfg.build_loop(samples)
    return berry.wilson_segments(cfg.state_levels(), loop, dim), loop


def phase_rows(cfg: LoopConfig, loop, gammas, dim: int, flags) -> list[berry.PhaseReport]:
    reports = []
    for n, g, ok in zip(cfg.levels, gammas, flags):
        if cfg.mode == "multiphoton":
            gS = berry.closed_form_squeeze_phase(2 * n, loop)
            gD = 0.0
        else:
            gD = berry.closed_form_displacement_phase(loop)
            gS = berry.closed_form_squeeze_phase(n, loop)
        disc = abs(float(g) - (gD + gS))
        reports.append(berry.PhaseReport(n, float(g), gD + gS, gD, gS, disc, dim, loop.segments, bool(disc <= cfg.tolerance and ok)))
    return reports


def convergence_table(cfg: LoopConfig, dim: int, samples: int, doublings: int) -> list[dict]:
    """Rows (level, dim, K, gamma_wilson, delta_prev) for successive doublings of (dim, K)."""
    rows = []
    prev = None
    for j in range(doublings + 1):
        d, k = dim * 2**j, samples * 2**j
        if d > MAX_DIM:
            raise ConfigError(f"doubling {j} needs dim = {d} > {MAX_DIM}")
        segs, loop = wilson_table(cfg, d, k)
        gam = segs.sum(axis=0)
        for n, g in zip(cfg.levels, gam):
            delta = None if prev is None else abs(float(g) - prev[n])
            rows.append({"level": n, "dim": d, "K": loop.segments, "gamma_wilson": float(g), "delta_prev": delta})
        prev = dict(zip(cfg.levels, map(float, gam)))
    return rows


def run_config(cfg: LoopConfig, out_dir: Path, emit_integrand: bool = False) -> tuple[dict, int]:
    t0 = time.perf_counter()
    dim, samples = cfg.dim, cfg.samples
    segs, loop = wilson_table(cfg, dim, samples)
    gammas = segs.sum(axis=0)
    t_wilson = time.perf_counter() - t0

    table = []
    flags = [True] * len(cfg.levels)
    if cfg.convergence_doublings:
        table = convergence_table(cfg, dim, samples, cfg.convergence_doublings)
        last = table[-len(cfg.levels):]
        flags = [r["delta_prev"] < CONVERGENCE_TOL for r in last]
    reports = phase_rows(cfg, loop, gammas, dim, flags)

    if cfg.mode == "oscillator":
        by_n = dict(zip(cfg.levels, map(float, gammas)))
        if 0 in by_n and 1 in by_n:
            hannay = by_n[0] - by_n[1]
        else:
            hannay = berry.hannay_angle(loop, dim)
    else:
        hannay = None

    report = {
        "version": __version__,
        "config": cfg.raw,
        "phases": [r.as_dict() for r in reports],
        "hannay": hannay,
        "convergence": table,
    }
    if cfg.grid is not None and cfg.mode == "oscillator":
        g0 = position.gamma0_grid(loop, cfg.grid)
        fock0 = float(gammas[cfg.levels.index(0)]) if 0 in cfg.levels else berry.wilson_loop_phase(0, loop, dim)
        report["grid"] = {"gamma0_grid": g0, "gamma0_fock": fock0, "difference": abs(g0 - fock0)}
    report["timing"] = {"wilson_seconds": round(t_wilson, 3), "total_seconds": round(time.perf_counter() - t0, 3)}

    rows = [[getattr(r, h) for h in PHASE_HEADER] for r in reports]
    write_atomic(out_dir / "phases.csv", csv_text(PHASE_HEADER, rows))
    if emit_integrand:
        write_atomic(out_dir / "integrand.csv", integrand_text(cfg, loop, segs))
    write_atomic(out_dir / "report.json", json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    ok = all(r.converged for r in reports)
    return report, EXIT_OK if ok else EXIT_NUMERIC


def integrand_text(cfg: LoopConfig, loop, segs: np.ndarray) -> str:
    """Per-segment Wilson and closed-form contributions, one row per (segment, level)."""
    disp = berry.one_form_segments(loop, berry.displacement_form)
    sq = berry.one_form_segments(loop, berry.squeeze_form)
    x = loop.coordinates()
    rows = []
    for k in range(loop.segments):
        for j, n in enumerate(cfg.levels):
            idx = 2 * n if cfg.mode == "multiphoton" else n
            closed = (0.0 if cfg.mode == "multiphoton" else disp[k]) + (idx + 0.5) * sq[k]
            rows.append([k, n, *x[k], segs[k, j], closed])
    header = ["segment", "n", "lam", "alpha1", "alpha2", "beta1", "beta2", "wilson", "closed"]
    return csv_text(header, rows)


# --------------------------------------------------------------------- CLI


def _apply_overrides(cfg: LoopConfig, args) -> LoopConfig:
    if args.dim is not None:
        if not 2 <= args.dim <= MAX_DIM:
            raise ConfigError(f"--dim must lie in 2..{MAX_DIM}, got {args.dim}", None, "command line")
        cfg.dim = args.dim
    if args.segments is not None:
        if args.segments < 16:
            raise ConfigError(f"--segments K = {args.segments} violates K >= 16", None, "command line")
        for part in cfg.loop:
            part.pop("samples", None)
        cfg.samples = args.segments
    return cfg


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    try:
        cfg.build_loop()
    except PreconditionError as exc:
        raise ConfigError(f"invalid loop: {exc}", None, args.config) from None
    report, code = run_config(cfg, Path(args.out_dir), args.emit_integrand)
    for p in report["phases"]:
        tag = "ok" if p["converged"] else "FAIL"
        print(f"n={p['n']}  gamma_wilson={fmt(p['gamma_wilson'])}  gamma_closed={fmt(p['gamma_closed'])}  "
              f"discrepancy={fmt(p['discrepancy'])}  {tag}")
    if report["hannay"] is not None:
        print(f"hannay={fmt(report['hannay'])}")
    return code


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite)
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_NUMERIC


def cmd_sweep(args) -> int:
    if not 0 <= args.doublings <= MAX_DOUBLINGS:
        raise ConfigError(f"--doublings must lie in 0..{MAX_DOUBLINGS}, got {args.doublings}", None, "command line")
    cfg = _apply_overrides(load_config(args.config), args)
    top = cfg.dim * 2**args.doublings
    if top > MAX_DIM:
        raise ConfigError(f"sweep would reach dim = {top} > {MAX_DIM}", None, "command line")
    table = convergence_table(cfg, cfg.dim, cfg.samples, args.doublings)
    rows = sorted(table, key=lambda r: (r["level"], r["dim"]))
    text = csv_text(SWEEP_HEADER, [[r[h] for h in SWEEP_HEADER] for r in rows])
    write_atomic(Path(args.out_dir) / "sweep.csv", text)
    sys.stdout.write(text)
    if args.doublings == 0:
        return EXIT_OK
    last = [r for r in table if r["dim"] == top]
    return EXIT_OK if all(r["delta_prev"] < CONVERGENCE_TOL for r in last) else EXIT_NUMERIC


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # shared by the top-level parser and every subcommand so flags go on either side
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--out-dir", default=d("."), help="directory for output files (default: .)")
    p.add_argument("--dim", type=int, default=d(None), help="override the Fock truncation")
    p.add_argument("--segments", type=int, default=d(None), help="override the loop sample count K")
    p.add_argument("--emit-integrand", action="store_true", default=d(False), help="also write per-segment contributions")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geophase",
        description="Berry phases and Hannay angles along oscillator parameter loops.",
        parents=[_global_flags(True)],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _global_flags(False)
    p = sub.add_parser("run", parents=[shared], help="compute phases for a loop configuration")
    p.add_argument("config")
    p = sub.add_parser("verify", parents=[shared], help="run a self-check suite")
    p.add_argument("suite", choices=verify.SUITES + ("all",))
    p = sub.add_parser("sweep", parents=[shared], help="convergence table under doubling of (dim, K)")
    p.add_argument("config")
    p.add_argument("--doublings", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    handler = {"run": cmd_run, "verify": cmd_verify, "sweep": cmd_sweep}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except GeophaseError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
