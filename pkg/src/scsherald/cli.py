"""Command-line entry point.

Commands: ``herald``, ``distribution``, ``sweep``, ``compare``, ``validate``.
Exit codes: 0 success, 1 validation failure, 2 usage or domain error,
3 truncation or convergence failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from scsherald import __version__, closed_form, oracle, optimize, validate
from scsherald.errors import ConvergenceError, DomainError, TruncationError
from scsherald.states import smsv_state, squeeze_from

EXIT_OK, EXIT_VALIDATION, EXIT_DOMAIN, EXIT_NUMERIC = 0, 1, 2, 3

SWEEP_COLUMNS = ["beta", "k1", "k2", "B_opt", "S_opt_dB", "fid_max", "probability", "converged"]
COMPARE_COLUMNS = ["beta", "k1", "k2", "fid11", "fid00", "g_dB", "p11", "p00", "j_dB", "baseline_S_dB", "flags"]


@dataclass
class RunConfig:
    """Everything that shapes a run; echoed into every output file."""

    cutoff: str | int = "auto"
    truncation_tol: float = 1e-10
    oracle_tol: float = 1e-9
    B_bounds: list = field(default_factory=lambda: [0.01, 1.0])
    S_bounds: list = field(default_factory=lambda: [0.5, 20.0])
    grid: list = field(default_factory=lambda: [40, 40])
    xatol: float = 1e-5
    maxfev: int = 500
    baselines_dB: list = field(default_factory=lambda: [20.0, 9.0])
    format: str = "csv"
    output: str | None = None
    workers: int = 1

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> "RunConfig":
        data = {}
        if path:
            with open(path) as fh:
                data = json.load(fh)
            unknown = set(data) - {f.name for f in fields(cls)}
            if unknown:
                raise DomainError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls(**data)
        if cfg.format not in ("csv", "json"):
            raise DomainError(f"format must be csv or json, got {cfg.format!r}")
        if cfg.cutoff != "auto":
            cfg.cutoff = int(cfg.cutoff)
        return cfg

    def settings(self) -> optimize.OptimizerSettings:
        return optimize.OptimizerSettings(
            B_bounds=tuple(self.B_bounds),
            S_bounds=tuple(self.S_bounds),
            grid=tuple(int(g) for g in self.grid),
            xatol=self.xatol,
            maxfev=self.maxfev,
        )

    def fixed_cutoff(self) -> int | None:
        return None if self.cutoff == "auto" else int(self.cutoff)


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    if isinstance(v, (tuple, list)):
        return ";".join(str(x) for x in v)
    return str(v)


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, tuple):
        return list(v)
    return v


def render(command: str, cfg: RunConfig, columns: list[str], rows: list[dict]) -> str:
    meta = {
        "artifact": "scsherald",
        "version": __version__,
        "command": command,
        "generated": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": asdict(cfg),
    }
    if cfg.format == "json":
        body = {
            **meta,
            "columns": columns,
            "rows": [{c: _json_value(float(f"{r[c]:.12g}") if isinstance(r[c], float) else r[c]) for c in columns} for r in rows],
        }
        return json.dumps(body, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# {meta['artifact']} {meta['version']} {command}\n")
    buf.write(f"# generated: {meta['generated']}\n")
    buf.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_patterns(text: str) -> list[tuple[int, int]]:
    """``"22,44,66"`` or ``"2:3,10:11"``."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if ":" in tok:
            a, b = tok.split(":")
        elif len(tok) == 2 and tok.isdigit():
            a, b = tok
        else:
            raise DomainError(f"cannot parse pattern {tok!r}; use k1k2 or k1:k2")
        out.append((int(a), int(b)))
    return out


def beta_grid(args) -> list[float]:
    if args.steps < 1 or not 0 < args.beta_min <= args.beta_max:
        raise DomainError("need 0 < beta-min <= beta-max and steps >= 1")
    if args.steps == 1:
        return [float(args.beta_min)]
    return [round(float(b), 12) for b in np.linspace(args.beta_min, args.beta_max, args.steps)]


def cmd_herald(args, cfg: RunConfig) -> int:
    c = oracle.cascade_params(args.squeeze_db, args.B)
    k1, k2 = args.k1, args.k2
    anc = (1, 1) if args.ancillas == "11" else (0, 0)
    cutoff = cfg.fixed_cutoff()
    report = {"k1": k1, "k2": k2, "ancillas": args.ancillas, "S_dB": c.squeeze.S_dB, "B": c.bs.B,
              "y": c.y, "y1": c.y1, "y2": c.y2}
    clicks = k1 + k2
    psi = oracle.herald_input(c.squeeze, clicks) if cutoff is None else smsv_state(c.squeeze, cutoff, cfg.truncation_tol)

    if anc == (1, 1) and k1 >= 1 and k2 >= 1:
        p = closed_form.HeraldPattern(k1, k2)
        state = closed_form.conditional_state(p, c.y2, c.bs.B, cutoff)
        prob = closed_form.herald_probability(p, c)
        report["route"] = "closed-form"
        if args.check:
            ref = oracle.cascade_herald(psi, 1, 1, c.bs, k1, k2)
            n = max(state.cutoff, ref.state.cutoff)
            report["state_residual"] = float(np.max(np.abs(state.padded(n).amplitudes - ref.state.padded(n).amplitudes)))
            report["probability_residual"] = abs(prob / ref.probability - 1.0)
            report["check_passed"] = max(report["state_residual"], report["probability_residual"]) < cfg.oracle_tol
    else:
        ref = oracle.cascade_herald(psi, *anc, c.bs, k1, k2)
        if not ref.possible:
            raise DomainError(f"outcome ({k1}, {k2}) is impossible within the input cutoff")
        state, prob = ref.state, ref.probability
        report["route"] = "oracle"
        if anc == (1, 1):
            report["note"] = "closed form needs k1, k2 >= 1; served by the oracle"
    report.update(probability=prob, parity=state.parity.value, cutoff=state.cutoff,
                  amplitudes=[float(a) for a in state.amplitudes[:20]])

    if cfg.format == "json":
        text = json.dumps({"version": __version__, "config": asdict(cfg), **report}, indent=2) + "\n"
    else:
        lines = [f"{k}: {fmt(v) if not isinstance(v, list) else ''}" for k, v in report.items() if k != "amplitudes"]
        lines.append("amplitudes (first 20):")
        lines += [f"  |{n}>  {fmt(a)}" for n, a in enumerate(report["amplitudes"])]
        text = "\n".join(lines) + "\n"
    emit(text, cfg)
    if args.check and report.get("check_passed") is False:
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_distribution(args, cfg: RunConfig) -> int:
    c = oracle.cascade_params(args.squeeze_db, args.B)
    anc = (1, 1) if args.ancillas == "11" else (0, 0)
    cutoff = cfg.fixed_cutoff()
    psi = oracle.herald_input(c.squeeze, 2 * args.kmax) if cutoff is None else smsv_state(c.squeeze, cutoff, cfg.truncation_tol)
    table = oracle.herald_distribution(psi, *anc, c.bs, args.kmax)
    rows = [
        {"k1": k1, "k2": k2, "probability": o.probability,
         "parity": o.state.parity.value if o.state is not None else "none", "possible": o.possible}
        for (k1, k2), o in sorted(table.items())
    ]
    emit(render("distribution", cfg, ["k1", "k2", "probability", "parity", "possible"], rows), cfg)
    return EXIT_OK


def cmd_sweep(args, cfg: RunConfig) -> int:
    patterns = parse_patterns(args.patterns) if args.patterns else list(
        optimize.EVEN_PATTERNS if args.parity == "even" else optimize.ODD_PATTERNS)
    results = optimize.run_sweeps(patterns, beta_grid(args), cfg.settings(), cfg.workers)
    rows = [r.as_dict() for r in results]
    emit(render("sweep", cfg, SWEEP_COLUMNS, rows), cfg)
    if all(not r.feasible for r in results):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig) -> int:
    patterns = parse_patterns(args.patterns) if args.patterns else list(
        optimize.EVEN_PATTERNS if args.parity == "even" else optimize.ODD_PATTERNS)
    gains = optimize.gain_curves(patterns, beta_grid(args), cfg.baselines_dB, cfg.settings(), cfg.workers)
    rows = [asdict(g) for g in gains]
    emit(render("compare", cfg, COMPARE_COLUMNS, rows), cfg)
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig) -> int:
    failed = None
    for suite in validate.run_all():
        status = "PASS" if suite.passed else "FAIL"
        print(f"{status}  {suite.name:<22} cases={suite.cases:<4} max_residual={suite.max_residual:.3e}  tol={suite.tol:.0e}")
        if not suite.passed and failed is None:
            failed = suite
    if failed is not None:
        print(f"first failure in {failed.name}: {validate.format_case(failed.failure)}")
        return EXIT_VALIDATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scsherald", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"scsherald {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--output", "-o")
    common.add_argument("--workers", type=int)
    common.add_argument("--cutoff", help="'auto' or a fixed Fock cutoff")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    h = sub.add_parser("herald", parents=[common], help="conditional state and probability for one outcome")
    h.add_argument("--k1", type=int, required=True)
    h.add_argument("--k2", type=int, required=True)
    h.add_argument("--squeeze-db", type=float, required=True)
    h.add_argument("--B", type=float, required=True)
    h.add_argument("--ancillas", choices=("11", "00"), default="11")
    h.add_argument("--check", action="store_true", help="compare against the brute-force oracle")
    h.set_defaults(func=cmd_herald)

    d = sub.add_parser("distribution", parents=[common], help="outcome probabilities from the oracle")
    d.add_argument("--squeeze-db", type=float, required=True)
    d.add_argument("--B", type=float, required=True)
    d.add_argument("--ancillas", choices=("11", "00"), default="11")
    d.add_argument("--kmax", type=int, default=6)
    d.set_defaults(func=cmd_distribution)

    for name, func, text in (("sweep", cmd_sweep, "optimized fidelity versus beta"),
                             ("compare", cmd_compare, "gains over the empty-ancilla scheme")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--parity", choices=("even", "odd"), default="even")
        s.add_argument("--patterns", help="e.g. 22,44,66 or 2:3,4:5")
        s.add_argument("--beta-min", type=float, default=0.5)
        s.add_argument("--beta-max", type=float, default=3.0)
        s.add_argument("--steps", type=int, default=26)
        s.add_argument("--B-max", type=float, help="upper edge of the B search box")
        s.add_argument("--grid", type=int, nargs=2, metavar=("NB", "NS"))
        if name == "compare":
            s.add_argument("--baseline-sdb", type=float, nargs="+", help="empty-ancilla input squeezing (dB)")
        s.set_defaults(func=func)

    v = sub.add_parser("validate", parents=[common], help="closed forms against the oracle")
    v.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = {"format": args.format, "output": args.output, "workers": args.workers, "cutoff": args.cutoff,
                 "grid": getattr(args, "grid", None), "baselines_dB": getattr(args, "baseline_sdb", None)}
    try:
        cfg = RunConfig.load(args.config, overrides)
        if getattr(args, "B_max", None) is not None:
            cfg.B_bounds = [cfg.B_bounds[0], args.B_max]
        return args.func(args, cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (TruncationError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
