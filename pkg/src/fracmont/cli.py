"""Command-line front end.

Examples::

    fracmont verify-identity --interval 0,1 --f poly:0,1 --w uniform --alpha 1 --x 0.5
    fracmont verify-bound --interval 0,1 --f poly:0,1 --w uniform --alpha 1 --x 0.25
    fracmont sweep --output csv --out sweep.csv
    fracmont oracle-check

Exit status is 0 exactly when every emitted row is PASS; configuration
errors exit with status 2.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import corpus
from .bounds import failed_bound, ostrowski_bound
from .errors import FracMontError
from .fractional_ops import ProblemFrame
from .identities import failed_report, montgomery_weighted
from .quadrature import QuadratureConfig, SingularIntegrand, integrate, oracle_integrate
from .serialize import (
    BOUND_COLUMNS,
    IDENTITY_COLUMNS,
    ORACLE_COLUMNS,
    SWEEP_COLUMNS,
    bound_row,
    identity_row,
    sweep_row,
    to_csv,
    to_jsonl,
)

COMMANDS = ("verify-identity", "verify-bound", "sweep", "oracle-check")
OUTPUTS = ("table", "csv", "json")
DEFAULT_ALPHAS = (1.0, 1.25, 1.5, 2.0, 3.0)
DEFAULT_X_COUNT = 9
ORACLE_EXPONENTS = (-0.5, 0.0, 0.5, 1.0, 2.0)
ORACLE_TOLERANCE = 1e-5

_QUAD_KEYS = {
    "scheme": str,
    "abs_tol": float,
    "rel_tol": float,
    "max_subdivisions": int,
    "jacobi_nodes": int,
    "grading_exponent": float,
    "oracle_panels": int,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    interval: tuple = (0.0, 1.0)
    x_grid: tuple = ()
    alpha_grid: tuple = DEFAULT_ALPHAS
    function_specs: tuple = ()
    weight_specs: tuple = ()
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    output: str = "table"
    out_path: Optional[str] = None
    seed: int = 0
    sample_pairs: int = 0
    threads: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.output not in OUTPUTS:
            raise ConfigError(f"unknown output format {self.output!r}")
        a, b = self.interval
        if not a < b:
            raise ConfigError(f"interval needs a < b, got {self.interval}")
        if self.command != "oracle-check":
            if not self.x_grid:
                raise ConfigError("x grid is empty")
            if not self.alpha_grid:
                raise ConfigError("alpha grid is empty")
            bad_x = [x for x in self.x_grid if not a <= x < b]
            if bad_x:
                raise ConfigError(f"x values outside [a, b): {bad_x}")
            bad_alpha = [al for al in self.alpha_grid if not al >= 1]
            if bad_alpha:
                raise ConfigError(f"alpha values must be >= 1: {bad_alpha}")

    def pairs(self):
        if self.sample_pairs:
            pool = sorted(set(itertools.product(
                self.function_specs or [f for f, _ in corpus.DEFAULT_PAIRS],
                self.weight_specs or [w for _, w in corpus.DEFAULT_PAIRS],
            )))
            rng = np.random.default_rng(self.seed)
            idx = rng.choice(len(pool), size=min(self.sample_pairs, len(pool)), replace=False)
            return [pool[i] for i in sorted(idx)]
        if not self.function_specs and not self.weight_specs:
            return list(corpus.DEFAULT_PAIRS)
        return list(itertools.product(self.function_specs or ["poly:0,1"], self.weight_specs or ["uniform"]))


def uniform_x_grid(a, b, count):
    if count < 1:
        raise ConfigError("x grid count must be positive")
    h = b - a
    if count == 1:
        return (a + 0.5 * h,)
    return tuple(float(v) for v in np.linspace(a + h / 20, b - h / 20, count))


def _reals(text):
    text = str(text).strip()
    if not text:
        return ()
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _specs(text):
    return tuple(s.strip() for s in str(text).split(";") if s.strip())


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment.

    List-valued spec keys separate entries with ``;`` since function specs
    contain commas.
    """
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _threads(requested):
    """Worker count: ``requested`` (or all cores), capped by FRACMONT_THREADS when set and positive."""
    n = max(int(requested), 1) if requested else (os.cpu_count() or 1)
    env = os.environ.get("FRACMONT_THREADS", "").strip()
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ConfigError(f"FRACMONT_THREADS must be an integer, got {env!r}") from None
        if cap > 0:
            n = min(n, cap)
    return n


def build_parser():
    ap = argparse.ArgumentParser(prog="fracmont", description="Weighted fractional Montgomery identity and Ostrowski bound checks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat key=value file with RunConfig fields")
    ap.add_argument("--interval", help="a,b (default 0,1)")
    ap.add_argument("--x", dest="x_grid", help="comma-separated evaluation points")
    ap.add_argument("--x-count", type=int, help="uniform grid over [a+h/20, b-h/20]")
    ap.add_argument("--alpha", dest="alpha_grid", help="comma-separated orders >= 1")
    ap.add_argument("--f", dest="function_specs", action="append", help="test function spec, repeatable")
    ap.add_argument("--w", dest="weight_specs", action="append", help="weight spec, repeatable")
    ap.add_argument("--output", choices=OUTPUTS)
    ap.add_argument("--out", dest="out_path")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--sample-pairs", type=int, help="draw this many (f, w) pairs at random using --seed")
    ap.add_argument("--threads", type=int, help="worker threads (default: all cores; FRACMONT_THREADS caps this)")
    for key, typ in _QUAD_KEYS.items():
        ap.add_argument("--" + key.replace("_", "-"), dest=key, type=typ)
    return ap


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    settings = read_config_file(args.config) if args.config else {}
    cli = {k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command")}
    settings.update(cli)

    interval = _reals(settings.get("interval", "0,1"))
    if len(interval) != 2:
        raise ConfigError(f"interval must be 'a,b', got {settings.get('interval')!r}")

    if "x_grid" in settings:
        x_grid = _reals(settings["x_grid"])
    else:
        x_grid = uniform_x_grid(*interval, int(settings.get("x_count", DEFAULT_X_COUNT)))
    alpha_grid = _reals(settings["alpha_grid"]) if "alpha_grid" in settings else DEFAULT_ALPHAS

    def spec_list(key):
        v = settings.get(key, ())
        if isinstance(v, list):
            return tuple(v)
        return _specs(v) if isinstance(v, str) else tuple(v)

    quad = {}
    for key, typ in _QUAD_KEYS.items():
        if key in settings:
            try:
                quad[key] = typ(settings[key])
            except ValueError:
                raise ConfigError(f"bad value for {key}: {settings[key]!r}") from None
    try:
        qcfg = QuadratureConfig(**quad)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    known = {f.name for f in fields(RunConfig)} | set(_QUAD_KEYS) | {"x_count"}
    unknown = sorted(set(settings) - known)
    if unknown:
        raise ConfigError(f"unknown configuration keys: {unknown}")

    return RunConfig(
        command=args.command,
        interval=interval,
        x_grid=x_grid,
        alpha_grid=alpha_grid,
        function_specs=spec_list("function_specs"),
        weight_specs=spec_list("weight_specs"),
        quadrature=qcfg,
        output=settings.get("output", "table"),
        out_path=settings.get("out_path"),
        seed=int(settings.get("seed", 0)),
        sample_pairs=int(settings.get("sample_pairs", 0)),
        threads=int(settings.get("threads", 0)),
    )


def _build_pairs(config):
    built = []
    for fs, ws in config.pairs():
        try:
            built.append((corpus.lookup_function(fs, config.interval), corpus.lookup_weight(ws, config.interval)))
        except FracMontError as exc:
            raise ConfigError(str(exc)) from None
    return built


def _grid(config):
    a, b = config.interval
    for f, w in _build_pairs(config):
        for alpha in config.alpha_grid:
            for x in config.x_grid:
                yield f, w, ProblemFrame(a, b, x, alpha)


def _identity_task(item, cfg):
    f, w, frame = item
    try:
        return montgomery_weighted(frame, f, w, cfg)
    except FracMontError as exc:
        return failed_report(frame, "weighted", f.name, w.name, exc)


def _bound_task(item, cfg):
    f, w, frame = item
    try:
        return ostrowski_bound(frame, f, w, cfg)
    except FracMontError as exc:
        return failed_bound(frame, f.name, w.name, f.deriv_sup_bound, exc)


def _sweep_task(item, cfg):
    return sweep_row(_identity_task(item, cfg), _bound_task(item, cfg))


def _oracle_rows(config):
    a, b = config.interval
    cfg = config.quadrature
    rows = []
    for f, w in _build_pairs(config):
        g = lambda t, f=f, w=w: np.asarray(w.value(t), dtype=float) * f.value(t)
        for mu in ORACLE_EXPONENTS:
            integrand = SingularIntegrand(g, a, b, mu)
            note = ""
            try:
                value, err = integrate(integrand, cfg)
            except FracMontError as exc:
                value, err, note = getattr(exc, "value", float("nan")), getattr(exc, "err_estimate", float("nan")), str(exc)
            ref = oracle_integrate(integrand, cfg.oracle_panels, cfg.grading_for(mu))
            diff = abs(value - ref)
            ok = not note and diff <= ORACLE_TOLERANCE
            rows.append({
                "a": a, "b": b, "function": f.name, "weight": w.name, "mu": mu, "value": value,
                "oracle": ref, "difference": diff, "quadrature_err": err, "tolerance": ORACLE_TOLERANCE,
                "note": note, "status": "PASS" if ok else "FAIL",
            })
    return rows


def run_rows(config: RunConfig):
    """Evaluate ``config`` and return ``(columns, rows)`` in grid order."""
    if config.command == "oracle-check":
        return ORACLE_COLUMNS, _oracle_rows(config)
    task, columns, to_row = {
        "verify-identity": (_identity_task, IDENTITY_COLUMNS, identity_row),
        "verify-bound": (_bound_task, BOUND_COLUMNS, bound_row),
        "sweep": (_sweep_task, SWEEP_COLUMNS, lambda r: r),
    }[config.command]
    items = list(_grid(config))
    cfg = config.quadrature
    workers = min(_threads(config.threads), max(len(items), 1))
    if workers == 1:
        results = [task(item, cfg) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda item: task(item, cfg), items))
    return columns, [to_row(r) for r in results]


_TABLE_COLUMNS = {
    "verify-identity": ("x", "alpha", "function", "weight", "lhs", "term_main", "term_correction",
                        "term_derivative", "residual", "tolerance", "status"),
    "verify-bound": ("x", "alpha", "function", "weight", "lhs", "rhs_direct", "rhs_closed_corrected",
                     "rhs_closed_paper", "tightness", "status"),
    "sweep": ("x", "alpha", "function", "weight", "residual", "deviation", "rhs_direct",
              "rhs_closed_corrected", "tightness", "status"),
    "oracle-check": ("function", "weight", "mu", "value", "oracle", "difference", "status"),
}


def to_table(command, rows) -> str:
    cols = _TABLE_COLUMNS[command]

    def cell(v):
        if isinstance(v, (bool, np.bool_)):
            return "yes" if v else "no"
        if isinstance(v, str):
            return v
        return f"{float(v):.10g}"

    body = [[cell(r[c]) for c in cols] for r in rows]
    widths = [max([len(c)] + [len(line[i]) for line in body]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(wd) for c, wd in zip(cols, widths))]
    lines += ["  ".join(v.rjust(wd) for v, wd in zip(line, widths)) for line in body]
    failed = sum(r["status"] != "PASS" for r in rows)
    lines.append(f"{len(rows) - failed}/{len(rows)} PASS")
    return "\n".join(lines) + "\n"


def render(config: RunConfig, columns, rows) -> str:
    if config.output == "csv":
        return to_csv(rows, columns)
    if config.output == "json":
        return to_jsonl(rows, columns)
    return to_table(config.command, rows)


def run(config: RunConfig, stdout=None) -> int:
    """Run ``config``, write its report, and return the exit status."""
    columns, rows = run_rows(config)
    text = render(config, columns, rows)
    if config.out_path:
        Path(config.out_path).write_text(text)
    else:
        (stdout or sys.stdout).write(text)
    return 0 if all(r["status"] == "PASS" for r in rows) else 1


def main(argv=None) -> int:
    try:
        config = config_from_args(argv)
        return run(config)
    except ConfigError as exc:
        print(f"fracmont: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
