"""Batch front end.

Each verb reads a JSON run configuration, dispatches the parameter points
to the library, and writes one CSV artifact::

    qslcoupled quantum-sweep --config sweep.json --out sweep.csv --threads 4

Exit codes: 0 success, 1 configuration error, 2 every point failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .classical import classical_sweeps
from .diagnostics import entanglement_point, quantum_point
from .io import write_csv, write_wigner_csv
from .liouvillian import steady_state_for
from .observables import partial_trace
from .params import SystemParams
from .sde import SdeConfig, ensemble_amplitude
from .wigner import DEEP_GRID, WEAK_GRID, PhaseGrid, wigner

__all__ = ["MODES", "ConfigError", "RunConfig", "parse_config", "run", "main"]

MODES = (
    "classical-scan",
    "quantum-steady",
    "quantum-sweep",
    "kerr-map",
    "wigner-export",
    "sde-ensemble",
    "entanglement-sweep",
)

SWEEP_MODES = {"classical-scan", "quantum-sweep", "kerr-map", "sde-ensemble",
               "entanglement-sweep"}

QUANTUM_HEADER = ["eps_over_k1", "mean_phonon_1", "mean_phonon_2", "delta_y",
                  "classification", "negativity", "renyi2", "errors"]

TOP_KEYS = {"mode", "params", "sweep", "n_max", "grid", "sde", "seed", "output",
            "ring_contrast", "reverse", "initial", "kerr_values"}
PARAM_KEYS = {"omega", "k1", "k2", "kerr", "epsilon"}
SWEEP_KEYS = {"name", "values"}
GRID_KEYS = {"x_min", "x_max", "y_min", "y_max", "n_x", "n_y"}
SDE_KEYS = {"dt", "n_steps", "n_trajectories", "transient_fraction", "record_every"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: str
    params: SystemParams = field(default_factory=SystemParams)
    sweep_name: str | None = None
    sweep_values: list = field(default_factory=list)
    n_max: int = 16
    grid: PhaseGrid = WEAK_GRID
    sde: SdeConfig = field(default_factory=SdeConfig)
    seed: int = 0
    output: str | None = None
    ring_contrast: float = 0.75
    reverse: bool = False
    initial: tuple | None = None
    kerr_values: list = field(default_factory=list)

    def asdict(self) -> dict:
        return {
            "mode": self.mode,
            "params": self.params.asdict(),
            "sweep": {"name": self.sweep_name, "values": self.sweep_values},
            "n_max": self.n_max,
            "grid": self.grid.asdict(),
            "sde": {k: getattr(self.sde, k) for k in sorted(SDE_KEYS)},
            "seed": self.seed,
            "ring_contrast": self.ring_contrast,
            "reverse": self.reverse,
            "initial": list(self.initial) if self.initial is not None else None,
            "kerr_values": self.kerr_values,
        }


def _strict(obj, allowed: set, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r} in {where}")
    return obj


def _number(value, key: str, integer: bool = False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    if integer and int(value) != value:
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key} must be finite")
    return int(value) if integer else float(value)


def _number_list(values, key: str) -> list:
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{key} must be a non-empty list")
    return [_number(v, key) for v in values]


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and validate a JSON run configuration (unknown keys rejected)."""
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    raw = _strict(raw, TOP_KEYS, "config")

    cfg_mode = raw.get("mode", mode)
    if mode is not None and cfg_mode != mode:
        raise ConfigError(f"mode {cfg_mode!r} in config does not match verb {mode!r}")
    if cfg_mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {cfg_mode!r}")

    praw = _strict(raw.get("params", {}), PARAM_KEYS, "params")
    pvals = {k: _number(v, f"params.{k}") for k, v in praw.items()}
    try:
        params = SystemParams(**pvals)
    except (TypeError, ValueError) as exc:
        bad = next((k for k in PARAM_KEYS if k in str(exc)), "params")
        raise ConfigError(f"params.{bad}: {exc}") from exc

    out = RunConfig(mode=cfg_mode, params=params)
    out.n_max = 16 if params.regime != "deep" else 8
    out.grid = WEAK_GRID if params.regime != "deep" else DEEP_GRID

    if "sweep" in raw:
        sw = _strict(raw["sweep"], SWEEP_KEYS, "sweep")
        if "name" not in sw or "values" not in sw:
            raise ConfigError("sweep requires 'name' and 'values'")
        out.sweep_name = sw["name"]
        out.sweep_values = _number_list(sw["values"], "sweep.values")
    if cfg_mode in SWEEP_MODES and not out.sweep_values:
        raise ConfigError(f"missing key 'sweep' required by mode {cfg_mode}")
    allowed_names = {"eps_over_k1", "kerr"} if cfg_mode == "classical-scan" else {"eps_over_k1"}
    if out.sweep_name is not None and out.sweep_name not in allowed_names:
        raise ConfigError(f"sweep.name must be one of {sorted(allowed_names)} for {cfg_mode}")
    if any(b < a for a, b in zip(out.sweep_values, out.sweep_values[1:])):
        raise ConfigError("sweep.values must be ascending")
    if cfg_mode != "classical-scan" and any(v < 0 for v in out.sweep_values):
        raise ConfigError("sweep.values: eps/k1 must be >= 0")

    if "n_max" in raw:
        out.n_max = _number(raw["n_max"], "n_max", integer=True)
        if out.n_max < 2:
            raise ConfigError("n_max must be >= 2")
    if "grid" in raw:
        g = _strict(raw["grid"], GRID_KEYS, "grid")
        missing = sorted(GRID_KEYS - set(g))
        if missing:
            raise ConfigError(f"missing key 'grid.{missing[0]}'")
        try:
            out.grid = PhaseGrid(**{k: _number(v, f"grid.{k}", integer=k.startswith("n_"))
                                    for k, v in g.items()})
        except ValueError as exc:
            raise ConfigError(f"grid: {exc}") from exc
    if "sde" in raw:
        s = _strict(raw["sde"], SDE_KEYS, "sde")
        kw = {k: _number(v, f"sde.{k}", integer=k in ("n_steps", "n_trajectories", "record_every"))
              for k, v in s.items()}
        try:
            out.sde = SdeConfig(**kw)
            out.sde.validate_for(params)
        except ValueError as exc:
            raise ConfigError(f"sde: {exc}") from exc
    if "seed" in raw:
        out.seed = _number(raw["seed"], "seed", integer=True)
    out.sde = replace(out.sde, base_seed=out.seed)
    if "output" in raw:
        if not isinstance(raw["output"], str):
            raise ConfigError("output must be a string path")
        out.output = raw["output"]
    if "ring_contrast" in raw:
        out.ring_contrast = _number(raw["ring_contrast"], "ring_contrast")
    if "reverse" in raw:
        if not isinstance(raw["reverse"], bool):
            raise ConfigError("reverse must be true or false")
        out.reverse = raw["reverse"]
    if "initial" in raw:
        init = _number_list(raw["initial"], "initial")
        if len(init) != 4:
            raise ConfigError("initial must have four entries (x1, y1, x2, y2)")
        out.initial = tuple(init)
    if "kerr_values" in raw:
        out.kerr_values = _number_list(raw["kerr_values"], "kerr_values")
    if cfg_mode == "kerr-map" and not out.kerr_values:
        raise ConfigError("missing key 'kerr_values' required by mode kerr-map")
    return out


# -- workers (module level so they pickle for process pools) ---------------

def _quantum_row(args):
    p, n_max, grid, ring_contrast = args
    try:
        q = quantum_point(p, n_max, grid, ring_contrast)
        return [q.eps_over_k1, q.mean_phonon_1, q.mean_phonon_2, q.delta_y,
                q.classification, q.negativity, q.renyi2, ""], True
    except Exception as exc:
        return [p.eps_over_k1, None, None, None, "error", None, None,
                f"{type(exc).__name__}: {exc}"], False


def _kerr_row(args):
    p, n_max, grid, ring_contrast = args
    try:
        q = quantum_point(p, n_max, grid, ring_contrast)
        return [q.eps_over_k1, q.kerr, q.mean_phonon_1, q.classification, ""], True
    except Exception as exc:
        return [p.eps_over_k1, p.kerr, None, "error", f"{type(exc).__name__}: {exc}"], False


def _entanglement_row(args):
    p, n_max = args
    try:
        neg, sr = entanglement_point(p, n_max)
        return [p.eps_over_k1, neg, sr, ""], True
    except Exception as exc:
        return [p.eps_over_k1, None, None, f"{type(exc).__name__}: {exc}"], False


def _sde_row(args):
    p, sde_cfg, initial = args
    try:
        res = ensemble_amplitude(p, sde_cfg, initial)
        return [p.eps_over_k1, res.mean, res.std_err, ""], True
    except Exception as exc:
        return [p.eps_over_k1, None, None, f"{type(exc).__name__}: {exc}"], False


def _ordered_map(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as ex:
        return list(ex.map(fn, jobs))


def _compute(config: RunConfig, threads: int):
    """Return ``(header, rows, n_ok)`` for the configured mode."""
    p = config.params
    mode = config.mode
    if mode == "classical-scan":
        kw = {} if config.initial is None else {"initial": config.initial}
        rows = classical_sweeps(p, config.sweep_name, config.sweep_values,
                                reverse=config.reverse, **kw)
        body = []
        for r in rows:
            s = r.state if r.state is not None else (None,) * 4
            body.append([r.param, r.classification, r.amplitude, *s, r.error])
        ok = sum(1 for r in rows if not r.error)
        return ["param", "classification", "amplitude", "x1", "y1", "x2", "y2", "errors"], body, ok

    if mode in ("quantum-steady", "quantum-sweep"):
        ratios = config.sweep_values if mode == "quantum-sweep" else [p.eps_over_k1]
        jobs = [(p.with_eps_over_k1(r), config.n_max, config.grid, config.ring_contrast)
                for r in ratios]
        results = _ordered_map(_quantum_row, jobs, threads)
        return QUANTUM_HEADER, [r for r, _ in results], sum(ok for _, ok in results)

    if mode == "kerr-map":
        jobs = [(p.replace(kerr=k).with_eps_over_k1(r), config.n_max, config.grid,
                 config.ring_contrast)
                for k in config.kerr_values for r in config.sweep_values]
        results = _ordered_map(_kerr_row, jobs, threads)
        return (["eps_over_k1", "kerr", "mean_phonon_1", "classification", "errors"],
                [r for r, _ in results], sum(ok for _, ok in results))

    if mode == "entanglement-sweep":
        jobs = [(p.with_eps_over_k1(r), config.n_max) for r in config.sweep_values]
        results = _ordered_map(_entanglement_row, jobs, threads)
        return (["eps_over_k1", "negativity", "renyi2", "errors"],
                [r for r, _ in results], sum(ok for _, ok in results))

    if mode == "sde-ensemble":
        jobs = [(p.with_eps_over_k1(r), config.sde, config.initial)
                for r in config.sweep_values]
        results = _ordered_map(_sde_row, jobs, threads)
        return (["eps_over_k1", "mean_amp_sq", "std_err", "errors"],
                [r for r, _ in results], sum(ok for _, ok in results))

    raise ConfigError(f"mode {mode!r} is not a tabular sweep")


def run(config: RunConfig, out=None, threads: int = 1) -> int:
    """Execute ``config`` and write its CSV to ``out`` (a path, a text stream,
    or ``None`` for ``config.output``/stdout).  Returns the exit status."""
    metadata = {"config": config.asdict()}

    if config.mode == "wigner-export":
        try:
            rho = steady_state_for(config.params, config.n_max)
            wf = wigner(partial_trace(rho, 1), config.grid)
        except Exception as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
        metadata["boundary_warning"] = wf.boundary_warning
        _emit(out if out is not None else config.output,
              lambda s: write_wigner_csv(s, wf, metadata))
        return 0

    header, rows, n_ok = _compute(config, threads)
    _emit(out if out is not None else config.output,
          lambda s: write_csv(s, header, rows, metadata))
    return 0 if n_ok > 0 else 2


def _emit(target, writer):
    if target is None or target == "-":
        writer(sys.stdout)
    elif hasattr(target, "write"):
        writer(target)
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            writer(fh)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslcoupled",
        description="Coupled quantum Stuart-Landau oscillators: batch runs to CSV.")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="MODE")
    for mode in MODES:
        sp_ = sub.add_parser(mode)
        sp_.add_argument("--config", help="JSON run configuration")
        sp_.add_argument("--out", help="output CSV path ('-' for stdout)")
        sp_.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                         help="parallel worker processes (default: CPU count)")
        sp_.add_argument("--seed", type=int, help="overrides the config seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = ""
        if args.config:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        config = parse_config(text, mode=args.mode)
        if args.seed is not None:
            config.seed = args.seed
            config.sde = replace(config.sde, base_seed=args.seed)
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return run(config, out=args.out, threads=max(1, args.threads))


if __name__ == "__main__":
    sys.exit(main())
