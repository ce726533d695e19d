"""Command-line sweep runner.

    diagcat run CONFIG.toml [--out DIR] [--workers N] [--seed S]
    diagcat preset NAME [--out DIR] [--workers N] [--seed S]
    diagcat list-presets

A config is a TOML document with the sections ``experiment``, ``model``,
``schedule`` (array of tables), ``grid``, ``analysis``, ``output`` and ``run``.
Unknown sections or keys are rejected. Every run writes ``manifest.json``
next to its CSV/JSON outputs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Any, Callable, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from . import collective, exact_spectrum, meanfield, models, perturbative, semiclassical
from .presets import get_preset, list_presets


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# schema

KINDS = (
    "gap_trace", "phase_diagram", "lambda_star", "trajectory", "pt_compare", "scaling_fit",
    "landscape", "extrapolation", "gap_structure",
)
MODELS = (
    "pspin", "loop_gadget", "weak_strong", "large_p", "pspin_sector", "weak_strong_sector",
    "loop_standard", "loop_dc", "induced_dc", "ring_dc",
)

_num = (int, float)
SCHEMA: dict[str, dict[str, Any]] = {
    "experiment": {"kind": str, "label": str},
    "model": {"name": str, "n": int, "p": int, "R": _num, "variant": str, "c": _num, "h1": _num, "h2": _num},
    "grid": {
        "s_points": int, "s_min": _num, "s_max": _num, "s": list,
        "lambda": list, "c": list, "n": list,
    },
    "analysis": {
        "xtol": _num, "theta": _num, "prominence": _num, "order": int, "window": list,
        "pt_compare": bool, "feature": bool, "size_scaled": _num, "size_scaled_n": list,
        "rms_threshold": _num,
    },
    "output": {"dir": str},
    "run": {"workers": int, "seed": int},
}
SCHEDULE_KEYS = {"label": str, "kind": str, "lambda": _num, "bias": (str, list)}


def _check_type(path: str, value, expected) -> None:
    ok = isinstance(value, expected) and not (expected in (int, _num) and isinstance(value, bool))
    if not ok:
        names = expected.__name__ if isinstance(expected, type) else "/".join(t.__name__ for t in expected)
        raise ConfigError(f"{path}: expected {names}, got {type(value).__name__}")


def validate(cfg: dict) -> dict:
    """Strict structural and domain checks; returns the config unchanged."""
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a table")
    for section in cfg:
        if section not in SCHEMA and section != "schedule":
            raise ConfigError(f"{section}: unknown section")
    for section, keys in SCHEMA.items():
        body = cfg.get(section, {})
        if not isinstance(body, dict):
            raise ConfigError(f"{section}: expected a table")
        for key, value in body.items():
            if key not in keys:
                raise ConfigError(f"{section}.{key}: unknown key")
            _check_type(f"{section}.{key}", value, keys[key])
    scheds = cfg.get("schedule", [])
    if not isinstance(scheds, list):
        raise ConfigError("schedule: expected an array of tables")
    for i, entry in enumerate(scheds):
        if not isinstance(entry, dict):
            raise ConfigError(f"schedule[{i}]: expected a table")
        for key, value in entry.items():
            if key not in SCHEDULE_KEYS:
                raise ConfigError(f"schedule[{i}].{key}: unknown key")
            _check_type(f"schedule[{i}].{key}", value, SCHEDULE_KEYS[key])
        if entry.get("kind", "standard") not in ("standard", "catalyst"):
            raise ConfigError(f"schedule[{i}].kind: must be 'standard' or 'catalyst'")
        if entry.get("lambda", 0) < 0:
            raise ConfigError(f"schedule[{i}].lambda: must be >= 0")

    kind = cfg.get("experiment", {}).get("kind")
    if kind is None:
        raise ConfigError("experiment.kind: required")
    if kind not in KINDS:
        raise ConfigError(f"experiment.kind: unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    name = cfg.get("model", {}).get("name")
    if name is None:
        raise ConfigError("model.name: required")
    if name not in MODELS:
        raise ConfigError(f"model.name: unknown model {name!r}")

    grid = cfg.get("grid", {})
    for key in ("s", "lambda", "c", "n"):
        if key in grid:
            vals = grid[key]
            if not vals:
                raise ConfigError(f"grid.{key}: must not be empty")
            for j, v in enumerate(vals):
                _check_type(f"grid.{key}[{j}]", v, int if key == "n" else _num)
    if "s_points" in grid and grid["s_points"] < 3:
        raise ConfigError("grid.s_points: must be at least 3")
    for j, v in enumerate(grid.get("s", [])):
        if not 0 <= v <= 1:
            raise ConfigError(f"grid.s[{j}]: must lie in [0, 1]")
    for key in ("s_min", "s_max"):
        if key in grid and not 0 <= grid[key] <= 1:
            raise ConfigError(f"grid.{key}: must lie in [0, 1]")
    if grid.get("s_min", 0.0) >= grid.get("s_max", 1.0):
        raise ConfigError("grid.s_min: must be below grid.s_max")
    for j, v in enumerate(grid.get("lambda", [])):
        if v < 0:
            raise ConfigError(f"grid.lambda[{j}]: must be >= 0")
    for j, v in enumerate(grid.get("c", [])):
        if not 0 <= v <= 1:
            raise ConfigError(f"grid.c[{j}]: must lie in [0, 1]")
    for j, v in enumerate(grid.get("n", [])):
        if v < 1:
            raise ConfigError(f"grid.n[{j}]: must be positive")
    c = cfg.get("model", {}).get("c")
    if c is not None and not 0 <= c <= 1:
        raise ConfigError("model.c: must lie in [0, 1]")
    win = cfg.get("analysis", {}).get("window")
    if win is not None and (len(win) != 2 or not 0 <= win[0] < win[1] <= 1):
        raise ConfigError("analysis.window: expected [lo, hi] with 0 <= lo < hi <= 1")
    workers = cfg.get("run", {}).get("workers")
    if workers is not None and workers < 1:
        raise ConfigError("run.workers: must be positive")
    return cfg


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            cfg = tomllib.load(fh)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"{path}: {err}") from err
    return validate(cfg)


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# ---------------------------------------------------------------------------
# helpers


def snap_fraction(c: float, size: int) -> float:
    """Nearest agreement fraction that splits ``size`` spins into whole clusters."""
    return round(c * size) / size


def _s_grid(cfg: dict) -> np.ndarray:
    g = cfg.get("grid", {})
    if "s" in g:
        return np.asarray(sorted(g["s"]), dtype=float)
    return np.linspace(g.get("s_min", 0.0), g.get("s_max", 1.0), g.get("s_points", 129))


def _schedules(cfg: dict, n: int | None) -> list[tuple[str, models.Schedule]]:
    entries = cfg.get("schedule") or [{"label": "standard", "kind": "standard"}]
    out = []
    for i, e in enumerate(entries):
        label = e.get("label", f"schedule{i}")
        if e.get("kind", "standard") == "standard":
            out.append((label, models.Schedule.standard()))
            continue
        bias = e.get("bias")
        if isinstance(bias, str):
            if bias not in ("minus", "plus"):
                raise ConfigError(f"schedule[{i}].bias: expected 'minus', 'plus' or a list")
            if n is None:
                raise ConfigError(f"schedule[{i}].bias: model has no fixed size")
            bias = (-1 if bias == "minus" else 1,) * n
        out.append((label, models.Schedule.catalyst(e.get("lambda", 0.0), bias)))
    return out


def _first_lambda(cfg: dict) -> float:
    scheds = cfg.get("schedule") or []
    for e in scheds:
        if e.get("kind") == "catalyst":
            return float(e.get("lambda", 0.0))
    return 0.0


def _sector_model(m: dict, c: float | None = None, n: int | None = None) -> tuple[models.SectorModel, dict]:
    """Sector model for the config, with ``c`` snapped to whole clusters at size ``n``."""
    snapped = {}
    c = m.get("c", 1.0) if c is None else c
    if m["name"] == "pspin_sector":
        if n is not None:
            c2 = snap_fraction(c, n)
            if c2 != c:
                snapped = {"c": c, "snapped_c": c2, "n": n}
            c = c2
        return models.pspin_sector(m.get("p", 3), c), snapped
    if m["name"] == "weak_strong_sector":
        if n is not None:
            c2 = snap_fraction(c, n // 2)
            if c2 != c:
                snapped = {"c": c, "snapped_c": c2, "n": n}
            c = c2
        ws = models.WeakStrong(n or 2, m.get("h1", 1.0), m.get("h2", 0.49))
        return ws.sector_model(c), snapped
    if m["name"] == "large_p":
        return collective.large_p_sector(m.get("variant", "truncated"), m.get("p", 25)), snapped
    raise ConfigError(f"model.name: {m['name']!r} has no sector form")


def _full_problem(m: dict):
    name = m["name"]
    if name == "loop_gadget":
        return models.build_loop_gadget(m["n"], m.get("R"), m.get("variant", "field_crossing"))
    if name == "pspin":
        return models.build_pspin(m["n"], m.get("p", 3))
    if name == "weak_strong":
        return models.build_weak_strong(m["n"], m.get("h1", 1.0), m.get("h2", 0.49)).problem
    if name == "large_p":
        return collective.build_large_p(m["n"], m.get("variant", "truncated"), m.get("p", 25))
    raise ConfigError(f"model.name: {name!r} is not a full-space model")


def _require(cfg: dict, path: str):
    section, key = path.split(".")
    try:
        return cfg[section][key]
    except KeyError:
        raise ConfigError(f"{path}: required for experiment kind {cfg['experiment']['kind']!r}") from None


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


@dataclass
class Outcome:
    key: Any
    ok: bool
    value: Any = None
    error: str = ""


def _guarded(fn: Callable, key) -> Outcome:
    try:
        return Outcome(key, True, fn(key))
    except Exception as err:  # noqa: BLE001 - recorded per point
        return Outcome(key, False, error=f"{type(err).__name__}: {err}\n{traceback.format_exc(limit=3)}")


@dataclass
class Context:
    cfg: dict
    out: Path
    workers: int
    seed: int
    files: list[str] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    def map(self, fn: Callable, keys: Sequence) -> list[Outcome]:
        """Run ``fn`` over ``keys``; failures become error records, order is preserved."""
        keys = list(keys)
        if self.workers > 1 and len(keys) > 1:
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                results = list(pool.map(partial(_guarded, fn), keys))
        else:
            results = [_guarded(fn, k) for k in keys]
        for r in results:
            if not r.ok:
                self.errors.append({"point": _json_key(r.key), "error": r.error})
        return results

    def path(self, name: str) -> Path:
        self.files.append(name)
        return self.out / name


def _json_key(key):
    if isinstance(key, tuple):
        return [_json_key(k) for k in key]
    if isinstance(key, (np.generic,)):
        return key.item()
    return key


# ---------------------------------------------------------------------------
# point tasks (module level so they pickle)


def _task_gap_trace(cfg: dict, key: tuple[str, int]):
    label, idx = key
    m = cfg["model"]
    grid = _s_grid(cfg)
    xtol = cfg.get("analysis", {}).get("xtol", 1e-7)
    prom = cfg.get("analysis", {}).get("prominence", 0.0)
    if m["name"].endswith("_sector"):
        model, snapped = _sector_model(m, n=m["n"])
        sched = _schedules(cfg, None)[idx][1]
        res = collective.sector_gap_trace(model, m["n"], sched, grid, prominence=prom, xtol=xtol)
        return res.trace, snapped
    prob = _full_problem(m)
    sched = _schedules(cfg, prob.n)[idx][1]
    return exact_spectrum.gap_trace(prob, sched, grid, prominence=prom, xtol=xtol), {}


def _task_phase(cfg: dict, key: tuple[float, float]):
    a = cfg.get("analysis", {})
    task = meanfield._PhaseTask(cfg["model"].get("p", 3), cfg.get("grid", {}).get("s_points", 513),
                                a.get("theta", meanfield.JUMP_THRESHOLD))
    return task(key)


def _task_landscape(cfg: dict, lam: float):
    m = cfg["model"]
    p, c = m.get("p", 3), m.get("c", 1.0)
    s_points = max(cfg.get("grid", {}).get("s_points", 513), 512)
    theta = cfg.get("analysis", {}).get("theta", meanfield.JUMP_THRESHOLD)
    land = meanfield.pspin_landscape(p, c, lam)
    verdict = meanfield.detect_transition(land, s_points, theta)
    if verdict.present:
        s = verdict.s_star
    else:
        s_vals = np.linspace(0.0, 1.0, s_points)[1:]
        locs = np.asarray([land(s).location[0] for s in s_vals])
        s = float(s_vals[int(np.argmax(np.abs(np.diff(locs))))])
    return verdict, land(s)


def _task_lambda_star(cfg: dict, c: float):
    m = cfg["model"]
    n = m["n"]
    model, snapped = _sector_model(m, c=c, n=n)
    g = cfg.get("grid", {})
    win = tuple(cfg.get("analysis", {}).get("window", (0.0, 1.0)))
    res = collective.lambda_star(model, n, _require(cfg, "grid.lambda"), g.get("s_points", 97), win)
    return res, snapped


def _task_gap_structure(cfg: dict, key: tuple[float, float]):
    c, lam = key
    m = cfg["model"]
    n = m["n"]
    model, snapped = _sector_model(m, c=c, n=n)
    a = cfg.get("analysis", {})
    win = tuple(a.get("window", (0.0, 1.0)))
    minima = collective.gap_structure(model, n, models.Schedule.catalyst(lam), win,
                                      cfg.get("grid", {}).get("s_points", 129), a.get("prominence", 1e-4))
    return minima, snapped


def _task_extrapolation(cfg: dict, _key):
    m = cfg["model"]
    sizes = _require(cfg, "grid.n")
    model, _ = _sector_model(m)
    lam = _first_lambda(cfg)
    sched = models.Schedule.catalyst(lam) if lam else models.Schedule.standard()
    a = cfg.get("analysis", {})
    return collective.thermo_extrapolate(model, sched, sizes, a.get("order"), cfg.get("grid", {}).get("s_points", 97))


def _task_scaling(cfg: dict, lam: float):
    m = cfg["model"]
    a = cfg.get("analysis", {})
    return collective.fit_b_lambda(
        m.get("variant", "truncated"), lam, _require(cfg, "grid.n"), m.get("p", 25),
        cfg.get("grid", {}).get("s_points", 129), a.get("rms_threshold", 0.1),
    )


def _task_pt(cfg: dict, n: int):
    fam = cfg["model"]["name"]
    lam = _first_lambda(cfg) or 1.0
    prob, sched, g, exc = perturbative.family_instance(fam, n, lam)
    rep = perturbative.pt_report(prob, sched, g, exc)
    cmp_ = perturbative.compare_to_exact(prob, sched, rep, grid=cfg.get("grid", {}).get("s_points", 257))
    return rep, cmp_


# ---------------------------------------------------------------------------
# experiments


def run_gap_trace(ctx: Context) -> None:
    cfg = ctx.cfg
    n = cfg["model"].get("n")
    if n is None:
        raise ConfigError("model.n: required for experiment kind 'gap_trace'")
    scheds = _schedules(cfg, None if cfg["model"]["name"].endswith("_sector") else n)
    keys = [(label, i) for i, (label, _) in enumerate(scheds)]
    results = ctx.map(partial(_task_gap_trace, cfg), keys)
    summary = {}
    for r in results:
        if not r.ok:
            continue
        trace, snapped = r.value
        label = r.key[0]
        trace.write_csv(ctx.path(f"gap_trace_{label}.csv"))
        summary[label] = trace.to_json()
        if snapped:
            ctx.notes.setdefault("snapped", []).append(snapped)
    _write_json(ctx.path("gap_trace_summary.json"), summary)

    if cfg.get("analysis", {}).get("pt_compare"):
        prob = _full_problem(cfg["model"])
        report = {}
        variant = cfg["model"].get("variant", "field_crossing")
        named = models.loop_named_states(prob.n, variant) if cfg["model"]["name"] == "loop_gadget" else (None, None)
        for r in results:
            if not r.ok:
                continue
            label, idx = r.key
            sched = scheds[idx][1]
            rep = perturbative.pt_report(prob, sched, *named)
            trace = r.value[0]
            entry = rep.to_json()
            entry.update({"s_min_exact": trace.s_min, "gap_min_exact": trace.gap_min,
                          "discrepancy": None if rep.s_star is None else abs(rep.s_star - trace.s_min)})
            report[label] = entry
        labels = [lab for lab, _ in scheds if lab in report]
        if len(labels) == 2:
            a, b = labels
            report["gap_ratio"] = {"numerator": b, "denominator": a,
                                   "value": report[b]["gap_min_exact"] / report[a]["gap_min_exact"]}
        _write_json(ctx.path("pt_compare.json"), report)


def run_phase_diagram(ctx: Context) -> None:
    cfg = ctx.cfg
    cs, lams = _require(cfg, "grid.c"), _require(cfg, "grid.lambda")
    results = ctx.map(partial(_task_phase, cfg), [(float(c), float(l)) for c in cs for l in lams])
    pts = [r.value for r in results if r.ok]
    diagram = meanfield.PhaseDiagram(cfg["model"].get("p", 3), pts)
    diagram.write_csv(ctx.path("phase_diagram.csv"))
    _write_json(ctx.path("phase_windows.json"),
                {repr(float(c)): diagram.windows(float(c)) for c in cs})


def run_landscape(ctx: Context) -> None:
    cfg = ctx.cfg
    lams = _require(cfg, "grid.lambda")
    results = ctx.map(partial(_task_landscape, cfg), [float(l) for l in lams])
    summary = []
    for r in results:
        if not r.ok:
            continue
        verdict, sample = r.value
        sample.write_csv(ctx.path(f"landscape_lambda{r.key:g}.csv"))
        summary.append({
            "lambda": r.key, "s": sample.s, "present": verdict.present, "jump": verdict.jump,
            "minima": [{"m": list(loc), "f": val} for loc, val in sample.minima],
        })
    _write_json(ctx.path("landscape_summary.json"), summary)


def run_lambda_star(ctx: Context) -> None:
    cfg = ctx.cfg
    n = _require(cfg, "model.n")
    results = ctx.map(partial(_task_lambda_star, cfg), [float(c) for c in _require(cfg, "grid.c")])
    rows, curve = [], []
    for r in results:
        if not r.ok:
            continue
        res, snapped = r.value
        c = snapped.get("snapped_c", r.key)
        rows.append((n, c, res.lam_star, res.gap_star, res.s_star, res.at_boundary))
        curve += [(n, c, lam, s, g) for lam, s, g in res.curve]
        if snapped:
            ctx.notes.setdefault("snapped", []).append(snapped)
    _write_csv(ctx.path("lambda_star.csv"), ["n", "c", "lambda_star", "gap_star", "s_star", "at_boundary"], rows)
    _write_csv(ctx.path("lambda_curve.csv"), ["n", "c", "lambda", "s_min", "gap_min"], curve)


def run_gap_structure(ctx: Context) -> None:
    cfg = ctx.cfg
    n = _require(cfg, "model.n")
    keys = [(float(c), float(l)) for c in _require(cfg, "grid.c") for l in _require(cfg, "grid.lambda")]
    results = ctx.map(partial(_task_gap_structure, cfg), keys)
    rows, detail = [], []
    for r in results:
        if not r.ok:
            continue
        minima, snapped = r.value
        c, lam = r.key
        c = snapped.get("snapped_c", c)
        s, g = min(minima, key=lambda t: t[1]) if minima else (None, None)
        rows.append((n, c, lam, s, g, len(minima)))
        detail.append({"c": c, "lambda": lam, "minima": [{"s": a, "gap": b} for a, b in minima]})
    _write_csv(ctx.path("gap_structure.csv"), ["n", "c", "lambda", "s_min", "gap_min", "n_local_minima"], rows)
    _write_json(ctx.path("gap_structure.json"), detail)


def run_extrapolation(ctx: Context) -> None:
    (r,) = ctx.map(partial(_task_extrapolation, ctx.cfg), [0])
    if not r.ok:
        return
    ex = r.value
    _write_json(ctx.path("extrapolation.json"), ex.to_json())
    _write_csv(ctx.path("extrapolation.csv"), ["n", "s_min", "gap_min", "residual"],
               [(t["n"], t["s_min"], t["gap_min"], t["residual"]) for t in ex.table()])


def run_trajectory(ctx: Context) -> None:
    cfg = ctx.cfg
    m = cfg["model"]
    lam = _first_lambda(cfg)
    s = _s_grid(cfg)
    if m["name"] == "weak_strong":
        traj = semiclassical.track_ws(m.get("c", 1.0), lam, s, m.get("h1", 1.0), m.get("h2", 0.49), seed=ctx.seed)
    elif m["name"] == "pspin":
        traj = semiclassical.track_pspin(m.get("p", 3), m.get("c", 1.0), lam, s, seed=ctx.seed)
    else:
        raise ConfigError(f"model.name: trajectories need 'pspin' or 'weak_strong', got {m['name']!r}")
    traj.write_csv(ctx.path("trajectory.csv"))
    info = {"continuous": traj.continuous, "jumps": traj.jumps, "stagnation": traj.stagnation}
    if cfg.get("analysis", {}).get("feature"):
        try:
            info["feature_s"] = semiclassical.locate_min_gap_feature(traj)
        except ValueError as err:
            info["feature_error"] = str(err)
    _write_json(ctx.path("trajectory.json"), info)


def run_pt_compare(ctx: Context) -> None:
    cfg = ctx.cfg
    sizes = [int(n) for n in _require(cfg, "grid.n")]
    results = ctx.map(partial(_task_pt, cfg), sizes)
    rows = []
    for r in results:
        if not r.ok:
            continue
        rep, cmp_ = r.value
        rep.write_json(ctx.path(f"pt_report_n{r.key}.json"))
        rows.append(cmp_)
    perturbative.write_comparison_csv(ctx.path("pt_compare.csv"), rows)
    good = [r.key for r in results if r.ok]
    if not good:
        return
    pred = perturbative.scaling_prediction(cfg["model"]["name"], good, _first_lambda(cfg) or 1.0)
    _write_json(ctx.path("pt_scaling.json"), {
        "family": pred.family.value, "sizes": pred.sizes, "gamma_star": pred.gammas,
        "hamming_distance": pred.distances, "class": pred.klass,
    })


def run_scaling_fit(ctx: Context) -> None:
    cfg = ctx.cfg
    results = ctx.map(partial(_task_scaling, cfg), [float(l) for l in _require(cfg, "grid.lambda")])
    fits, rows = [], []
    for r in results:
        if not r.ok:
            continue
        fits.append(r.value.to_json())
        rows += [(r.key, n, g) for n, g in zip(r.value.sizes, r.value.gaps)]
    _write_json(ctx.path("scaling_fit.json"), fits)
    _write_csv(ctx.path("scaling_fit.csv"), ["lambda", "n", "gap_min"], rows)
    a = cfg.get("analysis", {})
    if "size_scaled" in a:
        m = cfg["model"]
        sizes = a.get("size_scaled_n") or _require(cfg, "grid.n")
        res = collective.size_scaled_gaps(m.get("variant", "truncated"), sizes, a["size_scaled"], m.get("p", 25))
        _write_json(ctx.path("size_scaled.json"), {
            "sizes": res.sizes, "lambda": res.lams, "gap_min": res.gaps,
            "relative_variation": res.relative_variation,
        })


RUNNERS = {
    "gap_trace": run_gap_trace,
    "phase_diagram": run_phase_diagram,
    "landscape": run_landscape,
    "lambda_star": run_lambda_star,
    "gap_structure": run_gap_structure,
    "extrapolation": run_extrapolation,
    "trajectory": run_trajectory,
    "pt_compare": run_pt_compare,
    "scaling_fit": run_scaling_fit,
}


def execute(cfg: dict, out: str | os.PathLike | None = None, workers: int | None = None,
            seed: int | None = None) -> dict:
    """Validate and run ``cfg``; returns the manifest (also written to disk)."""
    validate(cfg)
    run = cfg.get("run", {})
    workers = workers or run.get("workers") or os.cpu_count() or 1
    seed = run.get("seed", 0) if seed is None else seed
    out_dir = Path(out or cfg.get("output", {}).get("dir", "results"))
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx = Context(cfg, out_dir, int(workers), int(seed))
    t0 = time.perf_counter()
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    RUNNERS[cfg["experiment"]["kind"]](ctx)
    manifest = {
        "config": cfg,
        "config_hash": config_hash(cfg),
        "version": __version__,
        "started": started,
        "wall_time_s": time.perf_counter() - t0,
        "workers": ctx.workers,
        "seed": ctx.seed,
        "outputs": ctx.files,
        "errors": ctx.errors,
        "notes": ctx.notes,
    }
    _write_json(out_dir / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="diagcat", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run", "preset"):
        p = sub.add_parser(name)
        p.add_argument("target", help="config file" if name == "run" else "preset name")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
    sub.add_parser("list-presets")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list-presets":
        for name, note in list_presets():
            print(f"{name:7s} {note}")
        return 0
    try:
        if args.command == "run":
            cfg = load_config(args.target)
        else:
            cfg = get_preset(args.target)
        out = args.out or (f"results/{args.target}" if args.command == "preset" else None)
        manifest = execute(cfg, out, args.workers, args.seed)
    except (ConfigError, KeyError, models.ModelError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    for name in manifest["outputs"]:
        print(name)
    if manifest["errors"]:
        print(f"{len(manifest['errors'])} sweep point(s) failed; see manifest.json", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
