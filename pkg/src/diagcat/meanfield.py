"""Zero-temperature mean-field free energies and first-order transition detection."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .exact_spectrum import local_minima
from .models import ModelError

JUMP_THRESHOLD = 0.05
TIE_TOL = 1e-10
FLAT_TOL = 1e-12


# ---------------------------------------------------------------------------
# free energies


def free_energy_pspin(m, s: float, p: int, c: float, lam: float):
    """Mean-field free energy density of the biased p-spin (vectorized in ``m``)."""
    m = np.asarray(m, dtype=float)
    field_ = p * m ** (p - 1)
    drive = (1.0 - s) ** 2
    good = np.sqrt(s**2 * (field_ + lam * (1.0 - s)) ** 2 + drive)
    bad = np.sqrt(s**2 * (field_ - lam * (1.0 - s)) ** 2 + drive)
    return s * (p - 1) * m**p - c * good - (1.0 - c) * bad


def free_energy_ws(m1, m2, s: float, c: float, lam: float, h1: float = 1.0, h2: float = 0.49):
    """Mean-field free energy density of the weak-strong cluster pair."""
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    drive = (1.0 - s) ** 2
    bias = lam * (1.0 - s)
    strong = np.sqrt(s**2 * (m1 + m2 / 2 + h1 + bias) ** 2 + drive)
    weak = m2 + m1 / 2 - h2
    good = np.sqrt(s**2 * (weak + bias) ** 2 + drive)
    bad = np.sqrt(s**2 * (weak - bias) ** 2 + drive)
    return s / 4 * (m1**2 + m2**2 + m1 * m2) - strong / 2 - c / 2 * good - (1.0 - c) / 2 * bad


def pspin_domain(p: int) -> tuple[float, float]:
    """Magnetization range of the self-consistent branch.

    For odd ``p`` the negative-``m`` branch of the closed form is not a
    solution of the mean-field equations (it would beat the true ground state
    at ``s = 1``), so the search is restricted to ``[0, 1]``.
    """
    return (0.0, 1.0) if p % 2 else (-1.0, 1.0)


# ---------------------------------------------------------------------------
# landscapes


@dataclass
class LandscapeSample:
    s: float
    grid: tuple[np.ndarray, ...]
    f: np.ndarray
    minima: list[tuple[tuple[float, ...], float]]
    global_min: tuple[tuple[float, ...], float]
    tie_broken: bool = False
    flat: bool = False

    @property
    def location(self) -> np.ndarray:
        return np.asarray(self.global_min[0])

    @property
    def n_minima(self) -> int:
        return len(self.minima)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if len(self.grid) == 1:
                w.writerow(["m", "f"])
                for m, f in zip(self.grid[0], self.f):
                    w.writerow([repr(float(m)), repr(float(f))])
            else:
                w.writerow(["m1", "m2", "f"])
                for i, m1 in enumerate(self.grid[0]):
                    for j, m2 in enumerate(self.grid[1]):
                        w.writerow([repr(float(m1)), repr(float(m2)), repr(float(self.f[i, j]))])


def _bounded_min(g: Callable[[float], float], lo: float, hi: float, x0: float, fx0: float, xtol: float):
    if hi - lo <= xtol:
        return x0, fx0
    res = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": xtol})
    x, fx = float(res.x), float(res.fun)
    # bounded Brent never evaluates the bracket ends; keep boundary minima
    for cand in (x0, lo, hi):
        fc = float(g(cand))
        if fc < fx:
            x, fx = cand, fc
    return x, fx


def _dedupe(minima, tol=1e-6):
    out: list[tuple[tuple[float, ...], float]] = []
    for loc, val in sorted(minima, key=lambda t: t[0]):
        if out and max(abs(a - b) for a, b in zip(loc, out[-1][0])) < tol:
            if val < out[-1][1]:
                out[-1] = (loc, val)
            continue
        out.append((loc, val))
    return out


def _pick_global(minima, tie_tol: float):
    best = min(v for _, v in minima)
    tied = [mn for mn in minima if mn[1] <= best + tie_tol]
    choice = max(tied, key=lambda mn: sum(mn[0]))
    return choice, len(tied) > 1


def minimize_landscape(
    f: Callable,
    s: float,
    dims: int = 1,
    points: int = 401,
    domain: Sequence[tuple[float, float]] | None = None,
    prominence: float = 1e-10,
    xtol: float = 1e-8,
    tie_tol: float = TIE_TOL,
) -> LandscapeSample:
    """Grid search plus local refinement of ``f(m)`` (or ``f(m1, m2)``) at fixed ``s``.

    ``f`` must be vectorized. Local minima of the grid are refined by bounded
    Brent (1-D) or alternating coordinate line searches (2-D). The global
    minimum breaks ties toward larger magnetization.
    """
    if points < 401:
        raise ModelError(f"landscape grid needs at least 401 points per dimension, got {points}")
    if dims not in (1, 2):
        raise ModelError(f"dims must be 1 or 2, got {dims}")
    if domain is None:
        domain = [(-1.0, 1.0)] * dims
    axes = tuple(np.linspace(lo, hi, points) for lo, hi in domain)

    if dims == 1:
        m = axes[0]
        vals = np.asarray(f(m), dtype=float)
        flat = float(vals.max() - vals.min()) < FLAT_TOL
        minima = []
        for i in ([] if flat else local_minima(vals, prominence)):
            lo, hi = m[max(i - 1, 0)], m[min(i + 1, m.size - 1)]
            x, fx = _bounded_min(lambda x: float(f(x)), lo, hi, m[i], vals[i], xtol)
            minima.append(((x,), fx))
        if not minima:
            i = int(np.argmin(vals))
            minima = [((float(m[i]),), float(vals[i]))]
    else:
        m1, m2 = np.meshgrid(axes[0], axes[1], indexing="ij")
        vals = np.asarray(f(m1, m2), dtype=float)
        flat = float(vals.max() - vals.min()) < FLAT_TOL
        cells = [] if flat else _grid_minima_2d(vals, prominence)
        minima = [_coordinate_descent(f, axes, vals, i, j, xtol) for i, j in cells]
        if not minima:
            i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
            minima = [((float(axes[0][i]), float(axes[1][j])), float(vals[i, j]))]
    minima = _dedupe(minima)
    if flat:
        # every point is a minimum; report the tie-broken one only
        minima = [max(minima, key=lambda mn: sum(mn[0]))]
    glob, tied = _pick_global(minima, tie_tol)
    return LandscapeSample(float(s), axes, vals, minima, glob, tied, flat)


def _grid_minima_2d(vals: np.ndarray, prominence: float) -> list[tuple[int, int]]:
    padded = np.pad(vals, 1, constant_values=np.inf)
    centre = padded[1:-1, 1:-1]
    is_min = np.ones_like(vals, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            nb = padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
            is_min &= centre <= nb
    # a minimum must sit measurably below at least one neighbour (no plateaus)
    below = np.zeros_like(vals, dtype=bool)
    for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        nb = padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
        below |= nb - centre > prominence
    return [(int(i), int(j)) for i, j in zip(*np.nonzero(is_min & below))]


def _coordinate_descent(f, axes, vals, i, j, xtol, max_sweeps=200):
    h = [ax[1] - ax[0] for ax in axes]
    x = [float(axes[0][i]), float(axes[1][j])]
    fx = float(vals[i, j])
    bounds = [(ax[0], ax[-1]) for ax in axes]
    for _ in range(max_sweeps):
        x_old = list(x)
        for k in (0, 1):
            lo = max(bounds[k][0], x[k] - 2 * h[k])
            hi = min(bounds[k][1], x[k] + 2 * h[k])

            def g(t, k=k):
                y = list(x)
                y[k] = t
                return float(f(*y))

            x[k], fx = _bounded_min(g, lo, hi, x[k], fx, xtol)
        if max(abs(a - b) for a, b in zip(x, x_old)) < xtol:
            break
    return (x[0], x[1]), fx


# ---------------------------------------------------------------------------
# transitions


@dataclass
class Jump:
    s_star: float
    size: float
    before: tuple[float, ...]
    after: tuple[float, ...]


@dataclass
class TransitionVerdict:
    present: bool
    jumps: list[Jump] = field(default_factory=list)
    minima_merged: bool = False
    max_minima: int = 1
    max_step: float = 0.0
    threshold: float = JUMP_THRESHOLD

    @property
    def s_star(self) -> float | None:
        return self.jumps[0].s_star if self.jumps else None

    @property
    def jump(self) -> float:
        return max((j.size for j in self.jumps), default=0.0)


def _refine_jump(locate: Callable[[float], np.ndarray], a: float, b: float, la, lb, theta: float, stol: float):
    while b - a > stol:
        c = 0.5 * (a + b)
        lc = locate(c)
        if np.max(np.abs(lc - la)) >= np.max(np.abs(lb - lc)):
            b, lb = c, lc
        else:
            a, la = c, lc
    size = float(np.max(np.abs(lb - la)))
    if size <= theta:
        return None
    return Jump(0.5 * (a + b), size, tuple(map(float, la)), tuple(map(float, lb)))


def detect_transition(
    landscape: Callable[[float], LandscapeSample],
    s_grid: int | Sequence[float] = 513,
    theta: float = JUMP_THRESHOLD,
    stol: float = 1e-6,
) -> TransitionVerdict:
    """Look for discontinuities of the global-minimum location along ``s``.

    Each adjacent-grid step above ``theta`` is bisected down to ``stol``; it is
    reported only if the step survives the refinement (a steep but continuous
    change shrinks away). Flat landscapes (``s = 0``) carry no location and
    are skipped.
    """
    s_values = np.linspace(0.0, 1.0, s_grid) if isinstance(s_grid, (int, np.integer)) else np.asarray(s_grid, float)
    if s_values.size < 512:
        raise ModelError(f"transition scan needs at least 512 s points, got {s_values.size}")
    samples = [landscape(float(s)) for s in s_values]
    keep = [smp for smp in samples if not smp.flat]
    locs = [smp.location for smp in keep]
    max_minima = max((smp.n_minima for smp in keep), default=1)

    def locate(s):
        return landscape(float(s)).location

    jumps, max_step = [], 0.0
    for k in range(len(keep) - 1):
        step = float(np.max(np.abs(locs[k + 1] - locs[k])))
        if step > theta:
            jmp = _refine_jump(locate, keep[k].s, keep[k + 1].s, locs[k], locs[k + 1], theta, stol)
            if jmp is not None:
                jumps.append(jmp)
                max_step = max(max_step, jmp.size)
                continue
        max_step = max(max_step, step) if step <= theta else max_step
    present = bool(jumps)
    return TransitionVerdict(present, jumps, (not present) and max_minima > 1, max_minima, max_step, theta)


def pspin_landscape(p: int, c: float, lam: float, points: int = 401) -> Callable[[float], LandscapeSample]:
    dom = [pspin_domain(p)]
    return lambda s: minimize_landscape(lambda m: free_energy_pspin(m, s, p, c, lam), s, 1, points, dom)


def ws_landscape(c: float, lam: float, h1: float = 1.0, h2: float = 0.49, points: int = 401):
    return lambda s: minimize_landscape(lambda a, b: free_energy_ws(a, b, s, c, lam, h1, h2), s, 2, points)


def detect_transition_pspin(p: int, c: float, lam: float, s_grid=513, theta: float = JUMP_THRESHOLD) -> TransitionVerdict:
    return detect_transition(pspin_landscape(p, c, lam), s_grid, theta)


def detect_transition_ws(c: float, lam: float, h1: float = 1.0, h2: float = 0.49, s_grid=513,
                         theta: float = JUMP_THRESHOLD) -> TransitionVerdict:
    return detect_transition(ws_landscape(c, lam, h1, h2), s_grid, theta)


def degenerate_snapshot(p: int, c: float, lam: float, s_grid=513) -> LandscapeSample | None:
    """Landscape at the transition point, where the two wells are degenerate."""
    verdict = detect_transition_pspin(p, c, lam, s_grid)
    if not verdict.present:
        return None
    return pspin_landscape(p, c, lam)(verdict.s_star)


# ---------------------------------------------------------------------------
# phase diagrams


@dataclass
class PhasePoint:
    c: float
    lam: float
    present: bool
    s_star: float | None
    jump: float
    uncertain: bool


@dataclass
class PhaseDiagram:
    p: int
    points: list[PhasePoint]

    def windows(self, c: float) -> list[tuple[float, float]]:
        """Maximal runs of scanned ``lam`` values with no transition at this ``c``."""
        pts = sorted((pt for pt in self.points if pt.c == c), key=lambda pt: pt.lam)
        out, start, prev = [], None, None
        for pt in pts:
            if not pt.present and start is None:
                start = pt.lam
            if pt.present and start is not None:
                out.append((start, prev))
                start = None
            prev = pt.lam
        if start is not None:
            out.append((start, prev))
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["c", "lambda", "present", "s_star", "jump", "uncertain"])
            for pt in sorted(self.points, key=lambda q: (q.c, q.lam)):
                w.writerow([pt.c, pt.lam, int(pt.present), "" if pt.s_star is None else repr(pt.s_star),
                            repr(pt.jump), int(pt.uncertain)])


@dataclass
class _PhaseTask:
    p: int
    s_grid: int
    theta: float

    def __call__(self, key: tuple[float, float]) -> PhasePoint:
        c, lam = key
        v = detect_transition_pspin(self.p, c, lam, self.s_grid, self.theta)
        uncertain = v.present and v.jump < 2 * self.theta
        return PhasePoint(c, lam, v.present, v.s_star, v.jump, uncertain)


def phase_diagram(
    p: int,
    c_grid: Sequence[float],
    lam_grid: Sequence[float],
    s_grid: int = 513,
    theta: float = JUMP_THRESHOLD,
    map_fn: Callable = map,
) -> PhaseDiagram:
    keys = [(float(c), float(l)) for c in c_grid for l in lam_grid]
    points = list(map_fn(_PhaseTask(int(p), s_grid, theta), keys))
    return PhaseDiagram(int(p), sorted(points, key=lambda pt: (pt.c, pt.lam)))
