"""Large-spin (coherent-state) energy densities and their global-minimum trajectories.

Each cluster ``k`` is a classical unit vector in the x-z plane,
``m_k = (sin theta_k, 0, cos theta_k)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize

CONTINUITY_THRESHOLD = 0.05
N_STARTS = 16


@dataclass(frozen=True)
class SpinConfig:
    thetas: tuple[float, ...]

    @property
    def mx(self) -> np.ndarray:
        return np.sin(np.asarray(self.thetas))

    @property
    def mz(self) -> np.ndarray:
        return np.cos(np.asarray(self.thetas))

    @classmethod
    def from_mz(cls, mz: Sequence[float]) -> "SpinConfig":
        """Config with the given z-components and non-negative x-components."""
        return cls(tuple(float(np.arccos(np.clip(z, -1.0, 1.0))) for z in mz))


def _components(config) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(config, SpinConfig):
        return config.mx, config.mz
    mx, mz = config
    return np.asarray(mx, dtype=float), np.asarray(mz, dtype=float)


def density_pspin(config, s: float, p: int, c: float, lam: float) -> float:
    """Two-cluster p-spin density; cluster 1 (weight ``c``) is biased correctly.

    ``config`` is a :class:`SpinConfig` or an ``(mx, mz)`` pair of arrays.
    """
    mx, mz = _components(config)
    w = np.array([c, 1.0 - c])
    drive = -(1.0 - s) * (w @ mx)
    bias = -lam * s * (1.0 - s) * (c * mz[0] - (1.0 - c) * mz[1])
    return float(drive + bias - s * (w @ mz) ** p)


def density_ws(config, s: float, c: float, lam: float, h1: float = 1.0, h2: float = 0.49) -> float:
    """Weak-strong density: strong cluster, correctly and wrongly biased weak parts."""
    mx, mz = _components(config)
    weak_x = c * mx[1] + (1.0 - c) * mx[2]
    weak_z = c * mz[1] + (1.0 - c) * mz[2]
    drive = -0.5 * (1.0 - s) * (mx[0] + weak_x)
    bias = -0.5 * lam * s * (1.0 - s) * (mz[0] + c * mz[1] - (1.0 - c) * mz[2])
    problem = 0.5 * h1 * mz[0] - 0.5 * h2 * weak_z + 0.25 * mz[0] ** 2 + 0.25 * weak_z**2 + 0.25 * mz[0] * weak_z
    return float(drive + bias - s * problem)


# ---------------------------------------------------------------------------
# minimization


@dataclass
class Trajectory:
    s: np.ndarray
    thetas: np.ndarray
    energy: np.ndarray
    continuous: bool = True
    jumps: list[tuple[float, float, int, float]] = field(default_factory=list)
    stagnation: list[tuple[float, float]] = field(default_factory=list)

    @property
    def mx(self) -> np.ndarray:
        return np.sin(self.thetas)

    @property
    def mz(self) -> np.ndarray:
        return np.cos(self.thetas)

    @property
    def n_clusters(self) -> int:
        return self.thetas.shape[1]

    @classmethod
    def from_mz(cls, s: Sequence[float], mz, energy=None, threshold: float = CONTINUITY_THRESHOLD) -> "Trajectory":
        mz = np.asarray(mz, dtype=float)
        if mz.ndim == 1:
            mz = mz[:, None]
        thetas = np.arccos(np.clip(mz, -1.0, 1.0))
        s = np.asarray(s, dtype=float)
        e = np.zeros(s.size) if energy is None else np.asarray(energy, dtype=float)
        jumps = _find_jumps(s, mz, threshold)
        return cls(s, thetas, e, not jumps, jumps)

    def write_csv(self, path) -> None:
        k = self.n_clusters
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s"] + [f"m{i + 1}{a}" for i in range(k) for a in ("x", "z")] + ["energy"])
            for i, s in enumerate(self.s):
                row = [repr(float(s))]
                for j in range(k):
                    row += [repr(float(self.mx[i, j])), repr(float(self.mz[i, j]))]
                w.writerow(row + [repr(float(self.energy[i]))])


def _find_jumps(s, mz, threshold):
    out = []
    for i in range(len(s) - 1):
        d = np.abs(mz[i + 1] - mz[i])
        k = int(np.argmax(d))
        if d[k] > threshold:
            out.append((float(s[i]), float(s[i + 1]), k, float(d[k])))
    return out


def _wrap(t: np.ndarray) -> np.ndarray:
    return (np.asarray(t) + np.pi) % (2 * np.pi) - np.pi


def minimize_density(
    density: Callable[[SpinConfig, float], float],
    s: float,
    n_clusters: int,
    rng: np.random.Generator,
    warm: np.ndarray | None = None,
    starts: int = N_STARTS,
    xatol: float = 1e-8,
    tie_tol: float = 1e-10,
):
    """Global minimum over angles from ``starts`` random seeds plus an optional warm start.

    Among candidates tied within ``tie_tol`` the one closest to ``warm`` wins.
    Returns (angles, value, converged).
    """
    seeds = list(rng.uniform(-np.pi, np.pi, size=(starts, n_clusters)))
    if warm is not None:
        seeds.insert(0, np.asarray(warm, dtype=float))

    def g(t):
        return density(SpinConfig(tuple(t)), s)

    results = []
    for x0 in seeds:
        res = minimize(g, x0, method="Nelder-Mead",
                       options={"xatol": xatol, "fatol": 1e-15, "maxiter": 20000, "maxfev": 40000})
        results.append((_wrap(res.x), float(res.fun), bool(res.success)))
    best = min(r[1] for r in results)
    tied = [r for r in results if r[1] <= best + tie_tol]
    if warm is not None:
        ref = np.cos(warm)
        tied.sort(key=lambda r: float(np.max(np.abs(np.cos(r[0]) - ref))))
    x, val, ok = tied[0]
    return x, val, ok


def track_minimum(
    density: Callable[[SpinConfig, float], float],
    s_grid: Sequence[float],
    n_clusters: int,
    seed: int = 0,
    starts: int = N_STARTS,
    threshold: float = CONTINUITY_THRESHOLD,
) -> Trajectory:
    """Follow the global minimum along ``s`` with warm-started multi-start searches."""
    s_values = np.asarray(s_grid, dtype=float)
    rng = np.random.default_rng(seed)
    thetas = np.zeros((s_values.size, n_clusters))
    energy = np.zeros(s_values.size)
    stagnation = []
    warm = None
    for i, s in enumerate(s_values):
        x, val, ok = minimize_density(density, float(s), n_clusters, rng, warm, starts)
        thetas[i], energy[i] = x, val
        if not ok:
            stagnation.append((float(s), val))
        warm = x
    jumps = _find_jumps(s_values, np.cos(thetas), threshold)
    return Trajectory(s_values, thetas, energy, not jumps, jumps, stagnation)


def track_pspin(p: int, c: float, lam: float, s_grid, seed: int = 0) -> Trajectory:
    return track_minimum(lambda cfg, s: density_pspin(cfg, s, p, c, lam), s_grid, 2, seed)


def track_ws(c: float, lam: float, s_grid, h1: float = 1.0, h2: float = 0.49, seed: int = 0) -> Trajectory:
    return track_minimum(lambda cfg, s: density_ws(cfg, s, c, lam, h1, h2), s_grid, 3, seed)


# ---------------------------------------------------------------------------
# unconstrained components


def minimize_unconstrained(
    density: Callable[[tuple[np.ndarray, np.ndarray]], float],
    n_clusters: int,
    seed: int = 0,
    starts: int = N_STARTS,
) -> tuple[np.ndarray, np.ndarray, float]:
    """Minimize with every ``m_k^x, m_k^z`` free in ``[-1, 1]`` (no unit-length constraint)."""
    rng = np.random.default_rng(seed)
    bounds = [(-1.0, 1.0)] * (2 * n_clusters)

    def g(v):
        return density((v[:n_clusters], v[n_clusters:]))

    best = None
    for x0 in rng.uniform(-1, 1, size=(starts, 2 * n_clusters)):
        res = minimize(g, x0, method="L-BFGS-B", bounds=bounds)
        if best is None or res.fun < best.fun:
            best = res
    return best.x[:n_clusters], best.x[n_clusters:], float(best.fun)


def unit_norm_deviation(mx: np.ndarray, mz: np.ndarray) -> float:
    return float(np.max(np.abs(np.hypot(mx, mz) - 1.0)))


# ---------------------------------------------------------------------------
# features


def locate_min_gap_feature(traj: Trajectory, cluster: int | None = None, noise: float = 1e-6) -> float:
    """``s`` of the steepest change of ``m_k^z`` for the flipping cluster.

    The flipping cluster is the one with the largest total variation of
    ``m^z`` unless ``cluster`` is given. Ties go to the
    smallest ``s``.
    """
    if not traj.continuous:
        s0, s1, k, size = traj.jumps[0]
        raise ValueError(f"trajectory jumps by {size:.3g} in cluster {k} between s={s0:.6g} and s={s1:.6g}")
    mz = traj.mz
    if cluster is None:
        cluster = int(np.argmax(np.abs(np.diff(mz, axis=0)).sum(axis=0)))
    d = np.abs(np.gradient(mz[:, cluster], traj.s))
    top = float(d.max())
    if top <= noise:
        raise ValueError("no magnetization change above the noise threshold")
    return float(traj.s[int(np.flatnonzero(d >= top * (1 - 1e-9))[0])])
