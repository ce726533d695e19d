"""Low-lying spectra of ``H(s)`` and gap traces along the interpolation."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.signal import find_peaks
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .models import DiagonalProblem, NamedState, Schedule, spins_of

DENSE_THRESHOLD = 512
DEGENERACY_TOL = 1e-12
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class EigensolverError(RuntimeError):
    """Iterative eigensolver failed to converge or to meet its residual bound."""

    def __init__(self, message: str, residuals: Sequence[float] = ()):
        super().__init__(message)
        self.residuals = list(residuals)


# ---------------------------------------------------------------------------
# operators


@lru_cache(maxsize=8)
def driver_matrix(n: int) -> sp.csr_matrix:
    """``-sum_i sigma^x_i`` on ``n`` qubits."""
    dim = 2**n
    x = np.arange(dim, dtype=np.int64)
    rows = np.tile(x, n)
    cols = np.concatenate([x ^ (1 << i) for i in range(n)])
    data = -np.ones(n * dim)
    return sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))


@dataclass
class SpectralSystem:
    """``H(s) = w_D * driver + diag(w_B * bias_diag + w_P * problem_diag)``.

    Built once per problem; ``hamiltonian(s, schedule)`` only rescales.
    """

    driver: sp.csr_matrix
    problem_diag: np.ndarray
    bias_diag: np.ndarray
    tridiagonal: bool = False
    degenerate_ground: bool = False
    label: str = ""

    @property
    def dim(self) -> int:
        return self.driver.shape[0]

    def hamiltonian(self, s: float, schedule: Schedule) -> sp.csr_matrix:
        wd, wc, wp = schedule.weights(s)
        diag = wc * self.bias_diag + wp * self.problem_diag
        return (wd * self.driver + sp.diags(diag)).tocsr()

    def lowest(self, s: float, schedule: Schedule, k: int = 2, vectors: bool = False, **kw):
        H = self.hamiltonian(s, schedule)
        return lowest_eigenpairs(H, k, vectors=vectors, tridiagonal=self.tridiagonal, **kw)

    def gap(self, s: float, schedule: Schedule, **kw) -> float:
        if self.degenerate_ground:
            w = self.lowest(s, schedule, k=min(4, self.dim), **kw)
            above = w[w > w[0] + DEGENERACY_TOL]
            return float(above[0] - w[0]) if above.size else 0.0
        w = self.lowest(s, schedule, k=2, **kw)
        return float(w[1] - w[0])


def full_system(problem: DiagonalProblem, schedule: Schedule) -> SpectralSystem:
    n = problem.n
    z = spins_of(n).astype(float)
    bias = schedule.bias_vector(n)
    return SpectralSystem(
        driver_matrix(n),
        np.asarray(problem.diagonal(), dtype=float),
        -(z @ bias),
        degenerate_ground=getattr(problem, "degenerate_ground", False),
        label=getattr(problem, "name", ""),
    )


def full_matrix(problem: DiagonalProblem, schedule: Schedule, s: float) -> sp.csr_matrix:
    return full_system(problem, schedule).hamiltonian(s, schedule)


# ---------------------------------------------------------------------------
# eigensolvers


def _norm_scale(H) -> float:
    if sp.issparse(H):
        return float(abs(H).sum(axis=1).max()) or 1.0
    return float(np.abs(H).sum(axis=1).max()) or 1.0


def lowest_eigenpairs(
    H,
    k: int = 2,
    vectors: bool = False,
    dense_threshold: int = DENSE_THRESHOLD,
    tridiagonal: bool = False,
    residual_tol: float = 1e-8,
):
    """The ``k`` smallest eigenvalues (ascending) of a real-symmetric ``H``.

    Dimensions below ``dense_threshold`` use LAPACK; tridiagonal operators use
    the dedicated tridiagonal solver; everything else goes to ARPACK Lanczos
    with a residual check ``||Hv - Ev|| <= residual_tol * ||H||_inf``.
    Returns ``w`` or ``(w, V)`` when ``vectors`` is set.
    """
    dim = H.shape[0]
    if k < 1:
        raise ValueError("k must be positive")
    k = min(k, dim)
    if tridiagonal:
        Hc = sp.csr_matrix(H) if sp.issparse(H) else sp.csr_matrix(np.asarray(H))
        d = Hc.diagonal()
        e = Hc.diagonal(1)
        out = sla.eigh_tridiagonal(d, e, eigvals_only=not vectors, select="i", select_range=(0, k - 1))
        return out
    if dim < dense_threshold or dim <= k + 1:
        A = H.toarray() if sp.issparse(H) else np.asarray(H, dtype=float)
        if vectors:
            return sla.eigh(A, subset_by_index=[0, k - 1])
        return sla.eigh(A, subset_by_index=[0, k - 1], eigvals_only=True)

    ncv = min(dim, max(2 * k + 1, 24))
    try:
        w, V = eigsh(H, k=k, which="SA", tol=0, ncv=ncv, maxiter=max(1000, 10 * dim))
    except ArpackNoConvergence as err:
        res = []
        if err.eigenvectors is not None and len(err.eigenvalues):
            res = list(np.linalg.norm(H @ err.eigenvectors - err.eigenvectors * err.eigenvalues, axis=0))
        raise EigensolverError(f"Lanczos did not converge for dim={dim}, k={k}", res) from err
    order = np.argsort(w)
    w, V = w[order], V[:, order]
    residuals = np.linalg.norm(H @ V - V * w, axis=0)
    bound = residual_tol * _norm_scale(H)
    if np.any(residuals > bound):
        raise EigensolverError(
            f"Lanczos residuals {residuals.tolist()} exceed {bound:.3g}", residuals.tolist()
        )
    return (w, V) if vectors else w


def overlap_with(state: NamedState | int, vector: np.ndarray) -> float:
    """``|<state|v>|^2`` for a normalized vector in the computational basis."""
    v = np.asarray(vector)
    idx = state.index if isinstance(state, NamedState) else int(state)
    if isinstance(state, NamedState) and v.shape[0] != 2**state.n:
        raise ValueError(f"vector of length {v.shape[0]} does not match {state.n} qubits")
    if not 0 <= idx < v.shape[0]:
        raise ValueError(f"basis index {idx} outside a {v.shape[0]}-dimensional space")
    return float(min(1.0, abs(v[idx]) ** 2))


# ---------------------------------------------------------------------------
# golden-section refinement


def golden_section(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = 1e-6,
    rtol: float = 1e-10,
    max_iter: int = 400,
    patience: int = 12,
) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]``.

    Shrinks the bracket to at most ``xtol``; after that keeps going while the
    best value still improves by more than ``rtol`` (relative) within the
    last ``patience`` steps, so narrow avoided crossings are resolved to the
    floating-point limit.
    """
    a, b = min(a, b), max(a, b)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    history = [min(fc, fd)]
    for _ in range(max_iter):
        width = b - a
        if width <= 4 * np.finfo(float).eps * max(1.0, abs(a), abs(b)):
            break
        if width <= xtol and len(history) > patience:
            ref = history[-patience - 1]
            if ref - history[-1] <= rtol * max(abs(history[-1]), np.finfo(float).tiny):
                break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
        history.append(min(fc, fd, history[-1]))
    return (c, fc) if fc < fd else (d, fd)


# ---------------------------------------------------------------------------
# gap traces


@dataclass
class GapTrace:
    s_values: np.ndarray
    gaps: np.ndarray
    minima: list[tuple[float, float]] = field(default_factory=list)
    global_index: int = -1
    degenerate: list[tuple[float, float]] = field(default_factory=list)
    label: str = ""

    @property
    def s_min(self) -> float:
        return self.minima[self.global_index][0]

    @property
    def gap_min(self) -> float:
        return self.minima[self.global_index][1]

    @property
    def n_local_minima(self) -> int:
        return len(self.minima)

    def minima_in(self, lo: float, hi: float) -> list[tuple[float, float]]:
        return [(s, g) for s, g in self.minima if lo <= s <= hi]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["s", "gap"])
            for s, g in zip(self.s_values, self.gaps):
                w.writerow([repr(float(s)), repr(float(g))])

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "minima": [{"s_min": s, "gap_min": g} for s, g in self.minima],
            "global": {"s_min": self.s_min, "gap_min": self.gap_min} if self.minima else None,
            "degenerate_intervals": [list(iv) for iv in self.degenerate],
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)


def local_minima(values: np.ndarray, prominence: float = 0.0) -> list[int]:
    """Indices of local minima; endpoints count when they sit below their neighbour."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return list(range(values.size))
    peaks, _ = find_peaks(-values, prominence=prominence if prominence > 0 else None)
    idx = [int(i) for i in peaks]
    if values[0] < values[1]:
        idx.insert(0, 0)
    if values[-1] < values[-2]:
        idx.append(values.size - 1)
    return idx


def trace_gap(
    gap_fn: Callable[[float], float],
    s_values: Iterable[float],
    prominence: float = 0.0,
    xtol: float = 1e-6,
    map_fn: Callable = map,
    label: str = "",
) -> GapTrace:
    """Evaluate ``gap_fn`` on a grid, then golden-refine every interior local minimum."""
    s_values = np.asarray(sorted(set(float(s) for s in s_values)))
    if s_values.size < 3:
        raise ValueError("a gap trace needs at least three grid points")
    gaps = np.asarray(list(map_fn(gap_fn, s_values)), dtype=float)
    minima = []
    for i in local_minima(gaps, prominence):
        if 0 < i < s_values.size - 1:
            lo, hi = s_values[i - 1], s_values[i + 1]
            s_ref, g_ref = golden_section(gap_fn, lo, hi, xtol=xtol)
            if gaps[i] < g_ref:
                s_ref, g_ref = s_values[i], gaps[i]
            minima.append((float(s_ref), float(g_ref)))
        else:
            minima.append((float(s_values[i]), float(gaps[i])))
    global_index = int(np.argmin([g for _, g in minima])) if minima else -1

    degenerate = []
    small = (gaps < DEGENERACY_TOL) & (s_values > 0) & (s_values < 1)
    i = 0
    while i < small.size:
        if small[i]:
            j = i
            while j + 1 < small.size and small[j + 1]:
                j += 1
            if j > i:
                degenerate.append((float(s_values[i]), float(s_values[j])))
            i = j + 1
        else:
            i += 1
    return GapTrace(s_values, gaps, minima, global_index, degenerate, label)


def default_grid(points: int = 129, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    if points < 64:
        raise ValueError(f"coarse grid needs at least 64 points, got {points}")
    return np.linspace(lo, hi, points)


def gap_trace(
    problem: DiagonalProblem,
    schedule: Schedule,
    grid: int | Sequence[float] = 129,
    prominence: float = 0.0,
    xtol: float = 1e-6,
    map_fn: Callable = map,
) -> GapTrace:
    """Gap ``E_1 - E_0`` of the full-space ``H(s)`` with refined local minima."""
    system = full_system(problem, schedule)
    s_values = default_grid(grid) if isinstance(grid, (int, np.integer)) else np.asarray(grid)
    return trace_gap(
        _GapAt(system, schedule), s_values, prominence=prominence, xtol=xtol, map_fn=map_fn,
        label=system.label,
    )


@dataclass
class _GapAt:
    """Picklable ``s -> gap`` closure so traces can go through process pools."""

    system: SpectralSystem
    schedule: Schedule

    def __call__(self, s: float) -> float:
        return self.system.gap(s, self.schedule)


def ground_state(problem: DiagonalProblem, schedule: Schedule, s: float) -> tuple[float, np.ndarray]:
    w, V = full_system(problem, schedule).lowest(s, schedule, k=2, vectors=True)
    return float(w[0]), V[:, 0]
