"""First-order degenerate perturbation theory near ``s = 1`` for loop gadgets.

With ``Gamma = 1 - s`` the Hamiltonian to first order is
``H_P + Gamma * V1`` where ``V1 = H_D + lam * H_B - H_P``. The ground energy
moves with slope ``<g|V1|g>``; the degenerate first-excited manifold moves
with the lowest eigenvalue of ``V1`` restricted to it. A crossing is
predicted where the two first-order lines meet.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact_spectrum import gap_trace
from .models import (
    DiagonalProblem,
    LoopVariant,
    ModelError,
    NamedState,
    Schedule,
    build_loop_gadget,
    index_to_bits,
    loop_named_states,
    spins_of,
)

MAX_ENUMERATION_N = 20
ENERGY_TOL = 1e-9


class PTError(ModelError):
    """Perturbative analysis is not applicable to the given input."""


# ---------------------------------------------------------------------------
# classical levels


@dataclass(frozen=True)
class ClassicalLevels:
    E0: float
    E1: float
    ground: tuple[int, ...]
    excited: tuple[int, ...]

    @property
    def delta0(self) -> float:
        return self.E1 - self.E0


def classical_levels(problem: DiagonalProblem, tol: float = ENERGY_TOL) -> ClassicalLevels:
    """Lowest two classical levels and their basis states by full enumeration."""
    if problem.n > MAX_ENUMERATION_N:
        raise PTError(f"enumeration limited to n <= {MAX_ENUMERATION_N}, got {problem.n}")
    diag = np.asarray(problem.diagonal(), dtype=float)
    order = np.argsort(diag, kind="stable")
    E0 = float(diag[order[0]])
    ground = tuple(int(x) for x in np.flatnonzero(np.abs(diag - E0) <= tol))
    rest = diag[np.abs(diag - E0) > tol]
    if rest.size == 0:
        raise PTError("problem has a single classical level")
    E1 = float(rest.min())
    excited = tuple(int(x) for x in np.flatnonzero(np.abs(diag - E1) <= tol))
    return ClassicalLevels(E0, E1, ground, excited)


def classical_gap(
    problem: DiagonalProblem,
    ground: NamedState | None = None,
    excited: Sequence[NamedState] = (),
) -> float:
    """``E1 - E0``; named states, when given, must match the enumerated levels."""
    lv = classical_levels(problem)
    if ground is not None and lv.ground != (ground.index,):
        raise PTError(f"claimed ground state {ground.bits} is not the unique ground state {lv.ground}")
    if excited and set(lv.excited) != {st.index for st in excited}:
        got = [index_to_bits(x, problem.n) for x in lv.excited]
        raise PTError(f"claimed first-excited manifold does not match enumeration: {got}")
    return lv.delta0


# ---------------------------------------------------------------------------
# first-order blocks


def _flip_distance(a: int, b: int) -> int:
    return bin(a ^ b).count("1")


def _catalyst_diag(problem: DiagonalProblem, schedule: Schedule, idx: int) -> float:
    lam = schedule.effective_lam
    if lam == 0:
        return 0.0
    z = spins_of(problem.n)[idx].astype(float)
    return float(-lam * (z @ schedule.bias_vector(problem.n)))


@dataclass
class V1Block:
    states: tuple[int, ...]
    matrix: np.ndarray
    ground: int
    ground_diag: float
    ground_couplings: dict[int, float] = field(default_factory=dict)

    @property
    def lowest(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])


def v1_block(
    problem: DiagonalProblem,
    schedule: Schedule,
    ground: int | None = None,
    manifold: Sequence[int] | None = None,
    strict: bool = False,
) -> V1Block:
    """``V1`` on the first-excited manifold (1 or 2 states) plus its ground diagonal.

    Off-diagonal entries come from the driver (``-1`` per single-bit flip). A
    first-order coupling between the ground state and the manifold is
    recorded; with ``strict`` it raises.
    """
    lv = classical_levels(problem)
    if ground is None:
        if len(lv.ground) != 1:
            raise PTError(f"ground state is {len(lv.ground)}-fold degenerate")
        ground = lv.ground[0]
    states = tuple(lv.excited if manifold is None else manifold)
    if not 1 <= len(states) <= 2:
        raise PTError(f"only 1- or 2-state manifolds are supported, got {len(states)}")
    diag = problem.diagonal()
    E1 = float(diag[states[0]])
    if any(abs(diag[x] - E1) > ENERGY_TOL for x in states):
        raise PTError("manifold states are not degenerate under the problem Hamiltonian")

    M = np.zeros((len(states), len(states)))
    for a, x in enumerate(states):
        M[a, a] = -E1 + _catalyst_diag(problem, schedule, x)
        for b, y in enumerate(states):
            if a != b and _flip_distance(x, y) == 1:
                M[a, b] = -1.0
    couplings = {x: -1.0 for x in states if _flip_distance(ground, x) == 1}
    if couplings and strict:
        raise PTError(f"ground state couples to {sorted(couplings)} at first order")
    g_diag = -float(diag[ground]) + _catalyst_diag(problem, schedule, ground)
    return V1Block(states, M, int(ground), g_diag, couplings)


@dataclass
class PTReport:
    label: str
    E0: float
    E1: float
    delta0: float
    eps0: float
    eps1: float
    block: V1Block
    slope_ground: float
    slope_excited: float
    gamma_star: float | None

    @property
    def s_star(self) -> float | None:
        return None if self.gamma_star is None else 1.0 - self.gamma_star

    @property
    def crossing(self) -> bool:
        return self.gamma_star is not None

    def gap(self, gamma: float) -> float:
        """First-order gap ``delta0 + gamma * (slope_excited - slope_ground)``."""
        return self.delta0 + gamma * (self.slope_excited - self.slope_ground)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "E0": self.E0,
            "E1": self.E1,
            "delta0": self.delta0,
            "eps0": self.eps0,
            "eps1": self.eps1,
            "block_states": list(self.block.states),
            "block": self.block.matrix.tolist(),
            "ground_couplings": {str(k): v for k, v in self.block.ground_couplings.items()},
            "slope_ground": self.slope_ground,
            "slope_excited": self.slope_excited,
            "gamma_star": self.gamma_star,
            "s_star": self.s_star,
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2)


def predict_crossing(block: V1Block, delta0: float) -> float | None:
    """``Gamma*`` where the first-order lines meet, or ``None`` outside ``(0, 1)``."""
    rate = block.ground_diag - block.lowest
    if rate <= 0:
        return None
    gamma = delta0 / rate
    return gamma if 0.0 < gamma < 1.0 else None


def pt_report(
    problem: DiagonalProblem,
    schedule: Schedule,
    ground: NamedState | None = None,
    manifold: Sequence[NamedState] | None = None,
    strict: bool = False,
) -> PTReport:
    lv = classical_levels(problem)
    if ground is not None:
        classical_gap(problem, ground, manifold or ())
    blk = v1_block(
        problem, schedule,
        None if ground is None else ground.index,
        None if manifold is None else [st.index for st in manifold],
        strict,
    )
    lam = schedule.effective_lam
    bias = schedule.bias_vector(problem.n) if lam else np.zeros(problem.n)
    k = problem.n // 2
    eps0 = float(lam * bias.sum())
    eps1 = float(lam * (bias.sum() - bias[k]))
    gamma = predict_crossing(blk, lv.delta0)
    return PTReport(
        getattr(problem, "name", ""), lv.E0, lv.E1, lv.delta0, eps0, eps1, blk,
        blk.ground_diag, blk.lowest, gamma,
    )


# ---------------------------------------------------------------------------
# families and scaling classes


class Family(enum.Enum):
    LOOP_STANDARD = "loop_standard"
    LOOP_DC = "loop_dc"
    INDUCED_DC = "induced_dc"
    RING_DC = "ring_dc"


def family_instance(family: Family | str, n: int, lam: float = 1.0) -> tuple[DiagonalProblem, Schedule, NamedState, tuple]:
    """(problem, schedule, ground, named manifold) for one member of a family."""
    family = Family(family)
    if family is Family.RING_DC:
        prob = build_loop_gadget(n, variant=LoopVariant.RING_FAMILY)
        g, exc = loop_named_states(n, LoopVariant.RING_FAMILY)
        return prob, Schedule.catalyst(lam, (-1,) * n), g, exc
    if family is Family.INDUCED_DC:
        prob = build_loop_gadget(n, 4, LoopVariant.INDUCED_CROSSING)
        g, exc = loop_named_states(n, LoopVariant.INDUCED_CROSSING)
        return prob, Schedule.catalyst(lam, (1,) * n), g, exc
    prob = build_loop_gadget(n, 4, LoopVariant.FIELD_CROSSING)
    g, exc = loop_named_states(n, LoopVariant.FIELD_CROSSING)
    sched = Schedule.standard() if family is Family.LOOP_STANDARD else Schedule.catalyst(lam, (-1,) * n)
    return prob, sched, g, exc


@dataclass
class ScalingPrediction:
    family: Family
    sizes: list[int]
    gammas: list[float | None]
    distances: list[int]
    klass: str

    def log_gap_estimates(self) -> list[float | None]:
        """``d * ln Gamma*`` per size, the first-order estimate of ``ln gap_min``."""
        return [None if g is None else d * float(np.log(g)) for g, d in zip(self.gammas, self.distances)]


def scaling_prediction(family: Family | str, sizes: Sequence[int], lam: float = 1.0) -> ScalingPrediction:
    """Gamma*(n), Hamming distance of the crossing pair and the implied gap class."""
    family = Family(family)
    gammas, dists = [], []
    for n in sizes:
        prob, sched, g, exc = family_instance(family, int(n), lam)
        rep = pt_report(prob, sched, g, exc)
        w, v = np.linalg.eigh(rep.block.matrix)
        partner = rep.block.states[int(np.argmax(np.abs(v[:, 0])))]
        gammas.append(rep.gamma_star)
        dists.append(_flip_distance(rep.block.ground, partner))
    ns = np.asarray(sizes, dtype=float)
    gs = np.asarray([np.nan if x is None else x for x in gammas])
    ratio = float(np.nanmax(gs) / np.nanmin(gs)) if np.isfinite(gs).any() else np.inf
    if len(sizes) > 1 and ratio < 1.0 + 1e-9:
        klass = "exponential, c^-n"
    elif np.mean(np.asarray(dists) / ns) > 0.75:
        klass = "factorial, n^-n"
    else:
        klass = "n^{-n/2}"
    return ScalingPrediction(family, [int(n) for n in sizes], gammas, dists, klass)


# ---------------------------------------------------------------------------
# comparison with exact spectra


@dataclass
class Comparison:
    n: int
    s_pt: float | None
    s_exact: float | None
    gap_exact: float | None
    mismatch: bool

    @property
    def discrepancy(self) -> float | None:
        if self.s_pt is None or self.s_exact is None:
            return None
        return abs(self.s_pt - self.s_exact)


def compare_to_exact(
    problem: DiagonalProblem, schedule: Schedule, report: PTReport, window: float = 0.1, grid: int = 257,
) -> Comparison:
    """Exact avoided crossing nearest the predicted ``s*`` (within ``+-window``)."""
    trace = gap_trace(problem, schedule, grid)
    if report.s_star is None:
        s, g = trace.s_min, trace.gap_min
        return Comparison(problem.n, None, s, g, False)
    near = trace.minima_in(report.s_star - window, report.s_star + window)
    if not near:
        return Comparison(problem.n, report.s_star, None, None, True)
    s, g = min(near, key=lambda m: m[1])
    return Comparison(problem.n, report.s_star, s, g, False)


def write_comparison_csv(path, rows: Sequence[Comparison]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "s_star_pt", "s_min_exact", "gap_min_exact"])
        for r in rows:
            w.writerow([r.n, "" if r.s_pt is None else repr(r.s_pt), "" if r.s_exact is None else repr(r.s_exact),
                        "" if r.gap_exact is None else repr(r.gap_exact)])
