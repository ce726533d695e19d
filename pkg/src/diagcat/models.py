"""Hamiltonian families and interpolation schedules.

Conventions used throughout the package:

* computational basis index ``x`` carries qubit ``i`` in bit ``(x >> i) & 1``;
* ``sigma^z |0> = |0>``, so bit 0 maps to spin ``z = +1`` and bit 1 to ``z = -1``;
* driver ``H_D = -sum_i sigma^x_i``;
* catalyst ``H_B = -sum_i eps_i sigma^z_i`` with ``eps_i`` in ``{-1, 0, +1}``;
* ``H(s) = (1 - s) H_D + lam * s * (1 - s) H_B + s H_P``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np


class ModelError(ValueError):
    """Invalid model parameters."""


# ---------------------------------------------------------------------------
# basis helpers


def spins_of(n: int) -> np.ndarray:
    """All ``2**n`` spin configurations as a ``(2**n, n)`` int8 array of +-1."""
    x = np.arange(2**n, dtype=np.int64)
    bits = (x[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def hamming_weights(n: int) -> np.ndarray:
    x = np.arange(2**n, dtype=np.int64)
    return ((x[:, None] >> np.arange(n)) & 1).sum(axis=1)


def bits_to_index(bits: Sequence[int]) -> int:
    return int(sum(int(b) << i for i, b in enumerate(bits)))


def index_to_bits(x: int, n: int) -> tuple[int, ...]:
    return tuple((x >> i) & 1 for i in range(n))


def bits_to_spins(bits: Sequence[int]) -> np.ndarray:
    return 1 - 2 * np.asarray(bits, dtype=np.int64)


# ---------------------------------------------------------------------------
# diagonal problem Hamiltonians


@dataclass(frozen=True)
class IsingProblem:
    """Diagonal problem ``scale * (sum_i h_i z_i - sum_(i,j) J_ij z_i z_j) + offset``."""

    n: int
    fields: tuple[float, ...]
    couplings: tuple[tuple[int, int, float], ...] = ()
    scale: float = 1.0
    offset: float = 0.0
    name: str = "ising"
    degenerate_ground: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ModelError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "fields", tuple(float(h) for h in self.fields))
        if len(self.fields) != self.n:
            raise ModelError(f"expected {self.n} fields, got {len(self.fields)}")
        seen = set()
        clean = []
        for i, j, J in self.couplings:
            i, j = int(i), int(j)
            if i == j:
                raise ModelError(f"self-coupling on qubit {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ModelError(f"coupling index out of range: ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ModelError(f"duplicate coupling {key}")
            seen.add(key)
            clean.append((i, j, float(J)))
        object.__setattr__(self, "couplings", tuple(clean))

    def energy(self, z) -> np.ndarray | float:
        """Classical energy of spin configuration(s) ``z`` (last axis = qubits)."""
        z = np.asarray(z, dtype=float)
        e = z @ np.asarray(self.fields)
        for i, j, J in self.couplings:
            e = e - J * z[..., i] * z[..., j]
        return self.scale * e + self.offset

    def energy_of_bits(self, bits: Sequence[int]) -> float:
        return float(self.energy(bits_to_spins(bits)))

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.energy(spins_of(self.n)), dtype=float)


@dataclass(frozen=True)
class HammingProblem:
    """Diagonal problem whose energy depends only on the Hamming weight."""

    n: int
    values: tuple[float, ...]
    name: str = "hamming"
    degenerate_ground: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise ModelError(f"n must be positive, got {self.n}")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != self.n + 1:
            raise ModelError(f"expected {self.n + 1} weight values, got {len(self.values)}")

    def energy(self, z) -> np.ndarray | float:
        z = np.asarray(z)
        k = ((self.n - z.sum(axis=-1)) // 2).astype(np.int64)
        return np.asarray(self.values)[k]

    def energy_of_bits(self, bits: Sequence[int]) -> float:
        return float(self.values[int(sum(bits))])

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.values)[hamming_weights(self.n)]


DiagonalProblem = IsingProblem | HammingProblem


# ---------------------------------------------------------------------------
# schedules


class ScheduleKind(enum.Enum):
    STANDARD = "standard"
    DIAGONAL_CATALYST = "catalyst"


@dataclass(frozen=True)
class Schedule:
    """Interpolation protocol.

    ``bias`` holds per-qubit signs for full-space problems; ``None`` means the
    per-cluster signs of a :class:`SectorModel` are used.
    """

    kind: ScheduleKind = ScheduleKind.STANDARD
    lam: float = 0.0
    bias: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.lam < 0 or not math.isfinite(self.lam):
            raise ModelError(f"catalyst strength must be finite and >= 0, got {self.lam}")
        if self.bias is not None:
            b = tuple(int(e) for e in self.bias)
            if any(e not in (-1, 0, 1) for e in b):
                raise ModelError(f"bias entries must be in {{-1, 0, 1}}, got {self.bias}")
            object.__setattr__(self, "bias", b)

    @classmethod
    def standard(cls) -> "Schedule":
        return cls(ScheduleKind.STANDARD, 0.0, None)

    @classmethod
    def catalyst(cls, lam: float, bias: Sequence[int] | None = None) -> "Schedule":
        return cls(ScheduleKind.DIAGONAL_CATALYST, float(lam), None if bias is None else tuple(bias))

    @property
    def effective_lam(self) -> float:
        return 0.0 if self.kind is ScheduleKind.STANDARD else self.lam

    def weights(self, s: float) -> tuple[float, float, float]:
        """(driver, catalyst, problem) weights at ``s``."""
        lam = self.effective_lam
        return (1.0 - s, lam * s * (1.0 - s), s)

    def bias_vector(self, n: int) -> np.ndarray:
        if self.bias is None:
            if self.kind is ScheduleKind.STANDARD or self.lam == 0:
                return np.zeros(n)
            raise ModelError("catalyst schedule needs a per-qubit bias for a full-space problem")
        if len(self.bias) != n:
            raise ModelError(f"bias has length {len(self.bias)}, problem has {n} qubits")
        return np.asarray(self.bias, dtype=float)


def check_s(s: float) -> float:
    s = float(s)
    if not (0.0 <= s <= 1.0):
        raise ModelError(f"interpolation parameter must lie in [0, 1], got {s}")
    return s


@dataclass(frozen=True)
class Assembled:
    """Weights and terms of ``H(s)`` for a full-space problem."""

    s: float
    driver_weight: float
    catalyst_weight: float
    problem_weight: float
    problem: DiagonalProblem
    bias: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.problem.n

    def diagonal(self, problem_diag: np.ndarray | None = None) -> np.ndarray:
        """Diagonal part (catalyst + problem) in the computational basis."""
        if problem_diag is None:
            problem_diag = self.problem.diagonal()
        z = spins_of(self.n).astype(float)
        return self.catalyst_weight * -(z @ self.bias) + self.problem_weight * problem_diag


def assemble(s: float, problem: DiagonalProblem, schedule: Schedule) -> Assembled:
    s = check_s(s)
    wd, wc, wp = schedule.weights(s)
    return Assembled(s, wd, wc, wp, problem, schedule.bias_vector(problem.n))


# ---------------------------------------------------------------------------
# named states


class StateLabel(enum.Enum):
    ALL_ZERO = "phi"
    ALL_ONE = "psi"
    ETA_FLIP = "eta"
    XI = "xi"
    CUSTOM = "custom"


@dataclass(frozen=True)
class NamedState:
    bits: tuple[int, ...]
    label: StateLabel = StateLabel.CUSTOM

    @property
    def n(self) -> int:
        return len(self.bits)

    @property
    def index(self) -> int:
        return bits_to_index(self.bits)

    def hamming(self, other: "NamedState") -> int:
        return sum(a != b for a, b in zip(self.bits, other.bits))

    @classmethod
    def all_zero(cls, n: int) -> "NamedState":
        return cls((0,) * n, StateLabel.ALL_ZERO)

    @classmethod
    def all_one(cls, n: int) -> "NamedState":
        return cls((1,) * n, StateLabel.ALL_ONE)

    @classmethod
    def eta(cls, n: int) -> "NamedState":
        """All-one state with qubit ``n // 2`` reset to 0."""
        bits = [1] * n
        bits[n // 2] = 0
        return cls(tuple(bits), StateLabel.ETA_FLIP)


# ---------------------------------------------------------------------------
# p-spin


def pspin_values(n: int, p: int) -> tuple[float, ...]:
    return tuple(-n * (1.0 - 2.0 * k / n) ** p for k in range(n + 1))


def build_pspin(n: int, p: int) -> DiagonalProblem:
    """Ferromagnetic p-spin ``-n (sum_i z_i / n)**p``.

    ``p <= 2`` returns an :class:`IsingProblem`; larger ``p`` a Hamming-weight diagonal.
    """
    if int(n) != n or n < 1:
        raise ModelError(f"n must be a positive integer, got {n}")
    if int(p) != p or p < 1:
        raise ModelError(f"p must be a positive integer, got {p}")
    n, p = int(n), int(p)
    name = f"pspin(n={n},p={p})"
    if p == 1:
        return IsingProblem(n, (-1.0,) * n, (), 1.0, 0.0, name)
    if p == 2:
        couplings = tuple((i, j, 2.0 / n) for i, j in combinations(range(n), 2))
        return IsingProblem(n, (0.0,) * n, couplings, 1.0, -1.0, name)
    return HammingProblem(n, pspin_values(n, p), name)


# ---------------------------------------------------------------------------
# loop gadgets


class LoopVariant(enum.Enum):
    FIELD_CROSSING = "field_crossing"
    INDUCED_CROSSING = "induced_crossing"
    RING_FAMILY = "ring"


def _ring(n: int, weak: dict[int, float], strong: float) -> tuple[tuple[int, int, float], ...]:
    return tuple((i, (i + 1) % n, weak.get(i, strong)) for i in range(n))


def build_loop_gadget(n: int, R: float | None = None, variant: LoopVariant | str = LoopVariant.FIELD_CROSSING) -> IsingProblem:
    """Periodic Ising chains with a degenerate first-excited pair.

    ``FIELD_CROSSING`` and ``INDUCED_CROSSING`` put fields on qubits 0 and
    ``k = n/2`` and weaken the two bonds touching ``k``; ``RING_FAMILY`` uses
    ``R = n/2`` and one of two field/bond patterns chosen by ``n mod 4``.
    """
    variant = LoopVariant(variant)
    if int(n) != n or n % 2:
        raise ModelError(f"loop gadgets need an even qubit count, got {n}")
    n = int(n)
    if n < 6:
        raise ModelError(f"loop gadgets need n >= 6, got {n}")
    k = n // 2

    if variant is LoopVariant.RING_FAMILY:
        if R is None:
            R = n / 2
        if R != n / 2:
            raise ModelError(f"ring family requires R = n/2 = {n / 2}, got {R}")
        R = float(R)
        if n % 4 == 0:
            couplings = _ring(n, {n // 2: R / 2 - 1, n - 1: R / 2 - 1}, R)
            fields = tuple(-1.0 if n // 2 + 1 <= i <= n - 1 else 1.0 for i in range(n))
        else:
            couplings = _ring(n, {n // 2 - 1: (R - 1) / 2, n - 1: (R - 1) / 2}, R)
            fields = tuple(-1.0 if n // 2 <= i <= n - 1 else 1.0 for i in range(n))
        return IsingProblem(n, fields, couplings, 1.0 / R, 0.0, f"ring(n={n})")

    if R is None:
        R = 4.0
    if R < 4:
        raise ModelError(f"loop gadget requires R >= 4, got {R}")
    R = float(R)
    couplings = _ring(n, {k - 1: R / 2, k: R / 2}, R)
    fields = [0.0] * n
    if variant is LoopVariant.FIELD_CROSSING:
        fields[0], fields[k] = R - 1, -R
    else:
        fields[0], fields[k] = R, -(R - 1)
    return IsingProblem(n, tuple(fields), couplings, 1.0 / R, 0.0, f"{variant.value}(n={n},R={R:g})")


def ring_ground_state(n: int) -> NamedState:
    """Ground state of the ring family: ones on the low block, zeros above."""
    top = n // 2 if n % 4 == 0 else n // 2 - 1
    return NamedState(tuple(1 if i <= top else 0 for i in range(n)), StateLabel.CUSTOM)


def ring_epsilon(n: int) -> float:
    """Catalyst shift of the ring-family ground state: 2 for n = 4k, 0 for n = 4k+2."""
    if n % 2:
        raise ModelError(f"ring family needs even n, got {n}")
    return 2.0 if n % 4 == 0 else 0.0


def loop_named_states(n: int, variant: LoopVariant | str) -> tuple[NamedState, tuple[NamedState, ...]]:
    """(ground, first-excited manifold) as named for each gadget."""
    variant = LoopVariant(variant)
    phi, psi, eta = NamedState.all_zero(n), NamedState.all_one(n), NamedState.eta(n)
    if variant is LoopVariant.FIELD_CROSSING:
        return phi, (psi, eta)
    if variant is LoopVariant.INDUCED_CROSSING:
        return psi, (phi, eta)
    ground = ring_ground_state(n)
    xi = NamedState((1,) * n, StateLabel.XI)
    if n % 4 == 0:
        # all-zero sits 4/R above the all-one state for this residue class
        return ground, (xi,)
    return ground, (NamedState((0,) * n, StateLabel.ALL_ZERO), xi)


# ---------------------------------------------------------------------------
# permutation-symmetric (cluster) models


@dataclass(frozen=True)
class Cluster:
    fraction: float
    bias: int = 0
    field: float = 0.0


@dataclass(frozen=True)
class Monomial:
    """``coef * prod_f (w_f . M) ** e_f`` over cluster magnetizations ``M_k``."""

    coef: float
    factors: tuple[tuple[tuple[float, ...], int], ...]

    def evaluate(self, M: Sequence[np.ndarray]) -> np.ndarray:
        out = self.coef
        for weights, power in self.factors:
            lin = sum(w * m for w, m in zip(weights, M))
            out = out * lin**power
        return out


@dataclass(frozen=True)
class Polynomial:
    """Energy density as a polynomial in ``M_k = (sum over cluster k of z_i) / n``."""

    terms: tuple[Monomial, ...]

    def density(self, M: Sequence[np.ndarray]) -> np.ndarray:
        return sum((t.evaluate(M) for t in self.terms), np.zeros(np.shape(M[0])))

    def energy(self, Z: Sequence[np.ndarray], n: int) -> np.ndarray:
        return n * self.density([z / n for z in Z])

    def mergeable(self, i: int, j: int) -> bool:
        return all(w[i] == w[j] for t in self.terms for w, _ in t.factors)

    def merged(self, groups: Sequence[Sequence[int]]) -> "Polynomial":
        terms = tuple(
            Monomial(t.coef, tuple((tuple(w[g[0]] for g in groups), e) for w, e in t.factors))
            for t in self.terms
        )
        return Polynomial(terms)

    @classmethod
    def power_of_sum(cls, k: int, p: int, coef: float = -1.0) -> "Polynomial":
        return cls((Monomial(coef, (((1.0,) * k, p),)),))


class LargePVariant(enum.Enum):
    EXACT_HW = "exact"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class HammingInteraction:
    """p-spin energy as a function of total Hamming weight ``k``.

    ``EXACT_HW`` is ``-n (1 - 2k/n)**p``; ``TRUNCATED`` keeps only the two
    extreme weights, ``-n`` at ``k = 0`` and ``-n (-1)**p`` at ``k = n``.
    """

    variant: LargePVariant
    p: int

    def values(self, n: int) -> tuple[float, ...]:
        if self.variant is LargePVariant.EXACT_HW:
            return pspin_values(n, self.p)
        vals = [0.0] * (n + 1)
        vals[0] = -float(n)
        vals[n] = -float(n) * (-1.0) ** self.p
        return tuple(vals)

    def energy(self, Z: Sequence[np.ndarray], n: int) -> np.ndarray:
        k = np.rint((n - sum(Z)) / 2).astype(np.int64)
        return np.asarray(self.values(n))[k]

    def mergeable(self, i: int, j: int) -> bool:
        return True

    def merged(self, groups) -> "HammingInteraction":
        return self


@dataclass(frozen=True)
class SectorModel:
    clusters: tuple[Cluster, ...]
    interaction: Polynomial | HammingInteraction
    p: int | None = None
    name: str = "sector"

    def __post_init__(self):
        if not self.clusters:
            raise ModelError("sector model needs at least one cluster")
        for cl in self.clusters:
            if not cl.fraction > 0:
                raise ModelError(f"cluster fractions must be positive, got {cl.fraction}")
            if cl.bias not in (-1, 0, 1):
                raise ModelError(f"cluster bias must be in {{-1, 0, 1}}, got {cl.bias}")
        total = sum(cl.fraction for cl in self.clusters)
        if abs(total - 1.0) > 1e-12:
            raise ModelError(f"cluster fractions must sum to 1, got {total!r}")

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(cl.fraction for cl in self.clusters)

    def cluster_sizes(self, n: int) -> tuple[int, ...]:
        sizes = []
        for f in self.fractions:
            x = f * n
            if abs(x - round(x)) > 1e-9:
                raise ModelError(f"cluster size {f} * {n} = {x} is not an integer")
            sizes.append(int(round(x)))
        if sum(sizes) != n:
            raise ModelError(f"cluster sizes {sizes} do not add up to {n}")
        return tuple(sizes)

    def expand(self, n: int) -> tuple[DiagonalProblem, tuple[int, ...]]:
        """Per-qubit problem and bias vector equivalent to this model at size ``n``."""
        sizes = self.cluster_sizes(n)
        labels = np.repeat(np.arange(len(sizes)), sizes)
        bias = tuple(int(self.clusters[c].bias) for c in labels)
        name = f"{self.name}(n={n})"
        if isinstance(self.interaction, HammingInteraction):
            if any(cl.field for cl in self.clusters):
                raise ModelError("Hamming-weight interactions do not take cluster fields")
            return HammingProblem(n, self.interaction.values(n), name), bias
        Z = spins_of(n).astype(float)
        Zc = [Z[:, labels == c].sum(axis=1) for c in range(len(sizes))]
        diag = self.interaction.energy(Zc, n) + sum(cl.field * z for cl, z in zip(self.clusters, Zc))
        return _TabulatedProblem(n, tuple(np.asarray(diag, dtype=float)), name), bias


@dataclass(frozen=True)
class _TabulatedProblem:
    """Full-space diagonal stored explicitly (used only to cross-check sector models)."""

    n: int
    table: tuple[float, ...]
    name: str = "tabulated"
    degenerate_ground: bool = False

    def diagonal(self) -> np.ndarray:
        return np.asarray(self.table)

    def energy_of_bits(self, bits: Sequence[int]) -> float:
        return float(self.table[bits_to_index(bits)])


def pspin_sector(p: int, c: float = 1.0) -> SectorModel:
    """p-spin with a catalyst that agrees with the ground state on a fraction ``c``."""
    if int(p) != p or p < 1:
        raise ModelError(f"p must be a positive integer, got {p}")
    if not (0.0 <= c <= 1.0):
        raise ModelError(f"agreement fraction must lie in [0, 1], got {c}")
    clusters = [Cluster(c, +1), Cluster(1.0 - c, -1)]
    clusters = tuple(cl for cl in clusters if cl.fraction > 0)
    return SectorModel(clusters, Polynomial.power_of_sum(len(clusters), int(p)), int(p), f"pspin(p={p},c={c:g})")


@dataclass(frozen=True)
class WeakStrong:
    """Two fully connected clusters with opposing longitudinal fields."""

    n: int
    h1: float = 1.0
    h2: float = 0.49
    problem: IsingProblem = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2 or self.n % 2:
            raise ModelError(f"weak-strong cluster needs an even n >= 2, got {self.n}")
        n, half = int(self.n), int(self.n) // 2
        fields = tuple([-self.h1] * half + [self.h2] * half)
        couplings = []
        for i, j in combinations(range(n), 2):
            same = (i < half) == (j < half)
            couplings.append((i, j, 2.0 / n if same else 1.0 / n))
        problem = IsingProblem(n, fields, tuple(couplings), 1.0, -1.0, f"weak_strong(n={n})")
        object.__setattr__(self, "problem", problem)

    def sector_model(self, c: float = 1.0) -> SectorModel:
        """Strong cluster, correctly biased weak part ``c``, wrongly biased weak part ``1 - c``."""
        if not (0.0 <= c <= 1.0):
            raise ModelError(f"agreement fraction must lie in [0, 1], got {c}")
        clusters = [Cluster(0.5, +1, -self.h1), Cluster(c / 2, +1, self.h2), Cluster((1 - c) / 2, -1, self.h2)]
        keep = [i for i, cl in enumerate(clusters) if cl.fraction > 0]
        strong = tuple(1.0 if i == 0 else 0.0 for i in keep)
        weak = tuple(0.0 if i == 0 else 1.0 for i in keep)
        poly = Polynomial((
            Monomial(-1.0, ((strong, 2),)),
            Monomial(-1.0, ((weak, 2),)),
            Monomial(-1.0, ((strong, 1), (weak, 1))),
        ))
        return SectorModel(tuple(clusters[i] for i in keep), poly, None, f"weak_strong(c={c:g})")

    def bias(self, c: float = 1.0) -> tuple[int, ...]:
        half = self.n // 2
        n_good = round(c * half)
        if abs(c * half - n_good) > 1e-9:
            raise ModelError(f"c * n/2 = {c * half} is not an integer")
        return tuple([1] * half + [1] * n_good + [-1] * (half - n_good))


def build_weak_strong(n: int, h1: float = 1.0, h2: float = 0.49) -> WeakStrong:
    return WeakStrong(n, h1, h2)


# ---------------------------------------------------------------------------
# plain-text key-value spec


@dataclass(frozen=True)
class ProblemSpec:
    """Serializable recipe for a problem + schedule.

    Text form is one ``key = value`` per line; ``bias`` is a space-separated list.
    Recognised models: ``pspin``, ``loop_gadget``, ``weak_strong``, ``large_p``.
    """

    model: str
    n: int
    p: int | None = None
    R: float | None = None
    variant: str | None = None
    c: float | None = None
    lam: float = 0.0
    schedule: str = "standard"
    bias: tuple[int, ...] | None = None
    h1: float | None = None
    h2: float | None = None

    _KEYS = ("model", "n", "p", "R", "variant", "c", "lambda", "schedule", "bias", "h1", "h2")

    def to_text(self) -> str:
        lines = []
        for key in self._KEYS:
            value = getattr(self, "lam" if key == "lambda" else key)
            if value is None:
                continue
            if key == "bias":
                value = " ".join(str(int(b)) for b in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ProblemSpec":
        raw: dict[str, str] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ModelError(f"line {lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in cls._KEYS:
                raise ModelError(f"line {lineno}: unknown key {key!r}")
            raw[key] = value
        if "model" not in raw or "n" not in raw:
            raise ModelError("spec needs at least 'model' and 'n'")
        conv = {
            "n": int, "p": int, "R": float, "c": float, "lambda": float, "h1": float, "h2": float,
            "bias": lambda v: tuple(int(b) for b in v.split()),
        }
        kwargs = {("lam" if k == "lambda" else k): conv.get(k, str)(v) for k, v in raw.items()}
        return cls(**kwargs)

    def schedule_obj(self) -> Schedule:
        if self.schedule == "standard":
            return Schedule.standard()
        if self.schedule == "catalyst":
            return Schedule.catalyst(self.lam, self.bias)
        raise ModelError(f"unknown schedule {self.schedule!r}")

    def build(self) -> DiagonalProblem:
        if self.model == "pspin":
            return build_pspin(self.n, self.p or 3)
        if self.model == "loop_gadget":
            return build_loop_gadget(self.n, self.R, self.variant or "field_crossing")
        if self.model == "weak_strong":
            return build_weak_strong(self.n, self.h1 or 1.0, 0.49 if self.h2 is None else self.h2).problem
        if self.model == "large_p":
            from .collective import build_large_p

            return build_large_p(self.n, self.variant or "truncated", self.p or 25)
        raise ModelError(f"unknown model {self.model!r}")
