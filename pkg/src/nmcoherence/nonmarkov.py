"""Coherence-based non-Markovianity: trajectories, increments and the state search."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channels import ADState, PDState, RUState, TimeGrid
from .coherence import CoherenceMeasure
from .errors import DomainViolation, EmptySearchGrid, StateInvariantViolated
from .linalg import trace_distance

DEFAULT_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class TimeSeries:
    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not self.dt > 0:
            raise DomainViolation(f"dt must be positive, got {self.dt}")
        if v.ndim != 1 or len(v) < 3:
            raise DomainViolation("a time series needs at least 3 samples")
        object.__setattr__(self, "values", v)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.values)) * self.dt

    @property
    def t_end(self) -> float:
        return self.t0 + (len(self.values) - 1) * self.dt


@dataclass(frozen=True)
class WitnessIntervals:
    intervals: tuple = ()

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    @property
    def boundaries(self) -> list[float]:
        return [t for iv in self.intervals for t in iv]


def _check_compatible(channel, state) -> None:
    if channel.family != state.family:
        raise DomainViolation(f"{state.family} state cannot evolve under a {channel.family} channel")


def evolve(channel, state, grid: TimeGrid, factors=None) -> np.ndarray:
    """Stack of evolved density matrices, one per grid time."""
    _check_compatible(channel, state)
    if factors is None:
        factors = channel.factors(grid)
    return channel.evolve(state, factors)


def trajectory(channel, state, measure: CoherenceMeasure, grid: TimeGrid, factors=None) -> TimeSeries:
    """Coherence ``measure`` of the evolved state at every grid time.

    ``factors`` may carry a precomputed ``channel.factors(grid)`` to avoid
    re-solving the channel when many states share it.
    """
    rhos = evolve(channel, state, grid, factors)
    return TimeSeries(0.0, grid.dt, np.asarray(measure(rhos), dtype=float))


def positive_increment_integral(series: TimeSeries, threshold: float = 0.0) -> float:
    """Sum of the increments ``v[i+1] - v[i]`` that exceed ``threshold``.

    The telescoping form of integrating the derivative over the region where
    it is positive; exact on the grid.
    """
    inc = np.diff(series.values)
    return float(np.sum(inc[inc > threshold]))


def witness_intervals(series: TimeSeries, threshold: float = DEFAULT_THRESHOLD) -> WitnessIntervals:
    """Maximal runs of steps whose increment exceeds ``threshold``.

    A run over steps ``i..j`` is reported as ``(t_i, t_{j+1})``, the span of
    the increasing steps.
    """
    up = np.diff(series.values) > threshold
    if not up.any():
        return WitnessIntervals(())
    padded = np.concatenate([[False], up, [False]])
    edges = np.flatnonzero(padded[1:] != padded[:-1])
    starts, stops = edges[::2], edges[1::2]
    t = series.times
    return WitnessIntervals(tuple((float(t[i]), float(t[j])) for i, j in zip(starts, stops)))


def intervals_from_sign(times: np.ndarray, signal: np.ndarray) -> WitnessIntervals:
    """Intervals where ``signal > 0``, boundaries by linear interpolation of zeros."""
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    pos = signal > 0
    out = []
    start = times[0] if pos[0] else None
    for i in range(len(times) - 1):
        if pos[i] == pos[i + 1]:
            continue
        s0, s1 = signal[i], signal[i + 1]
        tz = times[i] + (times[i + 1] - times[i]) * s0 / (s0 - s1) if s0 != s1 else times[i]
        if pos[i + 1]:
            start = tz
        else:
            out.append((float(start), float(tz)))
            start = None
    if start is not None:
        out.append((float(start), float(times[-1])))
    return WitnessIntervals(tuple(out))


class EquivalenceReport(NamedTuple):
    matched: bool
    max_boundary_gap: float
    counts: tuple


def equivalence_report(a, b, dt: float, tolerance_steps: float = 2.0) -> EquivalenceReport:
    """Pair interval boundaries one-to-one; matched iff every pair is within ``tolerance_steps * dt``."""
    ia = list(a.intervals if isinstance(a, WitnessIntervals) else a)
    ib = list(b.intervals if isinstance(b, WitnessIntervals) else b)
    counts = (len(ia), len(ib))
    if len(ia) != len(ib):
        return EquivalenceReport(False, math.inf, counts)
    if not ia:
        return EquivalenceReport(True, 0.0, counts)
    gap = max(abs(x - y) for p, q in zip(ia, ib) for x, y in zip(p, q))
    return EquivalenceReport(gap <= tolerance_steps * dt * (1 + 1e-9), gap, counts)


def blp_witness(channel, pair, grid: TimeGrid, factors=None) -> TimeSeries:
    """Trace distance between two states evolved under the same channel."""
    first, second = pair
    if factors is None:
        factors = channel.factors(grid)
    r1 = evolve(channel, first, grid, factors)
    r2 = evolve(channel, second, grid, factors)
    return TimeSeries(0.0, grid.dt, np.asarray(trace_distance(r1, r2), dtype=float))


# --------------------------------------------------------------------------
# supremum over initial states


@dataclass(frozen=True)
class InitialStateSearch:
    """Grid over coherent initial states plus local refinement rounds.

    For ``pd`` and ``ad`` the axes are ``a`` and ``|b|``; for ``ru`` they are
    ``r1`` and ``r2`` (with ``r3`` fixed, 0 by default).
    """

    family: str
    n_a: int = 21
    n_b: int = 21
    refinement: int = 3
    r3: float = 0.0

    def __post_init__(self):
        if self.family not in ("pd", "ad", "ru"):
            raise DomainViolation(f"unknown state family {self.family!r}")
        if self.n_a < 1 or self.n_b < 1 or self.refinement < 0:
            raise EmptySearchGrid("search grid needs at least one point per axis")

    @property
    def ranges(self) -> tuple[tuple[float, float], tuple[float, float]]:
        if self.family == "pd":
            return (-1.0, 1.0), (0.0, 1.0)
        if self.family == "ad":
            return (0.0, 1.0), (0.0, 0.5)
        bound = math.sqrt(max(0.0, 1 - self.r3**2))
        return (-bound, bound), (-bound, bound)

    def make_state(self, u: float, v: float):
        """State at axis coordinates ``(u, v)``, or ``None`` if invalid or incoherent."""
        try:
            if self.family == "pd":
                st = PDState(u, v)
            elif self.family == "ad":
                st = ADState(u, v)
            else:
                st = RUState(u, v, self.r3)
        except StateInvariantViolated:
            return None
        return st if st.coherent else None

    def points(self) -> list[tuple[float, float]]:
        (a0, a1), (b0, b1) = self.ranges
        us = np.linspace(a0, a1, self.n_a) if self.n_a > 1 else np.array([0.5 * (a0 + a1)])
        vs = np.linspace(b0, b1, self.n_b) if self.n_b > 1 else np.array([0.5 * (b0 + b1)])
        return [(float(u), float(v)) for u in us for v in vs if self.make_state(u, v) is not None]

    @property
    def spacing(self) -> tuple[float, float]:
        (a0, a1), (b0, b1) = self.ranges
        return (a1 - a0) / max(self.n_a - 1, 1), (b1 - b0) / max(self.n_b - 1, 1)


@dataclass
class NonMarkovReport:
    measure_value: float
    argmax_state: object
    intervals: WitnessIntervals
    measure_name: str
    grid_meta: dict
    per_state_values: list | None = None
    threshold: float = DEFAULT_THRESHOLD


def _prefer(key_new, key_old) -> bool:
    """Deterministic tie-break: larger value, then smaller |u|, then larger |v|."""
    (val_n, u_n, v_n), (val_o, u_o, v_o) = key_new, key_old
    tol = 1e-12 * (1 + abs(val_o))
    if val_n > val_o + tol:
        return True
    if val_n < val_o - tol:
        return False
    if abs(u_n) != abs(u_o):
        return abs(u_n) < abs(u_o)
    return abs(v_n) > abs(v_o)


def nonmarkov_measure(
    channel,
    measure: CoherenceMeasure,
    search: InitialStateSearch,
    grid: TimeGrid,
    threshold: float = DEFAULT_THRESHOLD,
    per_state: bool = False,
) -> NonMarkovReport:
    """Maximise the positive-increment integral of ``measure`` over initial states.

    A coarse grid is evaluated first; each refinement round halves the
    spacing and re-evaluates a 5x5 neighbourhood of the incumbent.
    """
    if channel.family != search.family:
        raise DomainViolation(f"search family {search.family} does not match channel {channel.family}")
    points = search.points()
    if not points:
        raise EmptySearchGrid("no coherent valid states on the search grid")
    factors = channel.factors(grid)
    seen: dict[tuple[float, float], float] = {}

    def value_at(u, v):
        key = (u, v)
        if key not in seen:
            series = trajectory(channel, search.make_state(u, v), measure, grid, factors)
            seen[key] = positive_increment_integral(series, threshold)
        return seen[key]

    best = None
    for u, v in points:
        cand = (value_at(u, v), u, v)
        if best is None or _prefer(cand, best):
            best = cand

    du, dv = search.spacing
    for _ in range(search.refinement):
        du, dv = du / 2, dv / 2
        _, bu, bv = best
        for i in range(-2, 3):
            for j in range(-2, 3):
                u, v = round(bu + i * du, 15), round(bv + j * dv, 15)
                if search.make_state(u, v) is None:
                    continue
                cand = (value_at(u, v), u, v)
                if _prefer(cand, best):
                    best = cand

    value, u, v = best
    state = search.make_state(u, v)
    series = trajectory(channel, state, measure, grid, factors)
    rows = None
    if per_state:
        rows = [(k[0], k[1], val) for k, val in sorted(seen.items())]
    return NonMarkovReport(
        measure_value=value,
        argmax_state=state,
        intervals=witness_intervals(series, threshold),
        measure_name=measure.name,
        grid_meta={"dt": grid.dt, "t_max": grid.t_max},
        per_state_values=rows,
        threshold=threshold,
    )
