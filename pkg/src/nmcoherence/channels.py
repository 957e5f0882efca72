"""Qubit incoherent channels: phase damping, amplitude damping, random unitary.

Each family is driven by a scalar time-dependent factor. Phase damping takes
``f(t) = exp(-2 int_0^t gamma)``, amplitude damping the excited-state
amplitude ``h(t)``, and the random unitary channel the three integrated rates
``Gamma_i(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq

from .errors import (
    DomainViolation,
    EmptyGrid,
    NegativeTime,
    StateInvariantViolated,
    UnsupportedChannel,
)
from .linalg import SIGMA_Z

PHYS_TOL = 1e-12


# --------------------------------------------------------------------------
# time grid and sampled factors


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``0, dt, 2 dt, ..., t_max``."""

    dt: float
    t_max: float

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise EmptyGrid(f"dt must be positive, got {self.dt!r}")
        if not (self.t_max >= 0 and math.isfinite(self.t_max)):
            raise EmptyGrid(f"t_max must be non-negative, got {self.t_max!r}")
        n = self.t_max / self.dt
        if abs(n - round(n)) > 1e-6 * max(1.0, n):
            raise EmptyGrid(f"t_max={self.t_max} is not a multiple of dt={self.dt}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt

    def __len__(self) -> int:
        return self.n_steps + 1

    def refined(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.dt / factor, self.t_max)


@dataclass(frozen=True, eq=False)
class CoherenceFactorSeries:
    grid: TimeGrid
    values: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


# --------------------------------------------------------------------------
# initial states


@dataclass(frozen=True)
class PDState:
    """Phase-damping initial state ``1/2 [[1+a, b], [b*, 1-a]]``."""

    a: float
    b: complex

    def __post_init__(self):
        if self.a**2 + abs(self.b) ** 2 > 1 + PHYS_TOL:
            raise StateInvariantViolated(f"a^2 + |b|^2 > 1 for PD state (a={self.a}, b={self.b})")

    family = "pd"

    @property
    def coherent(self) -> bool:
        return abs(self.b) > 0

    def matrix(self) -> np.ndarray:
        return pd_apply(self, 1.0)


@dataclass(frozen=True)
class ADState:
    """Amplitude-damping initial state ``[[1-a, b], [b*, a]]``."""

    a: float
    b: complex

    def __post_init__(self):
        if not (-PHYS_TOL <= self.a <= 1 + PHYS_TOL) or self.a * (1 - self.a) < abs(self.b) ** 2 - PHYS_TOL:
            raise StateInvariantViolated(f"AD state not positive (a={self.a}, b={self.b})")

    family = "ad"

    @property
    def coherent(self) -> bool:
        return abs(self.b) > 0

    def matrix(self) -> np.ndarray:
        return ad_apply(self, 1.0)


@dataclass(frozen=True)
class RUState:
    """Random-unitary initial state given by its Bloch vector."""

    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        if self.r1**2 + self.r2**2 + self.r3**2 > 1 + PHYS_TOL:
            raise StateInvariantViolated("Bloch vector longer than 1")

    family = "ru"

    @property
    def coherent(self) -> bool:
        return self.r1 != 0 or self.r2 != 0

    def matrix(self) -> np.ndarray:
        return ru_apply(self, 0.0, 0.0, 0.0)


InitialQubitState = PDState | ADState | RUState


# --------------------------------------------------------------------------
# decay profiles


@dataclass(frozen=True)
class DephasingLorentzian:
    """Time-dependent rate for a Lorentzian spectral density.

    ``W`` is the transition strength and ``lam`` the spectral width. With
    ``d = sqrt(|lam^2 - 4 W^2|)`` the rate is
    ``4 W^2 sinh(dt/2) / (d cosh(dt/2) + lam sinh(dt/2))`` for ``W <= lam/2``
    and the trigonometric counterpart otherwise. The trigonometric branch
    has poles wherever the denominator vanishes.
    """

    W: float
    lam: float = 1.0

    def __post_init__(self):
        if not (self.W > 0 and self.lam > 0):
            raise DomainViolation(f"need W > 0 and lam > 0, got W={self.W}, lam={self.lam}")

    @property
    def d(self) -> float:
        return math.sqrt(abs(self.lam**2 - 4 * self.W**2))

    @property
    def oscillatory(self) -> bool:
        return 2 * self.W > self.lam and self.d > 1e-12 * self.lam

    @property
    def critical(self) -> bool:
        return self.d <= 1e-12 * self.lam

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        w2, lam, d = self.W**2, self.lam, self.d
        if self.critical:
            return 2 * w2 * t / (1 + 0.5 * lam * t)
        x = 0.5 * d * t
        if self.oscillatory:
            s, c = np.sin(x), np.cos(x)
            return 4 * w2 * s / (d * c + lam * s)
        th = np.tanh(x)
        return 4 * w2 * th / (d + lam * th)

    def amplitude(self, t):
        """``h(t)`` with ``rate = -2 d/dt ln|h|``, ``h(0) = 1``."""
        t = np.asarray(t, dtype=float)
        lam, d = self.lam, self.d
        env = np.exp(-0.5 * lam * t)
        if self.critical:
            return env * (1 + 0.5 * lam * t)
        x = 0.5 * d * t
        if self.oscillatory:
            return env * (np.cos(x) + lam / d * np.sin(x))
        # cosh x + (lam/d) sinh x without overflow
        ex = np.exp(-2 * x)
        return np.exp(-0.5 * lam * t + x) * (0.5 * (1 + ex) + lam / d * 0.5 * (1 - ex))

    def amplitude_derivative(self, t):
        """``dh/dt``; ``h`` solves ``h'' + lam h' + W^2 h = 0`` with ``h'(0) = 0``."""
        t = np.asarray(t, dtype=float)
        w2, lam, d = self.W**2, self.lam, self.d
        env = np.exp(-0.5 * lam * t)
        if self.critical:
            return -w2 * t * env
        x = 0.5 * d * t
        if self.oscillatory:
            return -2 * w2 / d * env * np.sin(x)
        return -w2 / d * (np.exp(-0.5 * lam * t + x) - np.exp(-0.5 * lam * t - x))

    def exact_factor(self, t):
        """Closed-form ``exp(-2 int_0^t rate) = h(t)**4``."""
        return self.amplitude(t) ** 4

    def integral(self, t):
        with np.errstate(divide="ignore"):
            return -2.0 * np.log(np.abs(self.amplitude(t)))

    def poles(self, t_max: float) -> np.ndarray:
        """Times in ``(0, t_max]`` where the rate diverges."""
        if not self.oscillatory:
            return np.empty(0)
        d = self.d
        first = math.pi - math.atan(d / self.lam)
        k = np.arange(0, int(t_max * d / (2 * math.pi)) + 2)
        tp = 2 * (first + k * math.pi) / d
        return tp[tp <= t_max]

    def negative_intervals(self, t_max: float) -> list[tuple[float, float]]:
        """Intervals of ``[0, t_max]`` where the rate is negative.

        Boundaries are located by root-finding on the numerator and the
        denominator of the rate separately, bracketed by a sign scan.
        """
        if not self.oscillatory:
            return []
        d, lam = self.d, self.lam
        num = lambda t: math.sin(0.5 * d * t)
        den = lambda t: d * math.cos(0.5 * d * t) + lam * math.sin(0.5 * d * t)
        scan = np.linspace(0.0, t_max, max(64, int(40 * t_max * d)) + 1)
        roots = []
        for fn in (num, den):
            vals = np.array([fn(t) for t in scan])
            for i in range(len(scan) - 1):
                lo, hi = vals[i], vals[i + 1]
                if i > 0 and lo == 0.0:
                    roots.append(scan[i])
                elif lo * hi < 0:
                    roots.append(brentq(fn, scan[i], scan[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
        edges = sorted(set([0.0, t_max, *roots]))
        out = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (lo + hi)
            if num(mid) / den(mid) < 0:
                if out and abs(out[-1][1] - lo) < 1e-14:
                    out[-1] = (out[-1][0], hi)
                else:
                    out.append((lo, hi))
        return out


@dataclass(frozen=True)
class ConstantRate:
    gamma0: float

    def rate(self, t):
        return np.full(np.shape(t), float(self.gamma0))

    def exact_factor(self, t):
        return np.exp(-2.0 * self.gamma0 * np.asarray(t, dtype=float))

    def integral(self, t):
        return self.gamma0 * np.asarray(t, dtype=float)


@dataclass(frozen=True, eq=False)
class Tabulated:
    """Piecewise-linear rate through ``(times, values)``."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise DomainViolation("tabulated profile needs two equal-length 1-D arrays with >= 2 points")
        if np.any(np.diff(t) <= 0):
            raise DomainViolation("tabulated times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def rate(self, t):
        t = np.asarray(t, dtype=float)
        span = self.times[-1] - self.times[0]
        if np.any(t < self.times[0] - 1e-9 * span) or np.any(t > self.times[-1] + 1e-9 * span):
            raise DomainViolation(f"time outside tabulated range [{self.times[0]}, {self.times[-1]}]")
        return np.interp(t, self.times, self.values)


DecayProfile = DephasingLorentzian | ConstantRate | Tabulated


def gamma_eval(profile: DecayProfile, t):
    """Decay rate of ``profile`` at time(s) ``t >= 0``."""
    if np.any(np.asarray(t) < 0):
        raise NegativeTime(f"negative time {np.min(t)}")
    out = profile.rate(t)
    return float(out) if np.ndim(out) == 0 else out


def integrated_rate(profile: DecayProfile, grid: TimeGrid, method: str = "auto") -> np.ndarray:
    """``int_0^t rate`` at every grid time.

    ``method='simpson'`` integrates the sampled rate with cumulative composite
    Simpson; ``'exact'`` uses the profile's antiderivative; ``'auto'`` prefers
    the antiderivative when the profile has one.
    """
    if len(grid) < 1:
        raise EmptyGrid("empty grid")
    t = grid.times
    if method == "auto":
        method = "exact" if hasattr(profile, "integral") else "simpson"
    if method == "exact":
        if not hasattr(profile, "integral"):
            raise DomainViolation(f"{type(profile).__name__} has no closed-form integral")
        return np.asarray(profile.integral(t), dtype=float)
    if method != "simpson":
        raise ValueError(f"unknown integration method {method!r}")
    if isinstance(profile, DephasingLorentzian) and len(profile.poles(grid.t_max)):
        raise DomainViolation("rate has non-integrable poles inside the grid; use method='exact'")
    y = gamma_eval(profile, t)
    if len(t) == 1:
        return np.zeros(1)
    if len(t) == 2:
        return np.array([0.0, 0.5 * grid.dt * (y[0] + y[1])])
    return cumulative_simpson(y, dx=grid.dt, initial=0.0)


def f_from_gamma(profile: DecayProfile, grid: TimeGrid, method: str = "auto") -> CoherenceFactorSeries:
    """Phase-damping coherence factor ``f(t) = exp(-2 int_0^t gamma)``."""
    if method == "auto" and hasattr(profile, "exact_factor"):
        f = np.asarray(profile.exact_factor(grid.times), dtype=float)
    else:
        f = np.exp(-2.0 * integrated_rate(profile, grid, method))
    if np.any(f > 1 + PHYS_TOL):
        raise StateInvariantViolated(f"coherence factor exceeds 1 (max {np.max(f):.6g})")
    return CoherenceFactorSeries(grid, f)


# --------------------------------------------------------------------------
# channel actions


def _check_abs_le_one(x, what: str) -> np.ndarray:
    x = np.asarray(x)
    if np.any(np.abs(x) > 1 + PHYS_TOL):
        raise StateInvariantViolated(f"|{what}| must not exceed 1 (max {np.max(np.abs(x)):.6g})")
    return x


def pd_apply(state: PDState, f_t) -> np.ndarray:
    """``1/2 [[1+a, b f], [b* f, 1-a]]``; broadcasts over an array of ``f``."""
    f = _check_abs_le_one(f_t, "f")
    out = np.empty(np.shape(f) + (2, 2), dtype=complex)
    out[..., 0, 0] = 0.5 * (1 + state.a)
    out[..., 1, 1] = 0.5 * (1 - state.a)
    out[..., 0, 1] = 0.5 * state.b * f
    out[..., 1, 0] = 0.5 * np.conj(state.b) * np.conj(f)
    return out


def ad_apply(state: ADState, h_t) -> np.ndarray:
    """``[[1 - |h|^2 a, b h], [b* h*, |h|^2 a]]``; broadcasts over ``h``."""
    h = _check_abs_le_one(h_t, "h")
    h2 = np.abs(h) ** 2
    out = np.empty(np.shape(h) + (2, 2), dtype=complex)
    out[..., 0, 0] = 1 - h2 * state.a
    out[..., 1, 1] = h2 * state.a
    out[..., 0, 1] = state.b * h
    out[..., 1, 0] = np.conj(state.b) * np.conj(h)
    return out


def ru_apply(state: RUState, g1, g2, g3) -> np.ndarray:
    """Random-unitary evolution from the integrated rates ``Gamma_1..3``.

    Bloch components decay as ``r1 e^{-2(G2+G3)}``, ``r2 e^{-2(G1+G3)}`` and
    ``r3 e^{-2(G1+G2)}``.
    """
    g1, g2, g3 = np.broadcast_arrays(*(np.asarray(g, dtype=float) for g in (g1, g2, g3)))
    x = state.r1 * np.exp(-2 * (g2 + g3))
    y = state.r2 * np.exp(-2 * (g1 + g3))
    z = state.r3 * np.exp(-2 * (g1 + g2))
    if np.any(x * x + y * y + z * z > 1 + PHYS_TOL):
        raise StateInvariantViolated("random-unitary rates drive the Bloch vector outside the ball")
    out = np.empty(g1.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = 0.5 * (1 + z)
    out[..., 1, 1] = 0.5 * (1 - z)
    out[..., 0, 1] = 0.5 * (x - 1j * y)
    out[..., 1, 0] = 0.5 * (x + 1j * y)
    return out


def ru_omega(state: RUState, g1, g2, g3):
    """Off-diagonal amplitude ``e^{-2 G3} (e^{2 G1} r1 - i e^{2 G2} r2)``."""
    return np.exp(-2 * np.asarray(g3)) * (np.exp(2 * np.asarray(g1)) * state.r1 - 1j * np.exp(2 * np.asarray(g2)) * state.r2)


# --------------------------------------------------------------------------
# Kraus representations


def pd_kraus(f_t: float) -> tuple[np.ndarray, np.ndarray]:
    """``K0 = sqrt(1 - h/2) I``, ``K1 = sqrt(h/2) sigma_z`` with ``h = 1 - f``."""
    h = 1.0 - f_t
    if h < -PHYS_TOL or h > 2 + PHYS_TOL:
        raise StateInvariantViolated(f"f={f_t} gives a negative Kraus weight")
    h = min(max(h, 0.0), 2.0)
    return math.sqrt(1 - h / 2) * np.eye(2, dtype=complex), math.sqrt(h / 2) * SIGMA_Z


def ad_kraus(h_t: complex) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude-damping pair, ``K0 = diag(1, conj(h))``, ``K1 = sqrt(1-|h|^2) |0><1|``.

    The conjugate makes the Kraus sum reproduce :func:`ad_apply` for complex
    ``h``; for real ``h`` it is the textbook pair.
    """
    if abs(h_t) > 1 + PHYS_TOL:
        raise StateInvariantViolated(f"|h|={abs(h_t)} exceeds 1")
    k0 = np.array([[1, 0], [0, np.conj(h_t)]], dtype=complex)
    k1 = np.array([[0, math.sqrt(max(0.0, 1 - abs(h_t) ** 2))], [0, 0]], dtype=complex)
    return k0, k1


def apply_kraus(kraus, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return sum(k @ rho @ k.conj().T for k in kraus)


class KrausReport(NamedTuple):
    completeness_defect: float
    incoherent: bool


def kraus_validate(family: str, factor, tol: float = 1e-14) -> KrausReport:
    """Completeness defect and incoherence of a channel's Kraus set at one time."""
    family = family.lower()
    if family == "pd":
        ks = pd_kraus(float(np.real(factor)))
    elif family == "ad":
        ks = ad_kraus(complex(factor))
    else:
        raise UnsupportedChannel(f"no Kraus form available for family {family!r}")
    total = sum(k.conj().T @ k for k in ks)
    defect = float(np.max(np.abs(total - np.eye(2))))
    # K|j> must be proportional to a single basis vector for every j
    incoherent = all(int(np.sum(np.abs(k[:, j]) > tol)) <= 1 for k in ks for j in range(k.shape[1]))
    return KrausReport(defect, incoherent)


# --------------------------------------------------------------------------
# channel specifications


@dataclass(frozen=True)
class PDChannel:
    profile: DecayProfile
    family = "pd"

    def factors(self, grid: TimeGrid) -> np.ndarray:
        return f_from_gamma(self.profile, grid).values

    def evolve(self, state: PDState, factors: np.ndarray) -> np.ndarray:
        return pd_apply(state, factors)


@dataclass(frozen=True)
class ADChannel:
    """Amplitude damping driven by a memory kernel (solved for ``h``)."""

    kernel: object
    family = "ad"

    def factors(self, grid: TimeGrid) -> np.ndarray:
        from .volterra import solve_h_volterra

        return solve_h_volterra(self.kernel, grid).values

    def evolve(self, state: ADState, factors: np.ndarray) -> np.ndarray:
        return ad_apply(state, factors)


@dataclass(frozen=True)
class RUChannel:
    profiles: tuple
    family = "ru"

    def __post_init__(self):
        if len(self.profiles) != 3:
            raise DomainViolation("random-unitary channel needs three rate profiles")

    def factors(self, grid: TimeGrid) -> np.ndarray:
        return np.stack([integrated_rate(p, grid, method="simpson") for p in self.profiles])

    def evolve(self, state: RUState, factors: np.ndarray) -> np.ndarray:
        return ru_apply(state, *factors)


ChannelSpec = PDChannel | ADChannel | RUChannel


def load_profile_csv(path) -> Tabulated:
    """Two-column ``time,value`` CSV, optional header, ``#`` comments allowed."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                if rows:
                    raise DomainViolation(f"malformed row in {path}: {line!r}") from None
                continue  # header
    if not rows:
        raise DomainViolation(f"no data rows in {path}")
    arr = np.array(rows)
    return Tabulated(arr[:, 0], arr[:, 1])
