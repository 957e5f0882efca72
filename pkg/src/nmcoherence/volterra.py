"""Memory kernels and the integrodifferential equation for ``h(t)``.

    h'(t) = -int_0^t f(t - s) h(s) ds,    h(0) = 1.

The solver marches the trapezoidal rule in time: the history integral uses
trapezoidal quadrature and the step is a trapezoidal predictor-corrector.
Because the equation is linear, the corrector's fixed point is available in
closed form, so the corrector is iterated to convergence exactly. The
resulting scheme is symmetric with an error expansion in even powers of
``dt``. One Richardson extrapolation against a half-step solve removes the
leading term, which gives fourth-order accuracy on the output grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import CoherenceFactorSeries, TimeGrid
from .errors import DomainViolation, EmptyGrid, StepTooLarge


@dataclass(frozen=True)
class ExponentialKernel:
    """``f(tau) = amplitude * exp(-decay * tau)``.

    A Lorentzian spectral density of strength ``W`` and width ``lam`` gives
    ``amplitude = W**2`` and ``decay = lam``.
    """

    amplitude: float
    decay: float

    def __post_init__(self):
        if self.amplitude < 0 or self.decay <= 0:
            raise DomainViolation(f"need amplitude >= 0 and decay > 0, got {self.amplitude}, {self.decay}")

    @classmethod
    def lorentzian(cls, W: float, lam: float = 1.0) -> "ExponentialKernel":
        return cls(W * W, lam)

    @property
    def W(self) -> float:
        return math.sqrt(self.amplitude)

    def __call__(self, tau):
        return self.amplitude * np.exp(-self.decay * np.asarray(tau, dtype=float))

    @property
    def bound(self) -> float:
        return self.amplitude

    @property
    def time_scale(self) -> float:
        return 1.0 / self.decay


@dataclass(frozen=True, eq=False)
class TabulatedKernel:
    """Kernel sampled at ``times`` (real or complex), linearly interpolated."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2 or np.any(np.diff(t) <= 0):
            raise DomainViolation("tabulated kernel needs increasing times and matching values")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        if np.any(tau > self.times[-1] * (1 + 1e-12)) or np.any(tau < self.times[0]):
            raise DomainViolation("kernel evaluated outside its tabulated range")
        if np.iscomplexobj(self.values):
            return np.interp(tau, self.times, self.values.real) + 1j * np.interp(tau, self.times, self.values.imag)
        return np.interp(tau, self.times, self.values)

    @property
    def bound(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def time_scale(self) -> float:
        return float(self.times[-1] - self.times[0])


MemoryKernel = ExponentialKernel | TabulatedKernel


def _march(kernel, n: int, dt: float) -> np.ndarray:
    k = kernel(np.arange(n + 1) * dt)
    dtype = complex if np.iscomplexobj(k) else float
    h = np.zeros(n + 1, dtype=dtype)
    h[0] = 1.0
    if n == 0:
        return h
    scale = 1.0 + 0.25 * dt * dt * k[0]
    slope = 0.0  # h'(0) = 0
    separable = isinstance(kernel, ExponentialKernel)
    if separable:
        decay = math.exp(-kernel.decay * dt)
        hist = 0.0  # sum_{j=1}^{m-1} f(t_m - t_j) h_j, updated recursively
    for m in range(1, n + 1):
        if separable:
            if m > 1:
                hist = decay * (hist + k[0] * h[m - 1])
            partial = 0.5 * k[m] * h[0] + hist
        else:
            partial = 0.5 * k[m] * h[0]
            if m > 1:
                partial = partial + np.dot(k[m - 1 : 0 : -1], h[1:m])
        # corrector fixed point: h_m = h_{m-1} + dt/2 (slope_{m-1} + slope_m)
        h[m] = (h[m - 1] + 0.5 * dt * (slope - dt * partial)) / scale
        slope = -dt * (partial + 0.5 * k[0] * h[m])
    return h


def solve_h_volterra(kernel: MemoryKernel, grid: TimeGrid, extrapolate: bool = True) -> CoherenceFactorSeries:
    """Solve for ``h`` on ``grid``.

    Raises :class:`StepTooLarge` if ``dt * sqrt(max|f|) > 0.1`` or if ``dt``
    exceeds one hundredth of the kernel's decay time.
    """
    if len(grid) < 1:
        raise EmptyGrid("empty grid")
    dt = grid.dt
    if dt * math.sqrt(kernel.bound) > 0.1:
        raise StepTooLarge(f"dt*sqrt(amplitude)={dt * math.sqrt(kernel.bound):.3g} > 0.1")
    if isinstance(kernel, ExponentialKernel) and dt > 1e-2 * kernel.time_scale:
        raise StepTooLarge(f"dt={dt} exceeds 1e-2/decay={1e-2 * kernel.time_scale:.3g}")
    n = grid.n_steps
    h = _march(kernel, n, dt)
    if extrapolate and n > 0:
        fine = _march(kernel, 2 * n, 0.5 * dt)[::2]
        h = (4.0 * fine - h) / 3.0
    return CoherenceFactorSeries(grid, h)


def local_ode_oracle(kernel: ExponentialKernel, grid: TimeGrid, substeps: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Reference ``(h, h')`` from the equivalent local system.

    With ``u = int_0^t e^{-decay (t-s)} h(s) ds`` the equation becomes
    ``h' = -A u``, ``u' = h - decay u``, i.e. ``h'' + decay h' + A h = 0``.
    Integrated with classical RK4 at ``dt / substeps``.
    """
    A, lam = kernel.amplitude, kernel.decay
    step = grid.dt / substeps
    half = 0.5 * step
    x, u = 1.0, 0.0
    h = np.empty(len(grid))
    dh = np.empty(len(grid))
    h[0], dh[0] = 1.0, 0.0
    for i in range(1, len(grid)):
        for _ in range(substeps):
            a1, b1 = -A * u, x - lam * u
            x2, u2 = x + half * a1, u + half * b1
            a2, b2 = -A * u2, x2 - lam * u2
            x3, u3 = x + half * a2, u + half * b2
            a3, b3 = -A * u3, x3 - lam * u3
            x4, u4 = x + step * a3, u + step * b3
            a4, b4 = -A * u4, x4 - lam * u4
            x += step / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4)
            u += step / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
        h[i] = x
        dh[i] = -A * u
    return h, dh


def lamb_shift_rate(h, dh_dt):
    """``-2 Im(h'/h)``; affects phases only. Zero for real ``h``."""
    h = np.asarray(h)
    return -2.0 * np.imag(np.asarray(dh_dt) / h)


def damping_rate(h, dh_dt):
    """``-2 Re(h'/h)``."""
    h = np.asarray(h)
    return -2.0 * np.real(np.asarray(dh_dt) / h)
