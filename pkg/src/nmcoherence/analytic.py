"""Closed-form coherence values and rates for the qubit channels.

Every function depends on ``b`` only through ``|b|`` and broadcasts over
array arguments. The phase-damping forms are functions of ``(a, |b|, f)``, the
amplitude-damping forms of ``(a, |b|, |h|)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateState, DomainViolation, OutOfRange, SingularPureState

SINGULAR_EPS = 1e-10
DEGENERATE_EPS = 1e-12


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def s_pd(a, b, f):
    """Bloch length of the phase-damped state, ``sqrt(|b|^2 f^2 + a^2)``."""
    return _out(np.sqrt(np.abs(b) ** 2 * np.asarray(f, dtype=float) ** 2 + np.asarray(a, dtype=float) ** 2))


def s_tilde(a, b, h):
    """Bloch length of the amplitude-damped state."""
    x2 = np.abs(h) ** 2
    return _out(np.sqrt((2 * np.asarray(a, dtype=float) * x2 - 1) ** 2 + 4 * np.abs(b) ** 2 * x2))


def _skew_from_spectrum(delta, s):
    # lambda_{1,2} = (1 +- s)/2; |<j|lambda_k>|^2 = (s +- delta)/(2s)
    l1 = np.sqrt(0.5 * (1 + s))
    l2 = np.sqrt(np.clip(0.5 * (1 - s), 0.0, None))
    plus = (s + delta) / (2 * s)
    minus = (s - delta) / (2 * s)
    first = l1 * plus + l2 * minus
    second = l1 * minus + l2 * plus
    return 1 - first**2 - second**2


def cs_pd(a, b, f):
    """Skew coherence of the phase-damped state from its spectrum.

    ``1 - T1^2 - T2^2`` with ``T1, T2`` the diagonal entries of ``sqrt(rho)``.
    """
    s = np.asarray(s_pd(a, b, f))
    if np.any(s < DEGENERATE_EPS):
        raise DegenerateState("maximally mixed output; coherence is 0 by continuity", 0.0)
    return _out(_skew_from_spectrum(np.asarray(a, dtype=float), s))


def cs_ad(a, b, h):
    """Skew coherence of the amplitude-damped state from its spectrum."""
    st = np.asarray(s_tilde(a, b, h))
    if np.any(st < DEGENERATE_EPS):
        raise DegenerateState("maximally mixed output; coherence is 0 by continuity", 0.0)
    delta = 1 - 2 * np.asarray(a, dtype=float) * np.abs(h) ** 2
    return _out(_skew_from_spectrum(delta, st))


def g_pd(a, b, f):
    """``s^4 - (sqrt(1 - s^2) - 1)^2 a^2``, positive for coherent states."""
    s = np.asarray(s_pd(a, b, f))
    return _out(s**4 - (np.sqrt(np.clip(1 - s * s, 0.0, None)) - 1) ** 2 * np.asarray(a, dtype=float) ** 2)


def dcs_pd(a, b, f, gamma):
    """Time derivative of the phase-damping skew coherence at rate ``gamma``."""
    s = np.asarray(s_pd(a, b, f))
    if np.any(s < DEGENERATE_EPS):
        raise DegenerateState("maximally mixed output", 0.0)
    root = np.clip(1 - s * s, 0.0, None)
    if np.any(root < SINGULAR_EPS):
        raise SingularPureState("derivative diverges for pure output states")
    f = np.asarray(f, dtype=float)
    num = -np.asarray(gamma, dtype=float) * np.abs(b) ** 2 * f * f * g_pd(a, b, f)
    return _out(num / (s**4 * np.sqrt(root)))


def _ad_radicand(a, b_abs, h_abs):
    a = np.asarray(a, dtype=float)
    x = np.asarray(h_abs, dtype=float)
    return a - a * a * x * x - np.asarray(b_abs, dtype=float) ** 2


def g_tilde(a, b_abs, h_abs):
    """The amplitude-damping rate factor; negative throughout the interior."""
    a = np.asarray(a, dtype=float)
    b2 = np.asarray(b_abs, dtype=float) ** 2
    x = np.asarray(h_abs, dtype=float)
    R = _ad_radicand(a, b_abs, h_abs)
    if np.any(R <= 0):
        raise DomainViolation("a - a^2|h|^2 - |b|^2 must be positive")
    sr = np.sqrt(R)
    x2 = x * x
    num = x * (a - b2) * (4 * a * a * x2 * x2 - 8 * a * x2 + 3) - 4 * b2 * b2 * x * x2 + (4 * a * a * x2 * x2 - 1) * sr
    den = sr * (4 * a * a * x2 * x2 - 4 * a * x2 + 4 * b2 * x2 + 1) ** 2
    return _out(num / den)


def g_tilde_factored(a, b_abs, h_abs):
    """The same factor via its product form ``-(x(a-|b|^2) + r)(2 x r - 1)^2 / (r s~^4)``.

    ``r = sqrt(a - a^2 x^2 - |b|^2)`` and ``x = |h|``. Used as an independent
    check of :func:`g_tilde` and of its sign.
    """
    a = np.asarray(a, dtype=float)
    b2 = np.asarray(b_abs, dtype=float) ** 2
    x = np.asarray(h_abs, dtype=float)
    R = _ad_radicand(a, b_abs, h_abs)
    if np.any(R <= 0):
        raise DomainViolation("a - a^2|h|^2 - |b|^2 must be positive")
    sr = np.sqrt(R)
    st2 = (2 * a * x * x - 1) ** 2 + 4 * b2 * x * x
    return _out(-(x * (a - b2) + sr) * (2 * x * sr - 1) ** 2 / (sr * st2 * st2))


def dcs_ad(a, b, h_abs, dh_dt):
    """Time derivative of the amplitude-damping skew coherence.

    ``-4 |b|^2 |h| (d|h|/dt) g~``; the sign follows ``d|h|/dt``.
    """
    b_abs = np.abs(b)
    g = g_tilde(a, b_abs, h_abs)
    return _out(-4 * b_abs**2 * np.asarray(h_abs, dtype=float) * np.asarray(dh_dt, dtype=float) * g)


def c2_pd(a, b, f):
    """Modified Tsallis coherence at alpha = 2 for the phase-damped state."""
    a = np.asarray(a, dtype=float)
    s2 = np.asarray(s_pd(a, b, f)) ** 2
    return _out(0.5 * np.sqrt(1 + 2 * a + s2) + 0.5 * np.sqrt(1 - 2 * a + s2) - 1)


def dc2_pd(a, b, f, gamma):
    a = np.asarray(a, dtype=float)
    f = np.asarray(f, dtype=float)
    s2 = np.asarray(s_pd(a, b, f)) ** 2
    p = np.sqrt(s2 + 2 * a + 1)
    m = np.sqrt(s2 - 2 * a + 1)
    return _out(-np.asarray(gamma, dtype=float) * np.abs(b) ** 2 * f * f * (p + m) / (p * m))


def _ad_sums(a, b_abs, x):
    a = np.asarray(a, dtype=float)
    b2 = np.asarray(b_abs, dtype=float) ** 2
    x = np.asarray(x, dtype=float)
    upper = (1 - x * x * a) ** 2 + b2 * x * x  # (rho^2)_00
    lower = b2 * x * x + x**4 * a * a  # (rho^2)_11
    return a, b2, x, upper, lower


def c2_ad(a, b, h_abs):
    """Modified Tsallis coherence at alpha = 2 for the amplitude-damped state."""
    _, _, _, upper, lower = _ad_sums(a, np.abs(b), h_abs)
    return _out(np.sqrt(upper) + np.sqrt(lower) - 1)


def G_func(a, b_abs, h_abs):
    """Rate factor with ``d C~_2/dt = |h| (d|h|/dt) G``.

    ``G = [(2a^2|h|^2 + |b|^2)(sqrt(A) + sqrt(B)) - 2a sqrt(B)] / sqrt(A B)``
    where ``A, B`` are the diagonal entries of ``rho^2``. The bracket is
    evaluated in a cancellation-free rationalised form, so the result is
    strictly positive for every coherent state.
    """
    a, b2, x, A, B = _ad_sums(a, b_abs, h_abs)
    if np.any(x == 0):
        raise DomainViolation("G is undefined at |h| = 0")
    if np.any(B <= 0):
        raise DomainViolation("G needs a coherent state (|b| > 0) or a > 0")
    ra, rb = np.sqrt(A), np.sqrt(B)
    P = 2 * a * a * x * x + b2
    Q = 2 * a - P
    # P ra - Q rb = b^2 (4a^3 x^4 + 2 a b^2 x^2 + b^2) / (P ra + Q rb) when Q > 0
    rational = b2 * (4 * a**3 * x**4 + 2 * a * b2 * x * x + b2)
    safe = np.where(Q > 0, P * ra + Q * rb, 1.0)
    num = np.where(Q > 0, rational / safe, P * ra - Q * rb)
    return _out(num / (ra * rb))


def dc2_ad(a, b, h_abs, dh_dt):
    return _out(np.asarray(h_abs, dtype=float) * np.asarray(dh_dt, dtype=float) * G_func(a, np.abs(b), h_abs))


def prop1_relation(c_l1_value):
    """Skew coherence of ``[[1/2, c], [c*, 1/2]]`` as a function of its l1 coherence.

    ``1/2 - sqrt(1 - C_l1^2)/2``, strictly increasing on (0, 1).
    """
    c = np.asarray(c_l1_value, dtype=float)
    if np.any((c < 0) | (c > 1)):
        raise OutOfRange(f"l1 coherence of this family lies in [0, 1], got {c_l1_value}")
    return _out(0.5 - 0.5 * np.sqrt(1 - c * c))


@dataclass(frozen=True)
class AnalyticScalars:
    """Auxiliary scalars along a trajectory; ``None`` where not applicable."""

    s: float | None = None
    s_tilde: float | None = None
    g: float | None = None
    g_tilde: float | None = None
    G: float | None = None
    omega: complex | None = None
    lamb_shift_rate: float | None = None


def pd_scalars(a, b, f) -> AnalyticScalars:
    return AnalyticScalars(s=s_pd(a, b, f), g=g_pd(a, b, f))


def ad_scalars(a, b, h, dh_dt=None) -> AnalyticScalars:
    from .volterra import lamb_shift_rate

    x = abs(h)
    gt = g_tilde(a, abs(b), x) if _ad_radicand(a, abs(b), x) > 0 else None
    G = G_func(a, abs(b), x) if x > 0 and abs(b) > 0 else None
    shift = None if dh_dt is None or h == 0 else float(lamb_shift_rate(h, dh_dt))
    return AnalyticScalars(s_tilde=s_tilde(a, b, h), g_tilde=gt, G=G, lamb_shift_rate=shift)


def ru_scalars(state, g1, g2, g3) -> AnalyticScalars:
    from .channels import ru_omega

    return AnalyticScalars(omega=complex(ru_omega(state, g1, g2, g3)))


# --------------------------------------------------------------------------
# randomized sign certification


class SignCertificate(NamedTuple):
    name: str
    samples: int
    violations: int
    extreme: float
    extreme_at: tuple

    @property
    def passed(self) -> bool:
        return self.violations == 0


def sample_ad_interior(n: int, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``n`` coherent AD parameter triples ``(a, |b|, |h|)`` strictly inside the domain."""
    rng = np.random.default_rng(seed)
    open01 = lambda: 1.0 - rng.random(n)  # (0, 1]
    a = open01()
    a = np.where(a == 1.0, 0.5, a)
    u = open01()
    u = np.where(u == 1.0, 0.5, u)
    b = u * np.sqrt(a * (1 - a))
    x = open01()
    return a, b, x


def certify_g_tilde(n: int = 10_000, seed: int = 20240101) -> SignCertificate:
    a, b, x = sample_ad_interior(n, seed)
    vals = np.asarray(g_tilde(a, b, x))
    i = int(np.argmax(vals))
    return SignCertificate("g_tilde<0", n, int(np.sum(vals >= 0)), float(vals[i]), (a[i], b[i], x[i]))


def certify_G(n: int = 10_000, seed: int = 20240102) -> SignCertificate:
    a, b, x = sample_ad_interior(n, seed)
    vals = np.asarray(G_func(a, b, x))
    i = int(np.argmin(vals))
    return SignCertificate("G>0", n, int(np.sum(vals <= 0)), float(vals[i]), (a[i], b[i], x[i]))
