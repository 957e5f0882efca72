"""Coherence quantifiers in the computational basis.

Every measure accepts a single state or a stack ``(..., d, d)`` and returns a
float or an array over the leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlphaOutOfRange, ConfigError, DimensionMismatch
from .linalg import eig_hermitian, spectral_power


@dataclass(frozen=True)
class ReferenceBasis:
    """The computational basis ``{|0>, ..., |dim-1>}``."""

    dim: int = 2

    def check(self, rho: np.ndarray) -> None:
        if rho.shape[-1] != self.dim:
            raise DimensionMismatch(f"state dimension {rho.shape[-1]} != basis dimension {self.dim}")


def _prepare(rho, basis: ReferenceBasis | None) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise DimensionMismatch(f"expected (..., d, d) state, got shape {rho.shape}")
    if basis is not None:
        basis.check(rho)
    return rho


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def _offdiag_sq(m: np.ndarray) -> np.ndarray:
    d = m.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sum(np.abs(m[..., mask]) ** 2, axis=-1)


def _diag(m: np.ndarray) -> np.ndarray:
    return np.clip(np.diagonal(m, axis1=-2, axis2=-1).real, 0.0, None)


def _check_alpha(alpha: float) -> None:
    if not (0.0 < alpha <= 2.0) or alpha == 1.0:
        raise AlphaOutOfRange(f"alpha must lie in (0, 2] and differ from 1, got {alpha!r}")


def c_skew(rho, basis: ReferenceBasis | None = None):
    """Skew-information coherence ``1 - sum_j <j|sqrt(rho)|j>**2``.

    Evaluated as the sum of squared off-diagonal magnitudes of ``sqrt(rho)``,
    which is the same quantity for unit-trace states but keeps full relative
    precision for nearly incoherent states.
    """
    rho = _prepare(rho, basis)
    root = spectral_power(rho, 0.5, check=False)
    return _scalar(_offdiag_sq(root))


def _alpha_power_sum(rho: np.ndarray, alpha: float) -> np.ndarray:
    """``sum_j <j|rho**alpha|j>**(1/alpha) - 1``, cancellation-free at alpha=2."""
    if alpha == 2.0:
        # (rho^2)_jj = rho_jj^2 + o_j; sqrt(rho_jj^2 + o_j) - rho_jj rationalised.
        p = _diag(rho)
        d = rho.shape[-1]
        o = np.sum(np.where(np.eye(d, dtype=bool), 0.0, np.abs(rho) ** 2), axis=-1)
        denom = np.sqrt(p * p + o) + p
        excess = np.where(denom > 0, o / np.where(denom > 0, denom, 1.0), 0.0)
        # sum_j p_j = 1 for states, so the -1 cancels the diagonal exactly
        return np.sum(excess, axis=-1)
    diag = _diag(spectral_power(rho, alpha, check=False))
    return np.sum(diag ** (1.0 / alpha), axis=-1) - 1.0


def c_tsallis(rho, alpha: float, basis: ReferenceBasis | None = None):
    """Tsallis relative alpha-entropy of coherence."""
    _check_alpha(alpha)
    rho = _prepare(rho, basis)
    excess = _alpha_power_sum(rho, alpha)
    if alpha == 2.0:
        return _scalar(excess * (excess + 2.0))
    positive = excess > -1.0
    shifted = np.expm1(alpha * np.log1p(np.where(positive, excess, 0.0)))
    shifted = np.where(positive, shifted, -1.0)
    return _scalar(np.clip(shifted / (alpha - 1.0), 0.0, None))


def c_tsallis_mod(rho, alpha: float, basis: ReferenceBasis | None = None):
    """Modified Tsallis relative alpha-entropy of coherence."""
    _check_alpha(alpha)
    rho = _prepare(rho, basis)
    return _scalar(np.clip(_alpha_power_sum(rho, alpha) / (alpha - 1.0), 0.0, None))


def c_l1(rho, basis: ReferenceBasis | None = None):
    rho = _prepare(rho, basis)
    d = rho.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return _scalar(np.sum(np.abs(rho[..., mask]), axis=-1))


def _entropy(p: np.ndarray, log_base: float) -> np.ndarray:
    p = np.clip(p, 0.0, None)
    safe = np.where(p > 0, p, 1.0)
    return -np.sum(np.where(p > 0, p * np.log(safe), 0.0), axis=-1) / math.log(log_base)


def c_relent(rho, basis: ReferenceBasis | None = None, log_base: float = 2):
    """Relative entropy of coherence ``S(diag rho) - S(rho)``."""
    if log_base not in (2, math.e):
        raise ConfigError(f"log_base must be 2 or e, got {log_base!r}")
    rho = _prepare(rho, basis)
    lam = eig_hermitian(rho, check=False).eigenvalues
    value = _entropy(_diag(rho), log_base) - _entropy(lam, log_base)
    return _scalar(np.clip(value, 0.0, None))


KINDS = ("skew", "tsallis", "mtsallis", "l1", "relent")


@dataclass(frozen=True)
class CoherenceMeasure:
    """A coherence quantifier plus its order parameter where it takes one.

    ``kind`` is one of ``skew``, ``tsallis``, ``mtsallis`` (modified Tsallis),
    ``l1`` or ``relent``; ``alpha`` is required exactly for the two Tsallis
    kinds.
    """

    kind: str
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown coherence measure {self.kind!r}")
        needs_alpha = self.kind in ("tsallis", "mtsallis")
        if needs_alpha != (self.alpha is not None):
            raise ConfigError(f"alpha {'required' if needs_alpha else 'not allowed'} for {self.kind}")
        if needs_alpha:
            _check_alpha(float(self.alpha))
            object.__setattr__(self, "alpha", float(self.alpha))

    @classmethod
    def parse(cls, text: str) -> "CoherenceMeasure":
        """Parse ``skew``, ``l1``, ``relent``, ``tsallis:0.5`` or ``mtsallis:2``.

        ``tsallis:1`` and ``mtsallis:1`` map to ``relent``, the alpha -> 1 limit.
        """
        kind, _, arg = text.strip().partition(":")
        kind = kind.strip().lower()
        if not arg:
            return cls(kind)
        try:
            alpha = float(arg)
        except ValueError as exc:
            raise ConfigError(f"bad alpha in measure {text!r}") from exc
        if alpha == 1.0 and kind in ("tsallis", "mtsallis"):
            return cls("relent")
        return cls(kind, alpha)

    @property
    def name(self) -> str:
        if self.alpha is None:
            return self.kind
        return f"{self.kind}_{self.alpha:g}"

    def __call__(self, rho):
        if self.kind == "skew":
            return c_skew(rho)
        if self.kind == "tsallis":
            return c_tsallis(rho, self.alpha)
        if self.kind == "mtsallis":
            return c_tsallis_mod(rho, self.alpha)
        if self.kind == "l1":
            return c_l1(rho)
        return c_relent(rho)


SKEW = CoherenceMeasure("skew")
L1 = CoherenceMeasure("l1")
RELENT = CoherenceMeasure("relent")
