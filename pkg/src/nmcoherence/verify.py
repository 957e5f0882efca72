"""Verification suites: sign certificates, oracle comparisons, interval
equivalence and the random-unitary skew/l1 relation.

Every check is a pure function of fixed seeds, so the report text is
reproducible byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import analytic as an
from .channels import (
    ADChannel,
    ADState,
    DephasingLorentzian,
    PDChannel,
    PDState,
    RUChannel,
    RUState,
    ConstantRate,
    Tabulated,
    TimeGrid,
    ad_apply,
    apply_kraus,
    ad_kraus,
    f_from_gamma,
    kraus_validate,
    pd_apply,
    pd_kraus,
)
from .coherence import CoherenceMeasure, c_l1, c_relent, c_skew, c_tsallis, c_tsallis_mod
from .nonmarkov import (
    InitialStateSearch,
    blp_witness,
    equivalence_report,
    intervals_from_sign,
    nonmarkov_measure,
    trajectory,
    witness_intervals,
)
from .volterra import ExponentialKernel, local_ode_oracle, solve_h_volterra

SUITES = ("signs", "oracles", "equivalence", "prop1")
DEFAULT_SEED = 20240101


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"{status} {self.suite}/{self.name} value={self.value:.6e} tol={self.tol:.1e}"
        return f"{text} {self.detail}".rstrip()


def _le(suite, name, value, tol, detail="") -> Check:
    value = float(value)
    return Check(suite, name, bool(value <= tol), value, tol, detail)


# --------------------------------------------------------------------------
# random draws


def draw_pd(rng, n):
    a = rng.uniform(-1, 1, n)
    b = np.sqrt(1 - a * a) * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    f = rng.random(n)
    return a, b, f


def draw_ad(rng, n):
    a = rng.random(n)
    b = np.sqrt(a * (1 - a)) * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    h = np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    return a, b, h


def random_qubits(rng, n):
    """Uniform Bloch-ball states as an ``(n, 2, 2)`` stack."""
    v = rng.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    r = rng.random(n) ** (1 / 3)
    x, y, z = (v * r[:, None]).T
    out = np.empty((n, 2, 2), dtype=complex)
    out[:, 0, 0] = 0.5 * (1 + z)
    out[:, 1, 1] = 0.5 * (1 - z)
    out[:, 0, 1] = 0.5 * (x - 1j * y)
    out[:, 1, 0] = 0.5 * (x + 1j * y)
    return out


# --------------------------------------------------------------------------
# oracle checks


def closed_form_errors(n: int = 1000, seed: int = DEFAULT_SEED) -> dict[str, float]:
    """Max |closed form - channel + measure| for the four coherence formulas."""
    rng = np.random.default_rng(seed)
    out = {}
    a, b, f = draw_pd(rng, n)
    rhos = np.stack([pd_apply(PDState(ai, bi), fi) for ai, bi, fi in zip(a, b, f)])
    out["cs_pd"] = np.max(np.abs(an.cs_pd(a, b, f) - c_skew(rhos)))
    out["c2_pd"] = np.max(np.abs(an.c2_pd(a, b, f) - c_tsallis_mod(rhos, 2.0)))
    a, b, h = draw_ad(rng, n)
    rhos = np.stack([ad_apply(ADState(ai, bi), hi) for ai, bi, hi in zip(a, b, h)])
    out["cs_ad"] = np.max(np.abs(an.cs_ad(a, b, h) - c_skew(rhos)))
    out["c2_ad"] = np.max(np.abs(an.c2_ad(a, b, np.abs(h)) - c_tsallis_mod(rhos, 2.0)))
    return {k: float(v) for k, v in out.items()}


PURE_EPS = 1e-4
FD_STEP = 1e-5


def derivative_errors(n: int = 1000, seed: int = DEFAULT_SEED + 1, W: float = 14.0, lam: float = 1.0) -> dict[str, tuple[float, int]]:
    """Scaled error ``|closed - FD| / (1 + |closed|)`` of the four rate formulas.

    Phase damping runs on ``f(t) = h(t)^4`` and amplitude damping on ``h(t)``
    of the Lorentzian model, at random times in ``(0, 1)``. Draws whose output
    lies within ``PURE_EPS`` of a pure state are skipped. Returns
    ``{name: (max scaled error, samples used)}``.
    """
    rng = np.random.default_rng(seed)
    prof = DephasingLorentzian(W, lam)
    e = FD_STEP
    t = rng.uniform(2 * e, 1.0, n)
    fd = lambda fn: (fn(t + e) - fn(t - e)) / (2 * e)
    out = {}

    a, b, _ = draw_pd(rng, n)
    f = prof.exact_factor
    s = np.asarray(an.s_pd(a, b, f(t)))
    keep = 1 - s * s > PURE_EPS
    a, b, tt = a[keep], b[keep], t[keep]
    for name, closed, value in (
        ("dcs_pd", an.dcs_pd, an.cs_pd),
        ("dc2_pd", an.dc2_pd, an.c2_pd),
    ):
        exact = closed(a, b, f(tt), prof.rate(tt))
        approx = (value(a, b, f(tt + e)) - value(a, b, f(tt - e))) / (2 * e)
        out[name] = (float(np.max(np.abs(exact - approx) / (1 + np.abs(exact)))), int(keep.sum()))

    a, b, _ = draw_ad(rng, n)
    x = lambda tau: np.abs(prof.amplitude(tau))
    dx = np.sign(prof.amplitude(t)) * prof.amplitude_derivative(t)
    st = np.asarray(an.s_tilde(a, b, x(t)))
    keep = (1 - st * st > PURE_EPS) & (x(t) > PURE_EPS)
    a, b, tt, dx = a[keep], b[keep], t[keep], dx[keep]
    for name, closed, value in (
        ("dcs_ad", an.dcs_ad, an.cs_ad),
        ("dc2_ad", an.dc2_ad, an.c2_ad),
    ):
        exact = closed(a, b, x(tt), dx)
        approx = (value(a, b, x(tt + e)) - value(a, b, x(tt - e))) / (2 * e)
        out[name] = (float(np.max(np.abs(exact - approx) / (1 + np.abs(exact)))), int(keep.sum()))
    return out


def volterra_errors(dt: float = 1e-3, t_max: float = 5.0) -> dict[float, float]:
    """Sup-norm ``h`` error against the local-ODE oracle for W = 0.5 and 14."""
    grid = TimeGrid(dt, t_max)
    out = {}
    for W in (0.5, 14.0):
        k = ExponentialKernel.lorentzian(W, 1.0)
        h = solve_h_volterra(k, grid).values
        ref, _ = local_ode_oracle(k, grid, substeps=10)
        out[W] = float(np.max(np.abs(h - ref)))
    return out


def tsallis_limit_errors(n: int = 1000, seed: int = DEFAULT_SEED + 2) -> dict[str, float]:
    rng = np.random.default_rng(seed)
    rhos = random_qubits(rng, n)
    half = np.max(np.abs(c_tsallis_mod(rhos, 0.5) - 2 * c_skew(rhos)))
    rel = c_relent(rhos, log_base=math.e)
    lo = np.max(np.abs(c_tsallis(rhos, 1 - 1e-4) - rel))
    hi = np.max(np.abs(c_tsallis(rhos, 1 + 1e-4) - rel))
    return {"mtsallis_half_vs_skew": float(half), "tsallis_near_one": float(max(lo, hi))}


def factor_quadrature_error(W: float = 0.4, lam: float = 1.0, t_max: float = 5.0) -> float:
    """``f`` from Simpson-integrated rate vs adaptive quadrature on a coarse time set."""
    prof = DephasingLorentzian(W, lam)
    grid = TimeGrid(1e-3, t_max)
    f = f_from_gamma(prof, grid, method="simpson").values
    idx = np.arange(0, len(grid), 250)
    ref = np.array([math.exp(-2 * quad(lambda s: float(prof.rate(s)), 0, grid.times[i], epsabs=1e-14)[0]) for i in idx])
    return float(np.max(np.abs(f[idx] - ref)))


def kraus_errors(n: int = 200, seed: int = DEFAULT_SEED + 3) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        a, b, f = draw_pd(rng, 1)
        st = PDState(a[0], b[0])
        worst = max(worst, np.max(np.abs(apply_kraus(pd_kraus(f[0]), st.matrix()) - pd_apply(st, f[0]))))
        worst = max(worst, kraus_validate("pd", f[0]).completeness_defect)
        a, b, h = draw_ad(rng, 1)
        st = ADState(a[0], b[0])
        worst = max(worst, np.max(np.abs(apply_kraus(ad_kraus(h[0]), st.matrix()) - ad_apply(st, h[0]))))
        worst = max(worst, kraus_validate("ad", h[0]).completeness_defect)
    return float(worst)


# --------------------------------------------------------------------------
# interval equivalence


PD_STATES = (PDState(0.0, 1.0), PDState(0.3, 0.5 + 0.2j))
AD_STATES = (ADState(0.5, 0.5), ADState(0.3, 0.2))
EQUIV_MEASURES = (CoherenceMeasure("skew"), CoherenceMeasure("mtsallis", 2.0), CoherenceMeasure("l1"))


def pd_equivalence(W: float = 14.0, dt: float = 1e-4, t_max: float = 1.0, threshold: float = 0.0):
    """Witness intervals vs the negative-rate set. Returns ``[(label, EquivalenceReport)]``."""
    prof = DephasingLorentzian(W, 1.0)
    grid = TimeGrid(dt, t_max)
    ch = PDChannel(prof)
    fac = ch.factors(grid)
    ref = prof.negative_intervals(t_max)
    out = []
    for st in PD_STATES:
        for m in EQUIV_MEASURES:
            w = witness_intervals(trajectory(ch, st, m, grid, fac), threshold)
            out.append((f"pd_{m.name}_a{st.a:g}", equivalence_report(w, ref, dt)))
    pair = (PDState(0.0, 1.0), PDState(0.0, -1.0))
    w = witness_intervals(blp_witness(ch, pair, grid, fac), threshold)
    out.append(("pd_blp", equivalence_report(w, ref, dt)))
    return out


def ad_equivalence(W: float = 14.0, dt: float = 1e-4, t_max: float = 1.0, threshold: float = 0.0):
    """Witness intervals vs ``{d|h|/dt > 0}`` from a fine RK4 reference."""
    k = ExponentialKernel.lorentzian(W, 1.0)
    grid = TimeGrid(dt, t_max)
    fine = TimeGrid(dt / 10, t_max)
    h_ref, dh_ref = local_ode_oracle(k, fine, substeps=1)
    ref = intervals_from_sign(fine.times, h_ref * dh_ref)
    ch = ADChannel(k)
    fac = ch.factors(grid)
    out = []
    for st in AD_STATES:
        for m in EQUIV_MEASURES[:2]:
            w = witness_intervals(trajectory(ch, st, m, grid, fac), threshold)
            out.append((f"ad_{m.name}_a{st.a:g}", equivalence_report(w, ref, dt)))
    return out


NULL_MEASURES = tuple(
    CoherenceMeasure.parse(m) for m in ("skew", "tsallis:0.5", "tsallis:2", "mtsallis:0.5", "mtsallis:2", "l1", "relent")
)


def markovian_null(W: float = 0.4, dt: float = 1e-3, t_max: float = 5.0, n: int = 11, refinement: int = 1):
    """Non-Markovianity of the weak-coupling channels, per family and measure."""
    grid = TimeGrid(dt, t_max)
    out = {}
    for ch in (PDChannel(DephasingLorentzian(W, 1.0)), ADChannel(ExponentialKernel.lorentzian(W, 1.0))):
        search = InitialStateSearch(ch.family, n_a=n, n_b=n, refinement=refinement)
        for m in NULL_MEASURES:
            out[f"{ch.family}_{m.name}"] = nonmarkov_measure(ch, m, search, grid).measure_value
    return out


def small_alpha_counts(alpha: float = 0.001, W: float = 14.0, dt: float = 1e-4, t_max: float = 1.0, threshold: float = 1e-6):
    """Numbers of increase intervals seen by the Tsallis and modified Tsallis measures."""
    grid = TimeGrid(dt, t_max)
    ch = PDChannel(DephasingLorentzian(W, 1.0))
    fac = ch.factors(grid)
    st = PDState(0.0, 1.0)
    counts = []
    for kind in ("tsallis", "mtsallis"):
        series = trajectory(ch, st, CoherenceMeasure(kind, alpha), grid, fac)
        counts.append(len(witness_intervals(series, threshold)))
    return tuple(counts)


# --------------------------------------------------------------------------
# random-unitary relation


def ru_benchmark_channel() -> tuple[RUChannel, tuple[float, float]]:
    """Rates with ``gamma1 + gamma3 < 0`` on a known interval.

    ``gamma1`` is piecewise linear through (0, .5), (1, .5), (1.5, -.6),
    (2, .5), (3, .5); ``gamma2 = 0.3`` and ``gamma3 = 0.1`` are constant.
    The sum is negative on ``(1 + 3/11, 2 - 3/11)``.
    """
    g1 = Tabulated(np.array([0.0, 1.0, 1.5, 2.0, 3.0]), np.array([0.5, 0.5, -0.6, 0.5, 0.5]))
    frac = 3.0 / 11.0
    return RUChannel((g1, ConstantRate(0.3), ConstantRate(0.1))), (1.0 + frac, 2.0 - frac)


def prop1_check(dt: float = 1e-3, t_max: float = 3.0):
    """Step-wise sign agreement of skew and l1 increments on the r3 = 0 family.

    Returns ``(sign mismatches, steps compared, max relation error,
    number of l1 increase intervals, intervals inside the known window)``.
    """
    ch, window = ru_benchmark_channel()
    grid = TimeGrid(dt, t_max)
    fac = ch.factors(grid)
    mismatches, steps, rel_err, n_up, inside = 0, 0, 0.0, 0, True
    for r1, r2 in ((0.6, 0.6), (0.2, 0.9), (0.0, 0.5), (0.7, -0.3)):
        st = RUState(r1, r2, 0.0)
        cs = trajectory(ch, st, CoherenceMeasure("skew"), grid, fac).values
        cl = trajectory(ch, st, CoherenceMeasure("l1"), grid, fac).values
        ok = cl[:-1] > 1e-8
        mismatches += int(np.sum(np.sign(np.diff(cs))[ok] != np.sign(np.diff(cl))[ok]))
        steps += int(ok.sum())
        rel_err = max(rel_err, float(np.max(np.abs(cs - an.prop1_relation(cl)))))
        iv = witness_intervals(trajectory(ch, st, CoherenceMeasure("l1"), grid, fac))
        n_up += len(iv)
        inside &= all(window[0] - dt <= lo and hi <= window[1] + dt for lo, hi in iv)
    return mismatches, steps, rel_err, n_up, inside


# --------------------------------------------------------------------------
# suites


def suite_signs(seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    for cert in (an.certify_g_tilde(10_000, seed), an.certify_G(10_000, seed + 1)):
        a, b, x = cert.extreme_at
        detail = f"samples={cert.samples} extreme={cert.extreme:.6e} at a={a:.6f} b={b:.6f} h={x:.6f}"
        out.append(Check("signs", cert.name, cert.passed, float(cert.violations), 0.0, detail))
    return out


def suite_oracles(seed: int = DEFAULT_SEED) -> list[Check]:
    out = [_le("oracles", f"closed_form_{k}", v, 1e-10, "draws=1000") for k, v in closed_form_errors(1000, seed).items()]
    for k, (v, used) in derivative_errors(1000, seed + 1).items():
        out.append(_le("oracles", f"derivative_{k}", v, 1e-5, f"draws={used}"))
    for W, v in volterra_errors().items():
        out.append(_le("oracles", f"volterra_W{W:g}", v, 1e-6, "dt=1e-3 t=[0,5]"))
    lim = tsallis_limit_errors(1000, seed + 2)
    out.append(_le("oracles", "mtsallis_half_vs_skew", lim["mtsallis_half_vs_skew"], 1e-12))
    out.append(_le("oracles", "tsallis_near_one_vs_relent", lim["tsallis_near_one"], 1e-3))
    out.append(_le("oracles", "factor_simpson_vs_quad", factor_quadrature_error(), 1e-8, "W=0.4"))
    out.append(_le("oracles", "kraus_sum_and_completeness", kraus_errors(200, seed + 3), 1e-14))
    return out


def suite_equivalence(seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    for label, rep in pd_equivalence() + ad_equivalence():
        detail = f"intervals={rep.counts[0]}/{rep.counts[1]}"
        out.append(Check("equivalence", label, rep.matched, rep.max_boundary_gap, 2e-4, detail))
    for label, v in markovian_null().items():
        out.append(_le("equivalence", f"null_{label}", v, 0.0))
    c_tsal, c_mod = small_alpha_counts()
    out.append(Check("equivalence", "small_alpha_counts", c_tsal < c_mod, float(c_tsal), float(c_mod), f"tsallis={c_tsal} mtsallis={c_mod}"))
    return out


def suite_prop1(seed: int = DEFAULT_SEED) -> list[Check]:
    mismatches, steps, rel_err, n_up, inside = prop1_check()
    return [
        _le("prop1", "sign_agreement", mismatches, 0.0, f"steps={steps}"),
        _le("prop1", "skew_vs_l1_relation", rel_err, 1e-12),
        Check("prop1", "increase_inside_window", n_up > 0 and inside, float(n_up), 0.0, "backflow only where gamma1+gamma3<0"),
    ]


SUITE_FUNCS = {
    "signs": suite_signs,
    "oracles": suite_oracles,
    "equivalence": suite_equivalence,
    "prop1": suite_prop1,
}


def run(suites, seed: int = DEFAULT_SEED) -> list[Check]:
    checks = []
    for name in suites:
        checks.extend(SUITE_FUNCS[name](seed))
    return checks


def report(checks: list[Check]) -> str:
    failed = sum(not c.passed for c in checks)
    lines = [c.line() for c in checks]
    lines.append(f"summary: {len(checks) - failed} passed, {failed} failed")
    return "\n".join(lines) + "\n"
