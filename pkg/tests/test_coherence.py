import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import fractional_matrix_power, sqrtm

from nmcoherence.coherence import (
    CoherenceMeasure,
    ReferenceBasis,
    c_l1,
    c_relent,
    c_skew,
    c_tsallis,
    c_tsallis_mod,
)
from nmcoherence.errors import AlphaOutOfRange, ConfigError, DimensionMismatch
from nmcoherence.verify import random_qubits

PLUS = 0.5 * np.ones((2, 2))
MIXED = 0.5 * np.eye(2)


def skew_definition(rho):
    r = sqrtm(rho)
    return 1 - np.sum(np.diag(r).real ** 2)


def tsallis_definition(rho, alpha):
    p = fractional_matrix_power(rho, alpha)
    total = np.sum(np.diag(p).real ** (1 / alpha))
    return total**alpha / (alpha - 1) - 1 / (alpha - 1), (total - 1) / (alpha - 1)


def test_maximally_coherent_values():
    assert c_skew(PLUS) == pytest.approx(0.5)
    assert c_l1(PLUS) == pytest.approx(1.0)
    assert c_relent(PLUS) == pytest.approx(1.0)
    assert c_relent(PLUS, log_base=math.e) == pytest.approx(math.log(2))


def test_incoherent_states_give_zero():
    for rho in (MIXED, np.diag([0.9, 0.1]), np.diag([1.0, 0.0])):
        assert c_skew(rho) == 0
        assert c_l1(rho) == 0
        assert c_relent(rho) == 0
        for alpha in (0.3, 0.5, 2.0):
            # general alpha goes through rho**alpha, so allow rounding
            assert c_tsallis(rho, alpha) == pytest.approx(0, abs=1e-15)
            assert c_tsallis_mod(rho, alpha) == pytest.approx(0, abs=1e-15)


def test_skew_matches_definition(rng):
    rhos = random_qubits(rng, 200)
    ours = c_skew(rhos)
    ref = np.array([skew_definition(r) for r in rhos])
    assert np.max(np.abs(ours - ref)) < 1e-12


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8, 1.2, 1.8, 2.0])
def test_tsallis_pair_matches_definition(rng, alpha):
    rhos = random_qubits(rng, 50)
    ref = np.array([tsallis_definition(r, alpha) for r in rhos])
    assert np.max(np.abs(c_tsallis(rhos, alpha) - ref[:, 0])) < 1e-10
    assert np.max(np.abs(c_tsallis_mod(rhos, alpha) - ref[:, 1])) < 1e-10


def test_modified_half_is_twice_skew(rng):
    rhos = random_qubits(rng, 300)
    assert np.max(np.abs(c_tsallis_mod(rhos, 0.5) - 2 * c_skew(rhos))) < 1e-12


def test_tsallis_tends_to_relative_entropy(rng):
    rhos = random_qubits(rng, 100)
    rel = c_relent(rhos, log_base=math.e)
    for alpha in (1 - 1e-4, 1 + 1e-4):
        assert np.max(np.abs(c_tsallis(rhos, alpha) - rel)) < 1e-3
        assert np.max(np.abs(c_tsallis_mod(rhos, alpha) - rel)) < 1e-3


def test_alpha_two_closed_form():
    # for a real qubit state with off-diagonal c: (rho^2)_jj = p_j^2 + c^2
    p, c = 0.7, 0.3
    rho = np.array([[p, c], [c, 1 - p]])
    excess = math.sqrt(p * p + c * c) + math.sqrt((1 - p) ** 2 + c * c) - 1
    assert c_tsallis_mod(rho, 2.0) == pytest.approx(excess, abs=1e-15)
    assert c_tsallis(rho, 2.0) == pytest.approx((1 + excess) ** 2 - 1, abs=1e-15)


def test_alpha_two_keeps_relative_precision_for_tiny_coherence():
    c = 1e-9
    rho = np.array([[0.5, c], [c, 0.5]])
    # exact: 2 (sqrt(0.25 + c^2) - 0.5) ~ 2 c^2
    assert c_tsallis_mod(rho, 2.0) == pytest.approx(2 * c * c, rel=1e-6)


def test_stack_evaluation():
    rhos = np.stack([PLUS, MIXED, PLUS])
    assert np.allclose(c_skew(rhos), [0.5, 0, 0.5])
    assert isinstance(c_skew(PLUS), float)


@settings(max_examples=150, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 2 * math.pi), st.floats(0.05, 2.0))
def test_measures_nonnegative_and_bounded(r, z, phi, alpha):
    if alpha == 1.0:
        alpha = 1.01
    zz = z * r
    rxy = math.sqrt(max(r * r - zz * zz, 0.0))
    rho = 0.5 * np.array([[1 + zz, rxy * np.exp(-1j * phi)], [rxy * np.exp(1j * phi), 1 - zz]])
    for v in (c_skew(rho), c_l1(rho), c_relent(rho), c_tsallis(rho, alpha), c_tsallis_mod(rho, alpha)):
        assert v >= 0
    assert c_skew(rho) <= 0.5 + 1e-12
    assert c_l1(rho) <= 1 + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 1), st.floats(0, 1), st.floats(0, 1))
def test_dephasing_never_increases_coherence(r, z, f):
    rho = 0.5 * np.array([[1 + z * r, r * (1 - z)], [r * (1 - z), 1 - z * r]])
    damped = rho.copy()
    damped[0, 1] *= f
    damped[1, 0] *= f
    for m in (c_skew, c_l1, c_relent, lambda x: c_tsallis_mod(x, 2.0)):
        assert m(damped) <= m(rho) + 1e-12


def test_alpha_domain():
    for alpha in (0.0, 1.0, 2.5, -1.0):
        with pytest.raises(AlphaOutOfRange):
            c_tsallis(PLUS, alpha)
        with pytest.raises(AlphaOutOfRange):
            c_tsallis_mod(PLUS, alpha)


def test_basis_dimension_check():
    with pytest.raises(DimensionMismatch):
        c_skew(PLUS, ReferenceBasis(3))
    with pytest.raises(DimensionMismatch):
        c_l1(np.ones(3))


def test_three_level_state():
    psi = np.ones(3) / math.sqrt(3)
    rho = np.outer(psi, psi)
    assert c_l1(rho) == pytest.approx(2.0)
    assert c_relent(rho) == pytest.approx(math.log2(3))
    assert c_skew(rho) == pytest.approx(2 / 3)


def test_relent_log_base():
    with pytest.raises(ConfigError):
        c_relent(PLUS, log_base=10)


def test_measure_parsing():
    m = CoherenceMeasure.parse("tsallis:0.5")
    assert (m.kind, m.alpha, m.name) == ("tsallis", 0.5, "tsallis_0.5")
    assert CoherenceMeasure.parse("mtsallis:1").kind == "relent"
    assert CoherenceMeasure.parse(" L1 ").name == "l1"
    assert CoherenceMeasure.parse("skew")(PLUS) == pytest.approx(0.5)
    for bad in ("nope", "skew:2", "tsallis", "tsallis:x"):
        with pytest.raises(ConfigError):
            CoherenceMeasure.parse(bad)
    with pytest.raises(AlphaOutOfRange):
        CoherenceMeasure("tsallis", 3.0)


def test_measure_objects_dispatch():
    rho = np.array([[0.6, 0.2], [0.2, 0.4]])
    assert CoherenceMeasure("tsallis", 2.0)(rho) == c_tsallis(rho, 2.0)
    assert CoherenceMeasure("mtsallis", 0.5)(rho) == c_tsallis_mod(rho, 0.5)
    assert CoherenceMeasure("relent")(rho) == c_relent(rho)
