"""Generating functions and the bivariate exponential transform."""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentrecon.errors import DomainError, PreconditionError, UnsupportedMultiplicityError
from momentrecon.forward import double_moments_domain, moments
from momentrecon.genfun import (
    I_poly,
    I_rational,
    I_series,
    I_spikes,
    bivariate_exp,
    bivariate_log1p,
    exp_transform,
    exp_transform_inverse,
    partial_fractions,
    series_tail_bound,
)
from momentrecon.models import (
    Disk,
    DiskUnion,
    DoubleMomentTable,
    MomentSequence,
    Polygon,
    PolynomialModel,
    RationalModel,
    SpikeTrain,
)

TWO_LN2 = 1.3862943611198906  # 2 ln 2


def test_series_examples():
    assert I_series(MomentSequence((1, 0, 0)), 0.3) == 1
    m = MomentSequence(tuple(1 / (k + 1) for k in range(41)))
    assert abs(I_series(m, 0.5) - TWO_LN2) <= series_tail_bound(m, 0.5)
    assert I_series(m, 0) == 1


def test_poly_closed_form():
    one = PolynomialModel((1,))
    assert I_poly(one, 0.5) == pytest.approx(TWO_LN2, abs=1e-15)
    assert I_poly(one, 0) == 1


def test_poly_against_series():
    P = PolynomialModel((1, 0, 1))
    m = moments(P, 60)
    assert abs(I_poly(P, 0.4) - I_series(m, 0.4)) <= 1e-12


def test_poly_small_z_keeps_precision():
    P = PolynomialModel((0.3, -1.2, 0.7, 2.0))
    m = moments(P, 6)
    z = 1e-3
    assert abs(I_poly(P, z) - I_series(m, z)) <= series_tail_bound(m, z) + 1e-15


def test_poly_against_mpmath_quadrature():
    P = PolynomialModel((0.5, -1.0, 3.0))
    z = 0.3 + 0.4j
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda t: (0.5 - t + 3 * t * t) / (1 - mpmath.mpc(z) * t), [0, 1])
    assert abs(I_poly(P, z) - complex(ref)) < 1e-14


def test_rational_against_series():
    R = RationalModel((1,), (1, 1))
    m = moments(R, 80)
    assert abs(I_rational(R, 0.5) - I_series(m, 0.5)) <= 1e-9


def test_rational_repeated_root_rejected():
    with pytest.raises(UnsupportedMultiplicityError):
        I_rational(RationalModel((1,), (1, 2, 1)), 0.3)


def test_rational_continuity_at_zero():
    R = RationalModel((1,), (1, 1))
    m = moments(R, 3)
    assert I_series(m, 1e-8) == pytest.approx(math.log(2), abs=1e-8)
    assert I_rational(R, 0) == pytest.approx(math.log(2), abs=1e-15)
    assert I_rational(R, 1e-8) == pytest.approx(math.log(2), abs=1e-8)


def test_rational_complex_poles_against_quadrature():
    R = RationalModel((0.4, 1.0), (1.25, -1.0, 1.0))  # poles 0.5 +- i
    z = -0.35 + 0.2j
    with mpmath.workdps(30):
        ref = mpmath.quad(lambda t: (0.4 + t) / (1.25 - t + t * t) / (1 - mpmath.mpc(z) * t), [0, 1])
    assert abs(I_rational(R, z) - complex(ref)) < 1e-13


def test_partial_fractions_reconstruct():
    R = RationalModel((0.4, 1.0), (1.25, -1.0, 1.0))
    alphas, A = partial_fractions(R)
    t = 0.37
    assert sum(a / (t - al) for a, al in zip(A, alphas)) == pytest.approx((0.4 + t) / (1.25 - t + t * t))


def test_spikes_examples():
    S = SpikeTrain((0.5,), (1,))
    assert I_spikes(S, 1) == 2
    with pytest.raises(DomainError):
        I_spikes(S, 2)
    S2 = SpikeTrain((0.25, 0.75), (1, 2))
    assert abs(I_spikes(S2, 0.5) - I_series(moments(S2, 60), 0.5)) <= 1e-12


def test_branch_cut_rejected():
    with pytest.raises(DomainError):
        I_poly(PolynomialModel((1,)), 2.0)


def test_disk_transform():
    for R in (0.5, 1.0, 2.0):
        b = exp_transform(double_moments_domain(Disk(0, R), 5, 5), 5).coefficients
        want = np.zeros((5, 5))
        want[0, 0] = R * R
        assert np.max(np.abs(b - want)) <= 1e-12 * max(1, R ** 10)


def test_zero_table_gives_zero_series():
    assert not np.any(exp_transform(DoubleMomentTable(np.zeros((4, 4))), 4).coefficients)


def test_hermitian_symmetry_of_transform():
    t = double_moments_domain(Polygon([0, 1, 1 + 1j, 0.2j]), 5, 5)
    b = exp_transform(t, 5).coefficients
    assert np.max(np.abs(b.T - b.conj())) < 1e-12


def test_inverse_recovers_moments():
    t = double_moments_domain(DiskUnion((Disk(0.8, 0.3), Disk(-0.8 + 0.1j, 0.2))), 6, 6)
    back = exp_transform_inverse(exp_transform(t, 6)).entries
    assert np.max(np.abs(back - t.entries[:6, :6])) <= 1e-10 * np.max(np.abs(t.entries))


def test_bivariate_exp_matches_univariate_exp():
    # S = x u v  (u-power 1): exp(S) coefficients are x^a / a! on the diagonal
    S = np.zeros((6, 6), complex)
    S[1, 1] = 0.7
    E = bivariate_exp(S)
    for a in range(6):
        assert E[a, a] == pytest.approx(0.7**a / math.factorial(a))
    assert np.allclose(bivariate_log1p(E - np.eye(6)[0:1].T @ np.eye(6)[0:1]), S)


def test_exp_transform_order_checked():
    with pytest.raises(PreconditionError):
        exp_transform(DoubleMomentTable(np.zeros((2, 2))), 3)


zs = st.builds(lambda r, th: r * cmath.exp(1j * th), st.floats(0, 0.6), st.floats(0, 2 * math.pi))


@settings(max_examples=40, deadline=None)
@given(zs, st.lists(st.floats(-1, 1), min_size=1, max_size=5))
def test_poly_tail_bound(z, c):
    if len(c) > 1 and c[-1] == 0:
        c[-1] = 1.0
    P = PolynomialModel(c)
    m = moments(P, 60)
    assert abs(I_poly(P, z) - I_series(m, z)) <= series_tail_bound(m, z) + 1e-12


@pytest.mark.parametrize("z", [5e-324, 2.2e-309, 1e-12 + 1e-12j, 3e-9j])
def test_closed_forms_at_subnormal_and_tiny_z(z):
    P = PolynomialModel((0.3, -1.2, 0.7, 2.0))
    R = RationalModel((0.4, 1.0), (1.25, -1.0, 1.0))
    S = SpikeTrain((0.25, 0.75), (1, 2))
    for model, closed in ((P, I_poly), (R, I_rational), (S, I_spikes)):
        assert abs(closed(model, z) - I_series(moments(model, 30), z)) <= 1e-15
