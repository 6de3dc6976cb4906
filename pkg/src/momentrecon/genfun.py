"""Moment generating functions and the bivariate exponential transform.

I(z) = sum_k m_k z^k = int_0^1 g(t) / (1 - z t) dt.  Closed forms are
provided for polynomials, rational functions with simple poles, and spike
trains.

For double moments the series is taken at infinity: with u = 1/z and
v = 1/conj(w),

    sum_kl m_kl u^(k+1) v^(l+1)

and the exponential transform coefficient b_kl multiplies u^(k+1) v^(l+1)
in 1 - exp(-(1/pi) * that series).
"""

from __future__ import annotations

import cmath
import math

import mpmath
import numpy as np

from .errors import DomainError, PreconditionError, UnsupportedMultiplicityError
from .models import (
    BivariateSeries,
    DoubleMomentTable,
    MomentSequence,
    PolynomialModel,
    RationalModel,
    SpikeTrain,
    polyval,
)


def I_series(m: MomentSequence, z: complex) -> complex:
    """Partial sum sum_{k<=K} m_k z^k."""
    return complex(polyval([complex(v) for v in m.values], complex(z)))


def _segment_log(alpha: complex) -> complex:
    """int_0^1 dt / (t - alpha) for alpha off [0, 1]."""
    return cmath.log(1 - alpha) - cmath.log(-alpha)


def _check_cut(z: complex):
    if z.imag == 0 and z.real >= 1:
        raise DomainError(f"z = {z} lies on the branch cut [1, inf)")


def I_poly(P: PolynomialModel, z: complex) -> complex:
    """I_P(z) = -(1/z) [ P(1/z) log(1 - z) + int_0^1 Ptilde(t) dt ],

    where P(t) = Ptilde(t) (t - 1/z) + P(1/z).  At z = 0 the value is m_0.
    For small |z| the two bracketed terms nearly cancel, so the expression
    is evaluated with enough extra digits to absorb |1/z|^deg.
    """
    z = complex(z)
    a = [float(c) for c in P.coefficients]
    if abs(z) < 1e-8:
        # short Taylor series: later terms fall below double precision
        return complex(sum(sum(c / (j + k + 1) for j, c in enumerate(a)) * z**k for k in range(4)))
    _check_cut(z)
    n = len(a) - 1
    lost = max(0.0, (n + 1) * math.log10(max(1.0, 1 / abs(z))))
    with mpmath.workdps(20 + int(lost)):
        zz = mpmath.mpc(z)
        w = 1 / zz
        # synthetic division of P by (t - w): quotient coefficients, low first
        quot = [mpmath.mpc(0)] * max(n, 0)
        carry = mpmath.mpc(0)
        for j in range(n, 0, -1):
            carry = carry * w + a[j]
            quot[j - 1] = carry
        Pw = carry * w + a[0] if n > 0 else mpmath.mpc(a[0])
        int_quot = mpmath.fsum(q / (j + 1) for j, q in enumerate(quot))
        val = -(1 / zz) * (Pw * mpmath.log(1 - zz) + int_quot)
        return complex(val)


def partial_fractions(R: RationalModel):
    """Poles alpha_i and residues A_i of R = sum A_i / (t - alpha_i); poles must be simple."""
    from .linalg import poly_roots

    den = list(R.denominator)
    roots = np.array(poly_roots(den), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(roots))))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= 1e-7 * scale:
                raise UnsupportedMultiplicityError("denominator has a repeated root")
    dden = np.polynomial.polynomial.polyder(den)
    residues = np.array([polyval(R.numerator, r) / polyval(dden, r) for r in roots])
    return roots, residues


def I_rational(R: RationalModel, z: complex) -> complex:
    """I_R(z) = sum_i A_i / (1 - alpha_i z) * [L(alpha_i) - L(1/z)],

    with L(a) = int_0^1 dt / (t - a).  At z = 0 the value is m_0 = sum_i A_i L(alpha_i).
    """
    z = complex(z)
    alphas, A = partial_fractions(R)
    if z == 0:
        return complex(sum(a * _segment_log(al) for a, al in zip(A, alphas)))
    _check_cut(z)
    Lw = cmath.log(1 - z)  # equals L(1/z) on the principal branch
    total = 0j
    for a, al in zip(A, alphas):
        d = 1 - al * z  # -w / (alpha - w) = 1 / d, written without 1/z
        if abs(d) <= 1e-14 * max(1.0, abs(al * z)):
            raise DomainError("1/z coincides with a pole of R")
        total += a / d * (_segment_log(al) - Lw)
    return total


def I_spikes(S: SpikeTrain, z: complex) -> complex:
    """sum_i A_i / (1 - z x_i)."""
    z = complex(z)
    total = 0j
    for x, a in zip(S.nodes, S.weights):
        d = 1 - z * x
        if abs(d) <= 1e-15:
            raise DomainError(f"z = {z} is a pole (1/x = {1 / x})")
        total += a / d
    return total


def series_tail_bound(m: MomentSequence, z: complex, C: float | None = None) -> float:
    """C |z|^(K+1) / (1 - |z|) with C a bound on moment magnitudes."""
    r = abs(z)
    if r >= 1:
        return math.inf
    if C is None:
        C = max(abs(float(v)) for v in m.values)
    return C * r ** len(m.values) / (1 - r)


# ------------------------------------------------------------ bivariate series


def _conv_trunc(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Product of two univariate coefficient vectors truncated to length n."""
    return np.convolve(a, b)[:n]


def bivariate_exp(S: np.ndarray) -> np.ndarray:
    """exp(S) truncated to the shape of S; S must have no u^0 terms (S[0, :] == 0).

    Uses u dE/du = (u dS/du) E row by row: a E_a = sum_{j=1..a} j S_j E_{a-j}
    where each E_a is a polynomial in v truncated to the column count.
    """
    S = np.asarray(S, dtype=complex)
    if np.any(S[0] != 0):
        raise PreconditionError("series must vanish at u = 0")
    A, B = S.shape
    E = np.zeros((A, B), dtype=complex)
    E[0, 0] = 1.0
    for a in range(1, A):
        acc = np.zeros(B, dtype=complex)
        for j in range(1, a + 1):
            acc += j * _conv_trunc(S[j], E[a - j], B)
        E[a] = acc / a
    return E


def bivariate_log1p(G: np.ndarray) -> np.ndarray:
    """log(1 + G) truncated; G must have no u^0 terms."""
    G = np.asarray(G, dtype=complex)
    if np.any(G[0] != 0):
        raise PreconditionError("series must vanish at u = 0")
    A, B = G.shape
    Lg = np.zeros((A, B), dtype=complex)
    # F = 1 + G,  u dL/du = (u dF/du) / F  ->  a L_a = a G_a - sum_{j<a} j L_j G_{a-j}
    for a in range(1, A):
        acc = a * G[a]
        for j in range(1, a):
            acc = acc - j * _conv_trunc(Lg[j], G[a - j], B)
        Lg[a] = acc / a
    return Lg


def _shifted(table: np.ndarray, N: int) -> np.ndarray:
    """Place m_kl (k, l < N) at u^(k+1) v^(l+1) in an (N+1)x(N+1) array."""
    S = np.zeros((N + 1, N + 1), dtype=complex)
    S[1:, 1:] = table[:N, :N]
    return S


def exp_transform(t: DoubleMomentTable, N: int) -> BivariateSeries:
    """Coefficients b_kl, 0 <= k, l < N, of 1 - exp(-(1/pi) sum m_kl u^(k+1) v^(l+1))."""
    if N < 1:
        raise PreconditionError("exp_transform order must be >= 1")
    e = t.entries
    if e.shape[0] < N or e.shape[1] < N:
        raise PreconditionError(f"table of shape {e.shape} does not cover indices 0..{N - 1}")
    E = bivariate_exp(-_shifted(e, N) / math.pi)
    return BivariateSeries(-E[1:, 1:])


def exp_transform_inverse(b: BivariateSeries) -> DoubleMomentTable:
    """Recover m_kl = coefficient of u^(k+1) v^(l+1) in -pi log(1 - B)."""
    c = b.coefficients
    n = min(c.shape)
    G = np.zeros((n + 1, n + 1), dtype=complex)
    G[1:, 1:] = -c[:n, :n]
    L = bivariate_log1p(G)
    return DoubleMomentTable(-math.pi * L[1:, 1:])
