"""Forward moment transforms: model -> moment data.

Closed forms where they exist, Gauss-Legendre with an exactness-guaranteeing
node count for polynomial integrands, and adaptive Gauss-Legendre bisection
for rational integrands.  These results are the oracles the inversion tests
are measured against, so they are kept as exact as floating point allows.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb, pi

import mpmath
import numpy as np

from .errors import PreconditionError, ValidationError
from .models import (
    ComplexMomentSequence,
    Disk,
    DiskUnion,
    DoubleMomentTable,
    MomentSequence,
    ParamCurve,
    PiecewisePoly,
    PolynomialModel,
    Polygon,
    RationalModel,
    SpikeTrain,
)


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    """Nodes and weights on [0, 1]; exact for polynomials of degree <= 2n-1."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_nodes_for_degree(deg: int) -> int:
    return deg // 2 + 1


def moments_polynomial(P: PolynomialModel, K: int, dps: int | None = None) -> MomentSequence:
    """m_k = sum_j a_j / (j + k + 1), k = 0..K."""
    _check_order(K)
    a = P.coefficients
    if dps is not None:
        with mpmath.workdps(dps):
            vals = tuple(
                mpmath.fsum(mpmath.mpf(aj) / (j + k + 1) for j, aj in enumerate(a)) for k in range(K + 1)
            )
        return MomentSequence(vals, dps=dps)
    vals = [float(np.sum(np.array(a) / (np.arange(len(a)) + k + 1.0))) for k in range(K + 1)]
    return MomentSequence(tuple(vals))


def moments_spikes(S: SpikeTrain, K: int, dps: int | None = None) -> MomentSequence:
    """m_k = sum_i A_i x_i^k."""
    _check_order(K)
    if dps is not None:
        with mpmath.workdps(dps):
            x = [mpmath.mpf(v) for v in S.nodes]
            A = [mpmath.mpf(v) for v in S.weights]
            vals = tuple(mpmath.fsum(a * xi**k for a, xi in zip(A, x)) for k in range(K + 1))
        return MomentSequence(vals, dps=dps)
    x = np.array(S.nodes)
    A = np.array(S.weights)
    return MomentSequence(tuple(float(np.sum(A * x**k)) for k in range(K + 1)))


def _gl_vector(f, a, b, n):
    x, w = gauss_legendre(n)
    t = a + (b - a) * x
    return (b - a) * (f(t) @ w)


def adaptive_moments(f, K: int, a: float = 0.0, b: float = 1.0, tol: float = 1e-12, n: int = 16,
                     max_depth: int = 40):
    """Integrals of t^k f(t) over [a, b] for k = 0..K by adaptive bisection.

    Each panel compares an n-point against a 2n-point Gauss-Legendre rule
    and is split until the two agree to ``tol`` relative to the running
    total magnitude.
    """
    powers = np.arange(K + 1)[:, None]

    def integrand(t):
        return t[None, :] ** powers * f(t)[None, :]

    whole_coarse = _gl_vector(integrand, a, b, n)
    scale = max(np.max(np.abs(whole_coarse)), 1e-300)
    total = np.zeros(K + 1)
    stack = [(a, b, whole_coarse, 0)]
    while stack:
        lo, hi, coarse, depth = stack.pop()
        fine = _gl_vector(integrand, lo, hi, 2 * n)
        if np.max(np.abs(fine - coarse)) <= tol * scale * 1e-2 or depth >= max_depth:
            total += fine
            continue
        mid = 0.5 * (lo + hi)
        stack.append((lo, mid, _gl_vector(integrand, lo, mid, n), depth + 1))
        stack.append((mid, hi, _gl_vector(integrand, mid, hi, n), depth + 1))
    return total


def moments_rational(R: RationalModel, K: int) -> MomentSequence:
    """m_k = int_0^1 x^k R(x) dx by adaptive Gauss-Legendre quadrature."""
    _check_order(K)
    problems = R.violations()
    if problems:
        raise ValidationError(problems)
    num = np.array(R.numerator)
    den = np.array(R.denominator)

    def f(t):
        return np.polynomial.polynomial.polyval(t, num) / np.polynomial.polynomial.polyval(t, den)

    return MomentSequence(tuple(float(v) for v in adaptive_moments(f, K)))


def _antiderivative_moments(coeffs, lo, hi, K):
    """int_lo^hi x^k q(x) dx for k = 0..K, closed form."""
    out = np.zeros(K + 1)
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        e = np.arange(K + 1) + j + 1.0
        out += c * (hi**e - lo**e) / e
    return out


def moments_piecewise(g: PiecewisePoly, K: int) -> MomentSequence:
    _check_order(K)
    b = g.breakpoints
    total = np.zeros(K + 1)
    for q, piece in enumerate(g.pieces):
        total += _antiderivative_moments(piece, b[q], b[q + 1], K)
    return MomentSequence(tuple(float(v) for v in total))


def moments_curve(c: ParamCurve, K: int, L: int) -> DoubleMomentTable:
    """m_kl = int_a^b P^k Q^l P' dt for k <= K, l <= L (Gauss-Legendre, exact degree)."""
    _check_order(K)
    _check_order(L)
    P = np.polynomial.Polynomial(c.P)
    Q = np.polynomial.Polynomial(c.Q)
    dP = P.deriv()
    deg = K * P.degree() + L * Q.degree() + dP.degree()
    n = gauss_nodes_for_degree(deg) + 1
    a, b = c.interval
    x, w = gauss_legendre(n)
    t = a + (b - a) * x
    w = (b - a) * w
    Pt, Qt, dPt = P(t), Q(t), dP(t)
    Pk = Pt[None, :] ** np.arange(K + 1)[:, None]
    Ql = Qt[None, :] ** np.arange(L + 1)[:, None]
    table = np.einsum("kn,ln,n->kl", Pk, Ql, dPt * w)
    return DoubleMomentTable(table.astype(complex))


def complex_moments_polygon(poly: Polygon, K: int) -> ComplexMomentSequence:
    """mu_k = iint_P z^k dA via  (i / (2(k+1))) * contour integral of z^(k+1) d(conj z).

    Along an edge from z_a to z_b the contour integral is
    conj(d)/d * (z_b^(k+2) - z_a^(k+2)) / (k+2), d = z_b - z_a.
    """
    _check_order(K)
    z = poly.vertices
    zb = np.roll(z, -1)
    d = zb - z
    rot = np.conj(d) / d
    out = []
    for k in range(K + 1):
        edge = rot * (zb ** (k + 2) - z ** (k + 2)) / (k + 2)
        out.append(0.5j * np.sum(edge) / (k + 1))
    return ComplexMomentSequence(tuple(out))


def _disk_double_moments(disk: Disk, K: int, L: int) -> np.ndarray:
    c, R = disk.center, disk.radius
    cb = np.conj(c)
    # polar moments of the centred disk: iint |zeta|^(2a) = pi R^(2a+2) / (a+1)
    polar = [pi * R ** (2 * a + 2) / (a + 1) for a in range(min(K, L) + 1)]
    out = np.zeros((K + 1, L + 1), dtype=complex)
    for k in range(K + 1):
        for l in range(L + 1):
            out[k, l] = sum(
                comb(k, a) * comb(l, a) * c ** (k - a) * cb ** (l - a) * polar[a] for a in range(min(k, l) + 1)
            )
    return out


def _polygon_double_moments(poly: Polygon, K: int, L: int) -> np.ndarray:
    """iint z^k conj(z)^l dA = (i / 2) * contour integral of z^(k+1) conj(z)^l / (k+1) d(conj z)."""
    z = poly.vertices
    d = np.roll(z, -1) - z
    n = gauss_nodes_for_degree(K + L + 1) + 1
    x, w = gauss_legendre(n)
    pts = z[:, None] + d[:, None] * x[None, :]           # edges x nodes
    weights = (np.conj(d)[:, None] * w[None, :]).ravel()  # d(conj z) = conj(d) dt
    pts = pts.ravel()
    zk = pts[None, :] ** (np.arange(K + 1) + 1)[:, None] / (np.arange(K + 1) + 1)[:, None]
    zl = np.conj(pts)[None, :] ** np.arange(L + 1)[:, None]
    return 0.5j * np.einsum("kn,ln,n->kl", zk, zl, weights)


def double_moments_domain(domain, K: int, L: int) -> DoubleMomentTable:
    """iint z^k conj(z)^l dA over a disk, a union of disjoint disks, or a polygon."""
    _check_order(K)
    _check_order(L)
    if isinstance(domain, Disk):
        return DoubleMomentTable(_disk_double_moments(domain, K, L))
    if isinstance(domain, DiskUnion):
        problems = domain.violations()
        if problems:
            raise ValidationError(problems)
        return DoubleMomentTable(sum(_disk_double_moments(d, K, L) for d in domain.disks))
    if isinstance(domain, Polygon):
        return DoubleMomentTable(_polygon_double_moments(domain, K, L))
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def moments(model, K: int, L: int | None = None, dps: int | None = None):
    """Dispatch to the forward transform matching ``model``'s type."""
    if isinstance(model, PolynomialModel):
        return moments_polynomial(model, K, dps)
    if isinstance(model, SpikeTrain):
        return moments_spikes(model, K, dps)
    if isinstance(model, RationalModel):
        return moments_rational(model, K)
    if isinstance(model, PiecewisePoly):
        return moments_piecewise(model, K)
    if isinstance(model, ParamCurve):
        return moments_curve(model, K, 1 if L is None else L)
    if isinstance(model, Polygon):
        return complex_moments_polygon(model, K)
    if isinstance(model, (Disk, DiskUnion)):
        return double_moments_domain(model, K, K if L is None else L)
    raise TypeError(f"no forward transform for {type(model).__name__}")


def _check_order(K):
    if int(K) != K or K < 0:
        raise PreconditionError(f"moment order must be a non-negative integer, got {K}")
