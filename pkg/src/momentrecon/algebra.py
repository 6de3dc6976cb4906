"""Polynomial composition, curve-moment vanishing, and sign-change certificates.

Polynomials are coefficient sequences, lowest degree first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PreconditionError
from .forward import moments_curve
from .models import ParamCurve, PiecewisePoly, polyval, trim


def _arr(p) -> np.ndarray:
    return np.array(trim([float(c) for c in p]) or [0.0])


def _norm1(p) -> float:
    return float(np.sum(np.abs(p)))


def compose(outer, inner) -> np.ndarray:
    """Coefficients of outer(inner(x)) by Horner's scheme."""
    outer, inner = _arr(outer), _arr(inner)
    acc = np.array([outer[-1]])
    for c in outer[-2::-1]:
        acc = npoly.polyadd(npoly.polymul(acc, inner), [c])
    return _arr(acc)


def _close(a, b, rtol) -> bool:
    a, b = _arr(a), _arr(b)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    return float(np.max(np.abs(a - b))) <= rtol * max(_norm1(b), 1e-300)


def _root_series(g, alpha, n):
    """First n coefficients of g(y)^alpha for a power series with g[0] = 1."""
    f = np.zeros(n)
    f[0] = 1.0
    for k in range(1, n):
        s = 0.0
        for j in range(1, min(k, len(g) - 1) + 1):
            s += ((alpha + 1) * j - k) * g[j] * f[k - j]
        f[k] = s / k
    return f


def expand_in(P, W, rtol: float = 1e-10):
    """Coefficients c_i with P = sum_i c_i W^i, or None if P is not a polynomial in W."""
    P, W = _arr(P), _arr(W)
    e = len(W) - 1
    if e < 1:
        raise PreconditionError("W must be nonconstant")
    tol = rtol * max(_norm1(P), 1e-300)
    rest = P
    out = []
    while len(rest) - 1 >= e:
        quo, rem = npoly.polydiv(rest, W)
        rem = np.atleast_1d(rem)
        if np.any(np.abs(rem[1:]) > tol):
            return None
        out.append(float(rem[0]))
        rest = _arr(quo)
    if np.any(np.abs(rest[1:]) > tol):
        return None
    out.append(float(rest[0]))
    return _arr(out)


def decompose(P, e: int, rtol: float = 1e-10):
    """Find (P_outer, W) with P = P_outer o W, deg W = e, W monic and W(0) = 0.

    W is determined by its top coefficients: the reversed polynomial of
    P / lead equals (reversed W)^r up to order y^e, with r = deg P / e, so W
    comes from a truncated r-th root power series.  Returns None when no
    such decomposition exists.
    """
    P = _arr(P)
    n = len(P) - 1
    if not (1 < e < n) or n % e:
        raise PreconditionError(f"inner degree {e} must divide deg P = {n} with 1 < e < deg P")
    r = n // e
    lead = P[-1]
    rev = (P / lead)[::-1]
    wrev = _root_series(rev, 1.0 / r, e)
    W = np.zeros(e + 1)
    W[1:] = wrev[::-1][:e]  # W(0) = 0, monic
    W[e] = 1.0
    outer = expand_in(P, W, rtol)
    if outer is None or not _close(compose(outer, W), P, rtol):
        return None
    return outer, W


@dataclass(frozen=True, eq=False)
class CompositionCertificate:
    """P = P_outer o W and Q = Q_outer o W with W(a) = W(b)."""

    W: np.ndarray
    P_outer: np.ndarray
    Q_outer: np.ndarray
    normalization: float = 0.0


def _divisors(n):
    return [e for e in range(2, n + 1) if n % e == 0]


def check_composition_condition(c: ParamCurve, rtol: float = 1e-10):
    """Search single-factor certificates W with W(a) = W(b); None if none found.

    Candidate inner degrees are the divisors e >= 2 of deg P; for e = deg P
    the candidate is P itself (monic, shifted to vanish at a).
    """
    P = _arr(c.P)
    Q = _arr(c.Q)
    a, b = c.interval
    n = len(P) - 1
    for e in _divisors(n):
        if e == n:
            W = np.concatenate([[0.0], P[1:]]) / P[-1]
            P_outer = np.array([P[0], P[-1]])
        else:
            found = decompose(P, e, rtol)
            if found is None:
                continue
            P_outer, W = found
        Wa, Wb = polyval(W, a), polyval(W, b)
        W = np.array(W, dtype=float)
        W[0] -= Wa  # normalize W(a) = 0; P_outer shifts accordingly
        P_outer = compose(P_outer, [Wa, 1.0])
        if abs(Wb - Wa) > rtol * _norm1(W):
            continue
        Q_outer = expand_in(Q, W, rtol) if len(Q) > 1 else Q
        if Q_outer is None or not _close(compose(Q_outer, W), Q, rtol):
            continue
        if not _close(compose(P_outer, W), P, rtol):
            continue
        return CompositionCertificate(W, _arr(P_outer), _arr(Q_outer), 0.0)
    return None


def curve_moments(c: ParamCurve, M: int) -> np.ndarray:
    """m_k = int_a^b P^k Q P' dt, k = 0..M."""
    return moments_curve(c, M, 1).entries[:, 1].real


def vanishing_test(c: ParamCurve, M: int, tol: float = 1e-10) -> bool:
    """True iff every |m_k|, k <= M, is at most tol * max(1, |Q|_1 |P'|_1)."""
    if M < 1:
        raise PreconditionError("M must be >= 1")
    m = curve_moments(c, M)
    scale = max(1.0, _norm1(c.Q) * _norm1(npoly.polyder(c.P)))
    return bool(np.max(np.abs(m)) <= tol * scale)


# ---------------------------------------------------------------- piecewise functions


def piece_degree(piece) -> int:
    t = trim(piece)
    return 0 if len(t) == 1 else len(t) - 1


def sigma(g: PiecewisePoly) -> int:
    """Combinatorial complexity: sum of piece degrees plus interior breakpoints."""
    return sum(piece_degree(p) for p in g.pieces) + g.r


def kappa(d: int) -> int:
    """2d (eta(d, d) + 1) with eta(d1, d2) = d1 + d2."""
    return 2 * d * (2 * d + 1)


def _sign_pattern(g: PiecewisePoly, tol: float = 1e-12):
    """(subinterval endpoints, signs) on a partition refined by every piece root."""
    cells = []
    for q, piece in enumerate(g.pieces):
        lo, hi = g.breakpoints[q], g.breakpoints[q + 1]
        p = _arr(piece)
        cuts = [lo, hi]
        if len(p) > 1 and np.any(p != 0):
            for r in npoly.polyroots(p):
                if abs(r.imag) <= 1e-9 and lo < r.real < hi:
                    cuts.append(float(r.real))
        cuts = sorted(set(cuts))
        scale = _norm1(p)
        for x0, x1 in zip(cuts, cuts[1:]):
            v = polyval(p, 0.5 * (x0 + x1))
            s = 0 if abs(v) <= tol * max(scale, 1e-300) else (1 if v > 0 else -1)
            cells.append((x0, x1, s))
    return cells


def _sign_changes_with_points(g: PiecewisePoly):
    cells = [c for c in _sign_pattern(g) if c[2] != 0]
    if not cells:
        raise PreconditionError("g is identically zero")
    points = []
    for prev, cur in zip(cells, cells[1:]):
        if prev[2] != cur[2]:
            points.append(prev[1])
    return points, cells[0]


def sign_changes(g: PiecewisePoly) -> int:
    """Number of sign alternations of g on [0, 1], skipping zero stretches."""
    return len(_sign_changes_with_points(g)[0])


def moment_certificate(g: PiecewisePoly):
    """Polynomial Q = +-prod (x - t_i) over the sign-change points with g Q >= 0.

    Returns (Q, int_0^1 g Q dx); the integral is a combination of the moments
    m_0..m_l of g and is strictly positive, so one of them is nonzero.
    """
    points, first = _sign_changes_with_points(g)
    Q = npoly.polyfromroots(points) if points else np.array([1.0])
    x0, x1, s = first
    if np.sign(polyval(Q, 0.5 * (x0 + x1))) != s:
        Q = -Q
    value = 0.0
    for q, piece in enumerate(g.pieces):
        lo, hi = g.breakpoints[q], g.breakpoints[q + 1]
        prod = npoly.polyint(npoly.polymul(_arr(piece), Q))
        value += polyval(prod, hi) - polyval(prod, lo)
    return np.array(Q, dtype=float), float(value)
