"""Moment inversion: moment data -> model parameters.

Every routine accepts an optional ``report`` dict which it fills with
diagnostics (condition estimates, residuals); the CLI prints these.
"""

from __future__ import annotations

import math
import warnings

import mpmath
import numpy as np

from . import forward
from .errors import (
    IllConditionedWarning,
    InvalidNodeError,
    ModelMismatchError,
    ModelMismatchWarning,
    NodeCollisionError,
    NotAPolygonError,
    NotAQuadratureDomainError,
    OrderingError,
    OrderOverestimateError,
    PoleInIntervalError,
    PreconditionError,
    ReconstructionInconsistentError,
    SingularMatrixError,
    ValidationError,
)
from .genfun import _shifted, bivariate_exp, exp_transform
from .linalg import hankel_solve, hilbert_matrix, min_singular_vector, poly_roots, solve
from .models import (
    ComplexMomentSequence,
    DefiningPolynomial,
    DoubleMomentTable,
    MomentSequence,
    Polygon,
    PolynomialModel,
    QuadratureData,
    RationalModel,
    SpikeTrain,
    davis_weights,
    trim,
)

ORDER_THRESHOLD = 1e-10


def _note(report, **items):
    if report is not None:
        report.update(items)


def roundtrip_residual(model, m) -> float:
    """max_k |forward(model)_k - m_k| / max_k |m_k| over the supplied moments."""
    K = len(m.values) - 1
    fwd = forward.moments(model, K)
    a = np.array([complex(v) for v in fwd.values])
    b = np.array([complex(v) for v in m.values])
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


# ---------------------------------------------------------------- polynomials


def invert_polynomial(m: MomentSequence, d: int, dps: int | None = None, tol: float = 1e-8,
                      report: dict | None = None) -> PolynomialModel:
    """Solve H a = (m_0..m_d) with the Hilbert-type matrix h_kj = 1/(j+k+1).

    Moments beyond m_d are used only to check the fit; a mismatch there
    raises a ModelMismatchWarning (the data likely come from a higher degree).
    """
    if d < 0:
        raise PreconditionError("degree must be >= 0")
    if len(m) < d + 1:
        raise PreconditionError(f"need {d + 1} moments, got {len(m)}")
    dps = dps if dps is not None else m.dps
    H = hilbert_matrix(d, dps)
    rhs = list(m.values[: d + 1])
    x, cond = solve(H, rhs, dps)
    coeffs = [float(v) for v in x]
    if d > 10:
        warnings.warn(f"degree {d} inversion is ill-conditioned (condition {cond:.3e})", IllConditionedWarning,
                      stacklevel=2)
    model = PolynomialModel(tuple(trim(coeffs)))
    residual = roundtrip_residual(model, m)
    _note(report, condition=cond, residual=residual)
    if len(m) > d + 1 and residual > tol:
        warnings.warn(f"round-trip residual {residual:.3e} on moments beyond m_{d}: data do not fit degree {d}",
                      ModelMismatchWarning, stacklevel=2)
    return model


# ---------------------------------------------------------------- Prony


def _prony_core(values, n: int, dps: int | None):
    """Nodes and weights of sum_i w_i z_i^k = values[k] (complex; mpmath when dps is set)."""
    if n < 1:
        raise PreconditionError("order must be >= 1")
    if len(values) < 2 * n:
        raise PreconditionError(f"need {2 * n} moments for order {n}, got {len(values)}")
    if dps is not None:
        # mpmath rounds every operation to the ambient precision
        with mpmath.workdps(dps):
            return _prony_steps([mpmath.mpmathify(v) for v in values], n, dps)
    return _prony_steps(list(values), n, None)


def _prony_steps(vals, n, dps):
    try:
        C, cond = hankel_solve(vals[: 2 * n - 1], vals[n: 2 * n], dps)
    except SingularMatrixError as exc:
        raise OrderOverestimateError(
            f"Hankel window of order {n} is singular (condition {exc.condition:.3e}); the model order is lower"
        ) from exc
    coeffs = [-c for c in C] + [1]
    nodes = poly_roots(coeffs, dps)
    if dps is not None:
        V = mpmath.matrix([[z**k for z in nodes] for k in range(n)])
    else:
        nodes = np.array(nodes, dtype=complex)
        V = nodes[None, :] ** np.arange(n)[:, None]
    try:
        w, _ = solve(V, vals[:n], dps)
    except SingularMatrixError as exc:
        raise NodeCollisionError("recovered nodes coincide (Vandermonde system is singular)") from exc
    nodes = np.array([complex(z) for z in nodes])
    weights = np.array([complex(v) for v in w])
    return nodes, weights, cond


def prony(m: MomentSequence, n: int, dps: int | None = None, tol: float = 1e-8,
          report: dict | None = None) -> SpikeTrain:
    """Recover n spikes from m_0..m_{2n-1}.

    The recurrence coefficients C_j of m_{r+n} = sum_j C_j m_{r+j} come from
    a Hankel solve, the nodes are the roots of t^n - sum_j C_j t^j, and the
    weights solve the Vandermonde system on m_0..m_{n-1}.
    """
    dps = dps if dps is not None else m.dps
    nodes, weights, cond = _prony_core(m.values, n, dps)
    if np.any(np.abs(nodes.imag) > tol * np.maximum(1.0, np.abs(nodes))):
        raise InvalidNodeError(f"non-real nodes recovered: {nodes}")
    x = nodes.real
    if np.any((x <= 0) | (x >= 1)):
        raise InvalidNodeError(f"nodes outside (0, 1): {np.sort(x)}")
    xs = np.sort(x)
    if n > 1 and np.min(np.diff(xs)) <= tol:
        raise NodeCollisionError(f"recovered nodes collide: {xs}")
    A = weights.real
    if np.any(np.abs(weights.imag) > tol * np.maximum(1.0, np.abs(weights))):
        raise InvalidNodeError("non-real weights recovered")
    model = SpikeTrain(tuple(x), tuple(A))
    _note(report, condition=cond, residual=roundtrip_residual(model, m))
    return model


def _hankel_full(values, n: int) -> np.ndarray:
    v = np.array([complex(x) for x in values[: 2 * n + 1]])
    idx = np.arange(n + 1)
    return v[idx[:, None] + idx[None, :]]


def estimate_order(m, n_max: int, threshold: float = ORDER_THRESHOLD):
    """Smallest n whose (n+1)x(n+1) Hankel matrix is numerically rank deficient.

    Rank deficiency means sigma_min / sigma_max < ``threshold`` (or an all-zero
    matrix).  Returns None when no n <= n_max qualifies.
    """
    if len(m.values) < 2 * n_max + 1:
        raise PreconditionError(f"need {2 * n_max + 1} moments for n_max = {n_max}")
    for n in range(n_max + 1):
        s = np.linalg.svd(_hankel_full(m.values, n), compute_uv=False)
        if s[0] == 0 or s[-1] / s[0] < threshold:
            return n
    return None


# ---------------------------------------------------------------- rational


def invert_rational(m: MomentSequence, d: int, tol: float = 1e-7, report: dict | None = None) -> RationalModel:
    """Solve sum_j h_kj a_j = sum_j m_{k+j} b_j, k = 0..2d, with b_d = 1, by least squares."""
    if d < 1:
        raise PreconditionError("rational degree must be >= 1")
    if len(m) < 3 * d + 1:
        raise PreconditionError(f"need {3 * d + 1} moments for degree {d}, got {len(m)}")
    mv = np.array([float(v) for v in m.values])
    k = np.arange(2 * d + 1)[:, None]
    j = np.arange(d)[None, :]
    A = np.hstack([1.0 / (k + j + 1.0), -mv[k + j]])
    rhs = mv[np.arange(2 * d + 1) + d]
    col = np.linalg.norm(A, axis=0)
    col[col == 0] = 1.0
    sol, *_ = np.linalg.lstsq(A / col, rhs, rcond=None)
    sol = sol / col
    cond = float(np.linalg.cond(A / col))
    a, b = sol[:d], sol[d:]
    model = RationalModel.unchecked(tuple(trim(list(a))), tuple(b) + (1.0,))
    poles = [v for v in model.violations() if v.startswith("pole")]
    if poles:
        raise PoleInIntervalError("; ".join(poles))
    try:
        model = RationalModel(model.numerator, model.denominator)
    except ValidationError as exc:
        raise ModelMismatchError(str(exc)) from exc
    residual = roundtrip_residual(model, m)
    system_residual = float(np.linalg.norm(A @ sol - rhs) / max(np.linalg.norm(rhs), 1e-300))
    _note(report, condition=cond, residual=residual, system_residual=system_residual)
    if residual > tol:
        raise ModelMismatchError(f"round-trip residual {residual:.3e} exceeds {tol:g}")
    return model


# ---------------------------------------------------------------- polygons


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return ((b - a).conjugate() * (c - a)).imag

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


def _is_simple(z) -> bool:
    n = len(z)
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            if _segments_cross(z[i], z[(i + 1) % n], z[j], z[(j + 1) % n]):
                return False
    return True


def invert_polygon(mu: ComplexMomentSequence, n: int, dps: int | None = None, tol: float = 1e-6,
                   report: dict | None = None):
    """Recover an n-gon from complex moments; returns (Polygon, recovered Davis weights).

    The shifted moments nu_k = k(k-1) mu_{k-2} (nu_0 = nu_1 = 0) equal
    sum_i a_i z_i^k, so a complex Prony step yields vertices and weights.
    Vertices are ordered counterclockwise by angle about their centroid and
    the recovered weights are checked against the closed-form Davis weights.
    """
    if len(mu) < 2 * n:
        raise PreconditionError(f"need {2 * n} complex moments for {n} vertices, got {len(mu)}")
    if n < 3:
        raise PreconditionError("a polygon needs at least 3 vertices")
    nu = [0j, 0j] + [k * (k - 1) * mu.values[k - 2] for k in range(2, len(mu) + 2)]
    z, a, cond = _prony_core(nu, n, dps)
    centroid = np.mean(z)
    order = np.argsort(np.angle(z - centroid))
    z, a = z[order], a[order]
    if not _is_simple(z):
        raise OrderingError("angular ordering gives a self-intersecting polygon")
    try:
        poly = Polygon(z)
    except ValidationError as exc:
        raise NotAPolygonError(str(exc)) from exc
    expected = davis_weights(z)
    mismatch = float(np.max(np.abs(expected - a)))
    _note(report, condition=cond, davis_mismatch=mismatch,
          residual=roundtrip_residual(poly, mu))
    if mismatch > tol:
        raise NotAPolygonError(f"recovered weights differ from Davis weights by {mismatch:.3e}")
    return poly, a


# ---------------------------------------------------------------- quadrature domains


def _two_sided_product(pstar, pbstar, F):
    """Coefficients of pstar(u) * pbstar(v) * F(u, v) truncated to F's shape."""
    A, B = F.shape
    tmp = np.array([np.convolve(pstar, F[:, b])[:A] for b in range(B)]).T
    return np.array([np.convolve(pbstar, tmp[a])[:B] for a in range(A)])


def defining_polynomial(t: DoubleMomentTable, p) -> np.ndarray:
    """q_kl such that q(z, wbar) = sum q_kl z^k wbar^l is the part of
    p(z) conj(p)(wbar) exp(-(1/pi) sum_{k,l<N} m_kl z^(-k-1) wbar^(-l-1))
    free of negative powers.
    """
    p = np.asarray(p, dtype=complex)
    N = len(p) - 1
    F = bivariate_exp(-_shifted(t.entries, N) / math.pi)
    pstar = p[::-1]  # p(z) = z^N pstar(1/z)
    G = _two_sided_product(pstar, np.conj(pstar), F)
    return G[::-1, ::-1]


def invert_quadrature_domain(t: DoubleMomentTable, N_max: int, interior_points=None,
                             threshold: float = ORDER_THRESHOLD, report: dict | None = None):
    """Reconstruct a quadrature domain from its double moments.

    Returns (nodes, DefiningPolynomial); the domain is {z : q(z, conj z) < 0}.
    The order N is the smallest with B_N = (b_kl)_{k,l<=N} numerically
    singular; p's coefficients solve sum_k alpha_k b_kl = 0 for every l.
    """
    if N_max < 1:
        raise PreconditionError("N_max must be >= 1")
    if min(t.shape) < N_max + 1:
        raise PreconditionError(f"table of shape {t.shape} does not cover 0..{N_max}")
    b = exp_transform(t, N_max + 1).coefficients
    N = None
    ratios = []
    for k in range(N_max + 1):
        s = np.linalg.svd(b[: k + 1, : k + 1], compute_uv=False)
        ratio = 0.0 if s[0] == 0 else float(s[-1] / s[0])
        ratios.append(ratio)
        if ratio < threshold:
            N = k
            break
    if N is None:
        raise NotAQuadratureDomainError(f"no singular B_N for N <= {N_max}")
    if N == 0:
        raise NotAQuadratureDomainError("b_00 vanishes: the domain has zero area")
    B = b[: N + 1, : N + 1]
    _, v = min_singular_vector(B.T)
    if abs(v[-1]) < 1e-12:
        raise ReconstructionInconsistentError("null vector has no z^N component")
    alpha = v / v[-1]
    alpha[-1] = 1.0
    q = defining_polynomial(t, alpha)
    try:
        dp = DefiningPolynomial(q, tuple(alpha))
    except ValidationError as exc:
        raise ReconstructionInconsistentError(str(exc)) from exc
    nodes = np.array(poly_roots(list(alpha)), dtype=complex)
    points = nodes if interior_points is None else np.atleast_1d(np.asarray(interior_points, dtype=complex))
    values = [dp(z) for z in points]
    _note(report, order=N, singular_ratios=ratios, interior_values=values)
    if any(v >= 0 for v in values):
        raise ReconstructionInconsistentError(f"q is not negative at interior points: {values}")
    return nodes, dp


def quadrature_nodes_from_complex_moments(mu: ComplexMomentSequence, m: int, dps: int | None = None,
                                          report: dict | None = None) -> QuadratureData:
    """Simple quadrature nodes and coefficients from mu_k = sum_i c_i z_i^k."""
    nodes, c, cond = _prony_core(mu.values, m, dps)
    _note(report, condition=cond)
    scale = max(1.0, float(np.max(np.abs(nodes))))
    for i in range(m):
        for j in range(i + 1, m):
            if abs(nodes[i] - nodes[j]) <= 1e-8 * scale:
                raise NodeCollisionError("recovered quadrature nodes coincide")
    return QuadratureData(tuple(nodes), (1,) * m, tuple((ci,) for ci in c))
