"""Dense numerical kernels used by the inversion routines.

Every routine accepts real or complex data.  ``solve``, ``hankel_solve`` and
``poly_roots`` also run in extended precision when given ``dps`` (decimal
digits, via mpmath); the moment problems here are exponentially
ill-conditioned, so double precision runs out quickly.
"""

from __future__ import annotations

import math
import random

import mpmath
import numpy as np

from .errors import PreconditionError, SingularMatrixError

EPS = np.finfo(float).eps
SINGULAR_CONDITION = 1.0 / (100 * EPS)


def singular_threshold(dps: int | None = None) -> float:
    """Condition number above which a system counts as singular."""
    if dps is None:
        return SINGULAR_CONDITION
    return 1.0 / (100 * 10.0 ** (-dps))


def hilbert_matrix(d: int, dps: int | None = None):
    """(d+1)x(d+1) matrix h_kj = 1/(j+k+1)."""
    if dps is None:
        i = np.arange(d + 1)
        return 1.0 / (i[:, None] + i[None, :] + 1.0)
    with mpmath.workdps(dps):
        return mpmath.matrix([[mpmath.mpf(1) / (j + k + 1) for j in range(d + 1)] for k in range(d + 1)])


def _is_mp(a) -> bool:
    return isinstance(a, mpmath.matrix)


def solve(A, rhs, dps: int | None = None):
    """Solve A x = rhs; returns ``(x, condition_estimate)``.

    Raises SingularMatrixError when the condition estimate exceeds
    :func:`singular_threshold`.
    """
    if dps is not None or _is_mp(A):
        return _solve_mp(A, rhs, dps or mpmath.mp.dps)
    A = np.asarray(A)
    b = np.asarray(rhs)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError("solve needs a square matrix")
    if A.shape[0] != b.shape[0]:
        raise PreconditionError("right-hand side length does not match matrix")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        raise PreconditionError("non-finite entries")
    if not np.any(A):
        raise SingularMatrixError("zero matrix", math.inf)
    cond = float(np.linalg.cond(A))
    if not math.isfinite(cond) or cond > SINGULAR_CONDITION:
        raise SingularMatrixError("numerically singular system", cond)
    x = np.linalg.solve(A, b)
    # one step of iterative refinement
    x = x + np.linalg.solve(A, b - A @ x)
    return x, cond


def _solve_mp(A, rhs, dps):
    with mpmath.workdps(dps):
        A = mpmath.matrix(A)
        b = mpmath.matrix(rhs)
        if A.rows != A.cols:
            raise PreconditionError("solve needs a square matrix")
        if mpmath.mnorm(A, 1) == 0:
            raise SingularMatrixError("zero matrix", math.inf)
        try:
            inv = mpmath.inverse(A)
        except ZeroDivisionError:
            raise SingularMatrixError("numerically singular system", math.inf) from None
        cond = mpmath.mnorm(A, 1) * mpmath.mnorm(inv, 1)
        if cond > singular_threshold(dps):
            raise SingularMatrixError("numerically singular system", float(cond))
        x = mpmath.lu_solve(A, b)
        return x, float(cond)


def min_singular_vector(A):
    """Smallest singular value and a unit right singular vector attaining it.

    For wide matrices (more columns than rows) the smallest singular value
    is zero and ``v`` spans part of the null space.
    """
    A = np.atleast_2d(np.asarray(A))
    if A.size == 0:
        raise PreconditionError("empty matrix")
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    v = np.conj(vh[-1])
    sigma = 0.0 if A.shape[0] < A.shape[1] else float(s[-1])
    return sigma, v


def hankel_matrix(window, n: int):
    """n x n Hankel matrix H_ij = window[i+j] (needs 2n-1 entries)."""
    if len(window) < 2 * n - 1:
        raise PreconditionError(f"Hankel window needs {2 * n - 1} entries, got {len(window)}")
    if isinstance(window[0], (mpmath.mpf, mpmath.mpc)):
        return mpmath.matrix([[window[i + j] for j in range(n)] for i in range(n)])
    w = np.asarray(window)
    return w[np.arange(n)[:, None] + np.arange(n)[None, :]]


def hankel_solve(window, rhs, dps: int | None = None):
    """Solve the square Hankel system built from ``window``; returns (x, cond)."""
    n = len(rhs)
    H = hankel_matrix(list(window), n)
    if dps is not None and not _is_mp(H):
        with mpmath.workdps(dps):
            H = mpmath.matrix(H.tolist())
    return solve(H, rhs, dps)


# ---------------------------------------------------------------- roots


def _horner_with_derivative(coeffs, x):
    p = coeffs[-1]
    dp = 0
    for c in reversed(coeffs[:-1]):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def poly_roots(coeffs, dps: int | None = None, max_sweeps: int = 200, seed: int = 0):
    """All roots (with multiplicity) of sum_j c_j t^j by Aberth-Ehrlich iteration.

    Initial guesses sit on a circle of radius given by the Cauchy bound; on
    stagnation the iterate is randomly perturbed and the iteration restarts.
    In extended precision the roots are returned as ``mpmath.mpc``.
    """
    c = list(coeffs)
    if not c or c[-1] == 0:
        raise PreconditionError("leading coefficient is zero")
    if len(c) < 2:
        return []
    if dps is not None:
        with mpmath.workdps(dps + 10):
            return _aberth([mpmath.mpc(v) for v in c], mpmath.mpf(10) ** (-(dps + 5)), max_sweeps, seed,
                           mp=True)
    return _aberth([complex(v) for v in c], 1e-13, max_sweeps, seed, mp=False)


def _aberth(c, tol, max_sweeps, seed, mp):
    n = len(c) - 1
    lead = c[-1]
    monic = [v / lead for v in c]
    absf = (lambda v: mpmath.fabs(v)) if mp else abs
    radius = 1 + max(absf(v) for v in monic[:-1])
    # a tighter (Fujiwara-type) bound keeps the start circle near the roots
    fuji = 2 * max(absf(monic[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    radius = min(radius, fuji) if fuji > 0 else radius
    if radius == 0:
        return [monic[0] * 0 for _ in range(n)]
    rng = random.Random(seed)
    expi = (lambda t: mpmath.expj(t)) if mp else (lambda t: complex(math.cos(t), math.sin(t)))
    z = [radius * expi(2 * math.pi * k / n + 0.4) for k in range(n)]
    scale = max(1, radius)
    best = None
    for attempt in range(5):
        stagnant = 0
        last_step = None
        for _ in range(max_sweeps):
            step_max = 0
            for i in range(n):
                p, dp = _horner_with_derivative(monic, z[i])
                if p == 0:
                    continue
                ratio = p / dp if dp != 0 else None
                s = 0
                for j in range(n):
                    if j != i:
                        diff = z[i] - z[j]
                        if diff == 0:
                            diff = tol * scale
                        s += 1 / diff
                if ratio is None:
                    w = tol * scale
                else:
                    denom = 1 - ratio * s
                    w = ratio / denom if denom != 0 else ratio
                z[i] -= w
                step_max = max(step_max, absf(w))
            if step_max < tol * scale:
                return _polish(monic, z)
            if last_step is not None and step_max >= last_step:
                stagnant += 1
            else:
                stagnant = 0
            last_step = step_max
            if stagnant > 25:
                break
        best = list(z)
        z = [v + radius * 1e-3 * expi(2 * math.pi * rng.random()) for v in z]
    return _polish(monic, best)


def _polish(monic, z):
    out = []
    for v in z:
        p, dp = _horner_with_derivative(monic, v)
        if dp != 0:
            cand = v - p / dp
            pc, _ = _horner_with_derivative(monic, cand)
            if abs(pc) <= abs(p):
                v = cand
        out.append(v)
    return out


def min_eigenvalue_spd(A) -> float:
    """Smallest eigenvalue of a symmetric (Hermitian) matrix."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError("square matrix required")
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.conj().T)) > 1e-12 * scale:
        raise PreconditionError("matrix is not symmetric")
    return float(np.linalg.eigvalsh(A)[0])


def hilbert_lambda_min_asymptote(d: int) -> float:
    """K sqrt(d) rho^(-4(d+1)) with K = 8 pi sqrt(2 pi) 2^(1/4), rho = 1 + sqrt 2."""
    K = 8 * math.pi * math.sqrt(2 * math.pi) * 2 ** 0.25
    rho = 1 + math.sqrt(2)
    return K * math.sqrt(d) * rho ** (-4 * (d + 1))
