"""Benchmark suites and the random instance generators they share with tests.

Each suite yields one row per instance.  Instances draw from their own
``default_rng((seed, index))`` stream, so rows do not depend on order.
"""

from __future__ import annotations

import time

import mpmath
import numpy as np

from .forward import double_moments_domain, moments, moments_spikes
from .inversion import invert_polygon, invert_quadrature_domain, prony
from .linalg import hilbert_lambda_min_asymptote, hilbert_matrix
from .models import Disk, DiskUnion, Polygon, SpikeTrain

PRONY_DPS = 50


def random_spike_train(rng, n: int, min_sep: float = 0.05, weight_range=(0.5, 2.0)) -> SpikeTrain:
    """n nodes in (0.05, 0.95) pairwise at least ``min_sep`` apart; weights uniform in ``weight_range``."""
    while True:
        x = np.sort(rng.uniform(0.05, 0.95, n))
        if n == 1 or np.min(np.diff(x)) >= min_sep:
            break
    return SpikeTrain(tuple(x), tuple(rng.uniform(*weight_range, n)))


def random_convex_polygon(rng, n: int, min_turn: float = 0.3) -> Polygon:
    """CCW convex n-gon with vertices on a jittered circle; angular gaps at least ``min_turn``."""
    while True:
        theta = np.sort(rng.uniform(0, 2 * np.pi, n))
        gaps = np.diff(np.append(theta, theta[0] + 2 * np.pi))
        if np.min(gaps) >= min_turn and np.max(gaps) <= np.pi - min_turn:
            break
    radius = rng.uniform(0.5, 1.0)
    center = complex(*rng.uniform(-0.3, 0.3, 2))
    return Polygon(center + radius * np.exp(1j * theta))


def match_vertices(found, expected) -> float:
    """Max vertex distance after the best cyclic rotation."""
    found, expected = np.asarray(found), np.asarray(expected)
    if len(found) != len(expected):
        return float("inf")
    return min(float(np.max(np.abs(np.roll(found, s) - expected))) for s in range(len(found)))


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _prony_scaling(seed):
    for n in range(1, 9):
        rng = np.random.default_rng((seed, n))
        S = random_spike_train(rng, n)
        m = moments_spikes(S, 2 * n - 1, dps=PRONY_DPS)
        report = {}
        R, dt = _timed(lambda: prony(m, n, dps=PRONY_DPS, report=report))
        err = max(
            float(np.max(np.abs(np.array(R.nodes) - S.nodes) / np.abs(S.nodes))),
            float(np.max(np.abs(np.array(R.weights) - S.weights) / np.abs(S.weights))),
        )
        yield {"size": n, "residual": report["residual"], "param_error": err, "runtime_s": dt,
               "condition": report["condition"]}


def _hilbert_conditioning(seed):
    for d in range(3, 8):
        H = hilbert_matrix(d)
        w, dt = _timed(lambda: np.linalg.eigvalsh(H))
        lam = float(w[0])
        with mpmath.workdps(40):
            exact = min(mpmath.eigsy(hilbert_matrix(d, 40), eigvals_only=True))
            residual = float(abs(lam - exact) / exact)
        asym = hilbert_lambda_min_asymptote(d)
        yield {"size": d, "residual": residual, "runtime_s": dt, "condition": float(w[-1] / w[0]),
               "lambda_min": lam, "asymptote": asym, "ratio": lam / asym}


def _polygon_cases(seed):
    yield Polygon([0, 1, 1 + 1j, 1j])
    yield Polygon([0, 1, 1j])
    for i in range(20):
        rng = np.random.default_rng((seed, i))
        yield random_convex_polygon(rng, int(rng.integers(3, 7)))


def _polygon_roundtrip(seed):
    for poly in _polygon_cases(seed):
        n = poly.n
        mu = moments(poly, 2 * n - 1)
        report = {}
        (found, _), dt = _timed(lambda: invert_polygon(mu, n, report=report))
        yield {"size": n, "residual": match_vertices(found.vertices, poly.vertices), "runtime_s": dt,
               "condition": report["condition"]}


def _qdomain_roundtrip(seed):
    cases = [DiskUnion((Disk(0, R),)) for R in (0.5, 1.0, 2.0)]
    cases.append(DiskUnion((Disk(0.8, 0.3), Disk(-0.8, 0.3))))
    for dom in cases:
        t = double_moments_domain(dom, 4, 4)
        report = {}
        (nodes, dp), dt = _timed(lambda: invert_quadrature_domain(t, 3, report=report))
        centers = np.array([d.center for d in dom.disks])
        if len(dom.disks) == 1:
            R = dom.disks[0].radius
            target = np.array([[-R * R, 0], [0, 1]], dtype=complex)
            err = float(np.max(np.abs(dp.q - target))) if dp.q.shape == target.shape else float("inf")
        else:
            err = max(float(np.min(np.abs(nodes - c))) for c in centers)
        yield {"size": report["order"], "residual": err, "runtime_s": dt,
               "condition": 1.0 / report["singular_ratios"][-2] if len(report["singular_ratios"]) > 1 else 1.0}


SUITES = {
    "prony-scaling": (_prony_scaling, ("size", "residual", "param_error", "runtime_s", "condition")),
    "hilbert-conditioning": (
        _hilbert_conditioning,
        ("size", "residual", "runtime_s", "condition", "lambda_min", "asymptote", "ratio"),
    ),
    "polygon-roundtrip": (_polygon_roundtrip, ("size", "residual", "runtime_s", "condition")),
    "qdomain-roundtrip": (_qdomain_roundtrip, ("size", "residual", "runtime_s", "condition")),
}


def run_suite(name: str, seed: int = 0):
    """(column names, list of row dicts) for a named suite; KeyError if unknown."""
    fn, columns = SUITES[name]
    return columns, list(fn(seed))


def format_table(columns, rows) -> str:
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join(str(row[c]) if isinstance(row[c], int) else repr(float(row[c])) for c in columns))
    return "\n".join(lines) + "\n"

