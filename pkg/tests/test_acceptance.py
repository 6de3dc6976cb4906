"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances and runtime limits are the stated ones; nothing is relaxed.
Seeds are fixed so every run checks the same instances.
"""

from __future__ import annotations

import cmath
import math
import time

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import linear_sum_assignment

from momentrecon.algebra import (
    check_composition_condition,
    compose,
    kappa,
    moment_certificate,
    sigma,
    sign_changes,
    vanishing_test,
)
from momentrecon.bench import random_convex_polygon, random_spike_train
from momentrecon.forward import (
    double_moments_domain,
    moments,
    moments_piecewise,
    moments_polynomial,
    moments_rational,
    moments_spikes,
)
from momentrecon.genfun import I_poly, I_rational, I_series, I_spikes, series_tail_bound
from momentrecon.inversion import invert_polygon, invert_polynomial, invert_quadrature_domain, invert_rational, prony
from momentrecon.linalg import hilbert_lambda_min_asymptote, hilbert_matrix, min_eigenvalue_spd
from momentrecon.models import (
    Disk,
    DiskUnion,
    ParamCurve,
    PiecewisePoly,
    Polygon,
    PolynomialModel,
    RationalModel,
)

# extended precision for the exponentially ill-conditioned 1D systems
PRONY_DPS = 50
POLY_DPS = 40


def test_criterion_1_prony_roundtrip(criterion):
    rng = np.random.default_rng(101)
    worst = 0.0
    t0 = time.perf_counter()
    for n in range(1, 9):
        S = random_spike_train(rng, n, min_sep=0.05, weight_range=(0.5, 2.0))
        R = prony(moments_spikes(S, 2 * n - 1, dps=PRONY_DPS), n, dps=PRONY_DPS)
        x, A = np.array(S.nodes), np.array(S.weights)
        worst = max(worst, float(np.max(np.abs(np.array(R.nodes) - x) / np.abs(x))),
                    float(np.max(np.abs(np.array(R.weights) - A) / np.abs(A))))
    dt = time.perf_counter() - t0
    ok = worst < 1e-8 and dt < 1.0
    assert criterion(1, "Prony round trip n=1..8", ok, f"max rel error {worst:.2e} (< 1e-8), {dt:.3f} s (< 1 s)")


def test_criterion_2_polynomial_inversion(criterion):
    rng = np.random.default_rng(202)
    worst = 0.0
    t0 = time.perf_counter()
    for d in range(0, 9):
        a = rng.uniform(-1, 1, d + 1)
        P = invert_polynomial(moments_polynomial(PolynomialModel(a), d, dps=POLY_DPS), d, dps=POLY_DPS)
        got = np.zeros(d + 1)
        got[: len(P.coefficients)] = P.coefficients
        worst = max(worst, float(np.max(np.abs(got - a))))
    dt = time.perf_counter() - t0
    ok = worst < 1e-7 and dt < 1.0
    assert criterion(2, "polynomial inversion d=0..8", ok, f"max coeff error {worst:.2e} (< 1e-7), {dt:.3f} s (< 1 s)")


def test_criterion_3_hilbert_conditioning(criterion):
    t0 = time.perf_counter()
    ratios = {d: min_eigenvalue_spd(hilbert_matrix(d)) / hilbert_lambda_min_asymptote(d) for d in range(3, 8)}
    anchor = min_eigenvalue_spd(hilbert_matrix(4))
    dt = time.perf_counter() - t0
    ok = (all(1 / 1.5 <= r <= 1.5 for r in ratios.values()) and abs(anchor - 3.2879e-6) < 1e-9 and dt < 1.0)
    detail = (f"ratios {min(ratios.values()):.4f}..{max(ratios.values()):.4f} (within factor 1.5), "
              f"lambda_min(d=4) = {anchor:.4e}, {dt:.3f} s (< 1 s)")
    assert criterion(3, "Hilbert lambda_min asymptote d=3..7", ok, detail)


def _random_denominator(rng, d):
    """Monic real polynomial of degree d with every root outside [-0.2, 1.2]."""
    roots = []
    while len(roots) < d:
        if d - len(roots) >= 2 and rng.random() < 0.5:
            z = complex(rng.uniform(-1, 2), rng.choice([-1, 1]) * rng.uniform(0.3, 1.5))
            roots += [z, z.conjugate()]
        else:
            roots.append(rng.choice([rng.uniform(-3, -0.2), rng.uniform(1.2, 3)]))
    return tuple(np.real(npoly.polyfromroots(roots)))


def test_criterion_4_rational_inversion(criterion):
    rng = np.random.default_rng(404)
    worst = 0.0
    t0 = time.perf_counter()
    for d in range(1, 4):
        for _ in range(3):
            R = RationalModel(tuple(rng.uniform(-1, 1, d)), _random_denominator(rng, d))
            m = moments_rational(R, 3 * d)
            found = invert_rational(m, d)
            a, b = moments(found, 3 * d).as_array(), m.as_array()
            worst = max(worst, float(np.max(np.abs(a - b)) / np.max(np.abs(b))))
    dt = time.perf_counter() - t0
    ok = worst < 1e-7 and dt < 2.0
    assert criterion(4, "rational inversion d=1..3", ok, f"max rel moment mismatch {worst:.2e} (< 1e-7), {dt:.3f} s (< 2 s)")


def test_criterion_5_polygon_roundtrip(criterion):
    rng = np.random.default_rng(505)
    polys = [Polygon([0, 1, 1 + 1j, 1j]), Polygon([0, 1, 1j])]
    polys += [random_convex_polygon(rng, int(rng.integers(3, 7))) for _ in range(20)]
    vert_err = sum_a = sum_az = max_a = 0.0
    t0 = time.perf_counter()
    for poly in polys:
        found, a = invert_polygon(moments(poly, 2 * poly.n - 1), poly.n)
        cost = np.abs(found.vertices[:, None] - poly.vertices[None, :])
        rows, cols = linear_sum_assignment(cost)
        vert_err = max(vert_err, float(cost[rows, cols].max()))
        sum_a = max(sum_a, abs(a.sum()))
        sum_az = max(sum_az, abs((a * found.vertices).sum()))
        max_a = max(max_a, float(np.max(np.abs(a))))
    dt = time.perf_counter() - t0
    ok = vert_err < 1e-6 and sum_a < 1e-10 and sum_az < 1e-10 and max_a <= 1 + 1e-10 and dt < 3.0
    detail = (f"vertex error {vert_err:.2e} (< 1e-6), |sum a| {sum_a:.1e}, |sum a z| {sum_az:.1e} (< 1e-10), "
              f"max |a| {max_a:.12f} (<= 1+1e-10), {dt:.3f} s (< 3 s)")
    assert criterion(5, "polygon round trip (22 polygons)", ok, detail)


def test_criterion_6_quadrature_domains(criterion):
    t0 = time.perf_counter()
    disk_err = 0.0
    disk_orders = []
    for R in (0.5, 1.0, 2.0):
        report = {}
        _, dp = invert_quadrature_domain(double_moments_domain(Disk(0, R), 4, 4), 3, report=report)
        disk_orders.append(report["order"])
        target_q = np.array([[-R * R, 0], [0, 1]])
        q_err = float(np.max(np.abs(dp.q - target_q))) if dp.q.shape == target_q.shape else math.inf
        p_err = float(np.max(np.abs(np.array(dp.p) - [0, 1]))) if len(dp.p) == 2 else math.inf
        disk_err = max(disk_err, q_err, p_err)
    report = {}
    centers = np.array([0.8, -0.8], dtype=complex)
    nodes, _ = invert_quadrature_domain(
        double_moments_domain(DiskUnion(tuple(Disk(c, 0.3) for c in centers)), 4, 4), 3, report=report)
    node_err = max(float(np.min(np.abs(nodes - c))) for c in centers) if len(nodes) == 2 else math.inf
    dt = time.perf_counter() - t0
    ok = disk_orders == [1, 1, 1] and disk_err < 1e-8 and report["order"] == 2 and node_err < 1e-5 and dt < 2.0
    detail = (f"disks N={disk_orders}, coefficient error {disk_err:.1e} (< 1e-8); two disks N={report['order']}, "
              f"node error {node_err:.1e} (< 1e-5), {dt:.3f} s (< 2 s)")
    assert criterion(6, "quadrature domain reconstruction", ok, detail)


def _composition_pair(rng):
    e = int(rng.integers(2, 5))
    R = rng.uniform(-1, 1, e - 1)
    if abs(R[-1]) < 0.2:
        R[-1] = 0.5
    W = npoly.polymul([0, -1, 1], R)  # W(0) = W(1)
    W[0] += rng.uniform(-1, 1)
    Pt = rng.uniform(-1, 1, int(rng.integers(2, 5)))
    Qt = rng.uniform(-1, 1, int(rng.integers(1, 5)))
    return ParamCurve(compose(Pt, W), compose(Qt, W))


def _non_composition_pair(rng):
    while True:
        c = ParamCurve(tuple(rng.uniform(-1, 1, int(rng.integers(2, 5)))), tuple(rng.uniform(-1, 1, int(rng.integers(1, 5)))))
        if abs(moments(c, 0, 1).entries[0, 1]) > 1e-3:
            return c


def test_criterion_7_moment_vanishing(criterion):
    rng = np.random.default_rng(707)
    t0 = time.perf_counter()
    comp = [_composition_pair(rng) for _ in range(50)]
    non = [_non_composition_pair(rng) for _ in range(50)]
    vanish_ok = sum(vanishing_test(c, 15, 1e-10) for c in comp)
    reject_ok = sum(not vanishing_test(c, 15, 1e-10) for c in non)
    certs = sum(check_composition_condition(c) is not None for c in comp)
    dt = time.perf_counter() - t0
    ok = vanish_ok == 50 and reject_ok == 50 and certs == 50 and dt < 3.0
    detail = f"vanish {vanish_ok}/50, rejected {reject_ok}/50, certificates {certs}/50, {dt:.3f} s (< 3 s)"
    assert criterion(7, "moment vanishing and composition certificates", ok, detail)


def _random_piecewise(rng, max_sigma):
    while True:
        r = int(rng.integers(0, max_sigma + 1))
        budget = max_sigma - r
        degs = np.zeros(r + 1, dtype=int)
        for _ in range(int(rng.integers(0, budget + 1))):
            degs[rng.integers(0, r + 1)] += 1
        bps = np.sort(rng.uniform(0.02, 0.98, r))
        if r and np.min(np.diff(np.r_[0.0, bps, 1.0])) < 0.01:
            continue
        pieces = tuple(tuple(rng.uniform(-1, 1, d + 1)) for d in degs)
        return PiecewisePoly(tuple(np.r_[0.0, bps, 1.0]), pieces)


def test_criterion_8_uniqueness(criterion):
    rng = np.random.default_rng(808)
    K = kappa(4)
    t0 = time.perf_counter()
    min_gap = math.inf
    cert_ok = bound_ok = 0
    for i in range(200):
        f = _random_piecewise(rng, 4)
        if i % 2:
            g = _random_piecewise(rng, 4)
        else:
            # a near neighbour: same partition, one coefficient nudged
            pieces = [list(p) for p in f.pieces]
            q = int(rng.integers(0, len(pieces)))
            pieces[q][int(rng.integers(0, len(pieces[q])))] += rng.choice([-1, 1]) * 1e-3
            g = PiecewisePoly(f.breakpoints, tuple(tuple(p) for p in pieces))
        assert sigma(f) <= 4 and sigma(g) <= 4
        gap = float(np.max(np.abs(moments_piecewise(f, K).as_array() - moments_piecewise(g, K).as_array())))
        min_gap = min(min_gap, gap)
        h = f - g
        _, value = moment_certificate(h)
        cert_ok += value > 0
        bound_ok += sign_changes(h) <= sigma(h) and sign_changes(f) <= sigma(f)
    dt = time.perf_counter() - t0
    ok = min_gap > 1e-12 and cert_ok == 200 and bound_ok == 200 and dt < 2.0
    detail = (f"kappa(4) = {K}, min max-moment gap {min_gap:.2e} (> 1e-12), certificates positive {cert_ok}/200, "
              f"sign_changes <= sigma {bound_ok}/200, {dt:.3f} s (< 2 s)")
    assert criterion(8, "finite-moment uniqueness (200 pairs)", ok, detail)


def test_criterion_9_generating_functions(criterion):
    rng = np.random.default_rng(909)
    zs = [r * cmath.exp(1j * th) for r, th in zip(rng.uniform(0, 0.6, 10), rng.uniform(0, 2 * math.pi, 10))]
    models = {
        "polynomial": (PolynomialModel(tuple(rng.uniform(-1, 1, 5))), I_poly),
        "rational": (RationalModel((0.7, -0.4), (0.8, 2.2, 1.0)), I_rational),
        "spikes": (random_spike_train(rng, 3), I_spikes),
    }
    t0 = time.perf_counter()
    excess = -math.inf
    for model, closed in models.values():
        m = moments(model, 59)  # 60 terms
        for z in zs:
            err = abs(closed(model, z) - I_series(m, z))
            excess = max(excess, err - (series_tail_bound(m, z) + 1e-12))
    dt = time.perf_counter() - t0
    ok = excess <= 0 and dt < 1.0
    detail = f"max (error - tail bound - 1e-12) = {excess:.2e} (<= 0) over 3 classes x 10 points, {dt:.3f} s (< 1 s)"
    assert criterion(9, "generating-function consistency", ok, detail)
