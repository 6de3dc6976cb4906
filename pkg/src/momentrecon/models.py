"""Domain types: 1D signal models, planar shapes, moment data.

All types are frozen dataclasses holding tuples (or read-only arrays), so
they can be shared between threads freely. Constructors validate; use
``Type.unchecked(...)`` to build a value that skips validation (e.g. to
inspect an invalid model with :func:`validate`).

Coefficient lists are always stored lowest degree first.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError, ValidationError

POLE_TOL = 1e-9


def _is_finite(v) -> bool:
    try:
        return cmath.isfinite(complex(v))
    except (TypeError, ValueError):
        return False


def _freeze(a, dtype):
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def trim(coeffs) -> list:
    """Drop trailing zero coefficients, keeping at least one."""
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def polyval(coeffs, x):
    """Horner evaluation, low-first coefficients; works for any number type."""
    acc = 0
    for c in reversed(list(coeffs)):
        acc = acc * x + c
    return acc


class _Checked:
    """Mixin: validate at construction, ``unchecked`` to bypass."""

    def __post_init__(self):
        self._normalize()
        if getattr(self, "_skip_check", False):
            return
        problems = self.violations()
        if problems:
            raise ValidationError(problems)

    def _normalize(self):
        pass

    def violations(self) -> list[str]:
        return []

    @classmethod
    def unchecked(cls, *args, **kwargs):
        obj = cls.__new__(cls)
        object.__setattr__(obj, "_skip_check", True)
        names = [f.name for f in fields(cls)]
        values = dict(zip(names, args))
        values.update(kwargs)
        for f in fields(cls):
            if f.name in values:
                object.__setattr__(obj, f.name, values[f.name])
            else:
                object.__setattr__(obj, f.name, f.default)
        obj.__post_init__()
        return obj


# ---------------------------------------------------------------- moments


@dataclass(frozen=True, eq=False)
class MomentSequence(_Checked):
    """Real moments m_0..m_K of a model on ``interval``.

    Values are Python floats, or ``mpmath.mpf`` when produced by an
    extended-precision forward transform (``dps`` records the precision).
    """

    values: tuple
    interval: tuple = (0.0, 1.0)
    dps: int | None = None

    def _normalize(self):
        vals = tuple(self.values if self.dps is not None else (float(v) for v in self.values))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))

    def violations(self):
        out = []
        if len(self.values) < 1:
            out.append("empty moment sequence")
        if not all(_is_finite(v) for v in self.values):
            out.append("non-finite moment")
        if any(isinstance(v, complex) for v in self.values):
            out.append("complex value in real moment sequence")
        return out

    @property
    def order(self) -> int:
        return len(self.values) - 1

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])

    def __eq__(self, other):
        return (
            isinstance(other, MomentSequence)
            and self.values == other.values
            and self.interval == other.interval
            and self.dps == other.dps
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ComplexMomentSequence(_Checked):
    values: tuple

    def _normalize(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))

    def violations(self):
        out = []
        if len(self.values) < 1:
            out.append("empty moment sequence")
        if not all(_is_finite(v) for v in self.values):
            out.append("non-finite moment")
        return out

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)

    def __eq__(self, other):
        return isinstance(other, ComplexMomentSequence) and self.values == other.values

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DoubleMomentTable(_Checked):
    """Entry (k, l) holds the double moment of z^k conj(z)^l."""

    entries: np.ndarray

    def _normalize(self):
        object.__setattr__(self, "entries", _freeze(self.entries, complex))

    def violations(self):
        e = self.entries
        out = []
        if e.ndim != 2 or e.size == 0:
            out.append("double moment table must be a nonempty 2D array")
        elif not np.all(np.isfinite(e)):
            out.append("non-finite moment")
        return out

    @property
    def shape(self):
        return self.entries.shape

    def hermitian_defect(self) -> float:
        """Max |m_lk - conj(m_kl)| over the square part of the table."""
        n = min(self.entries.shape)
        sq = self.entries[:n, :n]
        return float(np.max(np.abs(sq.T - np.conj(sq)))) if n else 0.0

    def __eq__(self, other):
        return isinstance(other, DoubleMomentTable) and np.array_equal(self.entries, other.entries)

    __hash__ = None


# ---------------------------------------------------------------- 1D models


@dataclass(frozen=True)
class PolynomialModel(_Checked):
    coefficients: tuple

    def _normalize(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))

    def violations(self):
        c = self.coefficients
        out = []
        if not c:
            out.append("polynomial needs at least one coefficient")
        elif len(c) > 1 and c[-1] == 0:
            out.append("leading coefficient is zero")
        if not all(math.isfinite(v) for v in c):
            out.append("non-finite coefficient")
        return out

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1


@dataclass(frozen=True)
class RationalModel(_Checked):
    """numerator / denominator with a monic denominator of degree d >= 1."""

    numerator: tuple
    denominator: tuple

    def _normalize(self):
        object.__setattr__(self, "numerator", tuple(float(c) for c in self.numerator))
        object.__setattr__(self, "denominator", tuple(float(c) for c in self.denominator))

    @property
    def degree(self) -> int:
        return len(self.denominator) - 1

    def poles(self) -> np.ndarray:
        from .linalg import poly_roots

        return np.array(poly_roots(self.denominator))

    def violations(self):
        out = []
        num, den = self.numerator, self.denominator
        if len(den) < 2:
            out.append("denominator degree must be >= 1")
            return out
        if not all(math.isfinite(v) for v in num + den):
            out.append("non-finite coefficient")
            return out
        if den[-1] != 1.0:
            out.append("denominator is not monic")
        if len(trim(num)) > len(den) - 1:
            out.append("numerator degree must be below denominator degree")
        if den[-1] != 0:
            for r in self.poles():
                if abs(r.imag) <= POLE_TOL and -POLE_TOL <= r.real <= 1 + POLE_TOL:
                    out.append(f"pole inside [0,1] at {r.real:.6g}")
        return out


@dataclass(frozen=True)
class SpikeTrain(_Checked):
    """Weighted sum of point masses; nodes are sorted on construction."""

    nodes: tuple
    weights: tuple

    def _normalize(self):
        pairs = sorted(zip((float(x) for x in self.nodes), (float(a) for a in self.weights)))
        if len(self.nodes) == len(self.weights):
            object.__setattr__(self, "nodes", tuple(p[0] for p in pairs))
            object.__setattr__(self, "weights", tuple(p[1] for p in pairs))
        else:
            object.__setattr__(self, "nodes", tuple(float(x) for x in self.nodes))
            object.__setattr__(self, "weights", tuple(float(a) for a in self.weights))

    def violations(self):
        x, a = self.nodes, self.weights
        out = []
        if len(x) != len(a):
            out.append("nodes and weights differ in length")
        if not x:
            out.append("spike train is empty")
        if not all(math.isfinite(v) for v in x + a):
            out.append("non-finite node or weight")
            return out
        if len(set(x)) != len(x):
            out.append("duplicate node")
        if any(not (0.0 < v < 1.0) for v in x):
            out.append("node outside the open interval (0,1)")
        if any(v == 0.0 for v in a):
            out.append("zero weight")
        return out

    @property
    def n(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class PiecewisePoly(_Checked):
    """Polynomial pieces on the partition 0 = x_0 < x_1 < ... < x_{r+1} = 1."""

    breakpoints: tuple
    pieces: tuple

    def _normalize(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(
            self, "pieces", tuple(tuple(float(c) for c in p) for p in self.pieces)
        )

    def violations(self):
        b, p = self.breakpoints, self.pieces
        out = []
        if len(b) < 2 or b[0] != 0.0 or b[-1] != 1.0:
            out.append("breakpoints must start at 0 and end at 1")
        if any(b2 <= b1 for b1, b2 in zip(b, b[1:])):
            out.append("breakpoints not strictly increasing")
        if len(p) != len(b) - 1:
            out.append("piece count does not match breakpoint gaps")
        if any(len(c) == 0 for c in p):
            out.append("empty piece")
        if not all(math.isfinite(v) for v in b + tuple(c for q in p for c in q)):
            out.append("non-finite value")
        return out

    @property
    def r(self) -> int:
        """Number of interior breakpoints."""
        return len(self.breakpoints) - 2

    def piece_index(self, x: float) -> int:
        b = self.breakpoints
        for q in range(len(b) - 1):
            if x < b[q + 1]:
                return q
        return len(b) - 2

    def __add__(self, other):
        return piecewise_combine(self, other, 1.0)

    def __sub__(self, other):
        return piecewise_combine(self, other, -1.0)


def piecewise_combine(f: PiecewisePoly, g: PiecewisePoly, sign: float = 1.0) -> PiecewisePoly:
    """f + sign*g on the common refinement of both partitions."""
    bps = sorted(set(f.breakpoints) | set(g.breakpoints))
    pieces = []
    for lo, hi in zip(bps, bps[1:]):
        mid = 0.5 * (lo + hi)
        a = list(f.pieces[f.piece_index(mid)])
        b = [sign * c for c in g.pieces[g.piece_index(mid)]]
        n = max(len(a), len(b))
        a += [0.0] * (n - len(a))
        b += [0.0] * (n - len(b))
        pieces.append(tuple(trim([x + y for x, y in zip(a, b)])))
    return PiecewisePoly(tuple(bps), tuple(pieces))


# ---------------------------------------------------------------- 2D shapes


def signed_area(vertices) -> float:
    z = np.asarray(vertices, dtype=complex)
    zn = np.roll(z, -1)
    return 0.5 * float(np.sum(z.real * zn.imag - zn.real * z.imag))


def davis_weights(vertices) -> np.ndarray:
    """Weights a_j with  iint_P phi'' dA = sum_j a_j phi(z_j)  for a CCW polygon.

    a_j = (i/2) * (conj(d_in)/d_in - conj(d_out)/d_out) with d_in = z_{j-1} - z_j and
    d_out = z_j - z_{j+1}.  Each ratio has modulus one, so |a_j| <= 1.
    """
    z = np.asarray(vertices, dtype=complex)
    d_in = np.roll(z, 1) - z
    d_out = z - np.roll(z, -1)
    return 0.5j * (np.conj(d_in) / d_in - np.conj(d_out) / d_out)


@dataclass(frozen=True, eq=False)
class Polygon(_Checked):
    vertices: np.ndarray

    def _normalize(self):
        object.__setattr__(self, "vertices", _freeze(self.vertices, complex))

    def violations(self):
        z = self.vertices
        out = []
        if z.ndim != 1 or len(z) < 3:
            return ["polygon needs at least 3 vertices"]
        if not np.all(np.isfinite(z)):
            return ["non-finite vertex"]
        scale = max(1.0, float(np.max(np.abs(z))))
        d_out = np.roll(z, -1) - z
        if np.any(np.abs(d_out) <= 1e-14 * scale):
            out.append("vertex equals its neighbor")
            return out
        if signed_area(z) <= 0:
            out.append("polygon is not counterclockwise (signed area <= 0)")
        d_in = z - np.roll(z, 1)
        cross = (np.conj(d_in) * d_out).imag
        if np.any(np.abs(cross) <= 1e-12 * np.abs(d_in) * np.abs(d_out)):
            out.append("parallel incident edges at a vertex")
        return out

    @property
    def n(self) -> int:
        return len(self.vertices)

    def davis_weights(self) -> np.ndarray:
        return davis_weights(self.vertices)

    def __eq__(self, other):
        return isinstance(other, Polygon) and np.array_equal(self.vertices, other.vertices)

    __hash__ = None


@dataclass(frozen=True)
class Disk(_Checked):
    center: complex
    radius: float

    def _normalize(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def violations(self):
        if not (_is_finite(self.center) and math.isfinite(self.radius)):
            return ["non-finite disk parameter"]
        return [] if self.radius > 0 else ["radius must be positive"]


@dataclass(frozen=True)
class DiskUnion(_Checked):
    disks: tuple

    def _normalize(self):
        object.__setattr__(self, "disks", tuple(self.disks))

    def violations(self):
        out = []
        if not self.disks:
            out.append("empty disk union")
        for i, a in enumerate(self.disks):
            for b in self.disks[i + 1:]:
                if abs(a.center - b.center) < a.radius + b.radius:
                    out.append("overlapping disks in union")
        return out


@dataclass(frozen=True)
class ParamCurve(_Checked):
    """Curve x = P(t), y = Q(t) for t in [a, b]."""

    P: tuple
    Q: tuple
    interval: tuple = (0.0, 1.0)

    def _normalize(self):
        object.__setattr__(self, "P", tuple(float(c) for c in self.P))
        object.__setattr__(self, "Q", tuple(float(c) for c in self.Q))
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))

    def violations(self):
        out = []
        if len(trim(self.P)) < 2:
            out.append("P must be nonconstant")
        if not self.Q:
            out.append("Q needs at least one coefficient")
        if len(self.interval) != 2:
            out.append("interval must have two endpoints")
        return out


@dataclass(frozen=True, eq=False)
class BivariateSeries(_Checked):
    """Truncated series sum c_kl s^k t^l, 0 <= k <= K, 0 <= l <= L."""

    coefficients: np.ndarray

    def _normalize(self):
        object.__setattr__(self, "coefficients", _freeze(self.coefficients, complex))

    def violations(self):
        c = self.coefficients
        return [] if c.ndim == 2 and c.size > 0 else ["coefficients must be a nonempty 2D array"]

    @property
    def K(self) -> int:
        return self.coefficients.shape[0] - 1

    @property
    def L(self) -> int:
        return self.coefficients.shape[1] - 1


@dataclass(frozen=True, eq=False)
class QuadratureData(_Checked):
    """Nodes z_i with multiplicities s_i and coefficients c_ij, j < s_i."""

    nodes: tuple
    multiplicities: tuple
    coefficients: tuple

    def _normalize(self):
        object.__setattr__(self, "nodes", tuple(complex(z) for z in self.nodes))
        object.__setattr__(self, "multiplicities", tuple(int(s) for s in self.multiplicities))
        object.__setattr__(
            self, "coefficients", tuple(tuple(complex(c) for c in row) for row in self.coefficients)
        )

    def violations(self):
        out = []
        if len(set(self.nodes)) != len(self.nodes):
            out.append("duplicate node")
        if any(s < 1 for s in self.multiplicities):
            out.append("multiplicities must be positive")
        if len(self.multiplicities) != len(self.nodes) or len(self.coefficients) != len(self.nodes):
            out.append("nodes, multiplicities and coefficients differ in length")
        elif any(len(c) != s for c, s in zip(self.coefficients, self.multiplicities)):
            out.append("coefficient row length must equal node multiplicity")
        return out

    @property
    def order(self) -> int:
        return sum(self.multiplicities)


@dataclass(frozen=True, eq=False)
class DefiningPolynomial(_Checked):
    """q(z, zbar) = sum q_kl z^k zbar^l together with the monic node polynomial p."""

    q: np.ndarray
    p: tuple

    HERMITIAN_TOL = 1e-8

    def _normalize(self):
        object.__setattr__(self, "q", _freeze(self.q, complex))
        object.__setattr__(self, "p", tuple(complex(c) for c in self.p))

    def violations(self):
        out = []
        q = self.q
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            return ["q must be a square matrix"]
        scale = max(1.0, float(np.max(np.abs(q))))
        if np.max(np.abs(q - q.conj().T)) > self.HERMITIAN_TOL * scale:
            out.append("q is not Hermitian")
        if not self.p or abs(self.p[-1] - 1) > 1e-12:
            out.append("node polynomial is not monic")
        return out

    def __call__(self, z: complex) -> float:
        n = self.q.shape[0]
        zk = z ** np.arange(n)
        val = zk @ self.q @ np.conj(zk)
        return float(val.real)

    def __eq__(self, other):
        return isinstance(other, DefiningPolynomial) and self.p == other.p and np.array_equal(self.q, other.q)

    __hash__ = None


# ---------------------------------------------------------------- operations


def validate(model) -> list[str]:
    """Return the list of invariant violations (empty when valid)."""
    return model.violations()


def evaluate(model, x: float) -> float:
    if isinstance(model, SpikeTrain):
        raise DomainError("a spike train has no pointwise value")
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"x = {x} outside [0, 1]")
    if isinstance(model, PolynomialModel):
        return float(polyval(model.coefficients, x))
    if isinstance(model, RationalModel):
        den = polyval(model.denominator, x)
        scale = sum(abs(c) for c in model.denominator)
        if abs(den) <= POLE_TOL * scale:
            raise DomainError(f"x = {x} is at a pole")
        return float(polyval(model.numerator, x) / den)
    if isinstance(model, PiecewisePoly):
        return float(polyval(model.pieces[model.piece_index(x)], x))
    raise TypeError(f"cannot evaluate {type(model).__name__}")

