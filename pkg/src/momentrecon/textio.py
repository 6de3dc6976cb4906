"""Text serialization of models and moment data.

One JSON object per document, tagged by ``kind``.  Every number is a decimal
string holding the shortest representation that reads back to the same
value, so ``deserialize(serialize(v)) == v`` exactly.  Complex numbers are
``[re, im]`` string pairs.  Extended-precision moment sequences carry a
``dps`` field and are written with enough digits for that precision.

Kinds and their fields::

    polynomial        coefficients
    rational          numerator, denominator
    spikes            nodes, weights
    piecewise         breakpoints, pieces
    polygon           vertices (complex)
    curve             P, Q, interval
    disks             centers (complex), radii
    qdomain           p (complex), q (complex matrix)
    moments           values, interval[, dps]
    complex-moments   values (complex)
    double-moments    entries (complex matrix)
"""

from __future__ import annotations

import json
import re

import mpmath
import numpy as np

from .errors import MomentError, ParseError
from .models import (
    ComplexMomentSequence,
    DefiningPolynomial,
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

KINDS = (
    "polynomial", "rational", "spikes", "piecewise", "polygon", "curve",
    "disks", "qdomain", "moments", "complex-moments", "double-moments",
)


# ---------------------------------------------------------------- writing


def _real(x, dps=None) -> str:
    if dps is not None:
        prec = mpmath.libmp.dps_to_prec(dps)
        with mpmath.workprec(prec):
            raw = x._mpf_ if isinstance(x, mpmath.mpf) else mpmath.mpf(x)._mpf_
        return mpmath.libmp.to_str(raw, mpmath.libmp.repr_dps(prec))
    return repr(float(x))


def _cplx(z) -> list:
    z = complex(z)
    return [_real(z.real), _real(z.imag)]


def _reals(xs, dps=None) -> list:
    return [_real(x, dps) for x in xs]


def _cplxs(zs) -> list:
    return [_cplx(z) for z in zs]


def _cmatrix(a) -> list:
    return [_cplxs(row) for row in np.asarray(a)]


def to_document(v) -> dict:
    """The JSON-ready dictionary for a model or moment object."""
    if isinstance(v, PolynomialModel):
        return {"kind": "polynomial", "coefficients": _reals(v.coefficients)}
    if isinstance(v, RationalModel):
        return {"kind": "rational", "numerator": _reals(v.numerator), "denominator": _reals(v.denominator)}
    if isinstance(v, SpikeTrain):
        return {"kind": "spikes", "nodes": _reals(v.nodes), "weights": _reals(v.weights)}
    if isinstance(v, PiecewisePoly):
        return {"kind": "piecewise", "breakpoints": _reals(v.breakpoints),
                "pieces": [_reals(p) for p in v.pieces]}
    if isinstance(v, Polygon):
        return {"kind": "polygon", "vertices": _cplxs(v.vertices)}
    if isinstance(v, ParamCurve):
        return {"kind": "curve", "P": _reals(v.P), "Q": _reals(v.Q), "interval": _reals(v.interval)}
    if isinstance(v, Disk):
        v = DiskUnion((v,))
    if isinstance(v, DiskUnion):
        return {"kind": "disks", "centers": _cplxs(d.center for d in v.disks),
                "radii": _reals(d.radius for d in v.disks)}
    if isinstance(v, DefiningPolynomial):
        return {"kind": "qdomain", "p": _cplxs(v.p), "q": _cmatrix(v.q)}
    if isinstance(v, MomentSequence):
        doc = {"kind": "moments", "values": _reals(v.values, v.dps), "interval": _reals(v.interval)}
        if v.dps is not None:
            doc["dps"] = v.dps
        return doc
    if isinstance(v, ComplexMomentSequence):
        return {"kind": "complex-moments", "values": _cplxs(v.values)}
    if isinstance(v, DoubleMomentTable):
        return {"kind": "double-moments", "entries": _cmatrix(v.entries)}
    raise TypeError(f"cannot serialize {type(v).__name__}")


def serialize(v) -> str:
    return json.dumps(to_document(v), indent=1) + "\n"


# ---------------------------------------------------------------- reading


class _Reader:
    """Field access with line-numbered parse errors."""

    def __init__(self, text: str, doc: dict):
        self.text = text
        self.doc = doc

    def line_of(self, field):
        m = re.search(r'"%s"\s*:' % re.escape(field), self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def fail(self, message, field):
        raise ParseError(message, self.line_of(field), field)

    def get(self, field, default=None, required=True):
        if field not in self.doc:
            if required:
                raise ParseError("missing field", None, field)
            return default
        return self.doc[field]

    def real(self, s, field, dps=None):
        if not isinstance(s, str):
            self.fail(f"expected a decimal string, got {s!r}", field)
        try:
            if dps is not None:
                with mpmath.workdps(dps):
                    return mpmath.mpf(s)
            return float(s)
        except ValueError:
            self.fail(f"malformed number {s!r}", field)

    def reals(self, field, dps=None, required=True, default=None):
        v = self.get(field, default, required)
        if v is default and not required:
            return default
        if not isinstance(v, list):
            self.fail("expected a list", field)
        return tuple(self.real(s, field, dps) for s in v)

    def cplx(self, pair, field):
        if not (isinstance(pair, list) and len(pair) == 2):
            self.fail(f"expected a [re, im] pair, got {pair!r}", field)
        return complex(self.real(pair[0], field), self.real(pair[1], field))

    def cplxs(self, field):
        v = self.get(field)
        if not isinstance(v, list):
            self.fail("expected a list", field)
        return [self.cplx(p, field) for p in v]

    def cmatrix(self, field):
        v = self.get(field)
        if not (isinstance(v, list) and v and all(isinstance(r, list) for r in v)):
            self.fail("expected a nonempty list of rows", field)
        if len({len(r) for r in v}) != 1:
            self.fail("rows differ in length", field)
        return np.array([[self.cplx(p, field) for p in row] for row in v], dtype=complex).reshape(len(v), -1)

    def nested_reals(self, field):
        v = self.get(field)
        if not (isinstance(v, list) and all(isinstance(r, list) for r in v)):
            self.fail("expected a list of lists", field)
        return tuple(tuple(self.real(s, field) for s in row) for row in v)


def _build(r: _Reader, kind: str):
    if kind == "polynomial":
        return PolynomialModel(r.reals("coefficients"))
    if kind == "rational":
        return RationalModel(r.reals("numerator"), r.reals("denominator"))
    if kind == "spikes":
        return SpikeTrain(r.reals("nodes"), r.reals("weights"))
    if kind == "piecewise":
        return PiecewisePoly(r.reals("breakpoints"), r.nested_reals("pieces"))
    if kind == "polygon":
        return Polygon(r.cplxs("vertices"))
    if kind == "curve":
        return ParamCurve(r.reals("P"), r.reals("Q"), r.reals("interval", required=False, default=(0.0, 1.0)))
    if kind == "disks":
        centers, radii = r.cplxs("centers"), r.reals("radii")
        if len(centers) != len(radii):
            r.fail("centers and radii differ in length", "radii")
        return DiskUnion(tuple(Disk(c, R) for c, R in zip(centers, radii)))
    if kind == "qdomain":
        return DefiningPolynomial(r.cmatrix("q"), tuple(r.cplxs("p")))
    if kind == "moments":
        dps = r.get("dps", required=False)
        if dps is not None and not (isinstance(dps, int) and dps > 0):
            r.fail("dps must be a positive integer", "dps")
        return MomentSequence(r.reals("values", dps), r.reals("interval", required=False, default=(0.0, 1.0)), dps)
    if kind == "complex-moments":
        return ComplexMomentSequence(tuple(r.cplxs("values")))
    if kind == "double-moments":
        return DoubleMomentTable(r.cmatrix("entries"))
    r.fail(f"unknown kind {kind!r}", "kind")


def deserialize(text: str):
    """Parse a document; raises ParseError (with line and field) on malformed input."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, None) from None
    if not isinstance(doc, dict):
        raise ParseError("document must be an object", 1, None)
    r = _Reader(text, doc)
    kind = r.get("kind")
    try:
        return _build(r, kind)
    except ParseError:
        raise
    except MomentError as exc:
        raise ParseError(f"invalid {kind}: {exc}", None, None) from exc


def read_file(path):
    with open(path, encoding="utf-8") as fh:
        return deserialize(fh.read())


def write_file(path, v):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(v))
