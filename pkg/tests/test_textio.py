"""Text format: exact round trips and positioned parse errors."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentrecon.errors import ParseError
from momentrecon.forward import double_moments_domain, moments, moments_polynomial
from momentrecon.models import (
    Disk,
    DiskUnion,
    DoubleMomentTable,
    ParamCurve,
    PiecewisePoly,
    Polygon,
    PolynomialModel,
    RationalModel,
    SpikeTrain,
)
from momentrecon.textio import deserialize, serialize


def roundtrip(v):
    text = serialize(v)
    back = deserialize(text)
    assert back == v
    assert serialize(back) == text
    return back


def test_single_spike_roundtrip():
    roundtrip(SpikeTrain((0.5,), (1.0,)))


def test_double_moment_table_roundtrip():
    roundtrip(DoubleMomentTable(np.array([[np.pi, 0.1 + 1 / 3j], [0.1 - 1 / 3j, np.e]])))


@pytest.mark.parametrize(
    "value",
    [
        PolynomialModel((1 / 3, -2.5e-300, 7.0)),
        RationalModel((0.3, 1 / 7), (2.0, 3.5, 1.0)),
        PiecewisePoly((0, 1 / 3, 1), ((1 / 7,), (0.1, 2 / 3))),
        Polygon([0, 1, 1 + 1j, 1j]),
        ParamCurve((0, 1 / 3), (1, 2), (0.0, 2.0)),
        DiskUnion((Disk(0.8, 0.3), Disk(-0.8 + 0.1j, 0.3))),
        moments(Polygon([0, 1, 1j]), 6),
        moments(SpikeTrain((0.1, 0.7), (1 / 3, 2.0)), 5),
    ],
)
def test_every_kind_roundtrips(value):
    roundtrip(value)


def test_extended_precision_moments_roundtrip():
    m = moments_polynomial(PolynomialModel((1 / 3, 2.0)), 6, dps=60)
    back = roundtrip(m)
    assert back.dps == 60


def test_qdomain_roundtrip():
    from momentrecon.inversion import invert_quadrature_domain

    _, dp = invert_quadrature_domain(double_moments_domain(Disk(0.1j, 0.7), 3, 3), 3)
    roundtrip(dp)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=8))
def test_polynomial_roundtrip_is_exact(coeffs):
    if len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs[-1] = 1.0
    roundtrip(PolynomialModel(coeffs))


def test_missing_field_names_it():
    with pytest.raises(ParseError) as exc:
        deserialize('{"kind": "spikes", "nodes": ["0.5"]}')
    assert exc.value.field == "weights"


def test_malformed_number_has_line_and_field():
    with pytest.raises(ParseError) as exc:
        deserialize('{"kind": "spikes",\n "nodes": ["0.5"],\n "weights": ["one"]}')
    assert exc.value.line == 3 and exc.value.field == "weights"


def test_bare_numbers_rejected():
    with pytest.raises(ParseError):
        deserialize('{"kind": "polynomial", "coefficients": [1.5]}')


@pytest.mark.parametrize("text", ["{bad", "[1, 2]", '{"kind": "nope"}', '{"nodes": []}'])
def test_malformed_documents(text):
    with pytest.raises(ParseError):
        deserialize(text)


def test_invalid_model_surfaces_as_parse_error():
    with pytest.raises(ParseError):
        deserialize('{"kind": "spikes", "nodes": ["0.3", "0.3"], "weights": ["1", "1"]}')
