import numpy as np
import pytest

from twocross.fields import (
    CUBIC,
    IDENTITY,
    SIGNS,
    PiecewiseField,
    SmoothField3,
    Stratum,
    TransitionFunction,
    convex_weight,
    eval_field,
    parse_sign_label,
    sign_label,
    stratum_of,
)


def test_eval_field_polynomial(load_model):
    pw = load_model("polynomial")
    assert list(pw.eval((1, 1), (0, 0, 0))) == [-1, -1, 0]
    assert list(pw.eval((1, 1), (1, 1, 1))) == [0, 0, 1]


def test_eval_field_constant(load_model):
    pw = load_model("relay")
    for p in [(0.3, 2, -1), (5, 5, 5)]:
        assert list(pw.eval((1, 1), p)) == [-1, -1, 1]


@pytest.mark.parametrize("p, expected", [
    ((0.5, -0.3, 7), Stratum(1, -1)),
    ((0, 1e-12, 0), Stratum(0, 0)),
    ((395 / 236, 0, 3.0), Stratum(1, 0)),
])
def test_stratum_of(p, expected):
    assert stratum_of(p, 1e-9) == expected


def test_stratum_codimension():
    assert Stratum(0, 0).is_sigma00
    assert Stratum(0, 1).codimension == 1
    assert Stratum(1, -1).codimension == 0
    assert str(Stratum(0, -1)) == "0-"


def test_transition_values():
    assert IDENTITY(0.5) == 0.5
    assert IDENTITY(-2) == -1 and CUBIC(-2) == -1 and CUBIC(3) == 1
    assert CUBIC(0.5) == pytest.approx(0.6875, abs=1e-15)
    assert CUBIC.deriv(1.0) == 0.0 and IDENTITY.deriv(0.2) == 1.0
    with pytest.raises(ValueError):
        TransitionFunction("tanh")


def test_convex_weight_values():
    assert convex_weight((1, 1), 1, 1) == 1
    assert convex_weight((1, -1), 0, 0) == 0.25
    assert sum(convex_weight(s, 0.3, -0.7) for s in SIGNS) == pytest.approx(1.0, abs=1e-15)


def test_sign_labels_roundtrip():
    for s in SIGNS:
        assert parse_sign_label(sign_label(s)) == s
    with pytest.raises(ValueError):
        parse_sign_label("+0")


def test_piecewise_field_requires_all_quadrants():
    f = SmoothField3.constant(1, 1, 1)
    with pytest.raises(ValueError, match="--"):
        PiecewiseField({(1, 1): f, (1, -1): f, (-1, 1): f})


def test_constant_arrays_order(load_model):
    a, b, c = load_model("sewing_slide").constant_arrays()
    assert a == pytest.approx(np.array([277, -623, -623, 277]) / 1800)
    assert b == pytest.approx(np.array([-59, -59, -59, 1741]) / 900)
    assert list(c) == [1, 1, 1, 1]


def test_eval_field_function():
    f = SmoothField3.from_text("x1*x2", "x3", "1")
    assert list(eval_field(f, (2, 3, 4))) == [6, 4, 1]
