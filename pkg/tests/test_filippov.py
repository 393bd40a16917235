from fractions import Fraction as F

import numpy as np
import pytest

from twocross.fields import PiecewiseField
from twocross.filippov import (
    EXIT_MINUS,
    EXIT_PLUS,
    SEWING,
    SLIDING,
    TANGENCY,
    NotOnCodim1Stratum,
    TangencyError,
    classify_codim1,
    exit_condition,
    sliding_field_codim1,
    sliding_rho,
)


def test_relay_sliding(load_model):
    pw = load_model("relay")
    c = classify_codim1(pw, (0, 1, 0))
    assert (c.tag, c.lie_plus, c.lie_minus) == (SLIDING, -1, 1)
    sc = sliding_field_codim1(pw, (0, 1, 0))
    assert sc.rho == 0.5
    assert list(sc.field_value) == [0, -1, 1]


def test_sewing_slide_sewing_and_sliding(load_model):
    pw = load_model("sewing_slide")
    c = classify_codim1(pw, (1, 0, 0))
    assert c.tag == SEWING
    assert c.lie_plus == pytest.approx(-59 / 900) and c.lie_minus == pytest.approx(-59 / 900)
    c = classify_codim1(pw, (0, -0.3, 0))
    assert c.tag == SLIDING
    sc = sliding_field_codim1(pw, (0, -0.3, 0))
    assert sc.rho == pytest.approx(float(F(623, 900)), abs=1e-15)
    assert np.allclose(sc.field_value, [0, 1187 / 900, 1], atol=1e-12, rtol=0)
    assert abs(sc.field_value[0]) < 1e-12


def test_tangency_and_refusal():
    pw = PiecewiseField.constant({(1, 1): (0, 1, 1), (1, -1): (0, 1, 1), (-1, 1): (1, 1, 1), (-1, -1): (1, 1, 1)})
    assert classify_codim1(pw, (0, 1, 0)).tag == TANGENCY
    with pytest.raises(NotOnCodim1Stratum):
        classify_codim1(pw, (0, 0, 0))
    with pytest.raises(NotOnCodim1Stratum):
        classify_codim1(pw, (1, 1, 0))
    same = PiecewiseField.constant({s: (0, 1, 1) for s in [(1, 1), (1, -1), (-1, 1), (-1, -1)]})
    with pytest.raises(TangencyError):
        sliding_field_codim1(same, (0, 1, 0))


def test_exit_condition():
    assert exit_condition(0.5) is None
    assert exit_condition(-1e-12, 1e-9) == EXIT_PLUS
    assert exit_condition(1 + 1e-12) == EXIT_MINUS


def test_sliding_rho_formula():
    assert sliding_rho(-1.0, 3.0) == 0.25
