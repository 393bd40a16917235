import csv

import numpy as np
import pytest

from oracles import sewing_slide_events
from twocross.fields import CUBIC, IDENTITY, SIGNS, PiecewiseField, SmoothField3, stratum_of
from twocross.integrator import (
    CROSS,
    FLOW,
    PIN_SIGMA00,
    PINNED,
    SLIDE1,
    SLIDE_ENTER,
    SLIDE_EXIT,
    STOP,
    StiffnessError,
    band_distance,
    convergence_probe,
    integrate_piecewise,
    integrate_regularized,
)

SEWING_T = [7.627118644067797, 12.462932230595532, 12.7032970171205]


def test_oracle_event_times_frozen():
    events, _, _ = sewing_slide_events()
    assert [float(t) for t, _, _ in events] == pytest.approx(SEWING_T, abs=1e-15)


def test_sewing_slide_events(load_model):
    tr = integrate_piecewise(load_model("sewing_slide"), (0.5, 0.5, 0.0), 14.0)
    kinds = [e.kind for e in tr.events]
    assert kinds[:3] == [CROSS, SLIDE_ENTER, PIN_SIGMA00]
    assert kinds[-1] == STOP
    for e, t in zip(tr.events[:3], SEWING_T):
        assert abs(e.time - t) < 1e-6
    assert tr.events[0].point[0] == pytest.approx(395 / 236, abs=1e-6)
    assert tr.events[1].point[1] == pytest.approx(-395 / 1246, abs=1e-6)
    # pinned drift: all h_s = 1
    assert tr.final.position[:2] == (0.0, 0.0)
    assert tr.final.position[2] == pytest.approx(14.0, abs=1e-6)


def test_trajectory_invariants(load_model):
    tr = integrate_piecewise(load_model("sewing_slide"), (0.5, 0.5, 0.0), 14.0)
    t = tr.times()
    assert np.all(np.diff(t) >= 0)
    assert np.all(np.diff([e.time for e in tr.events]) >= 0)
    for s in tr.states:
        if s.mode == SLIDE1:
            k = 0 if s.stratum.sigma1 == 0 else 1
            assert s.position[k] == 0.0
        elif s.mode == PINNED:
            assert s.position[0] == 0.0 and s.position[1] == 0.0
        elif s.mode == FLOW and min(abs(s.position[0]), abs(s.position[1])) > 1e-9:
            assert stratum_of(s.position, 1e-9) == s.stratum


def _exit_field():
    c = SmoothField3.constant
    return PiecewiseField({
        (1, 1): SmoothField3.from_text("x2 - 2", "1", "0"),
        (-1, 1): c(1, 1, 0),
        (1, -1): c(-1, 1, 0),
        (-1, -1): c(1, 1, 0),
    })


def test_slide_exit_when_rho_reaches_zero():
    tr = integrate_piecewise(_exit_field(), (0.0, 0.5, 0.0), 2.0)
    kinds = [e.kind for e in tr.events]
    assert kinds[:2] == [SLIDE_ENTER, SLIDE_EXIT]
    ex = tr.events[1]
    assert ex.time == pytest.approx(1.5, abs=1e-8)
    assert ex.point[1] == pytest.approx(2.0, abs=1e-8)
    assert tr.final.position[0] > 0


def test_tmax_zero_and_bad_step(load_model):
    tr = integrate_piecewise(load_model("sewing_slide"), (0.5, 0.5, 0.0), 0.0)
    assert tr.events[-1].kind == STOP and len(tr.states) == 1
    with pytest.raises(ValueError):
        integrate_piecewise(load_model("sewing_slide"), (0.5, 0.5, 0.0), 1.0, step=0.0)


@pytest.mark.parametrize("eps, bound", [(0.1, 0.1), (0.01, 0.01)])
def test_regularized_relay_band(load_model, eps, bound):
    tr = integrate_regularized(load_model("relay"), IDENTITY, eps, eps, (1, 1, 0), 5.0)
    x1, x2, _ = tr.final.position
    assert abs(x1) < bound and abs(x2) < bound


def test_regularized_equals_quadrant_rk4(load_model):
    pw = load_model("polynomial")
    x0 = (2.0, 1.5, 0.0)
    tr = integrate_regularized(pw, IDENTITY, 0.1, 0.1, x0, 0.2, step=1e-3)
    pc = integrate_piecewise(pw, x0, 0.2, step=1e-3)
    assert tr.final.position == pytest.approx(pc.final.position, abs=1e-12)
    tc = integrate_regularized(pw, CUBIC, 0.1, 0.1, x0, 0.2, step=1e-3)
    assert tc.final.position == tr.final.position


def test_stiffness_detected(load_model):
    with pytest.raises(StiffnessError, match="step"):
        integrate_regularized(load_model("relay"), IDENTITY, 1e-3, 1e-3, (0.5, 0.5, 0), 1.0, step=0.05)


def test_probe_decreasing(load_model):
    rows = convergence_probe(load_model("relay"), IDENTITY, (1, 1, 0),
                             [(0.1, 0.1), (0.05, 0.05), (0.01, 0.01)], 5.0)
    d = [r.distance for r in rows]
    assert d[0] > d[1] > d[2]


def test_probe_region_one_stays_away(load_model):
    rows = convergence_probe(load_model("bt_family_region1"), IDENTITY, (0.05, 0.05, 0),
                             [(0.1, 0.1), (0.05, 0.05), (0.01, 0.01)], 5.0)
    assert min(r.distance for r in rows) > 0.5


def test_probe_trivial_field():
    pw = PiecewiseField.constant({s: (0.0, 0.0, 1.0) for s in SIGNS})
    rows = convergence_probe(pw, IDENTITY, (0.3, 0.4, 0), [(0.1, 0.1), (0.01, 0.01)], 1.0)
    assert [r.distance for r in rows] == [pytest.approx(0.5, abs=1e-15)] * 2


def test_band_distance_tail(load_model):
    tr = integrate_regularized(load_model("relay"), IDENTITY, 0.1, 0.1, (1, 1, 0), 5.0)
    assert band_distance(tr, 1.0) == pytest.approx(np.hypot(1, 1))


def test_csv_output(load_model, tmp_path):
    tr = integrate_piecewise(load_model("sewing_slide"), (0.5, 0.5, 0.0), 13.0)
    tr.write_csv(tmp_path / "t.csv")
    tr.write_events_csv(tmp_path / "e.csv")
    rows = list(csv.reader(open(tmp_path / "t.csv")))
    assert rows[0] == ["t", "x1", "x2", "x3", "mode"]
    assert rows[1][4] == "FLOW[++]"
    ev = list(csv.reader(open(tmp_path / "e.csv")))
    assert ev[0] == ["t", "kind", "x1", "x2", "x3"]
    assert ev[1][1] == CROSS and float(ev[1][0]) == pytest.approx(SEWING_T[0], abs=1e-6)
