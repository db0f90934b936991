import math

import numpy as np
import pytest

from measureflow import flow
from measureflow.flow import flow_many, flow_semigroup_check, stopped_flow
from measureflow.pl import PiecewiseLinearFn
from measureflow.suite import random_pl

ZERO = PiecewiseLinearFn.constant(0.0)
RAMP = PiecewiseLinearFn([0.0, 1.0], [0.0, -1.0])


def test_linear_field_closed_form(backend):
    for x0 in (0.1, 0.5, 1.0):
        r = stopped_flow(RAMP, ZERO, x0, 1.0, 1e-3)
        assert r.position == pytest.approx(x0 * math.exp(-1.0), abs=1e-8)
        assert not r.stopped


def test_constant_field_hits_boundary_exactly(backend):
    r = stopped_flow(PiecewiseLinearFn.constant(1.0), ZERO, 0.0, 1.0)
    assert r.stopped and r.position == 1.0
    assert r.hit_time == pytest.approx(1.0, abs=1e-10)
    r = stopped_flow(PiecewiseLinearFn.constant(-0.5), ZERO, 0.3, 1.0)
    assert r.stopped and r.position == 0.0
    assert r.hit_time == pytest.approx(0.6, abs=1e-10)


def test_outward_boundary_start_stops_immediately(backend):
    r = stopped_flow(PiecewiseLinearFn.constant(1.0), ZERO, 1.0, 0.5)
    assert r.stopped and r.hit_time == 0.0 and r.position == 1.0


def test_reaction_keeps_accumulating_after_stop(backend):
    v = PiecewiseLinearFn.constant(1.0)
    f = PiecewiseLinearFn([0.0, 1.0], [0.0, 2.0])
    r = stopped_flow(v, f, 0.5, 1.0)
    # int_0^0.5 2(0.5+s) ds + 0.5 * f(1)
    assert r.reaction_integral == pytest.approx(0.75 + 1.0, abs=1e-10)


def test_pure_reaction(backend):
    r = stopped_flow(ZERO, PiecewiseLinearFn.constant(-1.0), 0.4, 2.0)
    assert r.position == 0.4
    assert r.reaction_integral == pytest.approx(-2.0, abs=1e-12)


def test_rk4_fourth_order():
    f = PiecewiseLinearFn([0.0, 1.0], [0.0, 1.0])
    errs = [abs(stopped_flow(RAMP, f, 0.8, 1.0, h).position - 0.8 * math.exp(-1.0))
            for h in (0.1, 0.05)]
    assert 12.0 < errs[0] / errs[1] < 20.0


def test_kinks_do_not_degrade_accuracy():
    # v = -(x - 0.5) for x > 0.5 and v = 0.5 - x below: a kink at 0.5 not on the step grid
    v = PiecewiseLinearFn([0.0, 0.3, 1.0], [0.6, 0.0, -0.7])
    r = stopped_flow(v, ZERO, 0.9, 2.0, 1e-2)
    assert r.position == pytest.approx(0.3 + 0.6 * math.exp(-2.0), abs=1e-9)


def test_backends_agree(rng):
    backends = flow.available_backends()
    if len(backends) < 2:
        pytest.skip("compiled kernel not built")
    for _ in range(10):
        v, f = random_pl(rng), random_pl(rng)
        x0 = rng.uniform(0, 1, 20)
        out = [flow_many(v, f, x0, 0.7, 1e-2, backend=b) for b in backends]
        for a, b in zip(out[0], out[1]):
            np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_order_preserved_and_clamped(rng, backend):
    for _ in range(10):
        v, f = random_pl(rng, scale=3.0), random_pl(rng)
        x0 = np.sort(rng.uniform(0, 1, 30))
        pos, stopped, hit, _ = flow_many(v, f, x0, 1.0)
        assert np.all(np.diff(pos) >= -1e-12)
        assert pos.min() >= 0.0 and pos.max() <= 1.0
        assert np.all(np.isnan(hit) != stopped)


def test_semigroup_and_gronwall(rng):
    for _ in range(10):
        v, f = random_pl(rng), random_pl(rng)
        s, t = rng.uniform(0, 1, 2)
        x, y = rng.uniform(0, 1, 2)
        assert flow_semigroup_check(v, f, x, s, t) <= 1e-8
        px = stopped_flow(v, f, x, t).position
        py = stopped_flow(v, f, y, t).position
        assert abs(px - py) <= abs(x - y) * math.exp(v.lip_const() * t) + 1e-10


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        flow_many(RAMP, ZERO, [1.2], 1.0)
    with pytest.raises(ValueError):
        flow_many(RAMP, ZERO, [0.5], -1.0)
    with pytest.raises(ValueError):
        flow.set_backend("fortran")


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys
    env = dict(os.environ, MF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from measureflow import flow; print(flow.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
