import numpy as np
import pytest

from measureflow.interaction import Convolution, Frozen, bl_constants, check_assumption, realize
from measureflow.measure import DiscreteMeasure
from measureflow.pl import PiecewiseLinearFn
from measureflow.suite import random_measure, random_pl

ONE = Convolution(PiecewiseLinearFn([-1.0, 1.0], [1.0, 1.0]))
ATTRACT = Convolution(PiecewiseLinearFn([-1.0, 1.0], [1.0, -1.0]))


def test_constant_kernel_gives_mass():
    v = realize(ONE, DiscreteMeasure.from_pairs([[0.2, 0.3], [0.6, 0.2]]))
    assert np.allclose(v.values, 0.5)


def test_attraction_field_closed_form():
    m = DiscreteMeasure.from_pairs([[0.2, 0.5], [0.7, 0.5]])
    v = realize(ATTRACT, m)
    xs = np.linspace(0, 1, 11)
    assert np.allclose(v(xs), -(xs - 0.45), atol=1e-14)


def test_realize_matches_brute_force(rng):
    for _ in range(10):
        rule = Convolution(random_pl(rng, -1.0, 1.0))
        m = random_measure(rng, positive=False)
        v = realize(rule, m)
        xs = rng.uniform(0, 1, 50)
        brute = [sum(w * rule.kernel(x - y) for y, w in m.atoms) for x in xs]
        assert np.allclose(v(xs), brute, atol=1e-12)


def test_empty_measure_zero_field():
    assert realize(ATTRACT, DiscreteMeasure.empty()).sup_norm() == 0.0


def test_frozen_ignores_measure():
    fld = PiecewiseLinearFn([0.0, 1.0], [0.2, -0.2])
    assert realize(Frozen(fld), DiscreteMeasure.dirac(0.5)) is fld


def test_bl_constants():
    c = bl_constants(ONE, 2.0)
    assert (c.K_R, c.L_R, c.M_R) == (2.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        bl_constants(ONE, 0.0)


def test_assumption_margins(rng):
    for _ in range(20):
        rule = Convolution(random_pl(rng, -1.0, 1.0))
        out = check_assumption(rule, random_measure(rng), random_measure(rng))
        assert min(out.values()) >= -1e-9


def test_kernel_domain_checked():
    with pytest.raises(ValueError):
        Convolution(PiecewiseLinearFn.constant(1.0))
