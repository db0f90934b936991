import numpy as np
import pytest

from measureflow.measure import (DiscreteMeasure, canonicalize, difference, linear_combine,
                                 mass, scale, total_variation)
from measureflow.pl import PiecewiseLinearFn, integrate, sup_distance
from measureflow.errors import OutOfDomainError


def test_from_pairs_sorts_and_merges():
    m = DiscreteMeasure.from_pairs([[0.7, 1.0], [0.2, 2.0], [0.7 + 1e-14, 0.5]])
    assert m.positions.tolist() == pytest.approx([0.2, 0.7])
    assert m.weights.tolist() == pytest.approx([2.0, 1.5])


def test_cancellation_drops_atom():
    m = difference(DiscreteMeasure.dirac(0.3), DiscreteMeasure.dirac(0.3))
    assert len(m) == 0
    assert total_variation(m) == 0.0


def test_rejects_out_of_domain_and_nonfinite():
    with pytest.raises(ValueError):
        DiscreteMeasure.from_pairs([[1.5, 1.0]])
    with pytest.raises(ValueError):
        DiscreteMeasure.from_pairs([[0.5, np.nan]])


def test_arrays_are_read_only():
    m = DiscreteMeasure.from_pairs([[0.5, 1.0]])
    with pytest.raises(ValueError):
        m.weights[0] = 2.0


def test_mass_tv_and_linear_ops():
    a = DiscreteMeasure.from_pairs([[0.1, 1.0], [0.5, -2.0]])
    b = DiscreteMeasure.from_pairs([[0.5, 2.0], [0.9, 0.5]])
    s = linear_combine(1.0, a, 1.0, b)
    assert s.to_pairs() == [[0.1, 1.0], [0.9, 0.5]]
    assert mass(a) == pytest.approx(-1.0)
    assert total_variation(a) == pytest.approx(3.0)
    assert total_variation(scale(-2.0, a)) == pytest.approx(6.0)
    assert canonicalize(s).to_pairs() == s.to_pairs()


def test_pl_evaluation_and_norms():
    fn = PiecewiseLinearFn([0.0, 0.5, 1.0], [0.0, 1.0, -1.0])
    assert fn(0.25) == pytest.approx(0.5)
    assert fn.sup_norm() == 1.0
    assert fn.lip_const() == pytest.approx(4.0)
    assert fn.bl_norm() == pytest.approx(5.0)
    assert fn.extended(2.0) == -1.0
    with pytest.raises(OutOfDomainError):
        fn(1.5)


def test_pl_arithmetic_uses_union_nodes():
    a = PiecewiseLinearFn([0.0, 0.5, 1.0], [0.0, 1.0, 0.0])
    b = PiecewiseLinearFn([0.0, 0.25, 1.0], [1.0, 0.0, 1.0])
    c = a - b
    xs = np.linspace(0, 1, 101)
    assert np.allclose(c(xs), a(xs) - b(xs), atol=1e-14)
    assert sup_distance(a, b) == pytest.approx(np.max(np.abs(a(c.nodes) - b(c.nodes))))


def test_integrate_exact():
    fn = PiecewiseLinearFn([0.0, 1.0], [0.0, 2.0])
    assert integrate(fn, 0.0, 1.0) == pytest.approx(1.0)
    assert integrate(fn, 0.25, 0.75) == pytest.approx(0.5)


def test_pl_validation():
    with pytest.raises(ValueError):
        PiecewiseLinearFn([0.0], [1.0])
    with pytest.raises(ValueError):
        PiecewiseLinearFn([0.0, 0.0, 1.0], [1.0, 1.0, 1.0])
