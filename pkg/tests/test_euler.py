import math

import numpy as np
import pytest

from measureflow.errors import DegenerateFitError, InvalidFamilyError, NegativeInputError, ZeroDenominatorError
from measureflow.euler import (CauchyRow, Dyadic, Explicit, Partition, QAdic, Refinement, Uniform,
                               cauchy_table, continuous_dependence, euler_evolve, make_partition,
                               partition_independence, rate_fit, timeslice_bounds,
                               two_atom_attraction_exact)
from measureflow.flatnorm import bl_distance
from measureflow.interaction import Convolution, realize
from measureflow.measure import DiscreteMeasure, mass
from measureflow.pl import PiecewiseLinearFn
from measureflow.semigroup import FixedDynamics, mild_step

ZERO = PiecewiseLinearFn.constant(0.0)
ONE = Convolution(PiecewiseLinearFn([-1.0, 1.0], [1.0, 1.0]))
ATTRACT = Convolution(PiecewiseLinearFn([-1.0, 1.0], [1.0, -1.0]))
SATURATING = Convolution(PiecewiseLinearFn([-1.0, -0.25, 0.25, 1.0], [0.25, 0.25, -0.25, -0.25]))
M0 = DiscreteMeasure.from_pairs([[0.2, 0.5], [0.7, 0.5]])


def test_partitions():
    assert make_partition(Dyadic(), 3, 1.0).N == 8
    assert make_partition(QAdic(3), 2, 2.0).mesh() == pytest.approx(2 / 9)
    assert make_partition(Uniform(), 4, 1.0).N == 5
    base = Partition([0.0, 0.3, 1.0])
    p = make_partition(Refinement(base), 2, 1.0)
    assert p.times.tolist() == pytest.approx([0, 0.075, 0.15, 0.225, 0.3, 0.475, 0.65, 0.825, 1.0])
    q = make_partition(Refinement(base, "bisect_longest"), 1, 1.0)
    assert q.times.tolist() == pytest.approx([0, 0.3, 0.65, 1.0])


def test_refinement_of_trivial_base_is_dyadic():
    ref = Refinement(Partition([0.0, 1.0]))
    for k in range(5):
        assert np.allclose(make_partition(ref, k, 1.0).times, make_partition(Dyadic(), k, 1.0).times)


def test_explicit_non_nested_family():
    fam = Explicit((Partition([0, 0.5, 1.0]), Partition([0, 0.3, 0.6, 1.0]), Partition.uniform(5, 1.0)))
    assert make_partition(fam, 1, 1.0).times.tolist() == [0, 0.3, 0.6, 1.0]
    with pytest.raises(InvalidFamilyError):
        make_partition(fam, 3, 1.0)
    with pytest.raises(InvalidFamilyError):
        Explicit((Partition.uniform(4, 1.0), Partition.uniform(2, 1.0)))


def test_bad_partitions():
    with pytest.raises(InvalidFamilyError):
        Partition([0.0, 0.5, 0.5, 1.0])
    with pytest.raises(InvalidFamilyError):
        QAdic(1)
    with pytest.raises(InvalidFamilyError):
        Refinement(Partition([0.0, 1.0]), "bisect_random")


def test_one_interval_equals_mild_step():
    p = Partition.uniform(1, 1.0)
    f = PiecewiseLinearFn([0.0, 1.0], [0.1, -0.3])
    traj = euler_evolve(ATTRACT, f, M0, p)
    direct = mild_step(FixedDynamics(realize(ATTRACT, M0), f), M0, 1.0)
    assert bl_distance(traj.measures[-1], direct) <= 1e-15


def test_samples_inside_interval_use_left_node():
    p = Partition.uniform(2, 1.0)
    traj = euler_evolve(SATURATING, ZERO, M0, p, [0.25, 0.5, 0.75])
    assert list(traj.times) == [0.0, 0.25, 0.5, 0.75, 1.0]
    mid = traj.at(0.5)
    direct = mild_step(FixedDynamics(realize(SATURATING, mid), ZERO), mid, 0.25)
    assert bl_distance(traj.at(0.75), direct) <= 1e-15


def test_constant_kernel_exact():
    m0 = DiscreteMeasure.from_pairs([[0.2, 0.3], [0.6, 0.2]])
    for fam in (Dyadic(), Uniform(), QAdic(3)):
        traj = euler_evolve(ONE, ZERO, m0, make_partition(fam, 2, 1.0), [0.4])
        assert traj.at(0.4).positions.tolist() == pytest.approx([0.4, 0.8], abs=1e-10)


def test_attraction_closed_form():
    traj = euler_evolve(ATTRACT, ZERO, M0, make_partition(Dyadic(), 3, 1.0))
    exact = two_atom_attraction_exact(0.2, 0.5, 0.7, 0.5, 1.0)
    assert bl_distance(traj.measures[-1], exact) <= 1e-9


def test_cauchy_table_and_rate_fit():
    table = cauchy_table(SATURATING, ZERO, M0, Dyadic(), 2, 5, 8)
    assert [r.N for r in table] == [4, 8, 16, 32]
    fit = rate_fit(table)
    assert fit.slope > 0.9
    assert fit.c_hat_spread < 2.0
    assert all(r.D <= fit.c_hat * r.mesh + 1e-15 for r in table)
    threaded = cauchy_table(SATURATING, ZERO, M0, Dyadic(), 2, 5, 8, threads=4)
    assert [r.D for r in threaded] == [r.D for r in table]


def test_rate_fit_degenerate():
    rows = [CauchyRow(k, 2 ** k, 2.0 ** -k, 0.0) for k in range(2, 6)]
    with pytest.raises(DegenerateFitError) as exc:
        rate_fit(rows)
    assert exc.value.c_hat == 0.0


def test_partition_independence_small():
    d = partition_independence(SATURATING, ZERO, M0, Dyadic(), Uniform(), (6, 63))
    assert d <= 3 * 0.031 / 64


def test_continuous_dependence():
    n0 = DiscreteMeasure.from_pairs([[0.201, 0.5], [0.7, 0.501]])
    num, den = continuous_dependence(SATURATING, ZERO, M0, n0, Dyadic(), 4)
    assert 0 < num / den <= 100
    with pytest.raises(ZeroDenominatorError) as exc:
        continuous_dependence(SATURATING, ZERO, M0, M0, Dyadic(), 3)
    assert exc.value.num == 0.0


def test_reaction_and_timeslice():
    f = PiecewiseLinearFn.constant(-1.0)
    traj = euler_evolve(Convolution(PiecewiseLinearFn.constant(0.0, -1.0, 1.0)), f, M0,
                        make_partition(Dyadic(), 3, 1.0), [0.3])
    for t, m in traj.samples:
        assert mass(m) == pytest.approx(math.exp(-t), abs=1e-12)
    margins = timeslice_bounds(traj, f)
    assert margins["timeslice_tv"] >= 0 and margins["positivity"] == 0.0


def test_negative_input_rejected():
    with pytest.raises(NegativeInputError):
        euler_evolve(ONE, ZERO, DiscreteMeasure.dirac(0.5, -1.0), Partition.uniform(2, 1.0))
