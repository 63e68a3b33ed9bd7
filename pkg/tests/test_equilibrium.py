import math

import numpy as np
import pytest

from lpbernstein import settings
from lpbernstein.arcsets import TWO_PI, ArcSet
from lpbernstein.equilibrium import (CollocationDensity, TSetDensity, UniformDensity, density,
                                     density_model_for, solve_general)
from lpbernstein.errors import EndpointSingularity, OutsideSet, SolverFailure
from lpbernstein.functionals import functional_B
from lpbernstein.tset import TSet, density_closed_form
from lpbernstein.trigpoly import TrigPoly

TWO_ARCS = ArcSet([(-2.0, -1.0), (1.0, 2.0)])


@pytest.fixture(scope="module")
def four_arc_collocation(four_arc: TSet):
    return CollocationDensity(solve_general(four_arc.E))


def test_full_circle_is_exact():
    solution = solve_general(ArcSet.full_circle())
    assert solution.robin_constant == 0.0
    assert solution.masses.tolist() == [1.0]
    model = CollocationDensity(solution)
    assert np.allclose(model.density(np.array([0.0, 1.0, 5.0])), 1 / TWO_PI)


def test_single_arc_matches_the_closed_form(right_angle_arc: TSet):
    arcs = ArcSet([(-math.pi / 2, math.pi / 2)])
    solution = solve_general(arcs)
    assert solution.residual <= settings.COLLOCATION_RESIDUAL
    assert solution.masses.sum() == pytest.approx(1.0, abs=1e-8)
    assert solution.robin_constant == pytest.approx(-math.log(math.sin(math.pi / 4)), abs=1e-7)

    model = CollocationDensity(solution)
    t = np.linspace(-1.5, 1.5, 31)
    expected = density_closed_form(right_angle_arc, t)
    assert np.allclose(model.density(t), expected, rtol=1e-6, atol=0)


def test_four_arcs_match_the_closed_form(four_arc: TSet, four_arc_collocation: CollocationDensity):
    t = four_arc.E.grid(60)
    expected = density_closed_form(four_arc, t)
    assert np.allclose(four_arc_collocation.density(t), expected, rtol=1e-6, atol=0)
    assert four_arc_collocation.total_mass == pytest.approx(1.0, abs=1e-8)
    assert np.allclose(four_arc_collocation.solution.masses, 0.25, atol=1e-7)


def test_subsets_of_the_circle_carry_more_density(four_arc: TSet):
    values = density_closed_form(four_arc, four_arc.E.grid(200))
    assert np.all(values >= 1 / TWO_PI)


def test_symmetric_arcs_share_the_mass():
    solution = solve_general(TWO_ARCS)
    assert np.allclose(solution.masses, 0.5, atol=1e-7)


def test_offsets_agree_with_plain_values(four_arc: TSet, four_arc_collocation: CollocationDensity):
    closed = TSetDensity(four_arc)
    lo, hi = four_arc.E.intervals[0]
    for model in (closed, four_arc_collocation):
        near_lo = model.density_offset(lo, 1, np.array([0.01, 0.1]))
        assert np.allclose(near_lo, model.density(np.array([lo + 0.01, lo + 0.1])), rtol=1e-10)
        near_hi = model.density_offset(hi, -1, np.array([0.01]))
        assert np.allclose(near_hi, model.density(np.array([hi - 0.01])), rtol=1e-10)


def test_endpoint_blow_up_is_square_root(four_arc: TSet):
    closed = TSetDensity(four_arc)
    lo, _ = four_arc.E.intervals[0]
    deltas = np.array([1e-10, 1e-12, 1e-14])
    scaled = closed.density_offset(lo, 1, deltas) * np.sqrt(deltas)
    assert np.allclose(scaled, scaled[0], rtol=1e-3)


def test_closed_form_density_is_zero_off_the_set(four_arc: TSet):
    assert TSetDensity(four_arc).density(np.array([0.0]))[0] == 0.0


def test_density_checks_its_argument(four_arc: TSet):
    model = density_model_for(four_arc)
    with pytest.raises(OutsideSet):
        density(model, 0.0)
    with pytest.raises(EndpointSingularity):
        density(model, four_arc.E.intervals[1][1])
    assert isinstance(density(model, 0.5), float)


def test_backend_selection(four_arc: TSet, cos2t: TSet):
    assert isinstance(density_model_for(cos2t), UniformDensity)
    assert isinstance(density_model_for(four_arc), TSetDensity)
    assert isinstance(density_model_for(ArcSet.full_circle()), UniformDensity)
    assert isinstance(density_model_for(TWO_ARCS), CollocationDensity)


def test_functionals_agree_across_backends(four_arc: TSet,
                                           four_arc_collocation: CollocationDensity):
    tn = TrigPoly([0.3, -1.0, 0.5, 0.0, 0.2], [0.7, 0.0, -0.4, 0.1])
    closed = functional_B(tn, 4, four_arc.E, TSetDensity(four_arc), 0.5)
    collocated = functional_B(tn, 4, four_arc.E, four_arc_collocation, 0.5)
    assert collocated.value == pytest.approx(closed.value, rel=1e-6)


def test_solver_failure_reports_the_last_degree(monkeypatch):
    monkeypatch.setattr(settings, "COLLOCATION_RESIDUAL", -1.0)
    with pytest.raises(SolverFailure) as error:
        solve_general(TWO_ARCS)
    assert error.value.degree == settings.COLLOCATION_DEGREES[-1]


def test_symmetric_arcs_have_a_symmetric_density():
    model = CollocationDensity(solve_general(TWO_ARCS))
    t = np.linspace(1.05, 1.95, 19)
    assert np.allclose(model.density(t), model.density(-t), rtol=1e-8, atol=0)


def test_larger_sets_carry_less_density():
    wider = CollocationDensity(solve_general(ArcSet([(-2.2, -0.8), (0.8, 2.2)])))
    narrower = CollocationDensity(solve_general(TWO_ARCS))
    t = np.concatenate([np.linspace(1.05, 1.95, 10), -np.linspace(1.05, 1.95, 10)])
    assert np.all(wider.density(t) <= narrower.density(t))
    assert np.all(UniformDensity().density(t) <= wider.density(t))
