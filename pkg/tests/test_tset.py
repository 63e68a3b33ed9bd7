import math

import numpy as np
import pytest

from lpbernstein.equilibrium import density_model_for
from lpbernstein.errors import (BranchProximity, EndpointSingularity, InvalidArcSet,
                                InvalidPolynomial, OutsideSet, TSetStructureError)
from lpbernstein.functionals import integrate_singular
from lpbernstein.models import PolySpec, QuadSpec
from lpbernstein.trigpoly import TrigPoly
from lpbernstein.tset import (TSet, branch_inverse, branch_jacobian_identity, branch_map, build,
                              density_closed_form, single_arc)

from .conftest import FOUR_ARC_U

ARC_START = 0.5 * math.acos(0.9)
ARC_END = 0.5 * math.acos(-0.5)
TIGHT = QuadSpec(rel_tol=1e-11)


def test_four_arc_structure(four_arc: TSet):
    assert four_arc.N == 2
    assert len(four_arc.E) == 4
    assert len(four_arc.branches) == 4
    assert all(z == () for z in four_arc.inner_extremals)
    lo, hi = four_arc.E.intervals[0]
    assert lo == pytest.approx(ARC_START, abs=1e-12)
    assert hi == pytest.approx(ARC_END, abs=1e-12)
    assert four_arc.E.length == pytest.approx(4 * (ARC_END - ARC_START), abs=1e-11)


def test_branch_ends_reach_plus_and_minus_one(four_arc: TSet):
    for index, (lo, hi) in enumerate(four_arc.branches):
        ends = four_arc.U.eval(np.array([lo, hi]))
        assert np.allclose(np.abs(ends), 1.0, atol=1e-12)
        assert ends[0] * ends[1] < 0
        assert four_arc.increasing(index) == (ends[1] > ends[0])


def test_single_arc_has_an_inner_extremal(right_angle_arc: TSet):
    assert len(right_angle_arc.E) == 1
    assert right_angle_arc.E.length == pytest.approx(math.pi, abs=1e-12)
    ends = sorted(v % (2 * math.pi) for v in right_angle_arc.E.endpoints)
    assert ends == pytest.approx([math.pi / 2, 1.5 * math.pi], abs=1e-12)
    assert right_angle_arc.E.contains(0.0)[0]
    assert len(right_angle_arc.inner_extremals[0]) == 1
    assert math.cos(right_angle_arc.inner_extremals[0][0]) == pytest.approx(1.0, abs=1e-12)
    assert len(right_angle_arc.branches) == 2


def test_circle_from_a_pure_cosine(cos2t: TSet):
    assert cos2t.E.is_full_circle
    assert len(cos2t.branches) == 4
    expected = [0, math.pi / 2, math.pi, 1.5 * math.pi]
    assert sorted(cos2t.inner_extremals[0]) == pytest.approx(expected)


@pytest.mark.parametrize("beta", [0.0, math.pi, -1.0, 4.0])
def test_single_arc_rejects_degenerate_angles(beta):
    with pytest.raises(InvalidArcSet):
        single_arc(beta)


def test_constant_is_not_a_tset():
    with pytest.raises(InvalidPolynomial):
        build(TrigPoly([0.5, 0.0]))


def test_flat_cosine_is_rejected():
    # |U| <= 1/2 everywhere
    with pytest.raises(TSetStructureError):
        build(TrigPoly([0.0, 0.5]))


def test_interior_critical_point_is_rejected():
    # U = cos 2t + 0.5 cos t has critical values strictly inside (-1, 1)
    with pytest.raises(TSetStructureError) as error:
        build(TrigPoly([0.0, 0.5, 1.0]))
    assert error.value.critical_values


def test_empty_set_is_rejected():
    with pytest.raises(TSetStructureError):
        build(TrigPoly([3.0, 1.0]))


def test_spec_round_trip(four_arc: TSet):
    spec = four_arc.poly_spec()
    assert spec.N == 2
    rebuilt = TSet.from_spec(PolySpec(N=spec.N, cos=spec.cos, sin=spec.sin))
    assert rebuilt.U.allclose(FOUR_ARC_U)
    assert np.allclose(rebuilt.E.intervals, four_arc.E.intervals, rtol=0, atol=1e-14)


def test_describe(four_arc: TSet):
    summary = four_arc.describe()
    assert summary["N"] == 2
    assert len(summary["E"]) == 4
    assert len(summary["branches"]) == 4


def test_branch_inverse(four_arc: TSet):
    ys = np.linspace(-1, 1, 21)
    for h in range(4):
        ts = branch_inverse(four_arc, h, ys)
        assert np.allclose(four_arc.U.eval(ts), ys, atol=1e-12)
        lo, hi = four_arc.branches[h]
        assert np.all((ts >= lo) & (ts <= hi))
    assert isinstance(branch_inverse(four_arc, 0, 0.25), float)


def test_branch_inverse_rejects_bad_input(four_arc: TSet):
    with pytest.raises(IndexError):
        branch_inverse(four_arc, 4, 0.0)
    with pytest.raises(ValueError):
        branch_inverse(four_arc, 0, 1.5)


def test_branch_map_derivative(four_arc: TSet):
    t = np.array([0.4, 0.6, 0.8])
    th, slope = branch_map(four_arc, t, 2)
    step = 1e-6
    ahead, _ = branch_map(four_arc, t + step, 2)
    behind, _ = branch_map(four_arc, t - step, 2)
    assert np.allclose(slope, (ahead - behind) / (2 * step), rtol=1e-5)
    assert np.allclose(four_arc.U.eval(th), four_arc.U.eval(t), atol=1e-12)


def test_right_angle_density_at_the_center(right_angle_arc: TSet):
    assert density_closed_form(right_angle_arc, 0.0) == pytest.approx(1 / (math.sqrt(2) * math.pi),
                                                                      rel=1e-10)


def test_density_is_continuous_across_the_extremal(right_angle_arc: TSet):
    offsets = np.array([-1e-3, -1e-8, 1e-8, 1e-3])
    values = density_closed_form(right_angle_arc, offsets)
    assert np.allclose(values, 1 / (math.sqrt(2) * math.pi), rtol=1e-5)


def test_density_outside_and_at_endpoints(four_arc: TSet):
    with pytest.raises(OutsideSet):
        density_closed_form(four_arc, 0.0)
    with pytest.raises(EndpointSingularity):
        density_closed_form(four_arc, four_arc.E.intervals[0][0])


def test_jacobian_identity(four_arc: TSet):
    for t in (0.3, 0.5, 0.9):
        for h in range(4):
            assert branch_jacobian_identity(four_arc, t, h) == pytest.approx(1.0, abs=1e-9)


def test_jacobian_identity_near_an_endpoint(four_arc: TSet):
    with pytest.raises(BranchProximity):
        branch_jacobian_identity(four_arc, four_arc.branches[0][0] + 1e-9, 1)


def test_mirror_branch_identity(right_angle_arc: TSet):
    h = right_angle_arc.branch_index(-math.pi / 6)
    assert h != right_angle_arc.branch_index(math.pi / 6)
    identity = branch_jacobian_identity(right_angle_arc, math.pi / 6, h)
    assert identity == pytest.approx(1.0, abs=1e-10)


def test_single_arc_for_every_opening():
    for beta in np.linspace(0.05, math.pi - 0.05, 200):
        tset = single_arc(beta)
        assert len(tset.E) == 1
        assert tset.E.length == pytest.approx(2 * beta, abs=1e-9)
        assert len(tset.branches) == 2
        assert len(tset.inner_extremals[0]) == 1


def test_jacobian_identity_on_every_branch_pair(four_arc: TSet):
    for g, (lo, hi) in enumerate(four_arc.branches):
        angles = lo + (hi - lo) * np.linspace(0.02, 0.98, 200)
        for h in range(len(four_arc.branches)):
            for t in angles:
                assert branch_jacobian_identity(four_arc, t, h) == pytest.approx(1.0, abs=1e-9), \
                    (g, h, t)


def _mirrored(tset: TSet, X, h):
    ends = branch_inverse(tset, h, np.asarray(tset.U.eval(np.array(X))))
    return float(np.min(ends)), float(np.max(ends))


def test_change_of_variables_onto_each_branch(four_arc: TSet):
    dens = density_model_for(four_arc)
    lo, hi = four_arc.branches[0]
    X = (lo + 0.2 * (hi - lo), lo + 0.7 * (hi - lo))
    f = FOUR_ARC_U + TrigPoly([0.0, 0.0, 0.0, 0.05], [0.05])
    p = 0.5
    for h in range(len(four_arc.branches)):
        X_h = _mirrored(four_arc, X, h)

        def moved(t, h=h):
            return f.eval(branch_map(four_arc, t, h)[0]) * dens.density(t)

        def moved_slope(t, h=h):
            th, factor = branch_map(four_arc, t, h)
            w = dens.density(t)
            return np.abs(f.eval_derivative(th) * factor / w) ** p * w

        def plain(t):
            return f.eval(t) * dens.density(t)

        def plain_slope(t):
            w = dens.density(t)
            return np.abs(f.eval_derivative(t) / w) ** p * w

        assert integrate_singular(moved, X, spec=TIGHT).value == pytest.approx(
            integrate_singular(plain, X_h, spec=TIGHT).value, abs=1e-8)
        assert integrate_singular(moved_slope, X, spec=TIGHT).value == pytest.approx(
            integrate_singular(plain_slope, X_h, spec=TIGHT).value, abs=1e-8)


def test_closed_form_density_has_unit_mass(right_angle_arc: TSet):
    result = integrate_singular(lambda t: density_closed_form(right_angle_arc, t),
                                (-math.pi / 2, math.pi / 2), {"lo", "hi"})
    assert result.converged
    assert result.value == pytest.approx(1.0, abs=1e-8)
