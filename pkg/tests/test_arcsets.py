import math

import numpy as np
import pytest

from lpbernstein.arcsets import TWO_PI, ArcSet, Block, block_properties, partition_small
from lpbernstein.equilibrium import density_model_for
from lpbernstein.errors import ComponentTooShort, InvalidArcSet, OutsideSet
from lpbernstein.models import ArcSetSpec, ParamSet
from lpbernstein.trigpoly import ChebyshevComposite

PARAMS = ParamSet.for_p(0.5)


def test_two_arcs_keep_their_coordinates():
    arcs = ArcSet([(-2.0, -1.0), (1.0, 2.0)])
    assert len(arcs) == 2
    assert arcs.origin == 0.0
    assert arcs.intervals[0] == (1.0, 2.0)
    assert arcs.intervals[1] == pytest.approx((TWO_PI - 2.0, TWO_PI - 1.0))
    assert arcs.length == pytest.approx(2.0)
    assert len(arcs.endpoints) == 4


def test_arc_through_zero_is_lifted_without_wrapping():
    arcs = ArcSet([(-0.5, 0.3)])
    assert arcs.origin == pytest.approx(math.pi - 0.1)
    lo, hi = arcs.intervals[0]
    assert lo == pytest.approx(TWO_PI - 0.5)
    assert hi - lo == pytest.approx(0.8)
    assert arcs.contains(0.0)[0]
    assert arcs.contains(TWO_PI - 0.1)[0]
    assert not arcs.contains(1.0)[0]


@pytest.mark.parametrize("intervals", [
    [],
    [(1.0, 1.0)],
    [(2.0, 1.0)],
    [(0.0, 1.0), (0.5, 2.0)],
    [(0.0, 1.0), (1.0, 2.0)],
    [(0.0, math.inf)],
    [(0.0, TWO_PI), (1.0, 2.0)],
])
def test_malformed_arc_systems(intervals):
    with pytest.raises(InvalidArcSet):
        ArcSet(intervals)


def test_full_circle():
    arcs = ArcSet.full_circle()
    assert arcs.is_full_circle
    assert arcs.endpoints == []
    assert arcs.length == pytest.approx(TWO_PI)
    assert arcs.contains(np.array([-10.0, 0.0, 3.0])).all()


def test_spec_round_trip():
    arcs = ArcSet.from_spec(ArcSetSpec(arcs=[[1.0, 2.0], [3.0, 4.0]]))
    assert ArcSet.from_spec(arcs.to_spec()).intervals == arcs.intervals


def test_spec_arcs_need_two_angles():
    with pytest.raises(InvalidArcSet):
        ArcSet.from_spec(ArcSetSpec(arcs=[[1.0, 2.0, 3.0]]))


def test_locate_shifts_into_the_window():
    arcs = ArcSet([(-2.0, -1.0), (1.0, 2.0)])
    index, lo, hi = arcs.locate(-1.8, -1.2)
    assert index == 1
    assert lo == pytest.approx(TWO_PI - 1.8)
    assert hi == pytest.approx(TWO_PI - 1.2)
    with pytest.raises(OutsideSet):
        arcs.locate(0.0, 0.5)


def test_grid_stays_inside():
    arcs = ArcSet([(-2.0, -1.0), (1.0, 2.0)])
    points = arcs.grid(100)
    assert points.size == 100
    assert arcs.contains(points).all()
    assert not any(arcs.is_endpoint(float(t)) for t in points)


def test_partition_cell_lengths(four_arc):
    n = 2 ** 40
    partition = partition_small(four_arc.E, n, PARAMS)
    scale = float(n) ** PARAMS.kappa
    widths = np.array([c.length for c in partition.cells])
    assert np.all(widths >= 1 / (2 * scale) - 1e-12)
    assert np.all(widths <= 1 / scale + 1e-12)
    assert partition.total_length == pytest.approx(four_arc.E.length)


def test_short_components_are_rejected(four_arc):
    # each component is about 0.82 long while 1/64^kappa is about 0.878
    with pytest.raises(ComponentTooShort):
        partition_small(four_arc.E, 64, PARAMS)


def test_finest_partition_of_the_circle(cos2t):
    coarse = partition_small(cos2t.E, 64, PARAMS)
    finest = partition_small(cos2t.E, 64, PARAMS, finest=True)
    assert len(finest.cells) == 14
    assert len(finest.cells) >= len(coarse.cells)
    assert finest.cells[0].length == pytest.approx(TWO_PI / 14)


def test_blocks_on_the_circle_wrap_around(cos2t):
    partition = partition_small(cos2t.E, 64, PARAMS, finest=True)
    first = partition.block(0, 1)
    assert len(first.borders) == 2
    assert first.borders[0][1] == pytest.approx(0.0)
    last = partition.block(13, 14)
    assert last.borders[1][0] == pytest.approx(TWO_PI)
    assert partition.block(0, 14).borders == ()
    with pytest.raises(InvalidArcSet):
        partition.block(3, 3)


def test_block_properties_inside_a_branch(cos2t):
    dens = density_model_for(cos2t)
    partition = partition_small(cos2t.E, 64, PARAMS, finest=True)
    blk = partition.block(1, 2)
    tn = ChebyshevComposite.chebyshev(32, cos2t.U)
    report = block_properties(cos2t, tn, blk, PARAMS, dens)
    assert report.I
    assert report.III
    assert report.h_length == pytest.approx(TWO_PI / 14)
    assert report.a_border is not None and report.a_border > 0
    assert report.b_border is not None and report.b_border > 0


def test_block_hull():
    blk = Block(n=64, indices=(1,), H=(1.0, 1.5), borders=((0.5, 1.0), (1.5, 2.0)))
    assert blk.hull == (0.5, 2.0)
    assert blk.h_length == pytest.approx(0.5)
    assert len(blk.border_arcs) == 2


def test_borders_that_meet_across_the_gap_merge(cos2t):
    partition = partition_small(cos2t.E, 64, PARAMS, finest=True)
    width = TWO_PI / 14
    for start, stop in ((1, 13), (0, 12)):
        blk = partition.block(start, stop)
        assert len(blk.borders) == 2
        merged = blk.border_arcs
        assert len(merged) == 1
        assert merged.length == pytest.approx(2 * width)
    apart = partition.block(2, 5).border_arcs
    assert len(apart) == 2
