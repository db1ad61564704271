from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from impedance_mtd.errors import CapacityError, InvalidGeometryError, ParameterError
from impedance_mtd.fabric import (CellCoord, ConstraintLimits, FabricState, Placement, build_state,
                                  default_placement, new_fabric, validate_placement)


def test_capacity_of_default_fabric():
    assert new_fabric(16, 16, 4, 8).capacity == 8192


def test_minimal_fabric():
    assert new_fabric(1, 1, 1, 1).capacity == 1


@pytest.mark.parametrize("dims", [(0, 4, 4, 8), (4, 0, 4, 8), (4, 4, 0, 8), (4, 4, 4, 0)])
def test_zero_dimension_rejected(dims):
    with pytest.raises(InvalidGeometryError):
        new_fabric(*dims)


def test_fill_order_starts_in_first_slice():
    g = new_fabric(4, 4)
    lim = ConstraintLimits(2, 2, 1, 1)
    p = default_placement(g, 2, lim)
    assert p[0] == CellCoord(2, 1, 0, 0, 0)
    assert p[1] == CellCoord(2, 1, 0, 1, 0)


def test_fill_order_crosses_slices_then_columns():
    g = new_fabric(2, 2, 2, 2)
    p = default_placement(g, 6, ConstraintLimits(0, 1, 0, 1, frozenset({0, 1})))
    assert [c.site for c in p] == [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0), (0, 0, 1, 1),
                                   (1, 0, 0, 0), (1, 0, 0, 1)]


def test_empty_placement():
    g = new_fabric(2, 2)
    assert len(default_placement(g, 0, ConstraintLimits.whole(g))) == 0


def test_capacity_exceeded():
    g = new_fabric(4, 4)
    with pytest.raises(CapacityError):
        default_placement(g, 33, ConstraintLimits(0, 0, 0, 0))


def test_default_placement_is_valid():
    g = new_fabric(16, 16)
    lim = ConstraintLimits(0, 0, 0, 15)
    assert validate_placement(default_placement(g, 128, lim), g, lim) == []


def test_collision_reported():
    g = new_fabric(2, 2)
    p = Placement((CellCoord(0, 0, 0, 0), CellCoord(0, 0, 0, 0)))
    problems = validate_placement(p, g)
    assert len(problems) == 1 and "collides" in problems[0]


def test_collision_ignores_route_variant():
    g = new_fabric(2, 2)
    p = Placement((CellCoord(0, 0, 0, 0, 0), CellCoord(0, 0, 0, 0, 3)))
    assert any("collides" in v for v in validate_placement(p, g))


def test_out_of_region_reported():
    g = new_fabric(4, 4)
    lim = ConstraintLimits(0, 1, 0, 3)
    p = Placement((CellCoord(2, 0, 0, 0),))
    assert any("out of region" in v for v in validate_placement(p, g, lim))


def test_disallowed_slice_and_variant_reported():
    g = new_fabric(4, 4)
    lim = ConstraintLimits(0, 3, 0, 3, frozenset({0}), frozenset({0}))
    p = Placement((CellCoord(0, 0, 1, 0, 2),))
    problems = validate_placement(p, g, lim)
    assert any("slice 1" in v for v in problems)
    assert any("route variant 2" in v for v in problems)


def test_outside_geometry_reported():
    g = new_fabric(2, 2)
    assert validate_placement(Placement((CellCoord(0, 0, 0, 8),)), g)


def test_limits_outside_geometry_rejected():
    with pytest.raises(ParameterError):
        ConstraintLimits(0, 4, 0, 0).check(new_fabric(4, 4))


def test_empty_limits_rejected():
    with pytest.raises(ParameterError):
        ConstraintLimits(2, 1, 0, 0)
    with pytest.raises(ParameterError):
        ConstraintLimits(0, 1, 0, 0, frozenset())


def test_bits_length_must_match():
    g = new_fabric(1, 1)
    with pytest.raises(ParameterError):
        FabricState(g, Placement((CellCoord(0, 0, 0, 0),)), (0, 1))


def test_placement_json_round_trip():
    g = new_fabric(4, 4)
    lim = ConstraintLimits(1, 2, 0, 3, frozenset({0, 2}), frozenset({0, 1}))
    p = Placement((CellCoord(1, 0, 0, 3, 1), CellCoord(2, 3, 2, 7, 0)))
    obj = p.to_json(g, lim)
    assert obj["assignment"] == [[0, 1, 0, 0, 3, 1], [1, 2, 3, 2, 7, 0]]
    assert Placement.from_json(obj) == p
    assert ConstraintLimits.from_json(obj["limits"]) == lim
    assert type(g).from_json(obj["geometry"]) == g


def test_build_state_regions_disjoint():
    g = new_fabric(4, 4)
    st_ = build_state(g, [(0, ConstraintLimits(0, 0, 0, 3), 8), (1, ConstraintLimits(1, 1, 0, 3), 8)])
    assert validate_placement(st_.placement, g) == []
    assert st_.regions[1].start == 8


@st.composite
def geometry_limits_n(draw):
    w, h = draw(st.integers(1, 6)), draw(st.integers(1, 6))
    spc, fps = draw(st.integers(1, 4)), draw(st.integers(1, 8))
    g = new_fabric(w, h, spc, fps)
    x0 = draw(st.integers(0, w - 1))
    x1 = draw(st.integers(x0, w - 1))
    y0 = draw(st.integers(0, h - 1))
    y1 = draw(st.integers(y0, h - 1))
    slices = draw(st.sets(st.integers(0, spc - 1), min_size=1))
    lim = ConstraintLimits(x0, x1, y0, y1, frozenset(slices))
    n = draw(st.integers(0, lim.site_capacity(g)))
    return g, lim, n


@given(geometry_limits_n())
def test_default_placement_always_valid(args):
    g, lim, n = args
    p = default_placement(g, n, lim)
    assert len(p) == n
    assert validate_placement(p, g, lim) == []
    assert len({c for c in p}) == n


@given(geometry_limits_n())
def test_default_placement_is_pure(args):
    g, lim, n = args
    assert default_placement(g, n, lim) == default_placement(g, n, lim)
