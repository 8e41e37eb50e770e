import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from radialmax import (
    AnalyticProfile,
    CaseError,
    ClosedFormNuSharp,
    ExponentPair,
    ModeError,
    ParameterError,
    TypeRegion,
    closure_boundary,
    endpoint_classify,
    quadrangle_vertices_general,
    quadrangle_vertices_radial,
    region_membership,
    triangle_vertices,
)
from radialmax.type_sets import (
    LinearNuSharp,
    active_constraints,
    constraint_values,
    distance_to_boundary,
)

LOG32 = math.log(2) / math.log(3)
rationals01 = st.fractions(min_value=0, max_value=1, max_denominator=50)


def pair(x, y):
    return ExponentPair(F(x), F(y))


def as_tuples(verts):
    return [(v.inv_p, v.inv_q) for v in verts]


# vertices ------------------------------------------------------------------------
def test_triangle_vertices_examples():
    assert as_tuples(triangle_vertices(3, 1))[1:] == [(F(2, 3), F(2, 3)), (F(2, 3), F(2, 9))]
    assert as_tuples(triangle_vertices(2, F(1, 2)))[1:] == [(F(2, 3), F(2, 3)), (F(4, 7), F(2, 7))]
    assert as_tuples(triangle_vertices(3, 0)) == [(0, 0), (1, 1), (F(3, 4), F(1, 4))]


def test_general_quadrangle_examples():
    v = as_tuples(quadrangle_vertices_general(2, 1, 1))
    assert v[2:] == [(F(1, 2), F(1, 2)), (F(2, 5), F(1, 5))]
    v = as_tuples(quadrangle_vertices_general(3, 0, 0))
    assert v[2] == v[3] == (F(3, 4), F(1, 4))
    v = as_tuples(quadrangle_vertices_general(2, F(1, 2), F(1, 2)))
    assert v[2:] == [(F(3, 5), F(2, 5)), (F(1, 2), F(1, 4))]


def test_radial_quadrangle_examples():
    v = as_tuples(quadrangle_vertices_radial(F(1, 2), 1))
    assert v[2:] == [(F(1, 2), F(1, 4)), (F(7, 12), F(1, 3))]
    v = as_tuples(quadrangle_vertices_radial(0, 1))
    assert v[2:] == [(F(1, 2), F(1, 4)), (F(2, 3), F(1, 3))]
    assert as_tuples(quadrangle_vertices_radial(F(9, 10), 1))[2] == (F(1, 2), F(1, 4))


def test_radial_quadrangle_case_error():
    with pytest.raises(CaseError):
        quadrangle_vertices_radial(F(1, 2), F(3, 4))
    with pytest.raises(ParameterError):
        quadrangle_vertices_radial(F(1, 2), F(1, 4))


def test_float_inputs_give_floats():
    p1, p2, p3 = triangle_vertices(2, 0.5)
    assert p3.inv_p == pytest.approx(4 / 7) and not p3.is_exact


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), rationals01)
def test_vertex_equality_patterns(d, beta):
    R = TypeRegion(d, beta)
    p1, p2, p3 = triangle_vertices(d, beta)
    assert constraint_values(R, p2)["diagonal"] == 0
    assert constraint_values(R, p2)["beta_line"] == 0
    c3 = constraint_values(R, p3)
    assert c3["scaling"] == 0 and c3["beta_line"] == 0
    for v in (p1, p2, p3):
        assert all(val <= 0 for val in constraint_values(R, v).values())


@settings(max_examples=60, deadline=None)
@given(rationals01)
def test_degeneration_at_critical_gamma(beta):
    # 2 gamma - beta = 1 is excluded; approach it from above in exact arithmetic
    gamma_c = (1 + beta) / 2
    p3 = triangle_vertices(2, beta)[2]
    eps = F(1, 10**30)
    if gamma_c + eps > 1:
        return
    _, _, p4, p5 = quadrangle_vertices_radial(beta, gamma_c + eps)
    for v in (p4, p5):
        assert abs(v.inv_p - p3.inv_p) < F(1, 10**27)
        assert abs(v.inv_q - p3.inv_q) < F(1, 10**27)
    # P4rad lands on P3rad exactly at the critical value
    g = gamma_c
    assert (1 / (1 + g), 1 / (2 * (1 + g))) == (p3.inv_p, p3.inv_q)


# membership ------------------------------------------------------------------------
def test_membership_examples():
    full = TypeRegion(2, 1, ClosedFormNuSharp(1, 1), "closure_d2")
    assert region_membership(full, pair(F(1, 3), F(1, 4))) == "interior"
    reg = TypeRegion(2, F(1, 2), ClosedFormNuSharp(F(1, 2), 1), "closure_d2")
    p3 = triangle_vertices(2, F(1, 2))[2]
    assert region_membership(reg, p3) == "exterior"
    assert constraint_values(reg, p3)["nu_sharp"] + F(1, 2) == F(1, 4) + F(2, 7)
    assert region_membership(reg, pair(0, 0)) == "boundary"
    assert region_membership(TypeRegion(3, F(1, 3)), pair(0, 0)) == "boundary"


def test_mode_errors():
    with pytest.raises(ModeError):
        TypeRegion(3, 1, ClosedFormNuSharp(1, 1), "closure_d2")
    with pytest.raises(ModeError):
        TypeRegion(2, 1, None, "closure_d2")
    with pytest.raises(ModeError):
        TypeRegion(2, 1, mode="hexagon")


def test_infinite_q():
    reg = TypeRegion.for_dimensions(2, F(1, 2), 1)
    # 1/q = 0: nu term tends to slope/2 = 1/2, so the constraint reads 1/p <= 0
    assert region_membership(reg, ExponentPair.from_pq(math.inf, math.inf)) == "boundary"
    assert region_membership(reg, ExponentPair.from_pq(4, math.inf)) == "exterior"


@settings(max_examples=100, deadline=None)
@given(rationals01, st.fractions(min_value=F(1, 50), max_value=F(1, 2), max_denominator=50))
def test_minimal_nu_sharp_is_q_le_2p(x, y):
    # for q >= 2 the constraint with nu_sharp(alpha) = alpha reads q <= 2p
    R = TypeRegion(2, 1, LinearNuSharp(), "closure_d2")
    val = constraint_values(R, ExponentPair(x, y))["nu_sharp"]
    assert (val <= 0) == (x <= 2 * y)


@pytest.mark.parametrize("beta,gamma", [(F(1, 2), F(1)), (F(0), F(1)), (F(2, 5), F(4, 5)), (F(9, 10), F(1))])
def test_quadrangle_sandwich(beta, gamma):
    R = TypeRegion(2, beta, ClosedFormNuSharp(beta, gamma), "closure_d2")
    for v in quadrangle_vertices_radial(beta, gamma):
        assert region_membership(R, v) != "exterior"
    tri = TypeRegion(2, float(beta))
    Rf = TypeRegion(2, float(beta), ClosedFormNuSharp(float(beta), float(gamma)), "closure_d2")
    grid = np.arange(201) / 200
    for x in grid:
        for y in grid:
            pt = ExponentPair(float(x), float(y))
            if region_membership(Rf, pt) != "exterior":
                assert region_membership(tri, pt, tol=1e-9) != "exterior"


# boundary ------------------------------------------------------------------------
def test_boundary_triangle_vertices():
    B = closure_boundary(TypeRegion(3, 0), 100)
    assert as_tuples(B.vertices) == [(0, 0), (1, 1), (F(3, 4), F(1, 4))]


def test_boundary_full_interval_corners():
    R = TypeRegion(2, 1, ClosedFormNuSharp(1, 1), "closure_d2")
    corners = as_tuples(closure_boundary(R, 64).vertices)
    assert (F(1, 2), F(1, 2)) in corners and (F(1, 2), F(1, 4)) in corners


def test_boundary_full_interval_against_grid_scan():
    # oracle: rightmost member on each row of a 400^2 grid, against 1/p = min(1/2, 2/q) and the traced polyline
    R = TypeRegion(2, 1, ClosedFormNuSharp(1, 1), "closure_d2")
    B = closure_boundary(R, 64)
    grid = np.arange(401) / 400
    for y in grid[1:200:20]:
        inside = [x for x in grid if region_membership(R, ExponentPair(float(x), float(y))) != "exterior"]
        assert max(inside) == pytest.approx(min(0.5, 2 * y), abs=1 / 400)
        assert distance_to_boundary(B, (max(inside), y)) <= 1 / 400 + 1e-12


def test_boundary_regular_corners():
    R = TypeRegion.for_dimensions(2, F(1, 2), 1)
    corners = as_tuples(closure_boundary(R, 64).vertices)
    assert (F(1, 2), F(1, 4)) in corners and (F(7, 12), F(1, 3)) in corners


@pytest.mark.parametrize(
    "R",
    [
        TypeRegion(3, F(1, 2)),
        TypeRegion(2, F(1, 2), ClosedFormNuSharp(F(1, 2), 1), "closure_d2"),
        TypeRegion(2, 1, ClosedFormNuSharp(1, 1), "closure_d2"),
        TypeRegion(2, F(2, 5), ClosedFormNuSharp(F(2, 5), F(4, 5)), "closure_d2"),
    ],
)
@pytest.mark.parametrize("res", [8, 33])
def test_boundary_points_classify_as_boundary(R, res):
    B = closure_boundary(R, res)
    pts = B.as_array()
    assert np.allclose(pts[0], pts[-1])
    assert np.max(np.hypot(*np.diff(pts, axis=0).T)) <= 1 / res + 1e-12
    for p, active in zip(B.points, B.active):
        assert region_membership(R, p, tol=1e-9) == "boundary"
        assert active


def test_boundary_resolution_guard():
    with pytest.raises(ParameterError):
        closure_boundary(TypeRegion(2, 1), 7)


def test_distance_to_boundary():
    B = closure_boundary(TypeRegion(2, 1), 16)
    assert distance_to_boundary(B, pair(0, 0)) == 0
    assert distance_to_boundary(B, (0.3, 0.2)) > 0


def test_active_constraints_at_p1():
    assert active_constraints(TypeRegion(3, 1), pair(0, 0)) == ["diagonal", "scaling"]


# endpoint classification ----------------------------------------------------------
def test_classify_examples():
    cantor = AnalyticProfile(LOG32, LOG32, True, "cantor")
    p3 = triangle_vertices(3, LOG32)[2]
    assert endpoint_classify(cantor, 3, p3).status == "in_T"
    p3 = triangle_vertices(2, LOG32)[2]
    assert endpoint_classify(cantor, 2, p3).status == "in_T"
    full = AnalyticProfile(1, 1, True, "full", log_weighted_finite=False)
    assert endpoint_classify(full, 2, pair(F(1, 2), F(1, 4))).status == "not_in_T"


def test_classify_open_cases_unresolved():
    # segment from P2 towards P5rad is open when 2 gamma - beta > 1
    reg = AnalyticProfile(0.5, 1.0, False, "regular")
    p2, p5 = quadrangle_vertices_radial(F(1, 2), 1)[1], quadrangle_vertices_radial(F(1, 2), 1)[3]
    mid = ExponentPair((p2.inv_p + p5.inv_p) / 2, (p2.inv_q + p5.inv_q) / 2)
    assert endpoint_classify(reg, 2, mid).status == "unresolved"
    # missing finiteness flag
    unknown = AnalyticProfile(0.5, 0.5, None, "unknown")
    assert endpoint_classify(unknown, 3, triangle_vertices(3, 0.5)[2]).status == "unresolved"


def test_classify_exterior():
    cantor = AnalyticProfile(LOG32, LOG32, True, "cantor")
    v = endpoint_classify(cantor, 3, ExponentPair.from_pq(2, math.inf))
    assert v.status == "not_in_T" and v.case


@settings(max_examples=80, deadline=None)
@given(rationals01, rationals01, st.integers(2, 4))
def test_classify_always_returns_a_verdict(x, y, d):
    prof = AnalyticProfile(F(1, 2), F(3, 4), True, "x", log_weighted_finite=None)
    v = endpoint_classify(prof, d, ExponentPair(x, y))
    assert v.status in ("in_T", "not_in_T", "unresolved") and v.case


def test_exponent_pair():
    pt = ExponentPair.from_pq(2, math.inf)
    assert pt.p == 2 and pt.q == math.inf
    assert pt.to_json() == [[1, 2], [0, 1]]
    with pytest.raises(ParameterError):
        ExponentPair(F(3, 2), 0)
    with pytest.raises(ParameterError):
        ExponentPair.from_pq(0.5, 2)
