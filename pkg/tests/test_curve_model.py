from dataclasses import replace
from fractions import Fraction as F

import pytest

from generate import POINT, RAY, non_injective_germ, ray_with_leg, smooth_two_edges, two_vertex_ray
from tropext.affine_kernel import AffineMap, Polyhedron
from tropext.curve_model import (CurveType, Edge, Flag, Vertex, fiber_at, node_polyhedron, trivial_extension,
                                 validate_curve_type, validate_extension)
from tropext.errors import ExtensionError
from tropext.universal_extension import build_Pu


def failing_checks(rep):
    return {(f.check, f.subject) for f in rep.failures()}


def test_smooth_two_vertex_curve_is_valid():
    v0, v1 = Vertex("v0", POINT, ()), Vertex("v1", POINT, ())
    e = Edge("e", F(2), POINT, AffineMap(1, 0), (Flag("v0", AffineMap(0, 0)), Flag("v1", AffineMap(0, 0))))
    assert validate_curve_type(CurveType((v0, v1), (e,))).ok


def test_fixture_curves_are_valid():
    for c in (two_vertex_ray(), smooth_two_edges(), ray_with_leg()):
        assert validate_curve_type(c).ok


def test_non_injective_germ_names_the_flag():
    rep = validate_curve_type(non_injective_germ())
    assert ("germ_iso_onto_face", "e.flag1") in failing_checks(rep)


def test_endpoint_mismatch_reports_both_points():
    c = two_vertex_ray()
    moved = replace(c.vertices[0], position=(F(1),))
    rep = validate_curve_type(CurveType((moved, c.vertices[1]), c.edges))
    bad = [f for f in rep.failures() if f.check == "endpoint_matches"]
    assert bad and bad[0].subject == "e.flag0"
    assert bad[0].witness == {"germ_of_position": ["1"], "trajectory_end": ["0"]}


def test_structural_failures():
    c = two_vertex_ray()
    assert ("has_vertex", "curve") in failing_checks(validate_curve_type(CurveType(())))
    lonely = Vertex("z", RAY, (F(0),))
    assert ("connected", "curve") in failing_checks(validate_curve_type(CurveType(c.vertices + (lonely,), c.edges)))
    e = c.edges[0]
    dangling = replace(e, flags=(e.flags[0], Flag("nowhere", e.flags[1].germ)))
    assert ("references_resolve", "curve") in failing_checks(validate_curve_type(CurveType(c.vertices, (dangling,))))
    assert ("length_positive", "e") in failing_checks(
        validate_curve_type(CurveType(c.vertices, (replace(e, length=F(0)),))))


def test_monodromy_must_fix_position():
    swap = AffineMap(2, 2, [[0, 1], [1, 0]])
    quad = replace(RAY, id="quad", polytope=Polyhedron.orthant(2))
    v = Vertex("v", quad, (F(1), F(2)), (swap,))
    assert ("monodromy_fixes_position", "v.monodromy0") in failing_checks(validate_curve_type(CurveType((v,))))


def test_trivial_extension_is_valid():
    for c in (two_vertex_ray(), smooth_two_edges(), ray_with_leg()):
        assert validate_extension(c, trivial_extension(c)).ok


def test_universal_extension_is_valid():
    for c in (two_vertex_ray(), smooth_two_edges(), ray_with_leg()):
        assert validate_extension(c, build_Pu(c).structure).ok


def test_wrong_node_polyhedron_is_rejected():
    c = two_vertex_ray()
    s = build_Pu(c).structure
    s.node_polys["e"] = s.base.product(Polyhedron.orthant(1))
    assert ("node_is_pullback", "e") in failing_checks(validate_extension(c, s))


def test_node_polyhedron_layout():
    node = node_polyhedron(Polyhedron.orthant(1), AffineMap.identity(1))
    assert node.contains((3, 1, 2))
    assert not node.contains((3, 1, 1))


def test_fiber_at_basepoint_is_the_curve():
    for c in (two_vertex_ray(), smooth_two_edges(), ray_with_leg()):
        u = build_Pu(c)
        assert fiber_at(u.structure, u.basepoint) == c


def test_fiber_at_another_point_of_smooth_target():
    c = smooth_two_edges()
    u = build_Pu(c)
    fib = fiber_at(u.structure, (1, 3))
    assert [e.length for e in fib.edges] == [1, 3]


def test_fiber_at_zero_length_and_outside():
    u = build_Pu(smooth_two_edges())
    with pytest.raises(ExtensionError) as err:
        fiber_at(u.structure, (0, 3))
    assert err.value.code == "ZERO_LENGTH_EDGE"
    with pytest.raises(ExtensionError) as err:
        fiber_at(u.structure, (-1, 3))
    assert err.value.code == "NOT_IN_BASE"
