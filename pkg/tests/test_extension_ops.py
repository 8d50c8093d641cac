import random
from fractions import Fraction as F

import pytest

from generate import pulled_back_structure, smooth_triangle_with_loop, smooth_two_edges, two_vertex_ray
from tropext.affine_kernel import AffineMap, Polyhedron
from tropext.curve_model import validate_extension
from tropext.errors import ExtensionError
from tropext.extension_ops import (check_open_universality, classify, face_restrict, pullback_extension)
from tropext.random_instances import random_map_into, smooth_target_curve
from tropext.universal_extension import build_Pu

SECTION = AffineMap(2, 3, [[1, 0], [1, 1], [0, 1]], [0, 2, 2])


@pytest.fixture(scope="module")
def worked():
    return build_Pu(two_vertex_ray())


def test_pullback_along_identity_is_the_same_extension(worked):
    u = worked
    s = pullback_extension(u.structure, AffineMap.identity(u.pu.dim), u.pu, u.basepoint)
    assert classify(u, s).map == AffineMap.identity(u.pu.dim)


def test_pullback_to_the_basepoint(worked):
    u = worked
    s = pullback_extension(u.structure, AffineMap.constant(0, u.basepoint), Polyhedron.full(0), ())
    assert validate_extension(u.curve, s).ok
    assert s.rho["e"] == AffineMap.constant(0, [2])
    assert classify(u, s).map == AffineMap.constant(0, u.basepoint)


def test_pullback_rejects_a_map_leaving_the_base(worked):
    m = AffineMap(1, 3, [[1], [0], [1]], [0, 2, 2])
    with pytest.raises(ExtensionError) as err:
        pullback_extension(worked.structure, m, Polyhedron.orthant(1), (0,))
    assert err.value.code == "NOT_INTO_BASE"


def test_pullback_rejects_moving_the_basepoint(worked):
    with pytest.raises(ExtensionError) as err:
        pullback_extension(worked.structure, SECTION, Polyhedron.orthant(2), (1, 0))
    assert err.value.code == "BASEPOINT_MISMATCH"


def test_classify_recovers_the_section(worked):
    cm = classify(worked, pulled_back_structure())
    assert cm.ok
    assert cm.map == SECTION


def test_classify_refuses_a_structure_over_another_curve(worked):
    other = build_Pu(two_vertex_ray(F(3))).structure
    with pytest.raises(ExtensionError) as err:
        classify(worked, other)
    assert err.value.code == "NOT_AN_EXTENSION"


@pytest.mark.parametrize("seed", range(8))
def test_classification_round_trip(seed):
    rng = random.Random(seed)
    u = build_Pu(smooth_target_curve(rng, 5))
    base, m, bp = random_map_into(rng, u.pu, u.basepoint)
    assert classify(u, pullback_extension(u.structure, m, base, bp)).map == m


def test_face_of_a_single_smoothed_edge():
    c = smooth_two_edges()
    fr = face_restrict(build_Pu(c), c, ["a"])
    assert fr.face == Polyhedron(2, [([0, 1], 0)], [([1, 0], 0)])
    assert len(fr.contracted_curve.vertices) == 1
    assert [e.id for e in fr.contracted_curve.edges] == ["b"]
    assert fr.witness_point[0] == 0 and fr.witness_point[1] > 0


def test_smoothing_a_cycle_is_refused():
    c = smooth_two_edges()
    with pytest.raises(ExtensionError) as err:
        face_restrict(build_Pu(c), c, ["a", "b"])
    assert err.value.code == "NEW_CYCLE"


def test_unknown_edge_is_refused():
    c = smooth_two_edges()
    with pytest.raises(ExtensionError) as err:
        face_restrict(build_Pu(c), c, ["zz"])
    assert err.value.code == "UNKNOWN_EDGE"


def test_worked_example_face_merges_the_vertices(worked):
    fr = face_restrict(worked, worked.curve, ["e"])
    assert fr.face.dimension() == 1
    assert fr.face.contains((1, 1, 0)) and not fr.face.contains((1, 2, 0))
    assert [v.id for v in fr.contracted_curve.vertices] == ["v0+v1"]


def test_empty_smoothing_is_the_identity():
    c = smooth_triangle_with_loop()
    rep = check_open_universality(build_Pu(c), c, [])
    assert rep.ok and rep.isomorphism == "identity"


def test_smoothing_in_the_worked_example(worked):
    rep = check_open_universality(worked, worked.curve, ["e"])
    assert rep.ok and rep.isomorphism == "affine"
    assert rep.contracted_pu == Polyhedron.orthant(1)


@pytest.mark.parametrize("smoothed", [["e0"], ["e1"], ["e0", "e1"], ["e2"]])
def test_triangle_faces(smoothed):
    c = smooth_triangle_with_loop()
    rep = check_open_universality(build_Pu(c), c, smoothed)
    assert rep.ok, rep.detail
    assert rep.face.dimension() == 4 - len(smoothed)
