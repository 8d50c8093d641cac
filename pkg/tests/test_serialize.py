import json
from fractions import Fraction as F

import pytest

from generate import (pulled_back_structure, ray_with_leg, smooth_triangle_with_loop, split_assignment, split_ray,
                      swap_monodromy, two_vertex_ray)
from tropext.affine_kernel import AffineMap, Polyhedron
from tropext.degree_one_pushout import DegreeOneMap
from tropext.serialize import (ParseError, degree_one_json, dumps, map_json, parse_map, parse_polyhedron,
                               parse_problem, parse_structure, polyhedron_json, problem_json, rat, structure_json)
from tropext.universal_extension import build_Pu


def round_trip(obj):
    return parse_problem(dumps(obj))


def test_rationals_are_written_as_strings():
    assert rat(F(3, 2)) == "3/2"
    assert rat(4) == "4"
    assert rat(F(-1, 3)) == "-1/3"


def test_map_round_trip():
    m = AffineMap(2, 3, [[1, 0], [1, 1], [0, -2]], [F(1, 2), 0, 7])
    assert parse_map(json.loads(json.dumps(map_json(m)))) == m


def test_polyhedron_round_trip_is_canonical():
    p = Polyhedron(2, [([1, 0], 0), ([0, 1], 0), ([2, 0], -1)])
    out = polyhedron_json(p)
    assert parse_polyhedron(out) == p
    assert out["rays"] == [[0, 1], [1, 0]]
    assert out["vertices"] == [["0", "0"]]
    assert len(out["inequalities"]) == 2


@pytest.mark.parametrize("builder", [two_vertex_ray, ray_with_leg, swap_monodromy, smooth_triangle_with_loop])
def test_curve_round_trip(builder):
    c = builder()
    assert round_trip(problem_json(c)).curve == c


def test_structure_round_trip():
    s = pulled_back_structure()
    back = parse_structure(json.loads(dumps(structure_json(s))), s.curve)
    assert structure_json(back) == structure_json(s)


def test_degree_one_round_trip():
    d = DegreeOneMap(split_ray(2), two_vertex_ray(), split_assignment(2), {"e": ("s0", "s1")})
    prob = round_trip(problem_json(d.source, degree_one=degree_one_json(d)))
    assert prob.degree_one.target == d.target
    assert prob.degree_one.edge_chains == d.edge_chains
    assert prob.degree_one.vertex_assignment == d.vertex_assignment


def test_digest_is_of_the_exact_text():
    text = dumps(problem_json(two_vertex_ray()))
    assert parse_problem(text).digest == parse_problem(text).digest
    assert parse_problem(text).digest != parse_problem(text + " ").digest


@pytest.mark.parametrize("mutate,fragment", [
    (lambda o: o["curve"]["edges"][0].__setitem__("length", "1/0"), "1/0"),
    (lambda o: o["curve"]["edges"][0].__setitem__("stratum", "nowhere"), "nowhere"),
    (lambda o: o.pop("strata"), "strata"),
    (lambda o: o.__setitem__("version", "other/9"), "version"),
])
def test_malformed_inputs_raise_parse_errors(mutate, fragment):
    obj = problem_json(two_vertex_ray())
    mutate(obj)
    with pytest.raises(ParseError) as err:
        parse_problem(dumps(obj))
    assert fragment in str(err.value)
    assert err.value.record()["error"] == "PARSE_ERROR"


def test_invalid_json():
    with pytest.raises(ParseError):
        parse_problem("{not json")


def test_universal_structure_survives_serialization():
    u = build_Pu(ray_with_leg())
    text = dumps(problem_json(u.curve, extension=structure_json(u.structure)))
    assert structure_json(parse_problem(text).extension) == structure_json(u.structure)
