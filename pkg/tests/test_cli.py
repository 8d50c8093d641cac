import json
import subprocess
import sys

import pytest

from tropext.cli import build_parser, main, run

COMMANDS = ["validate", "universal", "classify", "pullback", "pushout", "facecheck"]

# expected exit codes, in COMMANDS order
EXIT_CODES = {
    "bad_rational": [2, 2, 2, 2, 2, 2],
    "contracted_leg": [0, 0, 2, 2, 0, 0],
    "contracted_subtree": [0, 0, 2, 2, 0, 0],
    "edgeless_point": [0, 0, 2, 2, 2, 0],
    "extension_pullback": [0, 0, 0, 2, 2, 0],
    "extension_wrong_length": [1, 0, 1, 2, 2, 0],
    "non_injective_germ": [1, 1, 2, 2, 2, 1],
    "pullback_ray": [0, 0, 0, 0, 2, 0],
    "ray_with_leg": [0, 0, 2, 2, 2, 0],
    "smooth_triangle_loop": [0, 0, 2, 2, 2, 0],
    "smooth_two_edges": [0, 0, 2, 2, 2, 0],
    "split_edge_2": [0, 0, 2, 2, 0, 0],
    "split_edge_3": [0, 0, 2, 2, 0, 0],
    "swap_monodromy": [0, 0, 2, 2, 2, 0],
    "two_vertex_ray": [0, 0, 2, 2, 2, 0],
}


def invoke(fixture_path, name, command, *extra):
    args = build_parser().parse_args(["--command", command, "--input", str(fixture_path(name)), *extra])
    code, out = run(command, fixture_path(name).read_text(), args)
    return code, json.loads(out)


@pytest.mark.parametrize("name", sorted(EXIT_CODES))
def test_exit_codes(fixture_path, name):
    for command, expected in zip(COMMANDS, EXIT_CODES[name]):
        code, out = invoke(fixture_path, name, command)
        assert code == expected, (command, out)
        assert out["version"] == "tropext/1" and out["command"] == command
        if code:
            assert out["status"] != "ok"
            assert {"error", "message", "witness"} <= set(out)


def test_missing_section_names_what_is_needed(fixture_path):
    code, out = invoke(fixture_path, "two_vertex_ray", "pushout")
    assert code == 2
    assert out["error"] == "MISSING_SECTION"
    assert out["witness"] == {"needs": ["degree_one"]}


def test_validation_failure_names_the_flag(fixture_path):
    code, out = invoke(fixture_path, "non_injective_germ", "validate")
    assert code == 1 and "e.flag1" in out["message"]


def test_bad_rational_is_a_parse_error(fixture_path):
    code, out = invoke(fixture_path, "bad_rational", "validate")
    assert code == 2 and out["error"] == "PARSE_ERROR" and out["input_sha256"] == ""


def test_universal_output(fixture_path):
    code, out = invoke(fixture_path, "two_vertex_ray", "universal")
    assert code == 0
    assert out["coordinates"] == ["v0[0]", "v1[0]", "e"]
    assert out["basepoint"] == ["0", "2", "2"]
    assert out["pu"]["equalities"] == [[[1, -1, 1], "0"]] or out["pu"]["equalities"] == [[[-1, 1, -1], "0"]]
    assert out["embedding"]["injective"]


def test_classify_from_extension(fixture_path):
    code, out = invoke(fixture_path, "extension_pullback", "classify")
    assert code == 0
    assert out["map"]["linear"] == [[1, 0], [1, 1], [0, 1]]
    assert out["map"]["translate"] == ["0", "2", "2"]


def test_pushout_sums_the_pieces(fixture_path):
    code, out = invoke(fixture_path, "split_edge_2", "pushout")
    assert code == 0
    assert out["structure"]["rho"]["e"]["linear"] == [[0, 0, 0, 1, 1]]
    assert out["report"]["ok"]


def test_facecheck_smoothing_sources(fixture_path):
    code, out = invoke(fixture_path, "smooth_triangle_loop", "facecheck")
    assert code == 0 and out["smoothed_edges"] == ["e0"]
    code, out = invoke(fixture_path, "smooth_triangle_loop", "facecheck", "--smooth-edges", "e1, e2")
    assert code == 0 and out["smoothed_edges"] == ["e1", "e2"]
    code, out = invoke(fixture_path, "two_vertex_ray", "facecheck")
    assert code == 0 and out["smoothed_edges"] == [] and out["isomorphism"] == "identity"


def test_facecheck_cycle_fails(fixture_path):
    code, out = invoke(fixture_path, "smooth_two_edges", "facecheck", "--smooth-edges", "a,b")
    assert code == 1 and out["error"] == "NEW_CYCLE"


def test_output_is_deterministic(fixture_path):
    args = build_parser().parse_args(["--command", "universal"])
    text = fixture_path("swap_monodromy").read_text()
    assert run("universal", text, args) == run("universal", text, args)


def test_main_writes_output_file(fixture_path, tmp_path):
    out = tmp_path / "sol.json"
    assert main(["--command", "universal", "--input", str(fixture_path("ray_with_leg")), "--output", str(out)]) == 0
    assert json.loads(out.read_text())["status"] == "ok"


def test_main_missing_input(tmp_path):
    assert main(["--command", "validate", "--input", str(tmp_path / "absent.json")]) == 2
    assert main(["--command", "validate"]) == 2


def test_selftest_small(capsys):
    assert main(["--command", "selftest", "--rounds", "2", "--seed", "3"]) == 0
    assert "all suites passed" in capsys.readouterr().out


def test_console_entry_point(fixture_path):
    proc = subprocess.run([sys.executable, "-m", "tropext.cli", "--command", "validate",
                           "--input", str(fixture_path("two_vertex_ray"))], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["curve_report"]["ok"]
