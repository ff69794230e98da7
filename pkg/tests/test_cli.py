import json

import pytest

from twistlab.cli.config import load_config
from twistlab.cli.main import main
from twistlab.cli.scenario import ScenarioError, parse_scenario

S3 = "group S3\nperm (0 1 2)\nperm (0 1)\n"
S4 = "group S4\nperm (0 1 2 3)\nperm (0 1)\n"
HX = "builtin heisenberg p=5\ntwist\nbasis x c\nform\n0 1\n4 0\n"
HY = "builtin heisenberg p=5\ntwist\nbasis y c\nform\n0 1\n4 0\n"


@pytest.fixture
def cache_dir(tmp_path):
    return str(tmp_path / "cache")


def run(argv, cache_dir, capsys):
    code = main(argv + ["--cache-dir", cache_dir])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_builtin_scenario_passes(cache_dir, capsys):
    code, out, _ = run(["run", "asp", "--n", "2", "--machine"], cache_dir, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "pass"
    assert doc["steps"][0]["values"]["order"] == 24


def test_reports_are_deterministic_with_and_without_cache(cache_dir, capsys):
    argv = ["run", "quadratic", "--n", "2", "--machine"]
    first = run(argv, cache_dir, capsys)
    second = run(argv, cache_dir, capsys)
    uncached = run(argv + ["--no-cache"], cache_dir, capsys)
    assert first[0] == second[0] == uncached[0] == 0
    assert first[1] == second[1] == uncached[1]


def test_cache_is_hit_on_second_run(cache_dir, capsys):
    argv = ["run", "asp", "--n", "2", "-v"]
    run(argv, cache_dir, capsys)
    _, _, err = run(argv, cache_dir, capsys)
    hits = int(err.split("hits=")[1].split()[0])
    assert hits > 0


def test_scenario_file_with_mismatch_exits_1(tmp_path, cache_dir, capsys):
    path = write(tmp_path, "s.txt", "scenario wrong\nparam n=2\nstep asp.build n=$n\nexpect order = 25\n")
    code, out, _ = run(["run", path], cache_dir, capsys)
    assert code == 1
    assert "MISMATCH" in out and "got 24" in out


def test_scenario_parameter_override(tmp_path, cache_dir, capsys):
    path = write(tmp_path, "s.txt", "scenario h\nparam p=5\nstep heisenberg.build p=$p\n")
    code, out, _ = run(["run", path, "--set", "p=3", "--machine"], cache_dir, capsys)
    assert code == 0 and json.loads(out)["steps"][0]["values"]["order"] == 27
    code, _, err = run(["run", path, "--set", "p=three"], cache_dir, capsys)
    assert code == 3 and "integer" in err


def test_scenario_parse_error_names_line(tmp_path, cache_dir, capsys):
    path = write(tmp_path, "bad.txt", "scenario b\n\nstep no.such.op\n")
    code, _, err = run(["run", path], cache_dir, capsys)
    assert code == 3 and f"{path}:3:" in err


@pytest.mark.parametrize("text,line", [
    ("step asp.build\n", None),
    ("scenario x\nexpect a = 1\n", 2),
    ("scenario x\nstep asp.build n\n", 2),
    ("scenario x\nstep asp.build\nexpect order = {\n", 3),
    ("scenario x\nwhatever\n", 2),
])
def test_parse_scenario_errors(text, line):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(text, source="s")
    assert exc.value.line == line


def test_bad_builtin_parameters_exit_3(cache_dir, capsys):
    assert run(["run", "heisenberg", "--p", "4"], cache_dir, capsys)[0] == 3
    assert run(["run", "nosuch"], cache_dir, capsys)[0] == 3
    assert run(["run", "mcc", "--divisors", "5,5"], cache_dir, capsys)[0] == 3


def test_unknown_flag_exits_3(cache_dir, capsys):
    assert run(["run", "asp", "--frobnicate"], cache_dir, capsys)[0] == 3


def test_config_file_and_flag_precedence(tmp_path, cache_dir, capsys):
    cfg = write(tmp_path, "c.ini", "[twistlab]\ntable_cap = 600\nseed = 4\n")
    code, out, _ = run(["run", "asp", "--config", cfg, "--seed", "9", "--machine"], cache_dir, capsys)
    doc = json.loads(out)
    assert code == 0 and doc["config"]["table_cap"] == 600 and doc["config"]["seed"] == 9
    bad = write(tmp_path, "bad.ini", "[twistlab]\ncolour = blue\n")
    code, _, err = run(["run", "asp", "--config", bad], cache_dir, capsys)
    assert code == 3 and "colour" in err


def test_load_config_rejects_non_integers(tmp_path):
    from twistlab.cli.config import ConfigError

    with pytest.raises(ConfigError):
        load_config(None, {"table_cap": "lots"})
    with pytest.raises(ConfigError):
        load_config(None, {"closure_cap": 0})


def test_report_rerenders_machine_output(tmp_path, cache_dir, capsys):
    out = str(tmp_path / "r.json")
    assert run(["run", "asp", "--machine", "-o", out], cache_dir, capsys)[0] == 0
    code, text, _ = run(["report", out], cache_dir, capsys)
    assert code == 0 and text.startswith("scenario asp: PASS (exit 0)")
    code, text, _ = run(["report", out, "--machine"], cache_dir, capsys)
    assert text == open(out, encoding="utf-8").read()
    bad = write(tmp_path, "x.json", "{not json")
    assert run(["report", bad], cache_dir, capsys)[0] == 3


def test_enumerate_normal_abelian(tmp_path, cache_dir, capsys):
    g = write(tmp_path, "s3.txt", S3)
    code, out, _ = run(["enumerate", g, "normal-abelian", "--machine"], cache_dir, capsys)
    vals = json.loads(out)["steps"][0]["values"]
    # the trivial group and A3
    assert code == 0 and vals["count"] == 2
    assert sorted(s["order"] for s in vals["subgroups"]) == [1, 3]


def test_verify_twist_and_commutator(tmp_path, cache_dir, capsys):
    g = write(tmp_path, "h.txt", "builtin heisenberg p=5\n")
    x = write(tmp_path, "x.txt", HX)
    y = write(tmp_path, "y.txt", HY)
    code, out, _ = run(["verify-twist", g, x, "--machine"], cache_dir, capsys)
    vals = json.loads(out)["steps"][0]["values"]
    assert code == 0 and vals["ok"] and vals["conductor_independent"]
    code, out, _ = run(["commutator", x, y, "--machine"], cache_dir, capsys)
    vals = json.loads(out)["steps"][0]["values"]
    assert code == 0 and vals["formula"] and vals["solve_u"]["coboundary_equals_commutator"]


def test_compose(tmp_path, cache_dir, capsys):
    x = write(tmp_path, "x.txt", HX)
    y = write(tmp_path, "y.txt", HY)
    code, out, _ = run(["compose", x, y, "--machine"], cache_dir, capsys)
    vals = json.loads(out)["steps"][0]["values"]
    assert code == 0 and vals["flags"]["nondegenerate"] and vals["square"]["status"] == "exact-equal"


def test_twist_file_errors_exit_3(tmp_path, cache_dir, capsys):
    g = write(tmp_path, "h.txt", "builtin heisenberg p=5\n")
    bad = write(tmp_path, "bad.txt", "twist\nbasis x y\nform\n0 1\n4 0\n")
    code, _, err = run(["verify-twist", g, bad], cache_dir, capsys)
    assert code == 3 and "commute" in err


def test_classpreserving_s4(tmp_path, cache_dir, capsys):
    g = write(tmp_path, "s4.txt", S4)
    code, out, _ = run(["classpreserving", g, "--machine"], cache_dir, capsys)
    vals = json.loads(out)["steps"][0]["values"]
    assert code == 0
    assert vals["automorphisms"] == 24 and vals["inner"] == 24 and vals["outer_class_preserving"] == 1
    # the automorphism list is cached
    _, out2, _ = run(["classpreserving", g, "--machine"], cache_dir, capsys)
    assert out2 == out
