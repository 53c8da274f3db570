import json

import pytest

from hypershadow import __version__
from hypershadow.cli import InputError, load_system, main, parse_system

PERM3 = {"points": ["0", "1", "2"], "metric": "discrete", "maps": [[1, 2, 0], [2, 0, 1]]}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def perm3_file(tmp_path):
    path = tmp_path / "perm3.json"
    path.write_text(json.dumps(PERM3))
    return path


def test_load_perm3(perm3_file):
    spec = load_system(perm3_file)
    assert spec.space.size == 3
    assert spec.mmap.m == 2


def test_load_errors(tmp_path):
    with pytest.raises(InputError, match="symmetry at \\(0,1\\)"):
        parse_system({"points": ["a", "b"], "metric": [["0", "1"], ["2", "0"]], "maps": [[0, 1]]})
    with pytest.raises(InputError, match="out of range"):
        parse_system({"points": ["a", "b"], "maps": [[0, 5]]})
    with pytest.raises(InputError, match="unknown builder"):
        parse_system({"grid": {"N": 4}, "maps": ["sine"]})
    with pytest.raises(InputError, match="needs a grid"):
        parse_system({"points": ["a"], "maps": ["tent"]})
    with pytest.raises(InputError, match="not a permutation"):
        parse_system({"points": ["a", "b"], "maps": ["cycle:0"]})
    with pytest.raises(InputError, match="missing"):
        parse_system({"points": ["a"]})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError, match="parse error"):
        load_system(bad)
    with pytest.raises(InputError, match="cannot read"):
        load_system(tmp_path / "absent.json")


def test_builders():
    spec = parse_system({"grid": {"N": 99}, "maps": ["zero", "tent", "const:1/3", "cycle:" + ",".join(
        str((i + 1) % 100) for i in range(100))]})
    assert spec.space.size == 100
    assert spec.mmap.maps[1][60] == 78
    assert set(spec.mmap.maps[2]) == {33}


def test_check_chain_transitive(capsys, perm3_file):
    code, out, _ = run(capsys, "check", str(perm3_file), "--property", "chain-transitive")
    assert code == 0
    report = json.loads(out)
    res = report["results"][0]
    assert res["verdict"] is False
    assert res["witness"] == {"x": "0", "A": ["0", "2"]}
    assert report["version"] == __version__
    assert len(report["system"]["fingerprint"]) == 64


def test_reports_are_byte_identical(capsys, perm3_file):
    first = run(capsys, "check", str(perm3_file), "--property", "shadowing")[1]
    second = run(capsys, "check", str(perm3_file), "--property", "shadowing")[1]
    assert first == second
    assert "wall_time_s" not in first
    timed = json.loads(run(capsys, "--timing", "check", str(perm3_file), "--property", "mixing")[1])
    assert "wall_time_s" in timed["results"][0]


def test_check_with_parameters(capsys, perm3_file):
    _, out, _ = run(capsys, "check", str(perm3_file), "--property", "shadowing",
                    "--epsilon", "1/2", "--delta", "1/4")
    res = json.loads(out)["results"][0]
    assert res["verdict"] is True
    assert res["parameters"] == {"epsilon": "1/2", "delta": "1/4"}
    assert res["witness"]["shadower"] == {"0": "0", "1": "1", "2": "2"}
    _, out, _ = run(capsys, "check", str(perm3_file), "--property", "refute-average",
                    "--epsilon", "1/4", "--delta", "1/2", "--delta", "1/4")
    res = json.loads(out)["results"][0]
    assert res["verdict"] == "refuted"
    assert [e["delta"] for e in res["witness"]["per_delta"]] == ["1/2", "1/4"]


def test_usage_errors(capsys, perm3_file):
    code, _, err = run(capsys, "check", str(perm3_file), "--property", "refute-average", "--epsilon", "1/4")
    assert code == 1 and "requires" in err
    with pytest.raises(SystemExit) as exc:
        main(["check", str(perm3_file), "--property", "entropy"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["check", str(perm3_file), "--property", "shadowing", "--epsilon", "0.5"])
    code, _, err = run(capsys, "examples", "--name", "nope")
    assert code == 1 and "unknown corpus system" in err


def test_cap_error_suggests_targeted_commands(capsys, tmp_path):
    path = tmp_path / "tent.json"
    path.write_text(json.dumps({"grid": {"N": 20}, "maps": ["zero", "tent"]}))
    code, _, err = run(capsys, "check", str(path), "--property", "chain-transitive")
    assert code == 1
    assert "HYPERSPACE_NODE_CAP" in err and "tent" in err


def test_tent_command(capsys):
    code, out, _ = run(capsys, "tent", "--n", "98", "--epsilon", "1/49", "--delta", "1/98")
    assert code == 0
    res = json.loads(out)["results"][0]
    assert res["verdict"] == "not shadowable"
    failures = res["witness"]["first_failure"]
    assert len(failures) == 99
    assert all(v is not None for v in failures.values())
    assert res["witness"]["pseudo_orbit_valid"] is True
    code, _, err = run(capsys, "tent", "--n", "99", "--epsilon", "1/49", "--delta", "1/99")
    assert code == 1


def test_examples_and_csv(capsys, tmp_path):
    csv_path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "--csv", str(csv_path), "examples", "--name", "binary01")
    assert code == 0
    verdicts = {r["property"]: r["verdict"] for r in json.loads(out)["results"]}
    assert all(verdicts[p] is True for p in ("transitive", "weakly-mixing", "mixing",
                                             "chain-transitive", "chain-mixing", "shadowing"))
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "property,verdict,epsilon,delta,witness"
    assert len(rows) == 1 + len(verdicts)


def test_suite_command(capsys):
    code, out, _ = run(capsys, "suite", "--seed", "1", "--count", "10", "--max-points", "3")
    assert code == 0
    reports = json.loads(out)["reports"]
    assert all(r["counterexamples"] == [] for r in reports if r["theorem"] != "component-converse")
