import json
import subprocess
import sys

import pytest

from sftkit.cli import main

HS = {
    "dimension": 2,
    "symbols": ["0", "1"],
    "forbidden": [[["1", "1"]], [["1"], ["1"]]],
}
KILL = {"dimension": 2, "symbols": ["0", "1"], "forbidden": [[["0"]], [["1"]]]}
FULL = {"dimension": 2, "symbols": ["0", "1"], "forbidden": []}


@pytest.fixture
def hs_file(tmp_path):
    p = tmp_path / "hs.json"
    p.write_text(json.dumps(HS))
    return str(p)


@pytest.fixture
def kill_file(tmp_path):
    p = tmp_path / "kill.json"
    p.write_text(json.dumps(KILL))
    return str(p)


def test_validate(hs_file, capsys):
    assert main(["validate", hs_file]) == 0
    out = capsys.readouterr().out
    assert "dimension 2" in out and "width 2" in out


def test_validate_bad_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"dimension": 2, "symbols": ["0"], "oops": 1}')
    assert main(["validate", str(p)]) == 4
    assert main(["validate", str(tmp_path / "missing.json")]) == 4


def test_normalize_csv(hs_file, capsys):
    assert main(["normalize", hs_file, "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert out == "side,cube_count,mode,allowed_count\n2,9,all-extensions,7\n"


def test_normalize_nonproper(hs_file, capsys):
    assert main(["normalize", hs_file, "--mode", "nonproper", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "non-proper-only" in out


def test_analyze_csv_and_exit_codes(hs_file, kill_file, capsys):
    assert main(["analyze", hs_file, "--levels", "1", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "level,stage,block_count,relation_count,verdict"
    assert "0,squares,7,41,nonempty-to-level-1" in lines
    assert "0,rects,41,1234,nonempty-to-level-1" in lines
    assert "1,squares,1234,,nonempty-to-level-1" in lines

    assert main(["analyze", kill_file, "--levels", "0"]) == 2
    out = capsys.readouterr().out
    assert "verdict: empty" in out


def test_analyze_budget_exit(hs_file, capsys):
    assert main(["analyze", hs_file, "--levels", "2", "--max-work", "1000"]) == 3
    assert "inconclusive" in capsys.readouterr().out


def test_analyze_literal_modes(tmp_path, hs_file, capsys):
    p = tmp_path / "full.json"
    p.write_text(json.dumps(FULL))
    assert main(["analyze", str(p), "--levels", "2", "--mode", "literal", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "1,vert,16,256,nonempty-to-level-2" in out
    assert "1,horiz,256,65536,nonempty-to-level-2" in out
    # hard squares blow the default literal index budget at level 2
    assert main(["analyze", hs_file, "--levels", "2", "--mode", "literal"]) == 3
    assert "reduced" in capsys.readouterr().out


def test_count_engines(hs_file, capsys):
    for engine, expect in (("oracle", 1234), ("dp", 1234), ("matrix", 1234)):
        assert main(["count", hs_file, "--shape", "4x4", "--engine", engine]) == 0
        assert capsys.readouterr().out.strip() == str(expect)
    assert main(["count", hs_file, "--shape", "4x2", "--engine", "matrix"]) == 0
    assert capsys.readouterr().out.strip() == "41"
    assert main(["count", hs_file, "--shape", "8x4", "--engine", "dp", "--format", "csv"]) == 0
    assert "8x4,dp,1095851" in capsys.readouterr().out


def test_count_bad_shape(hs_file, capsys):
    assert main(["count", hs_file, "--shape", "3x5", "--engine", "matrix"]) == 4
    assert main(["count", hs_file, "--shape", "4x4x4", "--engine", "oracle"]) == 4


def test_count_budget_exit(hs_file, capsys):
    assert main(["count", hs_file, "--shape", "8x8", "--engine", "oracle"]) == 3


def test_sample_and_determinism(tmp_path, capsys):
    p = tmp_path / "cb.json"
    p.write_text(
        json.dumps(
            {
                "dimension": 2,
                "symbols": ["0", "1"],
                "forbidden": [[["0", "0"]], [["1", "1"]], [["0"], ["0"]], [["1"], ["1"]]],
            }
        )
    )
    assert main(["sample", str(p), "--level", "1", "--seed", "7"]) == 0
    first = capsys.readouterr().out
    assert main(["sample", str(p), "--level", "1", "--seed", "7"]) == 0
    assert capsys.readouterr().out == first
    assert len(first.strip().splitlines()) == 4


def test_sample_empty(kill_file, capsys):
    assert main(["sample", kill_file, "--level", "0", "--seed", "1"]) == 2


def test_sample_d1(tmp_path, capsys):
    p = tmp_path / "d1.json"
    p.write_text(json.dumps({"dimension": 1, "symbols": ["0", "1"], "forbidden": [["1", "1"]]}))
    assert main(["sample", str(p), "--level", "1", "--seed", "3"]) == 0
    out = capsys.readouterr().out.strip()
    assert len(out) == 4 and "11" not in out


def test_witness(hs_file, kill_file, capsys):
    assert main(["witness", hs_file, "--level", "2"]) == 0
    out = capsys.readouterr().out
    assert len(out.strip().splitlines()) == 8
    assert main(["witness", kill_file, "--level", "1"]) == 2


def test_witness_exhausted(tmp_path, capsys):
    # one allowed cube that cannot tile with itself: search exhausts, exit 3
    cubes = []
    keep = (0, 1, 1, 0)
    import itertools

    for d in itertools.product(range(2), repeat=4):
        if d != keep:
            cubes.append([[str(d[0]), str(d[1])], [str(d[2]), str(d[3])]])
    p = tmp_path / "rigid.json"
    p.write_text(json.dumps({"dimension": 2, "symbols": ["0", "1"], "forbidden": cubes}))
    assert main(["witness", str(p), "--level", "1"]) == 3
    assert "not an emptiness proof" in capsys.readouterr().err


def test_compare(hs_file, capsys):
    assert main(["compare", hs_file, "--shapes", "4x2,4x4", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "4x2,41,41,true" in out
    assert "4x4,1234,1234,true" in out


def test_export_import_round_trip(tmp_path, hs_file, capsys):
    out_file = tmp_path / "state.json"
    assert main(["export-state", hs_file, "--levels", "1", "--out", str(out_file)]) == 0
    capsys.readouterr()
    assert main(["import-state", str(out_file), "--format", "csv"]) == 0
    out = capsys.readouterr().out
    assert "0,squares,7,41,nonempty-to-level-1" in out
    # tampering is rejected
    text = out_file.read_text().replace('"cube_count":9', '"cube_count":8')
    out_file.write_text(text)
    assert main(["import-state", str(out_file)]) == 4


def test_cli_byte_determinism(tmp_path, hs_file):
    cmd = [sys.executable, "-m", "sftkit", "analyze", hs_file, "--levels", "1", "--format", "csv"]
    a = subprocess.run(cmd, capture_output=True)
    b = subprocess.run(cmd, capture_output=True)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
