import json
import shutil
from pathlib import Path

import pytest

from hocolim.cli import run
from hocolim.workspace import Workspace

DATA = Path(__file__).parent / "data" / "two_object.json"

CONTROL = {
    "complexes": {
        "Z2": {"gens": {"0": 1}, "rels": {"0": [[2]]}},
        "res": {"gens": {"0": 1, "1": 1}, "diffs": {"1": [[2]]}},
    },
    "categories": {"U": {"builtin": "unit"}},
    "diagrams": {
        "W": {"category": "U", "opposite": True, "values": {"*": "Z2"},
              "actions": [{"source": "*", "target": "*", "matrices": {"0": [[1]]}}]},
        "R": {"category": "U", "values": {"*": "res"},
              "actions": [{"source": "*", "target": "*", "matrices": {"0": [[1]], "1": [[1]]}}]},
        "Q": {"category": "U", "values": {"*": "Z2"},
              "actions": [{"source": "*", "target": "*", "matrices": {"0": [[1]]}}]},
    },
    "transformations": {"eps": {"source": "R", "target": "Q", "components": {"*": {"0": [[1]]}}}},
}


@pytest.fixture
def ws_file(tmp_path):
    p = tmp_path / "ws.json"
    shutil.copy(DATA, p)
    return p


def _write(tmp_path, doc):
    p = tmp_path / "doc.json"
    p.write_text(json.dumps(doc))
    return p


def test_homology_text(ws_file, capsys):
    assert run(["homology", str(ws_file), "res2"]) == 0
    out = capsys.readouterr().out
    assert "H0 = Z/2, H1 = 0" in out


def test_homology_json(ws_file, capsys):
    assert run(["homology", str(ws_file), "Z4", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["homology"]["0"]["torsion"] == [4]


def test_input_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(["homology", str(bad), "x"]) == 2
    err = capsys.readouterr()
    assert "line 1" in err.err and err.out == ""
    assert run(["homology", str(tmp_path / "missing.json"), "x"]) == 2
    assert run(["nonsense"]) == 2


def test_malformed_complex_exit_2(tmp_path, capsys):
    doc = {"complexes": {"bad": {"gens": {"0": 1, "1": 1, "2": 1}, "diffs": {"1": [[1]], "2": [[1]]}}}}
    assert run(["homology", str(_write(tmp_path, doc)), "bad"]) == 2
    assert "$.complexes.bad" in capsys.readouterr().err


def test_replace_then_verify(ws_file, tmp_path, capsys):
    out = tmp_path / "out.json"
    assert run(["replace", str(ws_file), "X", "--mode", "direct", "--output", str(out)]) == 0
    text = capsys.readouterr().out
    assert "Z/2" in text and "Z/4" in text
    ws = Workspace.read(str(out))
    assert "X.replacement" in ws.names("diagrams")
    assert ws.certificate("X.replacement").verify()
    assert run(["verify", str(out), "--suite", "counterexample"]) == 0


def test_replace_bar_then_verify(ws_file, tmp_path, capsys):
    out = tmp_path / "bar.json"
    assert run(["replace", str(ws_file), "T", "--mode", "bar", "--truncation", "3", "--output", str(out)]) == 0
    assert run(["verify", str(out), "--suite", "counterexample"]) == 0


def test_wcolim_group_homology(ws_file, capsys):
    assert run(["wcolim", str(ws_file), "W", "T", "--truncation", "6", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [doc["homology"][str(n)]["text"] for n in range(4)] == ["Z", "Z/2", "0", "Z/2"]
    assert doc["safe_range"] == [0, 4]


def test_wcolim_shape_mismatch(ws_file, capsys):
    assert run(["wcolim", str(ws_file), "T", "X"]) == 2


def test_quillen_negative_control(tmp_path, capsys):
    p = _write(tmp_path, CONTROL)
    assert run(["wcolim", str(p), "W", "R", "--check-quillen", "eps"]) == 1
    out = capsys.readouterr().out
    assert "[PASS] pointwise_we/eps" in out
    assert "[FAIL] quillen/eps" in out


def test_broken_square_is_named(tmp_path, ws_file, capsys):
    doc = json.loads(ws_file.read_text())
    doc["transformations"]["broken"] = {"source": "X", "target": "X",
                                        "components": {"c0": {"0": [[1]]}, "c1": {"0": [[0]]}}}
    assert run(["verify", str(_write(tmp_path, doc)), "--suite", "counterexample"]) == 1
    out = capsys.readouterr().out
    assert '[FAIL] file/transformation/broken: {"square": ["c0", "c1"]' in out


def test_max_degree_caps_truncation(ws_file, capsys, caplog, monkeypatch):
    monkeypatch.setenv("HOCOLIM_MAX_DEGREE", "3")
    assert run(["wcolim", str(ws_file), "W", "T", "--truncation", "6", "--format", "json"]) == 0
    cap = capsys.readouterr()
    assert json.loads(cap.out)["truncation"] == {"requested": 6, "used": 3, "cap": 3}
    assert "capped to 3" in caplog.text


def test_invalid_max_degree(ws_file, capsys, monkeypatch):
    monkeypatch.setenv("HOCOLIM_MAX_DEGREE", "many")
    assert run(["replace", str(ws_file), "T", "--mode", "bar"]) == 2


def test_reports_are_deterministic(ws_file, capsys):
    run(["replace", str(ws_file), "X", "--format", "json"])
    a = capsys.readouterr().out
    run(["replace", str(ws_file), "X", "--format", "json"])
    assert capsys.readouterr().out == a


def test_verify_suite_failure_free(ws_file, capsys):
    assert run(["verify", str(ws_file), "--suite", "axioms", "--seed", "3"]) == 0


def test_bar_mode_reports_noncofibrant_values(ws_file, capsys):
    assert run(["replace", str(ws_file), "X", "--mode", "bar", "--truncation", "3"]) == 1
    out = capsys.readouterr().out
    assert "[PASS] augmentation_we_through_1/c0" in out and "[FAIL] cofibrant/c0" in out
