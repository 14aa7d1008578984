import json
from pathlib import Path

import pytest

from hocolim.chainz import ChainComplex
from hocolim.corpus import two_object_diagram
from hocolim.diagram import same_diagram
from hocolim.reedy import replace_direct
from hocolim.workspace import (
    Workspace,
    WorkspaceError,
    builtin_category,
    complex_from_json,
    complex_to_json,
    dumps,
    loads,
)

DATA = Path(__file__).parent / "data" / "two_object.json"


def test_example_file_is_canonical():
    text = DATA.read_text()
    assert Workspace.parse(text).dumps() == text


def test_complex_round_trip():
    c = ChainComplex({0: 2, 1: 1}, {1: [[2], [0]]}, rels={0: [[0], [3]]})
    back = complex_from_json(complex_to_json(c), "$")
    assert back.identical(c)
    assert back.homology == c.homology


def test_big_integers_are_strings():
    big = 2 ** 60
    text = dumps({"complexes": {"x": {"gens": {"0": 1}, "rels": {"0": [[big]]}}}})
    assert f'"{big}"' in text
    c = Workspace.parse(text).complex("x")
    assert c.rel(0).rows == ((big,),)


def test_diagram_round_trip():
    ws = Workspace.parse(DATA.read_text())
    x = ws.diagram("X")
    assert same_diagram(x, two_object_diagram())
    assert not ws.action_problems("X")


def test_certificate_replays_after_write():
    ws = Workspace.parse(DATA.read_text())
    r = replace_direct(ws.diagram("X"))
    ws.add_diagram("R", r.diagram, "D", extra={"certificate": ws.certificate_json(r.presentation, None, "R")})
    again = Workspace.parse(ws.dumps())
    pres = again.certificate("R")
    assert pres.verify()
    assert same_diagram(pres.result, again.diagram("R"))


@pytest.mark.parametrize("spec", ["unit", "arrow", "group_algebra:3", "torsion_endomorphism:2",
                                  "simplex:1", "poset:2", "dual_numbers:2"])
def test_builtin_categories(spec):
    builtin_category(spec).validate()


@pytest.mark.parametrize("spec", ["nope", "group_algebra:x"])
def test_bad_builtin(spec):
    with pytest.raises(WorkspaceError):
        builtin_category(spec)


@pytest.mark.parametrize("text,where", [
    ("{", "line 1"),
    ("[]", "$"),
    ('{"extra": {}}', "$.extra"),
    ('{"complexes": {"x": {"gens": {"0": 1, "1": 1}, "diffs": {"1": [[1, 2]]}}}}', "$.complexes.x.diffs.1"),
    ('{"complexes": {"x": {"gens": {"0": -1}}}}', "$.complexes.x.gens"),
    ('{"complexes": {"x": {"support": [0, 0], "gens": {"1": 1}}}}', "$.complexes.x.gens"),
    ('{"complexes": {"x": {"gens": {"0": true}}}}', "$.complexes.x.gens.0"),
])
def test_malformed_input_locates_the_error(text, where):
    with pytest.raises(WorkspaceError) as e:
        ws = Workspace.parse(text)
        for name in ws.names("complexes"):
            ws.complex(name)
    assert str(e.value).startswith(where)


def test_nonzero_square_is_rejected():
    doc = {"complexes": {"x": {"gens": {"0": 1, "1": 1, "2": 1}, "diffs": {"1": [[1]], "2": [[1]]}}}}
    ws = Workspace.parse(json.dumps(doc))
    with pytest.raises(WorkspaceError):
        ws.complex("x")


def test_missing_names():
    ws = Workspace.parse(DATA.read_text())
    with pytest.raises(WorkspaceError):
        ws.complex("missing")
    with pytest.raises(WorkspaceError):
        ws.diagram("missing")


def test_loads_fills_sections():
    assert set(loads("{}")) == {"complexes", "categories", "diagrams", "transformations"}
