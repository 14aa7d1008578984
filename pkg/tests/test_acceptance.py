"""The nine acceptance criteria, each checked exactly and reported as one PASS/FAIL line."""

import json
from pathlib import Path

from hocolim.bar import bar_replacement, contraction_check
from hocolim.chainz import is_weak_equivalence, unit_complex
from hocolim.cli import run
from hocolim.corpus import (
    bar_shapes,
    exchange_diagrams,
    exchange_functors,
    exchange_weights,
    nonflat_control,
    quillen_pairs,
    random_cubes,
    reedy_shapes,
)
from hocolim.dgcat import group_algebra_category, product_category
from hocolim.diagram import (
    augmentation_diagram,
    coend_exchange,
    external_tensor,
    is_pointwise_we,
    pcm_tensor_comparison,
    pointwise_homology,
    weighted_colimit,
    weighted_colimit_map,
)
from hocolim.suites import axioms_suite, periodic_group_homology, reedy_suite
from hocolim.workspace import Workspace

DATA = Path(__file__).parent / "data" / "two_object.json"


def test_criterion_1_counterexample(acceptance, capsys):
    code = run(["verify", str(DATA), "--suite", "counterexample", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    steps = [c for c in doc["checks"] if c["name"].startswith("counterexample/")]
    ok = code == 0 and len(steps) == 4 and all(c["passed"] for c in steps)
    assert acceptance(1, ok, f"{sum(c['passed'] for c in steps)}/4 steps")


def test_criterion_2_axioms(acceptance):
    checks = axioms_suite(seed=0, count=20)
    kinds = {c.name.split("/")[1] for c in checks}
    ok = all(c.passed for c in checks) and {"factorization", "two-out-of-three", "pushout-stability",
                                            "composite-closure"} <= kinds
    assert acceptance(2, ok, f"{len(checks)} checks on 20 complexes")


def test_criterion_3_direct_replacement(acceptance, tmp_path, capsys):
    out = tmp_path / "replaced.json"
    code = run(["replace", str(DATA), "X", "--mode", "direct", "--output", str(out)])
    capsys.readouterr()
    ws = Workspace.read(str(out))
    g = ws.diagram("X.replacement")
    h = pointwise_homology(g)
    homology_ok = str(h["c0"][0]) == "Z/2" and str(h["c1"][0]) == "Z/4"
    homology_ok = homology_ok and all(h[c][n].is_zero() for c in h for n in h[c].groups if n != 0)
    pres = ws.certificate("X.replacement")
    replay_ok = pres is not None and pres.verify()
    we_ok = is_pointwise_we(ws.transformation("X.augmentation"))
    ok = code == 0 and homology_ok and replay_ok and we_ok
    assert acceptance(3, ok, f"homology {homology_ok}, replay {replay_ok}, augmentation WE {we_ok}")


def test_criterion_4_group_homology(acceptance):
    G = group_algebra_category(2)
    br = bar_replacement(augmentation_diagram(G), 6)
    c = weighted_colimit(augmentation_diagram(G.op), br.diagram).complex
    got = [c.homology_group(n) for n in range(4)]
    oracle = periodic_group_homology(2, 3)
    ok = got == [oracle[n] for n in range(4)] and [str(g) for g in got] == ["Z", "Z/2", "0", "Z/2"]
    assert acceptance(4, ok, ", ".join(str(g) for g in got))


def test_criterion_5_reedy(acceptance):
    shapes = reedy_shapes()
    small = all(len(R.shape.objects) <= 3 and max(R.degree.values()) <= 2 for R in shapes)
    checks = reedy_suite(max_level=4)
    failed = [c.name for c in checks if not c.passed]
    ok = small and not failed
    assert acceptance(5, ok, f"{len(checks)} checks" + (f", first failure {failed[0]}" if failed else ""))


def test_criterion_6_coend_exchange(acceptance):
    results = []
    for _, alpha in exchange_functors():
        P = product_category(alpha.target.op, alpha.source)
        for w in exchange_weights(alpha):
            for x in exchange_diagrams(alpha):
                results.append(coend_exchange(alpha, external_tensor(w, x, P)).is_iso())
    ok = len(results) >= 10 and all(results)
    assert acceptance(6, ok, f"{sum(results)}/{len(results)} isomorphisms")


def test_criterion_7_left_quillen(acceptance):
    preserved = []
    for p in quillen_pairs(seed=0, count=12):
        f = p.equivalence
        certified = p.source.certificate.verify() and p.target.certificate.verify()
        a, b = weighted_colimit(p.weight, f.source), weighted_colimit(p.weight, f.target)
        m = weighted_colimit_map(None, f, a, b, w=p.weight)
        preserved.append(certified and is_pointwise_we(f) and is_weak_equivalence(m))
    w, f = nonflat_control()
    a, b = weighted_colimit(w, f.source), weighted_colimit(w, f.target)
    control = is_pointwise_we(f) and not is_weak_equivalence(weighted_colimit_map(None, f, a, b, w=w))
    ok = len(preserved) >= 10 and all(preserved) and control
    assert acceptance(7, ok, f"{sum(preserved)}/{len(preserved)} preserved, control not preserved {control}")


def test_criterion_8_pcm(acceptance):
    cubes = random_cubes(seed=0, count=12)
    small = all(len(x.labels) + len(y.labels) <= 3 for x, y in cubes)
    results = [pcm_tensor_comparison(x, y).ok for x, y in cubes]
    ok = small and all(results)
    assert acceptance(8, ok, f"{sum(results)}/{len(results)} cube pairs")


def test_criterion_9_contraction(acceptance):
    results = []
    for C in bar_shapes():
        for c in C.objects:
            r = contraction_check(C, c, unit_complex(), 5)
            results.append(r.ok and r.exact and r.degrees == [0, 1, 2, 3])
    ok = all(results)
    assert acceptance(9, ok, f"{sum(results)}/{len(results)} representables, N = 5")
