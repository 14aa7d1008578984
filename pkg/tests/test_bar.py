import pytest

from hocolim.bar import (
    BarComplex,
    BarError,
    WitnessError,
    bar_reedy_latching_check,
    bar_replacement,
    canonical_frame,
    contraction_check,
    counterexample_z2,
    simplex_chains,
    simplex_map,
    span_witness,
    we_through,
)
from hocolim.chainz import ChainComplex, ChainMap, unit_complex
from hocolim.corpus import arrow_shape, bar_shapes, two_object_diagram
from hocolim.dgcat import group_algebra_category
from hocolim.diagram import (
    Transformation,
    augmentation_diagram,
    diagram_tensor,
    identity_transformation,
    representable,
    weighted_colimit,
    zero_diagram,
)
from hocolim.suites import periodic_group_homology


@pytest.mark.parametrize("C", bar_shapes(), ids=lambda c: c.name)
def test_simplicial_identities(C):
    assert not BarComplex(representable(C, C.objects[0]), 3).check_simplicial_identities()


@pytest.mark.parametrize("C", bar_shapes(), ids=lambda c: c.name)
def test_bar_replacement_is_valid_and_we(C):
    x = representable(C, C.objects[-1])
    br = bar_replacement(x, 4)
    br.diagram.validate()
    assert not br.augmentation.check_naturality()
    assert all(br.check_we().values())
    assert br.is_pointwise_cofibrant()


def test_bar_replacement_of_torsion_diagram():
    # the bar levels keep X(c) as a tensor factor, so torsion values stay torsion
    br = bar_replacement(two_object_diagram(), 4)
    assert all(br.check_we().values())
    assert not br.is_pointwise_cofibrant()
    with pytest.raises(BarError):
        br.check_we(br.safe_degree + 1)


def test_negative_degrees_are_shifted():
    C = arrow_shape()
    x = diagram_tensor(representable(C, 0), ChainComplex({-1: 1}))
    br = bar_replacement(x, 3)
    assert br.shift == 1
    assert all(br.check_we().values())


@pytest.mark.parametrize("truncation", [2, 4, 6])
def test_group_homology_of_c2(truncation):
    G = group_algebra_category(2)
    br = bar_replacement(augmentation_diagram(G), truncation)
    wc = weighted_colimit(augmentation_diagram(G.op), br.diagram).complex
    oracle = periodic_group_homology(2, br.safe_degree)
    for n in range(br.safe_degree + 1):
        assert wc.homology_group(n) == oracle[n]


def test_periodic_oracle():
    h = periodic_group_homology(2, 4)
    assert [str(h[n]) for n in range(5)] == ["Z", "Z/2", "0", "Z/2", "0"]


@pytest.mark.parametrize("C", bar_shapes(), ids=lambda c: c.name)
def test_contraction(C):
    two = ChainComplex({0: 1, 1: 1}, {1: [[2]]})
    for m in (unit_complex(), two):
        r = contraction_check(C, C.objects[0], m, 4)
        assert r.ok and r.exact


def test_contraction_needs_truncation():
    with pytest.raises(BarError):
        contraction_check(arrow_shape(), 0, unit_complex(), 1)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_bar_latching(n):
    C = bar_shapes()[1]
    assert bar_reedy_latching_check(C, n).ok
    assert bar_reedy_latching_check(C, n, extra=C.objects[0]).ok


def test_counterexample_steps():
    r = counterexample_z2()
    assert len(r.steps) == 4 and r.passed


def test_we_through():
    f = ChainMap(ChainComplex({0: 1, 1: 1}, {1: [[2]]}), ChainComplex({0: 1}, rels={0: [[2]]}), {0: [[1]]})
    assert we_through(f, 3)
    g = ChainMap(ChainComplex({0: 1}), ChainComplex({0: 1}), {0: [[2]]})
    assert not we_through(g, 0)


def test_simplex_chains():
    for n in range(4):
        c = simplex_chains(n)
        assert str(c.homology_group(0)) == "Z"
        assert all(c.homology_group(k).is_zero() for k in range(1, n + 1))
    # the map collapsing [1] onto [0] is a chain map
    assert simplex_map((0, 0), 0).source.ngens(0) == 2


def test_canonical_frame():
    frame = canonical_frame(ChainComplex({0: 1, 1: 1}, {1: [[0]]}), 2).check()
    assert all(frame.values())


def test_span_witness_rejects_non_equivalences():
    C = arrow_shape()
    z, x = zero_diagram(C), representable(C, 0)
    zx = Transformation(z, x, {})
    iz, ix = identity_transformation(z), identity_transformation(x)
    assert span_witness(zx, zx, zx, zx, iz, ix, ix).check_naturality() == []
    with pytest.raises(WitnessError):
        span_witness(identity_transformation(z), identity_transformation(z), zx, zx, iz, zx, zx)
