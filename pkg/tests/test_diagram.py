import pytest

from hocolim.chainz import ChainComplex, ChainMap, is_isomorphism, unit_complex, zero_complex
from hocolim.corpus import (
    arrow_shape,
    composite_shape,
    double_arrow_shape,
    exchange_diagrams,
    exchange_functors,
    exchange_weights,
    free_certified,
    random_cubes,
    two_object_diagram,
)
from hocolim.dgcat import (
    DegreeTruncation,
    delta_category,
    dual_numbers_category,
    group_algebra_category,
    identity_functor,
    product_category,
)
from hocolim.diagram import (
    Cell,
    CellPresentation,
    Diagram,
    MalformedDiagram,
    Transformation,
    arrow_cube,
    attach_cell,
    augmentation_diagram,
    coend,
    coend_exchange,
    coend_left_closed_check,
    corepresentable,
    external_tensor,
    identity_transformation,
    is_pointwise_iso,
    is_pointwise_we,
    kan_counit,
    left_kan,
    pcm_tensor_comparison,
    pointwise_homology,
    representable,
    same_diagram,
    weighted_colimit,
    yoneda_evaluation,
    zero_diagram,
)

DUAL = dual_numbers_category(2)
SHAPES = [arrow_shape(), double_arrow_shape(), composite_shape(), group_algebra_category(2), DUAL]


def _test_diagrams(C):
    reps = [representable(C, c) for c in C.objects]
    return reps if C.name == DUAL.name else [augmentation_diagram(C)] + reps


@pytest.mark.parametrize("C", SHAPES, ids=lambda c: c.name)
def test_representables_and_augmentation_are_valid(C):
    for c in C.objects:
        representable(C, c).validate()
        corepresentable(C, c).validate()
    if C.name != DUAL.name:
        augmentation_diagram(C).validate()


@pytest.mark.parametrize("C", SHAPES, ids=lambda c: c.name)
def test_yoneda_evaluation_is_iso(C):
    for x in _test_diagrams(C):
        for c in C.objects:
            _, ev = yoneda_evaluation(x, c)
            assert is_isomorphism(ev)


def test_bad_action_is_detected():
    x = two_object_diagram()
    broken = ChainMap(x.act_source("c0", "c0"), x("c0"), {0: [[2]]})
    y = Diagram(x.shape, {"c0": x("c0"), "c1": x("c1")},
                {("c0", "c0"): broken, ("c1", "c1"): x.act("c1", "c1"), ("c0", "c1"): x.act("c0", "c1")})
    assert y.check_action()
    with pytest.raises(MalformedDiagram):
        y.validate()


def test_two_object_homology():
    h = pointwise_homology(two_object_diagram())
    assert str(h["c0"][0]) == "Z/2" and str(h["c1"][0]) == "Z/4"


@pytest.mark.parametrize("C", SHAPES, ids=lambda c: c.name)
def test_coend_of_external_tensor_is_weighted_colimit(C):
    w = corepresentable(C, C.objects[-1])
    for x in _test_diagrams(C):
        a = weighted_colimit(w, x).complex
        b = coend(external_tensor(w, x), C).complex
        assert a.homology_group(0) == b.homology_group(0)
        assert a.homology_group(1) == b.homology_group(1)


def test_trivial_weight_colimit_of_group_representable():
    # Z (x)_{Z[C2]} Z[C2] = Z
    G = group_algebra_category(2)
    c = weighted_colimit(augmentation_diagram(G.op), representable(G, "*")).complex
    assert str(c.homology_group(0)) == "Z"


def test_kan_extension_along_identity_is_iso():
    C = composite_shape()
    F = identity_functor(C)
    x = augmentation_diagram(C)
    ext, counit = kan_counit(F, x)
    assert not counit.check_naturality()
    assert is_pointwise_iso(counit)
    assert is_pointwise_iso(ext.unit())


@pytest.mark.parametrize("name,alpha", exchange_functors(), ids=[n for n, _ in exchange_functors()])
def test_kan_unit_and_exchange(name, alpha):
    for x in exchange_diagrams(alpha):
        ext = left_kan(alpha, x)
        ext.result.validate()
        assert not ext.unit().check_naturality()
    P = product_category(alpha.target.op, alpha.source)
    for w in exchange_weights(alpha):
        for x in exchange_diagrams(alpha):
            assert coend_exchange(alpha, external_tensor(w, x, P)).is_iso()


def test_cell_attachment_and_replay():
    C = arrow_shape()
    m = ChainComplex({0: 1})
    pres = CellPresentation(zero_diagram(C))
    pres.extend(Cell(0, ChainMap.zero(zero_complex(), m), ChainMap.zero(zero_complex(), zero_complex())))
    assert same_diagram(pres.result, representable(C, 0))
    assert pres.verify()
    with pytest.raises(ValueError):
        attach_cell(pres.result, Cell(0, ChainMap(m, m, {0: [[2]]}), ChainMap.identity(m)))


def test_certificate_detects_tampering():
    cert = free_certified(arrow_shape(), [(0, unit_complex()), (1, unit_complex())])
    assert cert.certificate.verify()
    cert.certificate.result = representable(arrow_shape(), 0)
    assert not cert.certificate.verify()


@pytest.mark.parametrize("x,y", random_cubes(3, 8))
def test_pcm_tensor_law(x, y):
    r = pcm_tensor_comparison(x, y)
    assert r.commutes and r.is_isomorphism


def test_pcm_of_arrow_is_the_map():
    f = ChainMap(ChainComplex({0: 1}), ChainComplex({0: 1}), {0: [[3]]})
    _, m = arrow_cube(f).pcm()
    assert m.equals(f)


def test_left_closed_square():
    C = arrow_shape()
    w = augmentation_diagram(C.op)
    v = zero_diagram(C.op)
    vw = Transformation(v, w, {})
    x = zero_diagram(C)
    y = representable(C, 0)
    r = coend_left_closed_check(vw, Transformation(x, y, {}))
    assert r.ok and not r.hypotheses


def test_pointwise_we_of_identity():
    x = two_object_diagram()
    assert is_pointwise_we(identity_transformation(x))


@pytest.mark.parametrize("C", [arrow_shape(), group_algebra_category(2)], ids=lambda c: c.name)
def test_projection_counit_needs_length_one(C):
    for length, expected in ((0, False), (1, True), (2, True)):
        d = delta_category(C, DegreeTruncation(length))
        for x in (representable(C, C.objects[0]), augmentation_diagram(C)):
            _, e = kan_counit(d.projection, x)
            assert is_pointwise_iso(e) is expected
