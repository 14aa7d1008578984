import pytest

from hocolim.chainz import ChainComplex, ChainMap, is_weak_equivalence, tensor, unit_complex
from hocolim.corpus import composite_shape, double_arrow_shape, exchange_functors
from hocolim.dgcat import (
    DegreeTruncation,
    DgCategory,
    MalformedCategory,
    arrow_category,
    comma_top_category,
    delta_category,
    direct_category,
    discrete_category,
    dual_numbers_category,
    group_algebra_category,
    is_locally_flat,
    linearize,
    monotone_maps,
    poset_category,
    product_category,
    simplex_category,
    torsion_endomorphism_category,
    unit_category,
)

SHAPES = [
    unit_category(),
    group_algebra_category(2),
    group_algebra_category(3),
    dual_numbers_category(2),
    torsion_endomorphism_category(2),
    linearize(simplex_category(2)),
    linearize(arrow_category()),
    double_arrow_shape(),
    composite_shape(),
    discrete_category(["x", "y"]),
]


@pytest.mark.parametrize("C", SHAPES, ids=lambda c: c.name)
def test_builtin_categories_are_valid(C):
    C.validate()
    C.op.validate()


def test_products_are_valid():
    product_category(linearize(arrow_category()), dual_numbers_category(2)).validate()
    product_category(dual_numbers_category(2).op, dual_numbers_category(2)).validate()


def test_group_algebra_composition_is_the_group_law():
    G = group_algebra_category(3)
    m = G.comp("*", "*", "*")
    # basis g (x) f -> g + f mod 3 in the order of hom(b, c) (x) hom(a, b)
    assert m[0].column(1 * 3 + 2) == (1, 0, 0)


def test_simplex_category_counts():
    assert len(monotone_maps(1, 2)) == 6
    assert len(simplex_category(2).hom(1, 2)) == 6
    assert len(monotone_maps(1, 2, injective=True)) == 3
    assert len(monotone_maps(2, 1, surjective=True)) == 2


def test_local_flatness_and_falsifier():
    assert is_locally_flat(group_algebra_category(2)).flat
    assert is_locally_flat(dual_numbers_category(2)).flat
    report = is_locally_flat(torsion_endomorphism_category(2))
    assert not report.flat
    f = report.failures[("*", "*")]
    assert is_weak_equivalence(f.map) and not is_weak_equivalence(f.image)


def test_directness():
    assert linearize(arrow_category(), {0: 0, 1: 1}).is_direct()
    assert composite_shape().is_direct()
    assert not linearize(simplex_category(1), {0: 0, 1: 1}).is_direct()
    assert not group_algebra_category(2).is_direct()


def test_broken_associativity_is_reported():
    homs = {("a", "b"): unit_complex(), ("b", "c"): unit_complex(), ("a", "c"): unit_complex()}
    bad = ChainMap(tensor(unit_complex(), unit_complex()), unit_complex(), {0: [[2]]})
    C = direct_category(["a", "b", "c"], {"a": 0, "b": 1, "c": 2}, homs, {("a", "b", "c"): bad})
    assert not C.check_associativity()
    D = DgCategory(["*"], {("*", "*"): ChainComplex({0: 1})},
                   {("*", "*", "*"): ChainMap(tensor(unit_complex(), unit_complex()), unit_complex(), {0: [[2]]})},
                   {"*": ChainMap.identity(unit_complex())})
    assert D.check_units()
    with pytest.raises(MalformedCategory):
        D.validate()


def test_duplicate_objects_rejected():
    with pytest.raises(MalformedCategory):
        DgCategory(["a", "a"])


def test_functors_are_functorial():
    for name, f in exchange_functors():
        assert not f.check(), name
        assert not f.op.check(), name


def test_delta_category_is_direct_and_projects():
    d = delta_category(group_algebra_category(2), DegreeTruncation(2))
    d.category.validate()
    assert not d.category.check_direct()
    assert not d.projection.check()
    # a chain of length 1 into length 2: three injections, two keep the top element
    kinds = sorted(k for _, k in d.summands[(("*", "*"), ("*", "*", "*"))])
    assert kinds == ["H", "U", "U"]


def test_comma_top_category():
    G = group_algebra_category(2)
    t = comma_top_category(G, "*", DegreeTruncation(2))
    assert [t.morphism_count(("*",), u) for u in t.category.objects] == [1, 1, 1]
    assert not t.inclusion.check()


def test_poset_category_composition():
    P = poset_category([0, 1, 2], lambda a, b: a <= b)
    P.check()
    assert P.compose((1, 2), (0, 1)) == (0, 2)
