import pytest

from hocolim.chainz import ChainComplex, ChainMap, is_cofibration, tensor, unit_complex
from hocolim.corpus import (
    arrow_shape,
    composite_shape,
    double_arrow_shape,
    identity_action,
    two_object_diagram,
)
from hocolim.dgcat import group_algebra_category, torsion_endomorphism_category
from hocolim.diagram import (
    Diagram,
    Transformation,
    augmentation_diagram,
    is_pointwise_cofibration,
    is_pointwise_we,
    pointwise_homology,
    representable,
    zero_diagram,
)
from hocolim.reedy import (
    ReedyError,
    cells_flatness_check,
    direct_reedy,
    factorize_diagram,
    factorize_via_arrow,
    latching,
    reedy_cofibrant_away,
    replace_direct,
    simplex_reedy,
    skeleton_check,
)


def test_two_object_replacement():
    x = two_object_diagram()
    r = replace_direct(x)
    assert all(r.check().values())
    h = pointwise_homology(r.diagram)
    assert str(h["c0"][0]) == "Z/2" and str(h["c1"][0]) == "Z/4"
    assert all(r.diagram(c).is_cofibrant() for c in x.shape.objects)
    assert r.attached == ["c0", "c1"]


def test_seeded_replacement_agrees():
    r = replace_direct(two_object_diagram(), seed_with_resolution=True)
    assert all(r.check().values())


def test_replacement_away_from_subcategory():
    D = arrow_shape()
    z2 = ChainComplex({0: 1}, rels={0: [[2]]})
    x = Diagram(D, {0: unit_complex(), 1: z2},
                {(0, 0): identity_action(unit_complex()), (1, 1): identity_action(z2),
                 (0, 1): ChainMap(tensor(unit_complex(), unit_complex()), z2, {0: [[1]]})})
    r = replace_direct(x, away_from=[0])
    checks = r.check()
    assert all(checks.values()), checks
    assert r.diagram(0).identical(x(0))
    assert r.attached == [1]


def test_replacement_rejects_nonflat_or_nondirect():
    with pytest.raises(ReedyError):
        replace_direct(augmentation_diagram(group_algebra_category(2)))
    T = torsion_endomorphism_category(2)
    with pytest.raises(ReedyError):
        replace_direct(representable(T, T.objects[0]))


def test_replacement_rejects_noncofibrant_subcategory_values():
    with pytest.raises(ReedyError):
        replace_direct(two_object_diagram(), away_from=["c0"])


@pytest.mark.parametrize("D", [arrow_shape(), double_arrow_shape(), composite_shape()], ids=lambda d: d.name)
def test_factorize_diagram(D):
    y = augmentation_diagram(D)
    f = factorize_diagram(Transformation(zero_diagram(D), y, {}))
    assert is_pointwise_cofibration(f.cofibration)
    assert is_pointwise_we(f.equivalence)
    assert f.presentation.verify()
    assert not f.equivalence.check_naturality()


@pytest.mark.parametrize("D", [arrow_shape(), composite_shape()], ids=lambda d: d.name)
def test_factorization_via_arrow_shape_matches(D):
    y = augmentation_diagram(D)
    f = Transformation(zero_diagram(D), y, {})
    direct = factorize_diagram(f)
    arrow = factorize_via_arrow(f)
    assert all(arrow.check().values())
    for d in D.objects:
        assert direct.middle(d).homology == arrow.diagram((d, 1)).homology


def test_reedy_cofibrant_away():
    D = composite_shape()
    R = direct_reedy(D)
    rep = representable(D, D.objects[0])
    r = reedy_cofibrant_away(R, rep, [])
    assert r.ok and r.presentation.verify()
    bad = reedy_cofibrant_away(R, augmentation_diagram(D), [])
    assert not bad.ok and bad.failures


def test_latching_of_representable():
    D = arrow_shape()
    R = direct_reedy(D)
    x = representable(D, 0)
    assert latching(R, x, 0).complex.is_zero_complex()
    assert is_cofibration(latching(R, x, 1).map)


@pytest.mark.parametrize("top", [1])
def test_simplex_reedy(top):
    R = simplex_reedy(top)
    assert not R.check_decomposition()
    assert not R.is_direct()
    for c in R.shape.objects:
        assert cells_flatness_check(R, c, c).ok
    for n in range(top + 1):
        assert skeleton_check(R, representable(R.shape, R.shape.objects[-1]), n).ok
