import random

from hypothesis import given, settings, strategies as st

from hocolim.chainz import is_weak_equivalence
from hocolim.corpus import (
    complex_corpus,
    direct_shapes,
    exchange_functors,
    invariants_from_cyclics,
    nonflat_control,
    quillen_pairs,
    random_complex,
    random_map,
    reedy_shapes,
)
from hocolim.diagram import is_pointwise_we


def test_invariant_factors():
    g = invariants_from_cyclics(1, [2, 3, 4])
    assert g.rank == 1 and g.torsion == (2, 12)
    assert invariants_from_cyclics(0, [1, 1]).is_zero()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.booleans())
def test_random_complex_matches_its_pieces(seed, cofibrant):
    rc = random_complex(random.Random(seed), cofibrant=cofibrant)
    for n, g in rc.homology.items():
        assert rc.complex.homology_group(n) == g
    assert max(rc.complex.degrees, default=0) <= 3
    assert all(rc.complex.ngens(n) <= 4 for n in rc.complex.degrees)
    if cofibrant:
        assert rc.complex.is_cofibrant()


def test_corpus_is_deterministic():
    a = [c.complex for c in complex_corpus(5, 6)]
    b = [c.complex for c in complex_corpus(5, 6)]
    assert all(x.identical(y) for x, y in zip(a, b))


def test_random_map_is_a_chain_map():
    rng = random.Random(1)
    for rc in complex_corpus(2, 10):
        a = random_complex(rng).complex
        random_map(rng, a, rc.complex)


def test_shapes_are_valid():
    for R in reedy_shapes():
        R.validate()
    for D in direct_shapes():
        assert D.is_direct()
    for _, f in exchange_functors():
        assert not f.check()


def test_quillen_pairs_are_certified():
    for p in quillen_pairs(0, 4):
        assert is_pointwise_we(p.equivalence)
        assert p.source.certificate.verify() and p.target.certificate.verify()


def test_nonflat_control():
    w, f = nonflat_control()
    o = w.shape.objects[0]
    assert is_weak_equivalence(f[o])
    assert f.source(o).is_cofibrant() and not f.target(o).is_cofibrant()
    assert w(o).homology_group(0).torsion == (2,)
