"""Invariant suites over the built-in corpus, each returning a list of checks."""

from __future__ import annotations

import random

from .bar import (
    BarComplex,
    bar_map,
    bar_reedy_latching_check,
    bar_replacement,
    canonical_frame,
    contraction_check,
    counterexample_z2,
    we_generation_witness,
)
from .chainz import (
    ChainComplex,
    ChainMap,
    GroupInvariants,
    direct_sum,
    factorize,
    is_cofibration,
    is_isomorphism,
    is_weak_equivalence,
    pushout,
    unit_complex,
    zero_complex,
)
from .corpus import (
    arrow_shape,
    bar_shapes,
    complex_corpus,
    random_complex,
    random_map,
    reedy_shapes,
)
from .dgcat import group_algebra_category
from .diagram import (
    Presented,
    Transformation,
    augmentation_diagram,
    identity_transformation,
    is_pointwise_we,
    present,
    representable,
    weighted_colimit,
    zero_diagram,
)
from .reedy import cells_flatness_check, skeleton_check
from .report import Check

SUITES = ("axioms", "reedy", "bar", "counterexample")


def _we_count_ok(flags: list[bool]) -> bool:
    """Two out of three: never exactly two weak equivalences among u, v, vu."""
    return sum(flags) != 2


def sequential_colimit(maps: list[ChainMap]) -> Presented:
    """colim(X_0 -> X_1 -> ... -> X_k) presented as sum X_i modulo x ~ f_i(x)."""
    xs = [maps[0].source] + [f.target for f in maps]
    keys = list(range(len(xs)))
    parts = list(xs)
    s = direct_sum(parts)
    rels = [s.inclusions[i] - s.inclusions[i + 1] @ f for i, f in enumerate(maps)]
    return present(keys, parts, rels)


def axioms_suite(seed: int = 0, count: int = 20) -> list[Check]:
    """Base-category axioms on seeded random bounded complexes."""
    rng = random.Random(seed)
    checks = []
    for i, rc in enumerate(complex_corpus(seed, count)):
        got = rc.complex.homology
        bad = [n for n, g in rc.homology.items() if got[n] != g]
        checks.append(Check(f"axioms/homology-oracle/{i}", not bad,
                            None if not bad else {"complex": i, "degree": bad[0],
                                                  "expected": str(rc.homology[bad[0]]),
                                                  "computed": str(got[bad[0]])}))
    corpus = [rc.complex for rc in complex_corpus(seed + 1, count)]
    for i, b in enumerate(corpus):
        a = random_complex(rng, cofibrant=True).complex
        f = random_map(rng, a, b)
        g, h = factorize(f)
        fails = []
        if not is_cofibration(g):
            fails.append("g is not a cofibration")
        if not is_weak_equivalence(h):
            fails.append("h is not a weak equivalence")
        if not (h @ g).equals(f):
            fails.append("h g != f")
        checks.append(Check(f"axioms/factorization/{i}", not fails,
                            {"complex": i, "failures": fails} if fails else None))
        # two out of three on (k, h), (g, h) and (k, random)
        zero = zero_complex()
        _, k = factorize(ChainMap.zero(zero, g.target))
        c = corpus[(i + 1) % len(corpus)]
        r = random_map(rng, b, c)
        bad = []
        for label, u, v in (("k,h", k, h), ("g,h", g, h), ("h,r", h, r)):
            flags = [is_weak_equivalence(u), is_weak_equivalence(v), is_weak_equivalence(v @ u)]
            if not _we_count_ok(flags):
                bad.append({"pair": label, "we": flags})
        checks.append(Check(f"axioms/two-out-of-three/{i}", not bad, {"complex": i, "pairs": bad} if bad else None))
        # pushout of the cofibration g along a random map a -> c
        t = random_map(rng, a, c)
        po = pushout(g, t)
        ok = is_cofibration(po.right) and (po.left @ g).equals(po.right @ t)
        checks.append(Check(f"axioms/pushout-stability/{i}", ok,
                            None if ok else {"complex": i, "cofibration": is_cofibration(po.right)}))
        # a composite of cofibrations and its sequential colimit
        seq = [g]
        cur = g.target
        for _ in range(2):
            nxt = random_map(rng, cur, corpus[rng.randrange(len(corpus))])
            g2, _ = factorize(nxt)
            seq.append(g2)
            cur = g2.target
        comp = seq[0]
        for m in seq[1:]:
            comp = m @ comp
        colim = sequential_colimit(seq)
        to_last = colim.map_out(cur, lambda j: _path(seq, j))
        leg = colim.inject(0)
        ok = is_cofibration(comp) and is_isomorphism(to_last) and is_cofibration(leg)
        checks.append(Check(f"axioms/composite-closure/{i}", ok,
                            None if ok else {"complex": i, "composite": is_cofibration(comp),
                                             "colimit_iso": is_isomorphism(to_last)}))
    return checks


def _path(seq: list[ChainMap], j: int) -> ChainMap:
    """X_j -> X_k along the sequence."""
    m = ChainMap.identity(seq[j].source) if j < len(seq) else ChainMap.identity(seq[-1].target)
    for f in seq[j:]:
        m = f @ m
    return m


def reedy_suite(max_level: int = 4) -> list[Check]:
    """Decomposition, cell flatness, skeleta and bar latching over the corpus shapes."""
    checks = []
    for R in reedy_shapes():
        bad = R.check_decomposition()
        checks.append(Check(f"reedy/decomposition/{R.name}", not bad,
                            {"pair": [str(x) for x in bad[0]]} if bad else None))
        for c in R.shape.objects:
            for c1 in R.shape.objects:
                r = cells_flatness_check(R, c, c1)
                detail = "iso" if c != c1 else "pushout of 0 -> Z"
                checks.append(Check(f"reedy/cells/{R.name}/{c}/{c1}", r.ok,
                                    None if r.ok else {"objects": [str(c), str(c1)],
                                                       "corners": {str(k): v for k, v in r.corners_identified.items()},
                                                       "iso": r.pcm_isomorphism},
                                    detail))
        for x in (representable(R.shape, R.shape.objects[0]), augmentation_diagram(R.shape)):
            for n in range(max(R.degree.values()) + 1):
                r = skeleton_check(R, x, n)
                checks.append(Check(f"reedy/skeleton/{R.name}/{x.name}/{n}", r.ok,
                                    None if r.ok else {"degree": n,
                                                       "pushout": {str(k): v for k, v in r.square_pushout.items()},
                                                       "full": {str(k): v for k, v in r.full_at_degree.items()}}))
    for C in bar_shapes():
        for n in range(max_level + 1):
            for extra in (None, C.objects[0]):
                r = bar_reedy_latching_check(C, n, extra=extra)
                tag = "augmented" if extra is not None else "plain"
                bad = [str(k) for k, v in {**r.chains, **r.image_checks}.items() if not v]
                checks.append(Check(f"reedy/bar-latching/{C.name}/{tag}/{n}", r.ok,
                                    None if r.ok else {"level": n, "skipped": r.skipped, "failures": bad}))
    return checks


def periodic_group_homology(order: int, top: int) -> dict[int, GroupInvariants]:
    """H_n(Z/order; Z) from the periodic resolution (t - 1), (t + norm) tensored with Z."""
    gens = {n: 1 for n in range(top + 2)}
    diffs = {n: [[0 if n % 2 else order]] for n in range(1, top + 2)}
    c = ChainComplex(gens, diffs)
    return {n: c.homology_group(n) for n in range(top + 1)}


def bar_suite(truncation: int = 5) -> list[Check]:
    """Simplicial identities, contraction, group homology, naturality, frames and witnesses."""
    checks = []
    two = ChainComplex({0: 1, 1: 1}, {1: [[2]]})
    for C in bar_shapes():
        x = representable(C, C.objects[0])
        bad = BarComplex(x, 3).check_simplicial_identities()
        checks.append(Check(f"bar/simplicial-identities/{C.name}", not bad,
                            {"identity": [str(v) for v in bad[0]]} if bad else None))
        for c in C.objects[:2]:
            for label, m in (("Z", unit_complex()), ("Z-2->Z", two)):
                r = contraction_check(C, c, m, truncation)
                checks.append(Check(f"bar/contraction/{C.name}/{c}/{label}", r.ok and r.exact,
                                    None if r.ok and r.exact else
                                    {"section": {str(k): v for k, v in r.section_identity.items()},
                                     "homotopy": {str(k): v for k, v in r.homotopy_identity.items()},
                                     "extra": [str(v) for v in r.extra_identities[:3]]}))
    G = group_algebra_category(2)
    N = 6
    br = bar_replacement(augmentation_diagram(G), N)
    wc = weighted_colimit(augmentation_diagram(G.op), br.diagram).complex
    oracle = periodic_group_homology(2, 3)
    bad = [n for n in range(4) if wc.homology_group(n) != oracle[n]]
    checks.append(Check("bar/group-homology/Z[C2]", not bad,
                        {"degree": bad[0], "expected": str(oracle[bad[0]]),
                         "computed": str(wc.homology_group(bad[0]))} if bad else None,
                        f"N = {N}, degrees 0..3"))
    we = br.check_we()
    checks.append(Check("bar/augmentation-we/Z[C2]", all(we.values()),
                        {"objects": [str(k) for k, v in we.items() if not v]} if not all(we.values()) else None,
                        f"degrees <= {br.safe_degree}"))
    A = arrow_shape()
    X, Y = representable(A, 0), augmentation_diagram(A)
    f = Transformation(X, Y, {c: ChainMap(X(c), Y(c), {0: [[1] * X(c).ngens(0)]}) for c in A.objects})
    bx, by = bar_replacement(X, 3), bar_replacement(Y, 3)
    bf = bar_map(bx.bar, by.bar, f, bx.diagram, by.diagram)
    nat = all((by.augmentation[c] @ bf[c]).equals(f[c] @ bx.augmentation[c]) for c in A.objects)
    checks.append(Check("bar/augmentation-naturality", nat and not bf.check_naturality()))
    frame = canonical_frame(ChainComplex({0: 1, 1: 1}, {1: [[0]]}), 2).check()
    checks.append(Check("bar/canonical-frame", all(frame.values()),
                        None if all(frame.values()) else frame))
    Z = zero_diagram(A)
    z0 = Transformation(Z, X, {})
    z1 = Transformation(Z, Y, {})
    iz, ix, iy = identity_transformation(Z), identity_transformation(X), identity_transformation(Y)
    span = we_generation_witness("span", z0, z1, z0, z1, iz, ix, iy)
    chain = we_generation_witness("chain", [Z, X], [z0], [Z, X], [z0], [iz, ix])
    checks.append(Check("bar/we-witness/span", is_pointwise_we(span)))
    checks.append(Check("bar/we-witness/chain", is_pointwise_we(chain)))
    return checks


def counterexample_suite() -> list[Check]:
    r = counterexample_z2()
    return [Check(f"counterexample/{i + 1}: {s.name}", s.passed, None if s.passed else {"step": i + 1},
                  s.detail) for i, s in enumerate(r.steps)]


def run_suite(name: str, seed: int = 0) -> list[Check]:
    if name == "axioms":
        return axioms_suite(seed)
    if name == "reedy":
        return reedy_suite()
    if name == "bar":
        return bar_suite()
    if name == "counterexample":
        return counterexample_suite()
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, seed))
        return out
    raise ValueError(f"unknown suite {name!r}")
