"""Seeded built-in corpus: random complexes with known homology, shapes, cubes and weights.

Random complexes are direct sums of elementary pieces (Z, Z --k--> Z, Z/k)
conjugated by random unimodular changes of basis, so their homology is known
from the pieces alone and serves as an oracle independent of the solvers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .chainz import ChainComplex, ChainMap, GroupInvariants, hom_space, tensor, unit_complex, zero_complex
from .dgcat import (
    DgCategory,
    DgFunctor,
    arrow_category,
    cyclic_group_category,
    direct_category,
    discrete_inclusion,
    dual_numbers_category,
    group_algebra_category,
    linearize,
    linearize_functor,
    poset_category,
    simplex_category,
    unit_category,
)
from .diagram import (
    Cell,
    CellPresentation,
    Cube,
    Diagram,
    Transformation,
    arrow_cube,
    augmentation_diagram,
    corepresentable,
    free_diagram,
    representable,
    tensor_cubes,
    zero_diagram,
)
from .reedy import ReedyStructure, direct_reedy, simplex_reedy
from .zmat import IntMatrix

MAX_DEGREE = 3
MAX_RANK = 4


# abelian group bookkeeping ----------------------------------------------------


def _prime_powers(k: int) -> list[int]:
    out, p = [], 2
    while p * p <= k:
        if k % p == 0:
            q = 1
            while k % p == 0:
                q *= p
                k //= p
            out.append(q)
        p += 1
    if k > 1:
        out.append(k)
    return out


def invariants_from_cyclics(rank: int, orders: list[int]) -> GroupInvariants:
    """Z^rank + sum Z/k in invariant-factor form, via the primary decomposition."""
    by_prime: dict[int, list[int]] = {}
    for k in orders:
        for q in _prime_powers(k):
            p = next(d for d in range(2, q + 1) if q % d == 0)
            by_prime.setdefault(p, []).append(q)
    for qs in by_prime.values():
        qs.sort(reverse=True)
    n = max((len(qs) for qs in by_prime.values()), default=0)
    factors = []
    for i in range(n):
        f = 1
        for qs in by_prime.values():
            if i < len(qs):
                f *= qs[i]
        factors.append(f)
    return GroupInvariants(rank, tuple(sorted(factors)))


# random complexes --------------------------------------------------------------


@dataclass
class RandomComplex:
    complex: ChainComplex
    homology: dict[int, GroupInvariants]
    pieces: list


def _unimodular(rng: random.Random, n: int, steps: int = 6) -> tuple[IntMatrix, IntMatrix]:
    """A random unimodular matrix and its inverse, as products of elementary moves."""
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    q = [[int(i == j) for j in range(n)] for i in range(n)]
    if n >= 2:
        for _ in range(steps):
            i, j = rng.sample(range(n), 2)
            c = rng.choice([-2, -1, 1, 2])
            # p <- E p with E = I + c e_ij; q <- q E^{-1}
            for k in range(n):
                p[i][k] += c * p[j][k]
            for k in range(n):
                q[k][j] -= c * q[k][i]
        perm = list(range(n))
        rng.shuffle(perm)
        p = [p[perm[i]] for i in range(n)]
        q = [[row[perm[j]] for j in range(n)] for row in q]
    return IntMatrix(p, n), IntMatrix(q, n)


def random_complex(rng: random.Random, cofibrant: bool = False,
                   max_rank: int = MAX_RANK, max_degree: int = MAX_DEGREE) -> RandomComplex:
    """A bounded complex in degrees [0, max_degree] with generator counts <= max_rank."""
    gens = {n: 0 for n in range(max_degree + 1)}
    pieces = []
    for _ in range(rng.randint(1, 2 * max_rank)):
        kind = rng.choice(["free", "edge", "edge"] + ([] if cofibrant else ["torsion"]))
        n = rng.randint(0, max_degree - (1 if kind == "edge" else 0))
        need = [n, n + 1] if kind == "edge" else [n]
        if any(gens[m] >= max_rank for m in need):
            continue
        k = rng.choice([0, 1, 2, 3, 4, 6]) if kind == "edge" else rng.choice([2, 3, 4])
        pieces.append((kind, n, k, {m: gens[m] for m in need}))
        for m in need:
            gens[m] += 1
    diffs = {n: [[0] * gens[n] for _ in range(gens[n - 1])] for n in range(1, max_degree + 1)}
    rels = {n: [] for n in gens}
    rank = {n: 0 for n in gens}
    torsion: dict[int, list[int]] = {n: [] for n in gens}
    for kind, n, k, pos in pieces:
        if kind == "free":
            rank[n] += 1
        elif kind == "torsion":
            col = [0] * gens[n]
            col[pos[n]] = k
            rels[n].append(col)
            torsion[n].append(k)
        else:
            diffs[n + 1][pos[n]][pos[n + 1]] = k
            if k == 0:
                rank[n] += 1
                rank[n + 1] += 1
            elif k > 1:
                torsion[n].append(k)
    base = {n: (gens[n], diffs.get(n), rels[n]) for n in gens}
    change = {n: _unimodular(rng, gens[n]) for n in gens}
    new_d, new_r = {}, {}
    for n, (g, d, r) in base.items():
        p, _ = change[n]
        if d is not None and g and gens[n - 1]:
            _, q = change[n]
            p_lo, _ = change[n - 1]
            new_d[n] = p_lo @ IntMatrix(d, g) @ q
        if r:
            new_r[n] = p @ IntMatrix.from_columns(r, g)
    c = ChainComplex(gens, new_d, new_r)
    homology = {n: invariants_from_cyclics(rank[n], torsion[n]) for n in gens}
    return RandomComplex(c, homology, pieces)


def complex_corpus(seed: int = 0, count: int = 24, cofibrant: bool = False) -> list[RandomComplex]:
    rng = random.Random(seed)
    return [random_complex(rng, cofibrant) for _ in range(count)]


def random_map(rng: random.Random, a: ChainComplex, b: ChainComplex, spread: int = 2) -> ChainMap:
    """A random integer combination of the generators of Hom(A, B)."""
    basis = hom_space(a, b)
    f = ChainMap.zero(a, b)
    for g in basis:
        f = f + g.scale(rng.randint(-spread, spread))
    return f


# shapes ------------------------------------------------------------------------


def arrow_shape() -> DgCategory:
    return linearize(arrow_category(), {0: 0, 1: 1})


def chain_poset_shape() -> DgCategory:
    """The poset 0 < 1 < 2."""
    return linearize(poset_category([0, 1, 2], lambda a, b: a <= b, "[2]"), {0: 0, 1: 1, 2: 2})


def double_arrow_shape() -> DgCategory:
    """Two objects with hom(a, b) = Z^2 in degree 0."""
    return direct_category(["a", "b"], {"a": 0, "b": 1}, {("a", "b"): ChainComplex({0: 2})}, name="a=>b")


def composite_shape() -> DgCategory:
    """a -> b -> c with hom(a, b) = Z, hom(b, c) = Z^2, hom(a, c) = Z^3 and composition into the first two."""
    homs = {("a", "b"): ChainComplex({0: 1}), ("b", "c"): ChainComplex({0: 2}),
            ("a", "c"): ChainComplex({0: 3})}
    src = tensor(homs[("b", "c")], homs[("a", "b")])
    prod = ChainMap(src, homs[("a", "c")], {0: [[1, 0], [0, 1], [0, 0]]})
    return direct_category(["a", "b", "c"], {"a": 0, "b": 1, "c": 2}, homs,
                           {("a", "b", "c"): prod}, name="a->b->c")


def two_object_example() -> DgCategory:
    """c0 -> c1 with hom = Z."""
    return direct_category(["c0", "c1"], {"c0": 0, "c1": 1}, {("c0", "c1"): unit_complex()}, name="c0->c1")


def reedy_shapes() -> list[ReedyStructure]:
    """Reedy shapes with at most 3 objects and degrees at most 2."""
    return [
        simplex_reedy(1),
        simplex_reedy(2),
        direct_reedy(arrow_shape()),
        direct_reedy(chain_poset_shape()),
        direct_reedy(double_arrow_shape()),
        direct_reedy(composite_shape()),
    ]


def direct_shapes() -> list[DgCategory]:
    return [arrow_shape(), chain_poset_shape(), double_arrow_shape(), composite_shape(), two_object_example()]


def bar_shapes() -> list[DgCategory]:
    """Locally flat shapes for the bar construction."""
    return [
        unit_category(),
        group_algebra_category(2),
        linearize(arrow_category()),
        dual_numbers_category(2),
        linearize(poset_category([0, 1, 2], lambda a, b: a <= b, "[2]")),
    ]


def identity_action(v: ChainComplex) -> ChainMap:
    """Z (x) V -> V, the action of an identity morphism."""
    return ChainMap(tensor(unit_complex(), v), v, ChainMap.identity(v)._c, check=False)


def two_object_diagram(x0: ChainComplex | None = None, x1: ChainComplex | None = None,
                       scale: int = 2) -> Diagram:
    """X(c0) = Z/2 -> X(c1) = Z/4, multiplication by ``scale``, over c0 -> c1."""
    D = two_object_example()
    x0 = x0 or ChainComplex({0: 1}, rels={0: [[2]]})
    x1 = x1 or ChainComplex({0: 1}, rels={0: [[4]]})
    act = {("c0", "c0"): identity_action(x0), ("c1", "c1"): identity_action(x1),
           ("c0", "c1"): ChainMap(tensor(unit_complex(), x0), x1, {0: [[scale]]})}
    return Diagram(D, {"c0": x0, "c1": x1}, act, name="two-object")


# cubes -------------------------------------------------------------------------


def random_cubes(seed: int = 0, count: int = 8) -> list[tuple[Cube, Cube]]:
    """Pairs of cubes built as tensor products of arrow cubes, |S| <= 3 in total."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        sizes = rng.choice([(1, 1), (1, 2), (2, 1)])
        cubes = []
        for side, size in enumerate(sizes):
            cube = None
            for j in range(size):
                a = random_complex(rng, max_rank=2, max_degree=1).complex
                b = random_complex(rng, max_rank=2, max_degree=1).complex
                f = random_map(rng, a, b)
                arrow = arrow_cube(f, f"{side}{j}")
                cube = arrow if cube is None else tensor_cubes(cube, arrow)
            cubes.append(cube)
        out.append((cubes[0], cubes[1]))
    return out


# functors and bifunctors for the coend exchange ---------------------------------


def exchange_functors() -> list[tuple[str, DgFunctor]]:
    arr, s1, s0 = arrow_category(), simplex_category(1), simplex_category(0)
    A, D1, D0 = linearize(arr), linearize(s1), linearize(s0)

    def coface(k):
        return lambda f: (f[0], f[1], (k,)) if f[0] != f[1] else s1.identity(f[0])

    c2, c1 = cyclic_group_category(2), cyclic_group_category(1)
    _, inc = discrete_inclusion(D1)
    return [
        ("[1] -> Delta<=1 by d1", linearize_functor(arr, s1, {0: 0, 1: 1}, coface(0), A, D1)),
        ("[1] -> Delta<=1 by d0", linearize_functor(arr, s1, {0: 0, 1: 1}, coface(1), A, D1)),
        ("[1] -> [0]", linearize_functor(arr, s0, {0: 0, 1: 0}, lambda f: (0, 0, (0,)), A, D0)),
        ("C2 -> 1", linearize_functor(c2, c1, {"*": "*"}, lambda g: 0)),
        ("discrete -> Delta<=1", inc),
    ]


def exchange_weights(alpha: DgFunctor) -> list[Diagram]:
    D = alpha.target
    return [augmentation_diagram(D.op), corepresentable(D, D.objects[0]), corepresentable(D, D.objects[-1])]


def exchange_diagrams(alpha: DgFunctor) -> list[Diagram]:
    C = alpha.source
    return [augmentation_diagram(C), representable(C, C.objects[-1]), representable(C, C.objects[0])]


# cofibrant diagrams with certificates --------------------------------------------


@dataclass
class Certified:
    diagram: Diagram
    certificate: CellPresentation


def free_certified(shape: DgCategory, cells: list[tuple]) -> Certified:
    """Sum of free diagrams shape_c (x) M_c, certified by cells 0 -> M_c on the zero diagram.

    ``cells`` lists pairs (object, free complex).
    """
    pres = CellPresentation(zero_diagram(shape))
    for c, m in cells:
        cur = pres.result if pres.result is not None else pres.base
        pres.extend(Cell(c, ChainMap.zero(zero_complex(), m), ChainMap.zero(zero_complex(), cur(c))))
    return Certified(pres.result, pres)


@dataclass
class QuillenPair:
    weight: Diagram
    equivalence: Transformation
    source: Certified
    target: Certified


def quillen_pairs(seed: int = 0, count: int = 12) -> list[QuillenPair]:
    """Flat weights with pointwise WEs between certified-cofibrant diagrams.

    The WE is the second half of the factorization of 0 -> Y for a random
    cofibrant Y, so both ends carry cell presentations.
    """
    from .reedy import factorize_diagram

    rng = random.Random(seed)
    shapes = [arrow_shape(), chain_poset_shape(), double_arrow_shape(), composite_shape()]
    out = []
    for i in range(count):
        D = shapes[i % len(shapes)]
        cells = []
        for _ in range(rng.randint(1, 2)):
            c = rng.choice(D.objects)
            cells.append((c, random_complex(rng, cofibrant=True, max_rank=2, max_degree=2).complex))
        y = free_certified(D, cells)
        z = zero_diagram(D)
        fz = factorize_diagram(Transformation(z, y.diagram, {}))
        weights = [augmentation_diagram(D.op)] + [corepresentable(D, c) for c in D.objects]
        w = weights[rng.randrange(len(weights))]
        out.append(QuillenPair(w, fz.equivalence, Certified(fz.middle, fz.presentation), y))
    return out


def nonflat_control() -> tuple[Diagram, Transformation]:
    """The weight Z/2 over the unit category and the WE (Z --2--> Z) -> Z/2."""
    from .chainz import resolution_of_cyclic

    U = unit_category()
    o = U.objects[0]
    z2 = ChainComplex({0: 1}, rels={0: [[2]]})
    w = Diagram(U.op, {o: z2}, {(o, o): identity_action(z2)}, name="Z/2")
    eps = resolution_of_cyclic(2)
    x = Diagram(U, {o: eps.source}, {(o, o): identity_action(eps.source)})
    y = Diagram(U, {o: eps.target}, {(o, o): identity_action(eps.target)})
    return w, Transformation(x, y, {o: eps})


def free_diagrams(shape: DgCategory) -> list[Diagram]:
    return [free_diagram(shape, c, unit_complex()) for c in shape.objects]
