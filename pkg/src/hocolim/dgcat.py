"""Finite dg-categories: categories enriched in chain complexes over Z.

A DgCategory stores hom complexes hom(a, b), composition maps
hom(b, c) (x) hom(a, b) -> hom(a, c) and units Z -> hom(a, a).  Homs,
compositions and units may be supplied lazily through factory callables,
which keeps derived categories (opposites, products, direct replacements)
cheap until they are used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .chainz import (
    ChainComplex,
    ChainMap,
    TensorTree,
    bilinear_map,
    braiding,
    direct_sum,
    is_flat,
    rearrange,
    tensor,
    tensor_map,
    unit_complex,
    zero_complex,
)
from .zmat import IntMatrix

Obj = Hashable


class MalformedCategory(ValueError):
    pass


_UNIT = unit_complex()


class DgCategory:
    def __init__(
        self,
        objects: Sequence[Obj],
        hom: Mapping | Callable | None = None,
        comp: Mapping | Callable | None = None,
        unit: Mapping | Callable | None = None,
        degree: Mapping[Obj, int] | None = None,
        name: str = "",
        check: bool = False,
    ):
        self.objects = list(objects)
        self.name = name
        self.degree = dict(degree) if degree is not None else None
        self._index = {c: i for i, c in enumerate(self.objects)}
        if len(self._index) != len(self.objects):
            raise MalformedCategory("duplicate objects")
        self._hom_src = hom if hom is not None else {}
        self._comp_src = comp if comp is not None else {}
        self._unit_src = unit if unit is not None else {}
        self._hom: dict = {}
        self._comp: dict = {}
        self._unit: dict = {}
        self._htensor: dict = {}
        self._zero: dict = {}
        self._op: DgCategory | None = None
        if check:
            self.validate()

    def __repr__(self) -> str:
        return f"DgCategory({self.name or len(self.objects)})"

    def index(self, c: Obj) -> int:
        return self._index[c]

    def _require(self, *objs) -> None:
        for c in objs:
            if c not in self._index:
                raise KeyError(f"unknown object {c!r}")

    # data -------------------------------------------------------------

    def hom(self, a: Obj, b: Obj) -> ChainComplex:
        key = (a, b)
        h = self._hom.get(key)
        if h is None:
            self._require(a, b)
            src = self._hom_src
            h = src(a, b) if callable(src) else src.get(key)
            if h is None:
                h = zero_complex()
            self._hom[key] = h
        return h

    def hom_tensor(self, a: Obj, b: Obj, c: Obj) -> ChainComplex:
        """hom(b, c) (x) hom(a, b), the source of the composition map."""
        key = (a, b, c)
        t = self._htensor.get(key)
        if t is None:
            t = tensor(self.hom(b, c), self.hom(a, b))
            self._htensor[key] = t
        return t

    def comp(self, a: Obj, b: Obj, c: Obj) -> ChainMap:
        key = (a, b, c)
        m = self._comp.get(key)
        if m is None:
            src = self.hom_tensor(a, b, c)
            tgt = self.hom(a, c)
            if src.is_zero_complex() or tgt.is_zero_complex():
                m = ChainMap.zero(src, tgt)
            else:
                s = self._comp_src
                given = s(a, b, c) if callable(s) else s.get(key)
                if given is None:
                    m = ChainMap.zero(src, tgt)
                else:
                    m = ChainMap(src, tgt, given._c, check=False)
            self._comp[key] = m
        return m

    def unit(self, a: Obj) -> ChainMap:
        m = self._unit.get(a)
        if m is None:
            s = self._unit_src
            given = s(a) if callable(s) else s.get(a)
            tgt = self.hom(a, a)
            if given is None:
                m = ChainMap.zero(_UNIT, tgt)
            else:
                m = ChainMap(_UNIT, tgt, given._c, check=False)
            self._unit[a] = m
        return m

    def pairs(self) -> Iterable[tuple[Obj, Obj]]:
        return itertools.product(self.objects, self.objects)

    # validation -------------------------------------------------------

    def check_associativity(self) -> list[tuple]:
        bad = []
        for a, b, c, d in itertools.product(self.objects, repeat=4):
            hab, hbc, hcd = self.hom(a, b), self.hom(b, c), self.hom(c, d)
            if hab.is_zero_complex() or hbc.is_zero_complex() or hcd.is_zero_complex():
                continue
            left_tree = TensorTree(((hcd, hbc), hab))
            right_tree = TensorTree((hcd, (hbc, hab)))
            assoc = rearrange(left_tree, right_tree, [0, 1, 2])
            inner = tensor_map(
                ChainMap.identity(hcd), self.comp(a, b, c),
                source=right_tree.complex, target=self.hom_tensor(a, c, d),
            )
            lhs = self.comp(a, c, d) @ inner @ assoc
            outer = tensor_map(
                self.comp(b, c, d), ChainMap.identity(hab),
                source=left_tree.complex, target=self.hom_tensor(a, b, d),
            )
            rhs = self.comp(a, b, d) @ outer
            if not lhs.equals(rhs.with_source(lhs.source)):
                bad.append((a, b, c, d))
        return bad

    def check_units(self) -> list[tuple]:
        bad = []
        for a, b in self.pairs():
            h = self.hom(a, b)
            if h.is_zero_complex():
                continue
            right = tensor_map(ChainMap.identity(h), self.unit(a), target=self.hom_tensor(a, a, b))
            left = tensor_map(self.unit(b), ChainMap.identity(h), target=self.hom_tensor(a, b, b))
            ident = ChainMap.identity(h)
            if not (self.comp(a, a, b) @ right).with_source(h).equals(ident):
                bad.append((a, b, "right"))
            if not (self.comp(a, b, b) @ left).with_source(h).equals(ident):
                bad.append((a, b, "left"))
        return bad

    def check_direct(self) -> list[tuple]:
        if self.degree is None:
            return [("no degree function",)]
        bad = []
        for a, b in self.pairs():
            h = self.hom(a, b)
            if a == b:
                u = self.unit(a)
                from .chainz import is_isomorphism
                if not is_isomorphism(u):
                    bad.append((a, b))
            elif self.degree[a] >= self.degree[b] and not h.is_zero_complex():
                bad.append((a, b))
        return bad

    def is_direct(self) -> bool:
        return self.degree is not None and not self.check_direct()

    def validate(self) -> None:
        for a, b in self.pairs():
            self.hom(a, b).validate()
        for a, b, c in itertools.product(self.objects, repeat=3):
            self.comp(a, b, c).validate()
        for a in self.objects:
            self.unit(a).validate()
        bad = self.check_associativity()
        if bad:
            raise MalformedCategory(f"composition is not associative at {bad[0]}")
        bad = self.check_units()
        if bad:
            raise MalformedCategory(f"unit law fails at {bad[0]}")

    # derived categories -----------------------------------------------

    @property
    def op(self) -> DgCategory:
        if self._op is None:
            self._op = opposite(self)
            self._op._op = self
        return self._op

    def full_subcategory(self, objs: Sequence[Obj]) -> DgCategory:
        objs = [c for c in self.objects if c in set(objs)]
        deg = {c: self.degree[c] for c in objs} if self.degree is not None else None
        return DgCategory(
            objs,
            lambda a, b: self.hom(a, b),
            lambda a, b, c: self.comp(a, b, c),
            lambda a: self.unit(a),
            deg,
            name=f"{self.name}|{objs}",
        )


def opposite(c: DgCategory) -> DgCategory:
    """hom_op(a, b) = hom(b, a), composing with the Koszul braiding."""

    def comp(a, b, x):
        # hom_op(b, x) (x) hom_op(a, b) = hom(x, b) (x) hom(b, a)
        br = braiding(c.hom(x, b), c.hom(b, a))
        return c.comp(x, b, a) @ br.with_target(c.hom_tensor(x, b, a))

    deg = {k: -v for k, v in c.degree.items()} if c.degree is not None else None
    return DgCategory(
        c.objects, lambda a, b: c.hom(b, a), comp, lambda a: c.unit(a), deg,
        name=f"{c.name}^op",
    )


def product_category(a: DgCategory, b: DgCategory) -> DgCategory:
    """A (x) B with (f (x) g)(f' (x) g') = (-1)^{|g||f'|} ff' (x) gg'."""

    def hom(x, y):
        return tensor(a.hom(x[0], y[0]), b.hom(x[1], y[1]))

    def comp(x, y, z):
        ha2, hb2 = a.hom(y[0], z[0]), b.hom(y[1], z[1])
        ha1, hb1 = a.hom(x[0], y[0]), b.hom(x[1], y[1])
        src = TensorTree(((ha2, hb2), (ha1, hb1)))
        dst = TensorTree(((ha2, ha1), (hb2, hb1)))
        perm = rearrange(src, dst, [0, 2, 1, 3])
        both = tensor_map(
            a.comp(x[0], y[0], z[0]), b.comp(x[1], y[1], z[1]),
            source=dst.complex,
        )
        return both @ perm

    def unit(x):
        return tensor_map(a.unit(x[0]), b.unit(x[1]), source=_UNIT)

    objs = [(p, q) for p in a.objects for q in b.objects]
    return DgCategory(objs, hom, comp, unit, name=f"{a.name}(x){b.name}")


# ordinary categories ----------------------------------------------------


class FiniteCategory:
    """An ordinary finite category given by explicit morphism tables."""

    def __init__(self, objects, hom: Mapping, compose: Callable, identity: Callable, name: str = ""):
        self.objects = list(objects)
        self._hom = {k: list(v) for k, v in hom.items()}
        self._compose = compose
        self._identity = identity
        self.name = name

    def hom(self, a, b) -> list:
        return self._hom.get((a, b), [])

    def compose(self, g, f):
        """g after f."""
        return self._compose(g, f)

    def identity(self, a):
        return self._identity(a)

    def check(self) -> None:
        for a, b in itertools.product(self.objects, repeat=2):
            for f in self.hom(a, b):
                if self.compose(self.identity(b), f) != f or self.compose(f, self.identity(a)) != f:
                    raise MalformedCategory(f"identity law fails for {f!r}")
                for c in self.objects:
                    for g in self.hom(b, c):
                        if self.compose(g, f) not in self.hom(a, c):
                            raise MalformedCategory(f"composite of {g!r} and {f!r} is not a morphism")


def poset_category(objects: Sequence, leq: Callable[[object, object], bool], name: str = "") -> FiniteCategory:
    hom = {(a, b): [(a, b)] for a in objects for b in objects if leq(a, b)}
    return FiniteCategory(
        objects, hom, lambda g, f: (f[0], g[1]), lambda a: (a, a), name or "poset"
    )


def arrow_category() -> FiniteCategory:
    """[1] = {0 -> 1}."""
    return poset_category([0, 1], lambda a, b: a <= b, "[1]")


def monotone_maps(m: int, n: int, injective: bool = False, surjective: bool = False) -> list[tuple[int, ...]]:
    out = []
    for f in itertools.combinations_with_replacement(range(n + 1), m + 1):
        if injective and len(set(f)) != len(f):
            continue
        if surjective and set(f) != set(range(n + 1)):
            continue
        out.append(tuple(f))
    return out


def simplex_category(top: int, injective: bool = False) -> FiniteCategory:
    """Full subcategory of the simplex category on [0], ..., [top]."""
    objs = list(range(top + 1))
    hom = {(m, n): [(m, n, f) for f in monotone_maps(m, n, injective)] for m in objs for n in objs}

    def compose(g, f):
        return (f[0], g[1], tuple(g[2][i] for i in f[2]))

    return FiniteCategory(
        objs, hom, compose, lambda n: (n, n, tuple(range(n + 1))),
        f"Delta<={top}" + ("+" if injective else ""),
    )


def cyclic_group_category(order: int) -> FiniteCategory:
    return FiniteCategory(
        ["*"], {("*", "*"): list(range(order))}, lambda g, f: (g + f) % order,
        lambda a: 0, f"C{order}",
    )


def linearize(cat: FiniteCategory, degree: Mapping | None = None) -> DgCategory:
    """Free abelian enrichment: hom(a, b) = Z[cat(a, b)] in degree 0."""
    homs, index = {}, {}
    for a, b in itertools.product(cat.objects, repeat=2):
        ms = cat.hom(a, b)
        if ms:
            homs[(a, b)] = ChainComplex({0: len(ms)}, check=False)
            index[(a, b)] = {m: i for i, m in enumerate(ms)}

    def comp(a, b, c):
        if (a, b) not in homs or (b, c) not in homs:
            return None
        fs, gs = cat.hom(a, b), cat.hom(b, c)
        tgt = index[(a, c)]
        n = len(cat.hom(a, c))
        cols = []
        for g in gs:
            for f in fs:
                e = [0] * n
                e[tgt[cat.compose(g, f)]] += 1
                cols.append(e)
        src = tensor(homs[(b, c)], homs[(a, b)])
        return ChainMap(src, homs[(a, c)], {0: IntMatrix.from_columns(cols, n)}, check=False)

    def unit(a):
        n = len(cat.hom(a, a))
        e = [[1 if i == index[(a, a)][cat.identity(a)] else 0] for i in range(n)]
        return ChainMap(_UNIT, homs[(a, a)], {0: e}, check=False)

    return DgCategory(cat.objects, homs, comp, unit, degree, name=cat.name)


def unit_category(obj: Obj = "*") -> DgCategory:
    return DgCategory([obj], {(obj, obj): _UNIT}, {(obj, obj, obj): ChainMap.identity(_UNIT)},
                      {obj: ChainMap.identity(_UNIT)}, {obj: 0}, name="unit")


def group_algebra_category(order: int) -> DgCategory:
    """One object with endomorphisms Z[C_order]."""
    return linearize(cyclic_group_category(order))


def one_object_category(algebra: ChainComplex, mult: ChainMap, unit: ChainMap, name: str = "") -> DgCategory:
    o = "*"
    return DgCategory([o], {(o, o): algebra}, {(o, o, o): mult}, {o: unit}, name=name)


def torsion_endomorphism_category(order: int = 2) -> DgCategory:
    """One object whose endomorphism complex is Z/order in degree 0."""
    a = ChainComplex({0: 1}, rels={0: [[order]]})
    t = tensor(a, a)
    mult = ChainMap(t, a, {0: [[1]]})
    unit = ChainMap(_UNIT, a, {0: [[1]]})
    return one_object_category(a, mult, unit, f"End=Z/{order}")


def dual_numbers_category(boundary: int = 2) -> DgCategory:
    """One object, End = Z{1, x} with |x| = 1, x^2 = 0 and dx = boundary."""
    a = ChainComplex({0: 1, 1: 1}, {1: [[boundary]]})
    t = tensor(a, a)
    # degree 0: 1(x)1 -> 1; degree 1: [1(x)x, x(x)1] -> x; degree 2: x(x)x -> 0
    mult = ChainMap(t, a, {0: [[1]], 1: [[1, 1]]})
    unit = ChainMap(_UNIT, a, {0: [[1]]})
    return one_object_category(a, mult, unit, f"dual numbers d={boundary}")


def direct_category(
    objects: Sequence[Obj],
    degree: Mapping[Obj, int],
    homs: Mapping[tuple, ChainComplex],
    products: Mapping[tuple, ChainMap] | None = None,
    name: str = "",
) -> DgCategory:
    """A direct dg-category from non-identity homs and their compositions.

    ``homs[(a, b)]`` for degree(a) < degree(b); ``products[(a, b, c)]`` maps
    hom(b, c) (x) hom(a, b) -> hom(a, c) for strictly increasing triples.
    Identities are Z.  Associativity is the caller's responsibility and is
    checked by ``validate``.
    """
    products = dict(products or {})
    h = {(c, c): _UNIT for c in objects}
    h.update(homs)

    def comp(a, b, c):
        if a == b:
            return ChainMap.identity(h[(b, c)]) if (b, c) in h else None
        if b == c:
            return ChainMap.identity(h[(a, b)]) if (a, b) in h else None
        return products.get((a, b, c))

    return DgCategory(objects, h, comp, {c: ChainMap.identity(_UNIT) for c in objects}, degree, name)


def discrete_category(objects: Sequence[Obj]) -> DgCategory:
    return DgCategory(
        objects, {(c, c): _UNIT for c in objects},
        {(c, c, c): ChainMap.identity(_UNIT) for c in objects},
        {c: ChainMap.identity(_UNIT) for c in objects},
        {c: 0 for c in objects}, name="discrete",
    )


# functors ----------------------------------------------------------------


class DgFunctor:
    def __init__(self, source: DgCategory, target: DgCategory, on_objects: Mapping,
                 on_homs: Mapping | Callable, name: str = ""):
        self.source = source
        self.target = target
        self.obj = dict(on_objects)
        self._homs_src = on_homs
        self._homs: dict = {}
        self.name = name

    def __call__(self, c: Obj) -> Obj:
        return self.obj[c]

    def on_hom(self, a: Obj, b: Obj) -> ChainMap:
        key = (a, b)
        m = self._homs.get(key)
        if m is None:
            s = self._homs_src
            given = s(a, b) if callable(s) else s.get(key)
            src, tgt = self.source.hom(a, b), self.target.hom(self.obj[a], self.obj[b])
            if given is None:
                m = ChainMap.zero(src, tgt)
            else:
                m = ChainMap(src, tgt, given._c, check=False)
            self._homs[key] = m
        return m

    def check(self) -> list[tuple]:
        bad = []
        s, t = self.source, self.target
        for a in s.objects:
            if not (self.on_hom(a, a) @ s.unit(a)).equals(t.unit(self.obj[a])):
                bad.append((a, "unit"))
        for a, b, c in itertools.product(s.objects, repeat=3):
            src = s.hom_tensor(a, b, c)
            if src.is_zero_complex():
                continue
            lhs = self.on_hom(a, c) @ s.comp(a, b, c)
            fa, fb, fc = self.obj[a], self.obj[b], self.obj[c]
            rhs = t.comp(fa, fb, fc) @ tensor_map(
                self.on_hom(b, c), self.on_hom(a, b), source=src, target=t.hom_tensor(fa, fb, fc)
            )
            if not lhs.equals(rhs):
                bad.append((a, b, c))
        return bad

    @property
    def op(self) -> DgFunctor:
        return DgFunctor(self.source.op, self.target.op, self.obj,
                         lambda a, b: self.on_hom(b, a), name=f"{self.name}^op")


def linearize_functor(src: FiniteCategory, tgt: FiniteCategory, on_objects: Mapping,
                      on_morphisms: Callable, source: DgCategory | None = None,
                      target: DgCategory | None = None) -> DgFunctor:
    """The dg-functor between linearizations induced by an ordinary functor."""
    source = source or linearize(src)
    target = target or linearize(tgt)

    def homs(a, b):
        fs = src.hom(a, b)
        if not fs:
            return None
        fa, fb = on_objects[a], on_objects[b]
        gs = tgt.hom(fa, fb)
        cols = []
        for f in fs:
            e = [0] * len(gs)
            e[gs.index(on_morphisms(f))] = 1
            cols.append(e)
        m = IntMatrix.from_columns(cols, len(gs))
        return ChainMap(source.hom(a, b), target.hom(fa, fb), {0: m}, check=False)

    return DgFunctor(source, target, on_objects, homs, "lin")


def identity_functor(c: DgCategory) -> DgFunctor:
    return DgFunctor(c, c, {x: x for x in c.objects}, lambda a, b: ChainMap.identity(c.hom(a, b)), "id")


def compose_functors(g: DgFunctor, f: DgFunctor) -> DgFunctor:
    return DgFunctor(f.source, g.target, {x: g.obj[f.obj[x]] for x in f.source.objects},
                     lambda a, b: g.on_hom(f.obj[a], f.obj[b]) @ f.on_hom(a, b),
                     f"{g.name}.{f.name}")


def product_functor(f: DgFunctor, g: DgFunctor, source: DgCategory, target: DgCategory) -> DgFunctor:
    """f (x) g between given product categories."""
    objs = {(a, b): (f.obj[a], g.obj[b]) for a, b in source.objects}

    def homs(x, y):
        return tensor_map(f.on_hom(x[0], y[0]), g.on_hom(x[1], y[1]),
                          source=source.hom(x, y), target=target.hom(objs[x], objs[y]))

    return DgFunctor(source, target, objs, homs, f"{f.name}(x){g.name}")


def inclusion_functor(sub: DgCategory, cat: DgCategory) -> DgFunctor:
    return DgFunctor(sub, cat, {x: x for x in sub.objects},
                     lambda a, b: ChainMap.identity(cat.hom(a, b)), "incl")


def discrete_inclusion(c: DgCategory) -> tuple[DgCategory, DgFunctor]:
    """The discrete subcategory on the objects of c and its inclusion via units."""
    d = discrete_category(c.objects)
    return d, DgFunctor(d, c, {x: x for x in c.objects},
                        lambda a, b: c.unit(a) if a == b else None, "delta")


# local flatness ------------------------------------------------------------


@dataclass
class LocalFlatnessReport:
    flat: bool
    failures: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.flat


def is_locally_flat(c: DgCategory) -> LocalFlatnessReport:
    failures = {}
    for a, b in c.pairs():
        verdict = is_flat(c.hom(a, b))
        if not verdict.flat:
            failures[(a, b)] = verdict.falsifier
    return LocalFlatnessReport(not failures, failures)


# the direct replacement of a dg-category -----------------------------------


@dataclass(frozen=True)
class DegreeTruncation:
    max_length: int

    def __post_init__(self):
        if self.max_length < 0:
            raise ValueError("truncation must be non-negative")


def injective_monotone(k: int, n: int) -> list[tuple[int, ...]]:
    return [tuple(f) for f in itertools.combinations(range(n + 1), k + 1)]


@dataclass
class DeltaCategory:
    """The truncated direct replacement of a dg-category with its projection.

    Hom complexes are direct sums over injective monotone phi with matching
    labels; ``summands[(s, t)]`` lists (phi, kind) with kind "U" for a copy of
    Z (phi preserves the top element) and "H" for hom(s_k, t_n).
    """

    base: DgCategory
    category: DgCategory
    summands: dict
    projection: DgFunctor


def delta_category(c: DgCategory, t: DegreeTruncation) -> DeltaCategory:
    if not c.objects:
        raise ValueError("the direct replacement of an empty category is empty")
    objs = [s for n in range(t.max_length + 1) for s in itertools.product(c.objects, repeat=n + 1)]
    summands: dict = {}
    parts: dict = {}

    def summ(s, u):
        key = (s, u)
        if key not in summands:
            k, n = len(s) - 1, len(u) - 1
            out = []
            for phi in injective_monotone(k, n):
                if all(s[i] == u[phi[i]] for i in range(k + 1)):
                    out.append((phi, "U" if phi[k] == n else "H"))
            summands[key] = out
            parts[key] = [_UNIT if kind == "U" else c.hom(s[-1], u[-1]) for _, kind in out]
        return summands[key]

    homs: dict = {}

    def hom(s, u):
        summ(s, u)
        if (s, u) not in homs:
            homs[(s, u)] = direct_sum(parts[(s, u)]).complex if parts[(s, u)] else zero_complex()
        return homs[(s, u)]

    def comp(s, u, v):
        # hom(u, v) (x) hom(s, u) -> hom(s, v)
        outer, inner = summ(u, v), summ(s, u)
        target_index = {key: i for i, key in enumerate(summ(s, v))}
        tgt = hom(s, v)
        inc = direct_sum(parts[(s, v)]).inclusions if parts[(s, v)] else []

        def block(i, j):
            psi, kpsi = outer[i]
            phi, kphi = inner[j]
            comp_phi = tuple(psi[x] for x in phi)
            kind = "U" if comp_phi[-1] == len(v) - 1 else "H"
            m = inc[target_index[(comp_phi, kind)]]
            a_i, b_j = parts[(u, v)][i], parts[(s, u)][j]
            src = tensor(a_i, b_j)
            if kpsi == "U" and kphi == "U":
                return m @ ChainMap.identity(_UNIT).with_source(src)
            if kphi == "U":  # g (x) 1 -> g
                return m @ ChainMap.identity(a_i).with_source(src)
            if kpsi == "U":  # 1 (x) f -> f
                return m @ ChainMap.identity(b_j).with_source(src)
            return m @ c.comp(s[-1], u[-1], v[-1]).with_source(src)

        return bilinear_map(parts[(u, v)], parts[(s, u)], tgt, block, source=tensor(hom(u, v), hom(s, u)))

    def unit(s):
        idx = summ(s, s).index((tuple(range(len(s))), "U"))
        inc = direct_sum(parts[(s, s)]).inclusions[idx]
        return inc

    dc = DgCategory(objs, hom, comp, unit, {s: len(s) - 1 for s in objs}, name=f"Delta({c.name})")

    def proj(s, u):
        sm = summ(s, u)
        if not sm:
            return None
        pieces = []
        for phi, kind in sm:
            pieces.append(c.unit(u[-1]) if kind == "U" else ChainMap.identity(c.hom(s[-1], u[-1])))
        from .chainz import copair
        return copair(pieces, source=hom(s, u))

    p = DgFunctor(dc, c, {s: s[-1] for s in objs}, proj, "P")
    return DeltaCategory(c, dc, summands, p)


@dataclass
class TopPreservingCategory:
    """Sequences ending in c with top-preserving injective monotone maps."""

    category: FiniteCategory
    inclusion: DgFunctor
    initial: tuple

    def morphism_count(self, s, u) -> int:
        return len(self.category.hom(s, u))


def comma_top_category(c: DgCategory, obj: Obj, t: DegreeTruncation,
                       delta: DeltaCategory | None = None) -> TopPreservingCategory:
    objs = [s for n in range(t.max_length + 1) for s in itertools.product(c.objects, repeat=n + 1)
            if s[-1] == obj]
    hom = {}
    for s in objs:
        for u in objs:
            k, n = len(s) - 1, len(u) - 1
            ms = [(s, u, phi) for phi in injective_monotone(k, n)
                  if phi[k] == n and all(s[i] == u[phi[i]] for i in range(k + 1))]
            if ms:
                hom[(s, u)] = ms
    cat = FiniteCategory(
        objs, hom,
        lambda g, f: (f[0], g[1], tuple(g[2][i] for i in f[2])),
        lambda s: (s, s, tuple(range(len(s)))),
        name=f"Delta_{obj}^top",
    )
    if delta is None:
        delta = delta_category(c, t)
    lin = linearize(cat)

    def on_hom(s, u):
        ms = cat.hom(s, u)
        if not ms:
            return None
        # building the hom complex also records its summands
        tgt = delta.category.hom(s, u)
        summ = delta.summands[(s, u)]
        # U summands are copies of Z in degree 0; locate their generator
        pos, off = {}, 0
        parts = [(_UNIT if kind == "U" else c.hom(s[-1], u[-1])) for _, kind in summ]
        for (phi, kind), part in zip(summ, parts):
            pos[(phi, kind)] = off
            off += part.ngens(0)
        cols = []
        for (_, _, phi) in ms:
            e = [0] * tgt.ngens(0)
            e[pos[(phi, "U")]] = 1
            cols.append(e)
        return ChainMap(lin.hom(s, u), tgt, {0: IntMatrix.from_columns(cols, tgt.ngens(0))}, check=False)

    inc = DgFunctor(lin, delta.category, {s: s for s in objs}, on_hom, "incl")
    return TopPreservingCategory(cat, inc, (obj,))
