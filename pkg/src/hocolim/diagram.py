"""Enriched diagrams C -> Ch(Z) and the colimits built from them.

A Diagram assigns a complex X(c) to every object and an action map
hom(a, b) (x) X(a) -> X(b) to every pair.  Weights are diagrams on the
opposite category.  All colimits are computed strictly, as cokernels of
explicit presentations whose generators are direct sums of tensor
products; the block structure is kept so that maps out of a colimit can be
written on generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

from .chainz import (
    ChainComplex,
    ChainMap,
    DirectSum,
    TensorTree,
    bilinear_map,
    braiding,
    copair,
    direct_sum,
    is_cofibration,
    is_isomorphism,
    is_weak_equivalence,
    pushout,
    rearrange,
    tensor,
    tensor_map,
    unit_complex,
    zero_complex,
)
from .dgcat import DgCategory, DgFunctor, identity_functor, product_category, product_functor
from .zmat import IntMatrix, hstack, lattice_basis

Obj = Hashable
_UNIT = unit_complex()


class MalformedDiagram(ValueError):
    pass


def _assoc_inverse(a: ChainComplex, b: ChainComplex, c: ChainComplex,
                   source: ChainComplex | None = None) -> ChainMap:
    """A (x) (B (x) C) -> (A (x) B) (x) C."""
    m = rearrange(TensorTree((a, (b, c))), TensorTree(((a, b), c)), [0, 1, 2])
    return m if source is None else m.with_source(source)


def _assoc(a: ChainComplex, b: ChainComplex, c: ChainComplex) -> ChainMap:
    return rearrange(TensorTree(((a, b), c)), TensorTree((a, (b, c))), [0, 1, 2])


class Diagram:
    """A dg-functor from ``shape`` into chain complexes."""

    def __init__(self, shape: DgCategory, values: Mapping[Obj, ChainComplex],
                 action: Mapping | Callable | None = None, name: str = "", check: bool = False):
        self.shape = shape
        self.values = {c: values.get(c, None) or zero_complex() for c in shape.objects}
        self._act_src = action if action is not None else {}
        self._act: dict = {}
        self._act_source: dict = {}
        self.name = name
        if check:
            self.validate()

    def __call__(self, c: Obj) -> ChainComplex:
        return self.values[c]

    def __repr__(self) -> str:
        vals = ", ".join(f"{c}: {v.homology}" for c, v in self.values.items())
        return f"Diagram({self.name} {vals})"

    def act_source(self, a: Obj, b: Obj) -> ChainComplex:
        key = (a, b)
        s = self._act_source.get(key)
        if s is None:
            s = tensor(self.shape.hom(a, b), self.values[a])
            self._act_source[key] = s
        return s

    def act(self, a: Obj, b: Obj) -> ChainMap:
        key = (a, b)
        m = self._act.get(key)
        if m is None:
            src, tgt = self.act_source(a, b), self.values[b]
            if src.is_zero_complex() or tgt.is_zero_complex():
                m = ChainMap.zero(src, tgt)
            else:
                s = self._act_src
                given = s(a, b) if callable(s) else s.get(key)
                m = ChainMap.zero(src, tgt) if given is None else ChainMap(src, tgt, given._c, check=False)
            self._act[key] = m
        return m

    def check_action(self) -> list[tuple]:
        bad = []
        C = self.shape
        for a in C.objects:
            x = self.values[a]
            if x.is_zero_complex():
                continue
            u = tensor_map(C.unit(a), ChainMap.identity(x), target=self.act_source(a, a))
            if not (self.act(a, a) @ u).with_source(x).equals(ChainMap.identity(x)):
                bad.append(("unit", a))
        for a, b, c in itertools.product(C.objects, repeat=3):
            hab, hbc, x = C.hom(a, b), C.hom(b, c), self.values[a]
            if hab.is_zero_complex() or hbc.is_zero_complex() or x.is_zero_complex():
                continue
            tree = TensorTree(((hbc, hab), x))
            lhs = self.act(a, c) @ tensor_map(
                C.comp(a, b, c), ChainMap.identity(x), source=tree.complex, target=self.act_source(a, c)
            )
            inner = tensor_map(ChainMap.identity(hbc), self.act(a, b), target=self.act_source(b, c))
            rhs = self.act(b, c) @ inner @ _assoc(hbc, hab, x).with_target(inner.source)
            if not lhs.equals(rhs.with_source(lhs.source)):
                bad.append(("assoc", a, b, c))
        return bad

    def validate(self) -> None:
        for c, v in self.values.items():
            v.validate()
        bad = self.check_action()
        if bad:
            raise MalformedDiagram(f"action fails at {bad[0]}")


class Transformation:
    def __init__(self, source: Diagram, target: Diagram, comps: Mapping[Obj, ChainMap],
                 check: bool = False):
        self.source = source
        self.target = target
        self.comps = {}
        for c in source.shape.objects:
            m = comps.get(c)
            s, t = source(c), target(c)
            self.comps[c] = ChainMap.zero(s, t) if m is None else ChainMap(s, t, m._c, check=False)
        if check:
            self.validate()

    def __getitem__(self, c: Obj) -> ChainMap:
        return self.comps[c]

    def check_naturality(self) -> list[tuple]:
        bad = []
        X, Y, C = self.source, self.target, self.source.shape
        for a, b in C.pairs():
            if X.act_source(a, b).is_zero_complex():
                continue
            lhs = self.comps[b] @ X.act(a, b)
            mid = tensor_map(ChainMap.identity(C.hom(a, b)), self.comps[a],
                             source=X.act_source(a, b), target=Y.act_source(a, b))
            rhs = Y.act(a, b) @ mid
            if not lhs.equals(rhs):
                bad.append((a, b))
        return bad

    def validate(self) -> None:
        for m in self.comps.values():
            m.validate()
        bad = self.check_naturality()
        if bad:
            raise MalformedDiagram(f"naturality square fails at {bad[0]}")

    def __matmul__(self, other: Transformation) -> Transformation:
        return Transformation(other.source, self.target,
                              {c: self.comps[c] @ other.comps[c] for c in self.source.shape.objects})

    def equals(self, other: Transformation) -> bool:
        return all(self.comps[c].equals(other.comps[c].with_source(self.comps[c].source)
                                        .with_target(self.comps[c].target))
                   for c in self.comps)


def identity_transformation(x: Diagram) -> Transformation:
    return Transformation(x, x, {c: ChainMap.identity(x(c)) for c in x.shape.objects})


def is_pointwise_we(f: Transformation) -> bool:
    return all(is_weak_equivalence(m) for m in f.comps.values())


def is_pointwise_cofibration(f: Transformation) -> bool:
    return all(is_cofibration(m) for m in f.comps.values())


def is_pointwise_iso(f: Transformation) -> bool:
    return all(is_isomorphism(m) for m in f.comps.values())


def pointwise_homology(x: Diagram) -> dict:
    return {c: v.homology for c, v in x.values.items()}


# basic diagrams ---------------------------------------------------------------


def zero_diagram(shape: DgCategory) -> Diagram:
    return Diagram(shape, {}, {}, name="0")


def discrete_diagram(shape: DgCategory, values: Mapping[Obj, ChainComplex]) -> Diagram:
    """A diagram on a discrete shape: units act as identities."""

    def act(a, b):
        return ChainMap.identity(values[a]) if a == b and a in values else None

    return Diagram(shape, values, act, name="discrete")


def representable(shape: DgCategory, c: Obj) -> Diagram:
    """shape(c, -), acting by composition."""
    return Diagram(
        shape, {e: shape.hom(c, e) for e in shape.objects},
        lambda a, b: shape.comp(c, a, b), name=f"rep({c})",
    )


def corepresentable(shape: DgCategory, c: Obj) -> Diagram:
    """The weight shape(-, c), a diagram on shape.op."""
    return representable(shape.op, c)


def diagram_tensor(x: Diagram, m: ChainComplex) -> Diagram:
    """Pointwise X(e) (x) M."""
    C = x.shape
    vals = {e: tensor(x(e), m) for e in C.objects}

    def act(a, b):
        h = C.hom(a, b)
        src = tensor(h, vals[a])
        back = _assoc_inverse(h, x(a), m, source=src)
        return tensor_map(x.act(a, b), ChainMap.identity(m), source=back.target, target=vals[b]) @ back

    return Diagram(C, vals, act, name=f"{x.name}(x)M")


def transformation_tensor(f: Transformation, k: ChainMap,
                          source: Diagram | None = None, target: Diagram | None = None) -> Transformation:
    """f (x) k between pointwise tensor products."""
    s = source or diagram_tensor(f.source, k.source)
    t = target or diagram_tensor(f.target, k.target)
    return Transformation(s, t, {c: tensor_map(f[c], k, source=s(c), target=t(c))
                                 for c in f.source.shape.objects})


def free_diagram(shape: DgCategory, c: Obj, m: ChainComplex) -> Diagram:
    """The free diagram shape_c (x) M generated at c."""
    return diagram_tensor(representable(shape, c), m)


def free_transformation(shape: DgCategory, c: Obj, k: ChainMap) -> Transformation:
    return transformation_tensor(identity_transformation(representable(shape, c)), k)


def yoneda_adjunct(x: Diagram, c: Obj, a: ChainMap, source: Diagram | None = None) -> Transformation:
    """The transformation shape_c (x) M -> X with adjunct a: M -> X(c)."""
    C = x.shape
    src = source or free_diagram(C, c, a.source)
    comps = {}
    for e in C.objects:
        h = C.hom(c, e)
        inner = tensor_map(ChainMap.identity(h), a, source=src(e), target=x.act_source(c, e))
        comps[e] = x.act(c, e) @ inner
    return Transformation(src, x, comps)


def augmentation_diagram(shape: DgCategory, value: ChainComplex | None = None) -> Diagram:
    """Every basis morphism acts as the identity (for linearized shapes).

    With the default value Z this is the trivial module.
    """
    m = value if value is not None else _UNIT

    def act(a, b):
        h = shape.hom(a, b)
        if h.is_zero_complex():
            return None
        if h.degrees != [0]:
            raise MalformedDiagram("augmentation needs homs concentrated in degree 0")
        ones = IntMatrix([[1] * h.ngens(0)])
        eps = ChainMap(h, _UNIT, {0: ones}, check=False)
        return tensor_map(eps, ChainMap.identity(m)).with_target(m)

    return Diagram(shape, {c: m for c in shape.objects}, act, name="trivial")


# presented colimits ---------------------------------------------------------


@dataclass
class Presented:
    """A complex presented as a quotient of a direct sum of named parts."""

    complex: ChainComplex
    keys: list
    parts: list[ChainComplex]
    sum: DirectSum

    def part(self, key) -> ChainComplex:
        return self.parts[self.keys.index(key)]

    def inject(self, key) -> ChainMap:
        """The composite part -> sum -> quotient."""
        i = self.keys.index(key)
        return self.sum.inclusions[i].with_target(self.complex)

    def map_out(self, target: ChainComplex, blocks: Callable) -> ChainMap:
        """Map defined on each part; ``blocks(key)`` returns part -> target."""
        maps = []
        for key, part in zip(self.keys, self.parts):
            m = blocks(key)
            maps.append(ChainMap.zero(part, target) if m is None else m)
        if not maps:
            return ChainMap.zero(self.complex, target)
        return copair(maps, source=self.sum.complex).with_source(self.complex)


def present(keys: list, parts: list[ChainComplex], relation_maps: list[ChainMap]) -> Presented:
    """Quotient of the direct sum of parts by the images of the given maps.

    Each relation map goes from some complex into the direct sum.
    """
    s = direct_sum(parts)
    base = s.complex
    rels = {}
    for n in base.degrees:
        cols = [base.rel(n)] + [m[n] for m in relation_maps if m.source.ngens(n)]
        rels[n] = lattice_basis(hstack(cols, base.ngens(n)))
    c = ChainComplex(base._gens, base._d, rels, check=False)
    return Presented(c, keys, parts, s)


def weighted_colimit(w: Diagram, x: Diagram) -> Presented:
    """W (x)_C X: the coequalizer of W(c1) (x) C(c0, c1) (x) X(c0) => sum W(c) (x) X(c)."""
    C = x.shape
    if w.shape.objects != C.objects:
        raise MalformedDiagram("weight and diagram have different shapes")
    keys = [c for c in C.objects if not (w(c).is_zero_complex() or x(c).is_zero_complex())]
    parts = [tensor(w(c), x(c)) for c in keys]
    s = direct_sum(parts)
    idx = {c: i for i, c in enumerate(keys)}
    rel_maps = []
    for c0, c1 in C.pairs():
        h = C.hom(c0, c1)
        if h.is_zero_complex() or w(c1).is_zero_complex() or x(c0).is_zero_complex():
            continue
        tree = TensorTree(((w(c1), h), x(c0)))
        src = tree.complex
        if src.is_zero_complex():
            continue
        pieces = []
        if c1 in idx:
            to_right = _assoc(w(c1), h, x(c0))
            m1 = tensor_map(ChainMap.identity(w(c1)), x.act(c0, c1),
                            source=to_right.target, target=parts[idx[c1]]) @ to_right
            pieces.append(s.inclusions[idx[c1]] @ m1)
        if c0 in idx:
            br = braiding(w(c1), h).with_target(w.act_source(c1, c0))
            rho = w.act(c1, c0) @ br
            m2 = tensor_map(rho, ChainMap.identity(x(c0)), source=src, target=parts[idx[c0]])
            pieces.append(-(s.inclusions[idx[c0]] @ m2))
        if not pieces:
            continue
        total = pieces[0]
        for p in pieces[1:]:
            total = total + p
        rel_maps.append(total)
    return present(keys, parts, rel_maps)


def weighted_colimit_map(wf: Transformation | None, xf: Transformation | None,
                         src: Presented, tgt: Presented,
                         w: Diagram | None = None, x: Diagram | None = None) -> ChainMap:
    """The map of weighted colimits induced by maps of weights and diagrams."""

    def block(c):
        wc = wf[c] if wf is not None else ChainMap.identity(w(c))
        xc = xf[c] if xf is not None else ChainMap.identity(x(c))
        if c not in tgt.keys:
            return None
        return tgt.inject(c) @ tensor_map(wc, xc, source=src.part(c), target=tgt.part(c))

    return src.map_out(tgt.complex, block)


def yoneda_evaluation(x: Diagram, c: Obj, pres: Presented | None = None) -> tuple[Presented, ChainMap]:
    """shape(-, c) (x)_C X -> X(c), an isomorphism by the Yoneda lemma."""
    C = x.shape
    pres = pres or weighted_colimit(corepresentable(C, c), x)
    ev = pres.map_out(x(c), lambda e: x.act(e, c).with_source(pres.part(e)))
    return pres, ev


def external_tensor(w: Diagram, x: Diagram, shape: DgCategory | None = None) -> Diagram:
    """The bifunctor (a, c) -> W(a) (x) X(c) on shape(W) (x) shape(X)."""
    A, C = w.shape, x.shape
    P = shape or product_category(A, C)
    vals = {(a, b): tensor(w(a), x(b)) for a, b in P.objects}

    def act(s, t):
        hop, h = A.hom(s[0], t[0]), C.hom(s[1], t[1])
        src = TensorTree(((hop, h), (w(s[0]), x(s[1]))))
        dst = TensorTree(((hop, w(s[0])), (h, x(s[1]))))
        perm = rearrange(src, dst, [0, 2, 1, 3])
        both = tensor_map(w.act(s[0], t[0]), x.act(s[1], t[1]), source=dst.complex, target=vals[t])
        return (both @ perm).with_source(tensor(P.hom(s, t), vals[s]))

    return Diagram(P, vals, act, name=f"{w.name}[x]{x.name}")


def coend(f: Diagram, base: DgCategory) -> Presented:
    """The coend of a bifunctor f on base^op (x) base.

    Coequalizer of sum C(c0, c1) (x) F(c1, c0) => sum F(c, c) where the two
    maps act by (phi (x) 1) and (1 (x) phi).
    """
    P = f.shape
    keys = [c for c in base.objects if not f((c, c)).is_zero_complex()]
    parts = [f((c, c)) for c in keys]
    s = direct_sum(parts)
    idx = {c: i for i, c in enumerate(keys)}
    rel_maps = []
    for c0, c1 in base.pairs():
        h = base.hom(c0, c1)
        x = f((c1, c0))
        if h.is_zero_complex() or x.is_zero_complex():
            continue
        src = tensor(h, x)
        pieces = []
        if c0 in idx:
            # (phi (x) 1_{c0}) acting from (c1, c0) to (c0, c0)
            hp = P.hom((c1, c0), (c0, c0))
            emb = tensor_map(ChainMap.identity(h), base.unit(c0), source=h, target=hp)
            m = f.act((c1, c0), (c0, c0)) @ tensor_map(emb, ChainMap.identity(x), source=src,
                                                       target=f.act_source((c1, c0), (c0, c0)))
            pieces.append(s.inclusions[idx[c0]] @ m)
        if c1 in idx:
            hp = P.hom((c1, c0), (c1, c1))
            emb = tensor_map(base.unit(c1), ChainMap.identity(h), source=h, target=hp)
            m = f.act((c1, c0), (c1, c1)) @ tensor_map(emb, ChainMap.identity(x), source=src,
                                                       target=f.act_source((c1, c0), (c1, c1)))
            pieces.append(-(s.inclusions[idx[c1]] @ m))
        if not pieces:
            continue
        total = pieces[0]
        for p in pieces[1:]:
            total = total + p
        rel_maps.append(total)
    return present(keys, parts, rel_maps)


# Kan extensions -------------------------------------------------------------


@dataclass
class KanExtension:
    functor: DgFunctor
    diagram: Diagram
    presentations: dict
    result: Diagram

    def unit(self) -> Transformation:
        """X -> F^* F_! X, x -> 1 (x) x."""
        F, X = self.functor, self.diagram
        D = F.target
        comps = {}
        for c in X.shape.objects:
            pres = self.presentations[F(c)]
            if c not in pres.keys:
                comps[c] = ChainMap.zero(X(c), pres.complex)
                continue
            emb = tensor_map(D.unit(F(c)), ChainMap.identity(X(c)), source=X(c), target=pres.part(c))
            comps[c] = pres.inject(c) @ emb
        return Transformation(X, restriction(F, self.result), comps)


def left_kan(F: DgFunctor, x: Diagram) -> KanExtension:
    """(F_! X)(d) = D(F-, d) (x)_C X with the D-action by postcomposition."""
    D = F.target
    pres = {}
    for d in D.objects:
        w = kan_weight(F, d)
        pres[d] = weighted_colimit(w, x)

    def act(d, e):
        h = D.hom(d, e)
        pd, pe = pres[d], pres[e]
        if h.is_zero_complex() or pd.complex.is_zero_complex():
            return None

        def block(i, j):
            c = pd.keys[j]
            if c not in pe.keys:
                return None
            hw = D.hom(F(c), d)
            back = _assoc_inverse(h, hw, x(c))
            m = tensor_map(D.comp(F(c), d, e), ChainMap.identity(x(c)), source=back.target,
                           target=pe.part(c))
            return pe.inject(c) @ m @ back

        return bilinear_map([h], pd.parts, pe.complex, block).with_source(tensor(h, pd.complex))

    result = Diagram(D, {d: pres[d].complex for d in D.objects}, act, name=f"Lan {x.name}")
    return KanExtension(F, x, pres, result)


def kan_weight(F: DgFunctor, d: Obj) -> Diagram:
    """The weight c -> D(Fc, d) on C^op."""
    C, D = F.source, F.target
    vals = {c: D.hom(F(c), d) for c in C.objects}

    def act(a, b):
        # C^op(a, b) (x) D(Fa, d) = C(b, a) (x) D(Fa, d) -> D(Fb, d)
        cba, w = C.hom(b, a), vals[a]
        if cba.is_zero_complex() or w.is_zero_complex():
            return None
        br = braiding(cba, w)
        fmap = tensor_map(ChainMap.identity(w), F.on_hom(b, a), source=br.target,
                          target=D.hom_tensor(F(b), F(a), d))
        return D.comp(F(b), F(a), d) @ fmap @ br

    return Diagram(C.op, vals, act, name=f"D(F-,{d})")


def restriction(F: DgFunctor, y: Diagram) -> Diagram:
    C = F.source
    vals = {c: y(F(c)) for c in C.objects}

    def act(a, b):
        src = tensor(C.hom(a, b), vals[a])
        if src.is_zero_complex():
            return None
        m = tensor_map(F.on_hom(a, b), ChainMap.identity(vals[a]), source=src,
                       target=y.act_source(F(a), F(b)))
        return y.act(F(a), F(b)) @ m

    return Diagram(C, vals, act, name=f"F*{y.name}")


def restrict_transformation(F: DgFunctor, f: Transformation, source: Diagram | None = None,
                            target: Diagram | None = None) -> Transformation:
    s = source or restriction(F, f.source)
    t = target or restriction(F, f.target)
    return Transformation(s, t, {c: f[F(c)] for c in F.source.objects})


def kan_counit(F: DgFunctor, y: Diagram, ext: KanExtension | None = None) -> tuple[KanExtension, Transformation]:
    """F_! F^* Y -> Y, acting on each generator."""
    ext = ext or left_kan(F, restriction(F, y))
    comps = {}
    for d in F.target.objects:
        pres = ext.presentations[d]
        comps[d] = pres.map_out(y(d), lambda c, d=d, pres=pres: y.act(F(c), d).with_source(pres.part(c)))
    return ext, Transformation(ext.result, y, comps)


def kan_map(ext_src: KanExtension, ext_tgt: KanExtension, f: Transformation) -> Transformation:
    """F_! f on generators: 1 (x) f_c."""
    F = ext_src.functor
    comps = {}
    for d in F.target.objects:
        ps, pt = ext_src.presentations[d], ext_tgt.presentations[d]
        w = kan_weight(F, d)
        comps[d] = weighted_colimit_map(None, f, ps, pt, w=w)
    return Transformation(ext_src.result, ext_tgt.result, comps)


def restriction_along_inclusion(x: Diagram, sub: DgCategory) -> Diagram:
    return Diagram(sub, {c: x(c) for c in sub.objects}, lambda a, b: x.act(a, b), name=f"{x.name}|")


@dataclass
class CoendExchange:
    """The comparison from the coend over C of (alpha (x) 1)^*F to the coend over D of (1 (x) alpha)_!F."""

    restricted: Presented
    extended: Presented
    kan: KanExtension
    comparison: ChainMap

    def is_iso(self) -> bool:
        return is_isomorphism(self.comparison)


def coend_exchange(alpha: DgFunctor, f: Diagram) -> CoendExchange:
    """Restrict-then-coend versus extend-then-coend for a bifunctor f on D^op (x) C.

    The comparison sends the generator F(alpha c, c) to unit (x) F(alpha c, c)
    inside (1 (x) alpha)_!F at (alpha c, alpha c).
    """
    C, D = alpha.source, alpha.target
    P = f.shape
    Pc = product_category(C.op, C)
    Pd = product_category(D.op, D)
    pull = product_functor(alpha.op, identity_functor(C), Pc, P)
    push = product_functor(identity_functor(D.op), alpha, P, Pd)
    lhs = coend(restriction(pull, f), C)
    ext = left_kan(push, f)
    rhs = coend(ext.result, D)
    unit = ext.unit()

    def block(c):
        d = alpha(c)
        if d not in rhs.keys:
            return None
        return rhs.inject(d) @ unit[(d, c)].with_source(lhs.part(c)).with_target(rhs.part(d))

    return CoendExchange(lhs, rhs, ext, lhs.map_out(rhs.complex, block))


# sums and pushouts of diagrams ----------------------------------------------


def pushout_diagrams(f: Transformation, g: Transformation) -> tuple[Diagram, Transformation, Transformation]:
    """Pointwise pushout of B <-f- A -g-> C; returns (P, B -> P, C -> P)."""
    C = f.source.shape
    B, Cd = f.target, g.target
    pos = {e: pushout(f[e], g[e]) for e in C.objects}
    vals = {e: pos[e].complex for e in C.objects}

    def act(a, b):
        h = C.hom(a, b)
        if h.is_zero_complex() or vals[a].is_zero_complex():
            return None

        def block(i, j):
            if j == 0:
                return pos[b].left @ B.act(a, b).with_source(tensor(h, B(a)))
            return pos[b].right @ Cd.act(a, b).with_source(tensor(h, Cd(a)))

        return bilinear_map([h], [B(a), Cd(a)], vals[b], block).with_source(tensor(h, vals[a]))

    P = Diagram(C, vals, act, name="pushout")
    left = Transformation(B, P, {e: pos[e].left for e in C.objects})
    right = Transformation(Cd, P, {e: pos[e].right for e in C.objects})
    return P, left, right


def direct_sum_diagrams(xs: Sequence[Diagram]) -> tuple[Diagram, list[Transformation]]:
    C = xs[0].shape
    sums = {e: direct_sum([x(e) for x in xs]) for e in C.objects}
    vals = {e: sums[e].complex for e in C.objects}

    def act(a, b):
        h = C.hom(a, b)
        if h.is_zero_complex() or vals[a].is_zero_complex():
            return None

        def block(i, j):
            return sums[b].inclusions[j] @ xs[j].act(a, b).with_source(tensor(h, xs[j](a)))

        return bilinear_map([h], [x(a) for x in xs], vals[b], block).with_source(tensor(h, vals[a]))

    S = Diagram(C, vals, act, name="sum")
    incs = [Transformation(x, S, {e: sums[e].inclusions[i] for e in C.objects}) for i, x in enumerate(xs)]
    return S, incs


# cells ------------------------------------------------------------------------


@dataclass
class Cell:
    """Attachment of shape_obj (x) k along the adjunct ``attach``: dom(k) -> X(obj)."""

    obj: Obj
    k: ChainMap
    attach: ChainMap


@dataclass
class CellAttachment:
    result: Diagram
    inclusion: Transformation
    characteristic: Transformation


def attach_cell(x: Diagram, cell: Cell, check: bool = True) -> CellAttachment:
    if check and not is_cofibration(cell.k):
        raise ValueError("cells must be attached along cofibrations")
    C = x.shape
    src = free_diagram(C, cell.obj, cell.k.source)
    tgt = free_diagram(C, cell.obj, cell.k.target)
    kk = transformation_tensor(identity_transformation(representable(C, cell.obj)), cell.k, src, tgt)
    att = yoneda_adjunct(x, cell.obj, cell.attach.with_target(x(cell.obj)), source=src)
    p, left, right = pushout_diagrams(att, kk)
    return CellAttachment(p, left, right)


@dataclass
class CellPresentation:
    """A diagram built from ``base`` by attaching cells in order."""

    base: Diagram
    cells: list[Cell] = field(default_factory=list)
    result: Diagram | None = None
    inclusion: Transformation | None = None

    def replay(self) -> tuple[Diagram, Transformation]:
        x = self.base
        inc = identity_transformation(x)
        for cell in self.cells:
            a = attach_cell(x, cell, check=False)
            inc = a.inclusion @ inc
            x = a.result
        return x, inc

    def verify(self) -> bool:
        """Cells are cofibrations and replaying reproduces the stored result."""
        if not all(is_cofibration(c.k) for c in self.cells):
            return False
        x, _ = self.replay()
        if self.result is None:
            return True
        return same_diagram(x, self.result)

    def extend(self, cell: Cell) -> CellAttachment:
        cur = self.result if self.result is not None else self.base
        a = attach_cell(cur, cell)
        self.cells.append(cell)
        self.inclusion = a.inclusion if self.inclusion is None else a.inclusion @ self.inclusion
        self.result = a.result
        return a


def same_diagram(x: Diagram, y: Diagram) -> bool:
    """On-the-nose equality of values and actions."""
    if x.shape.objects != y.shape.objects:
        return False
    for c in x.shape.objects:
        if not x(c).identical(y(c)):
            return False
    for a, b in x.shape.pairs():
        if x.act(a, b)._c != y.act(a, b)._c:
            return False
    return True


# cubes --------------------------------------------------------------------------


class Cube:
    """A diagram on the subsets of a finite set, given on edges I -> I + {s}."""

    def __init__(self, labels: Sequence, values: Mapping[frozenset, ChainComplex],
                 edges: Mapping[tuple[frozenset, object], ChainMap]):
        self.labels = list(labels)
        self.values = dict(values)
        self.edges = dict(edges)

    def subsets(self) -> list[frozenset]:
        out = []
        for r in range(len(self.labels) + 1):
            out.extend(frozenset(c) for c in itertools.combinations(self.labels, r))
        return out

    def edge(self, i: frozenset, s) -> ChainMap:
        return self.edges[(i, s)]

    def path(self, i: frozenset, j: frozenset) -> ChainMap:
        """The map I -> J for I contained in J (adding labels in order)."""
        m = ChainMap.identity(self.values[i])
        cur = i
        for s in self.labels:
            if s in j and s not in cur:
                m = self.edge(cur, s) @ m
                cur = cur | {s}
        return m

    def check(self) -> list:
        bad = []
        for i in self.subsets():
            rest = [s for s in self.labels if s not in i]
            for s, t in itertools.combinations(rest, 2):
                a = self.edge(i | {s}, t) @ self.edge(i, s)
                b = self.edge(i | {t}, s) @ self.edge(i, t)
                if not a.equals(b):
                    bad.append((i, s, t))
        return bad

    def full(self) -> frozenset:
        return frozenset(self.labels)

    def proper_colimit(self) -> Presented:
        proper = [i for i in self.subsets() if i != self.full()]
        keys = [i for i in proper if not self.values[i].is_zero_complex()]
        parts = [self.values[i] for i in keys]
        s = direct_sum(parts)
        idx = {k: n for n, k in enumerate(keys)}
        rels = []
        for i in proper:
            for t in self.labels:
                j = i | {t}
                if t in i or j == self.full() or i not in idx:
                    continue
                m = s.inclusions[idx[i]]
                if j in idx:
                    m = m - s.inclusions[idx[j]] @ self.edge(i, t)
                rels.append(m)
        return present(keys, parts, rels)

    def pcm(self) -> tuple[Presented, ChainMap]:
        pres = self.proper_colimit()
        full = self.full()
        m = pres.map_out(self.values[full], lambda i: self.path(i, full))
        return pres, m


def arrow_cube(f: ChainMap, label=0) -> Cube:
    e, s = frozenset(), frozenset([label])
    return Cube([label], {e: f.source, s: f.target}, {(e, label): f})


def tensor_cubes(x: Cube, y: Cube) -> Cube:
    """(X (x) Y)(I + J) = X(I) (x) Y(J), with labels tagged 0 and 1."""
    labels = [(0, s) for s in x.labels] + [(1, t) for t in y.labels]
    vals, tens = {}, {}
    for i in x.subsets():
        for j in y.subsets():
            k = frozenset((0, s) for s in i) | frozenset((1, t) for t in j)
            tens[k] = (i, j)
            vals[k] = tensor(x.values[i], y.values[j])
    edges = {}
    for k, (i, j) in tens.items():
        for lab in labels:
            if lab in k:
                continue
            side, s = lab
            k2 = k | {lab}
            if side == 0:
                m = tensor_map(x.edge(i, s), ChainMap.identity(y.values[j]), source=vals[k], target=vals[k2])
            else:
                m = tensor_map(ChainMap.identity(x.values[i]), y.edge(j, s), source=vals[k], target=vals[k2])
            edges[(k, lab)] = m
    return Cube(labels, vals, edges)


@dataclass
class PcmComparison:
    iso: ChainMap
    commutes: bool
    is_isomorphism: bool

    @property
    def ok(self) -> bool:
        return self.commutes and self.is_isomorphism


def pcm_tensor_comparison(x: Cube, y: Cube) -> PcmComparison:
    """Compare pcm(X (x) Y) with pcm(pcm X (x) pcm Y) via the canonical map."""
    xy = tensor_cubes(x, y)
    p_xy, m_xy = xy.pcm()
    px, mx = x.pcm()
    py, my = y.pcm()
    sq = tensor_cubes(arrow_cube(mx, "x"), arrow_cube(my, "y"))
    p_sq, m_sq = sq.pcm()
    e = frozenset()
    kx, ky = frozenset([(0, "x")]), frozenset([(1, "y")])
    fx, fy = x.full(), y.full()

    def block(k):
        i = frozenset(s for side, s in k if side == 0)
        j = frozenset(t for side, t in k if side == 1)
        src = xy.values[k]
        if i != fx and j != fy:
            corner = e
            a = px.inject(i) if i in px.keys else None
            b = py.inject(j) if j in py.keys else None
        elif i == fx:
            corner = kx
            a = ChainMap.identity(x.values[fx])
            b = py.inject(j) if j in py.keys else None
        else:
            corner = ky
            a = px.inject(i) if i in px.keys else None
            b = ChainMap.identity(y.values[fy])
        if a is None or b is None or corner not in p_sq.keys:
            return None
        m = tensor_map(a, b, source=src, target=sq.values[corner])
        return p_sq.inject(corner) @ m

    theta = p_xy.map_out(p_sq.complex, block)
    commutes = (m_sq @ theta).equals(m_xy.with_target(m_sq.target))
    return PcmComparison(theta, commutes, is_isomorphism(theta))


# left closedness of weighted colimits --------------------------------------------


@dataclass
class LeftClosedReport:
    ok: bool
    left_vertical: bool
    right_vertical: bool
    corner: bool
    hypotheses: list[str]
    corner_map: ChainMap | None = None


def coend_left_closed_check(v: Transformation, x: Transformation) -> LeftClosedReport:
    """Square of weighted colimits for V -> W (weights) and X -> Y (diagrams)."""
    hyp = []
    if not is_pointwise_cofibration(v):
        hyp.append("weight map is not a pointwise cofibration")
    if not all(x.source(c).is_cofibrant() for c in x.source.shape.objects):
        hyp.append("source diagram is not pointwise cofibrant")
    V, W, X, Y = v.source, v.target, x.source, x.target
    vx, wx = weighted_colimit(V, X), weighted_colimit(W, X)
    vy, wy = weighted_colimit(V, Y), weighted_colimit(W, Y)
    top = weighted_colimit_map(v, None, vx, wx, x=X)
    left = weighted_colimit_map(None, x, vx, vy, w=V)
    right = weighted_colimit_map(None, x, wx, wy, w=W)
    bottom = weighted_colimit_map(v, None, vy, wy, x=Y)
    e, a, b = frozenset(), frozenset(["w"]), frozenset(["y"])
    ab = a | b
    cube = Cube(["w", "y"], {e: vx.complex, a: wx.complex, b: vy.complex, ab: wy.complex},
                {(e, "w"): top, (e, "y"): left, (a, "y"): right, (b, "w"): bottom})
    _, corner = cube.pcm()
    lv, rv, cv = is_cofibration(left), is_cofibration(right), is_cofibration(corner)
    return LeftClosedReport(not hyp and lv and rv and cv, lv, rv, cv, hyp, corner)
