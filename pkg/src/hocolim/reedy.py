"""Reedy structures, latching objects, skeleta and cofibrant replacement over direct shapes.

A ReedyStructure records sub-complexes R_+(d, c) and R_-(c', d) of the hom
complexes together with the decomposition isomorphism

    sum_d R_+(d, c) (x) R_-(c', d) -> R(c', c).

Every sub-weight used here (boundaries, skeleta, the corners of the cells
flatness check) is a sub-coproduct of that decomposition selected by a predicate on
the middle object d.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Mapping, Sequence

from .chainz import (
    ChainComplex,
    ChainMap,
    DirectSum,
    cokernel_invariants,
    copair,
    copair_into,
    direct_sum,
    factorize,
    free_resolution,
    inverse,
    is_cofibration,
    is_flat,
    is_isomorphism,
    map_injective,
    pushout,
    tensor,
    tensor_map,
    zero_complex,
)
from .dgcat import (
    DgCategory,
    FiniteCategory,
    arrow_category,
    inclusion_functor,
    is_locally_flat,
    linearize,
    product_category,
    simplex_category,
)
from .diagram import (
    Cell,
    CellPresentation,
    Cube,
    Diagram,
    Presented,
    Transformation,
    _assoc_inverse,
    braiding,
    corepresentable,
    is_pointwise_iso,
    is_pointwise_we,
    left_kan,
    representable,
    restriction_along_inclusion,
    weighted_colimit,
    weighted_colimit_map,
    zero_diagram,
)
from .zmat import IntMatrix

Obj = Hashable


class ReedyError(ValueError):
    pass


@dataclass
class Decomposition:
    """sum_d R_+(d, c) (x) R_-(c', d) with its map to R(c', c) and the inverse."""

    keys: list
    parts: list[ChainComplex]
    sum: DirectSum
    map: ChainMap
    inverse: ChainMap | None


@dataclass
class SubHom:
    """A sub-coproduct of a decomposition, with inclusion into and projection from R(c', c)."""

    keys: list
    complex: ChainComplex
    incl: ChainMap
    proj: ChainMap


class ReedyStructure:
    def __init__(self, shape: DgCategory, degree: Mapping[Obj, int],
                 plus: Mapping[tuple, ChainMap], minus: Mapping[tuple, ChainMap], name: str = ""):
        self.shape = shape
        self.degree = dict(degree)
        self._plus = dict(plus)
        self._minus = dict(minus)
        self.name = name or shape.name
        self._dec: dict = {}
        self._sub: dict = {}

    def plus(self, d: Obj, c: Obj) -> ChainMap:
        m = self._plus.get((d, c))
        return m if m is not None else ChainMap.zero(zero_complex(), self.shape.hom(d, c))

    def minus(self, c1: Obj, d: Obj) -> ChainMap:
        m = self._minus.get((c1, d))
        return m if m is not None else ChainMap.zero(zero_complex(), self.shape.hom(c1, d))

    def decomposition(self, c1: Obj, c: Obj) -> Decomposition:
        key = (c1, c)
        if key in self._dec:
            return self._dec[key]
        R = self.shape
        keys, parts, blocks = [], [], []
        for d in R.objects:
            p, m = self.plus(d, c), self.minus(c1, d)
            part = tensor(p.source, m.source)
            if part.is_zero_complex():
                continue
            keys.append(d)
            parts.append(part)
            blocks.append(R.comp(c1, d, c) @ tensor_map(p, m, source=part, target=R.hom_tensor(c1, d, c)))
        s = direct_sum(parts)
        tgt = R.hom(c1, c)
        mp = copair(blocks, source=s.complex) if blocks else ChainMap.zero(s.complex, tgt)
        try:
            inv = inverse(mp)
        except ValueError:
            inv = None
        dec = Decomposition(keys, parts, s, mp, inv)
        self._dec[key] = dec
        return dec

    def sub_hom(self, c1: Obj, c: Obj, pred: Callable[[Obj], bool], tag=None) -> SubHom:
        """The sub-coproduct over the middle objects d with pred(d)."""
        cache_key = (c1, c, tag) if tag is not None else None
        if cache_key is not None and cache_key in self._sub:
            return self._sub[cache_key]
        dec = self.decomposition(c1, c)
        if dec.inverse is None:
            raise ReedyError(f"decomposition is not an isomorphism at {(c1, c)}")
        sel = [i for i, d in enumerate(dec.keys) if pred(d)]
        sub = direct_sum([dec.parts[i] for i in sel])
        full = self.shape.hom(c1, c)
        if sel:
            incl = dec.map @ copair([dec.sum.inclusions[i] for i in sel], source=sub.complex)
            proj = copair_into(sub, [dec.sum.projections[i] for i in sel]) @ dec.inverse
        else:
            incl = ChainMap.zero(sub.complex, full)
            proj = ChainMap.zero(full, sub.complex)
        out = SubHom([dec.keys[i] for i in sel], sub.complex, incl, proj)
        if cache_key is not None:
            self._sub[cache_key] = out
        return out

    def check_decomposition(self) -> list[tuple]:
        return [(a, b) for a, b in self.shape.pairs()
                if self.decomposition(a, b).inverse is None]

    def check_direct_inverse(self) -> list[tuple]:
        bad = []
        deg = self.degree
        for a, b in self.shape.pairs():
            p, m = self.plus(a, b), self.minus(a, b)
            if a == b:
                if p.source.group_invariants(0).rank != 1:
                    bad.append(("plus unit", a))
                if m.source.group_invariants(0).rank != 1:
                    bad.append(("minus unit", a))
                continue
            if deg[a] >= deg[b] and not p.source.is_zero_complex():
                bad.append(("plus not direct", a, b))
            if deg[a] <= deg[b] and not m.source.is_zero_complex():
                bad.append(("minus not inverse", a, b))
        return bad

    def validate(self) -> None:
        bad = self.check_direct_inverse() + self.check_decomposition()
        if bad:
            raise ReedyError(f"not a Reedy structure: {bad[0]}")

    def is_direct(self) -> bool:
        return all(self.minus(a, b).source.is_zero_complex() for a, b in self.shape.pairs() if a != b)

    def objects_by_degree(self) -> list:
        return sorted(self.shape.objects, key=lambda c: (self.degree[c], self.shape.index(c)))


def _sub_inclusion(small: SubHom, big: SubHom, dec: Decomposition) -> ChainMap:
    """Inclusion of one sub-coproduct into a larger one of the same decomposition."""
    if not small.keys:
        return ChainMap.zero(small.complex, big.complex)
    if not big.keys:
        return ChainMap.zero(small.complex, big.complex)
    b = direct_sum([dec.parts[dec.keys.index(d)] for d in big.keys])
    maps = []
    for i, d in enumerate(small.keys):
        if d not in big.keys:
            raise ReedyError("sub-coproduct is not contained in the larger one")
        maps.append(b.inclusions[big.keys.index(d)].with_target(big.complex))
    return copair(maps, source=small.complex)


# constructors --------------------------------------------------------------


def direct_reedy(shape: DgCategory) -> ReedyStructure:
    """A direct shape: R_+ is everything, R_- only the identities."""
    if not shape.is_direct():
        raise ReedyError(f"{shape.name} is not direct: {shape.check_direct()[:1]}")
    plus = {(a, b): ChainMap.identity(shape.hom(a, b)) for a, b in shape.pairs()
            if not shape.hom(a, b).is_zero_complex()}
    minus = {(a, a): shape.unit(a) for a in shape.objects}
    return ReedyStructure(shape, shape.degree, plus, minus, name=shape.name)


def linearized_reedy(cat: FiniteCategory, degree: Mapping[Obj, int],
                     is_plus: Callable, is_minus: Callable, name: str = "") -> ReedyStructure:
    """Linearization of an ordinary Reedy category with the given sub-classes of morphisms."""
    shape = linearize(cat, degree)
    plus, minus = {}, {}
    for a in cat.objects:
        for b in cat.objects:
            ms = cat.hom(a, b)
            if not ms:
                continue
            h = shape.hom(a, b)
            for store, pred in ((plus, is_plus), (minus, is_minus)):
                sel = [i for i, m in enumerate(ms) if pred(m)]
                if not sel:
                    continue
                sub = ChainComplex({0: len(sel)}, check=False)
                mat = IntMatrix([[1 if i == s else 0 for s in sel] for i in range(len(ms))], len(sel))
                store[(a, b)] = ChainMap(sub, h, {0: mat}, check=False)
    return ReedyStructure(shape, degree, plus, minus, name=name or cat.name)


def simplex_reedy(top: int) -> ReedyStructure:
    """Linearized simplex category on [0..top]: injections up, surjections down."""
    cat = simplex_category(top)

    def injective(m):
        return len(set(m[2])) == len(m[2])

    def surjective(m):
        return set(m[2]) == set(range(m[1] + 1))

    return linearized_reedy(cat, {n: n for n in cat.objects}, injective, surjective, name=f"Z[Delta<={top}]")


# sub-weights ---------------------------------------------------------------


def sub_weight(R: ReedyStructure, c: Obj, pred: Callable[[Obj], bool], tag=None) -> tuple[Diagram, Transformation]:
    """The weight c' -> sub-coproduct of R(c', c) (on R^op) and its inclusion into R(-, c)."""
    S = R.shape
    subs = {c1: R.sub_hom(c1, c, pred, None if tag is None else ("w", c, tag)) for c1 in S.objects}

    def act(a, b):
        # R^op(a, b) (x) W(a) = R(b, a) (x) W(a) -> W(b)
        h, w = S.hom(b, a), subs[a].complex
        if h.is_zero_complex() or w.is_zero_complex() or subs[b].complex.is_zero_complex():
            return None
        src = tensor(h, w)
        inc = tensor_map(ChainMap.identity(h), subs[a].incl, source=src)
        br = braiding(h, S.hom(a, c)).with_source(inc.target).with_target(S.hom_tensor(b, a, c))
        return subs[b].proj @ S.comp(b, a, c) @ br @ inc

    w = Diagram(S.op, {c1: subs[c1].complex for c1 in S.objects}, act, name=f"sub^{c}")
    full = corepresentable(S, c)
    j = Transformation(w, full, {c1: subs[c1].incl for c1 in S.objects})
    return w, j


def sub_corepresentable(R: ReedyStructure, c1: Obj, pred: Callable[[Obj], bool], tag=None) -> tuple[Diagram, Transformation]:
    """The diagram c -> sub-coproduct of R(c1, c) and its inclusion into R(c1, -)."""
    S = R.shape
    subs = {c: R.sub_hom(c1, c, pred, None if tag is None else ("y", c1, tag)) for c in S.objects}

    def act(a, b):
        h, y = S.hom(a, b), subs[a].complex
        if h.is_zero_complex() or y.is_zero_complex() or subs[b].complex.is_zero_complex():
            return None
        src = tensor(h, y)
        inc = tensor_map(ChainMap.identity(h), subs[a].incl, source=src, target=S.hom_tensor(c1, a, b))
        return subs[b].proj @ S.comp(c1, a, b) @ inc

    y = Diagram(S, {c: subs[c].complex for c in S.objects}, act, name=f"sub_{c1}")
    full = representable(S, c1)
    j = Transformation(y, full, {c: subs[c].incl for c in S.objects})
    return y, j


def boundary_weight(R: ReedyStructure, c: Obj) -> tuple[Diagram, Transformation]:
    """j^c: the boundary of R(-, c), summands with d != c."""
    return sub_weight(R, c, lambda d: d != c, tag="boundary")


def boundary_corepresentable(R: ReedyStructure, c1: Obj) -> tuple[Diagram, Transformation]:
    """j_c1: the boundary of R(c1, -), summands with d != c1."""
    return sub_corepresentable(R, c1, lambda d: d != c1, tag="boundary")


# latching objects ------------------------------------------------------------


@dataclass
class LatchingData:
    obj: Obj
    weight: Diagram
    inclusion: Transformation
    presentation: Presented
    map: ChainMap

    @property
    def complex(self) -> ChainComplex:
        return self.presentation.complex


def latching(R: ReedyStructure, x: Diagram, c: Obj) -> LatchingData:
    """L_c X = boundary weight (x)_R X with its map to X(c)."""
    w, j = boundary_weight(R, c)
    pres = weighted_colimit(w, x)

    def block(c1):
        part = pres.part(c1)
        inc = tensor_map(j[c1], ChainMap.identity(x(c1)), source=part, target=x.act_source(c1, c))
        return x.act(c1, c) @ inc

    return LatchingData(c, w, j, pres, pres.map_out(x(c), block))


# skeleta -------------------------------------------------------------------------


@dataclass
class Skeleton:
    n: int
    diagram: Diagram
    presentations: dict
    subs: dict
    comparison: Transformation


def _filtered_colimit(R: ReedyStructure, x: Diagram, pred: Callable[[Obj], bool], tag) -> tuple[Diagram, dict, dict]:
    """c -> (sub-coproduct of R(-, c)) (x)_R X with the induced R-action."""
    S = R.shape
    weights = {e: sub_weight(R, e, pred, tag)[0] for e in S.objects}
    pres = {e: weighted_colimit(weights[e], x) for e in S.objects}
    subs = {(c1, e): R.sub_hom(c1, e, pred, ("w", e, tag)) for e in S.objects for c1 in S.objects}

    def act(e, e2):
        h = S.hom(e, e2)
        pe, pe2 = pres[e], pres[e2]
        if h.is_zero_complex() or pe.complex.is_zero_complex() or pe2.complex.is_zero_complex():
            return None
        from .chainz import bilinear_map

        def block(i, j):
            c1 = pe.keys[j]
            if c1 not in pe2.keys:
                return None
            s_from, s_to = subs[(c1, e)], subs[(c1, e2)]
            back = _assoc_inverse(h, s_from.complex, x(c1))
            left = s_to.proj @ S.comp(c1, e, e2) @ tensor_map(
                ChainMap.identity(h), s_from.incl, source=tensor(h, s_from.complex),
                target=S.hom_tensor(c1, e, e2))
            m = tensor_map(left, ChainMap.identity(x(c1)), source=back.target, target=pe2.part(c1))
            return pe2.inject(c1) @ m @ back

        return bilinear_map([h], pe.parts, pe2.complex, block).with_source(tensor(h, pe.complex))

    d = Diagram(S, {e: pres[e].complex for e in S.objects}, act, name=f"filtered {tag}")
    return d, pres, subs


def skeleton(R: ReedyStructure, x: Diagram, n: int) -> Skeleton:
    """sk_n X = (sk_n R) (x)_R X with its comparison map to X."""
    S = R.shape
    d, pres, subs = _filtered_colimit(R, x, lambda m: R.degree[m] <= n, ("sk", n))
    comps = {}
    for e in S.objects:
        p = pres[e]

        def block(c1, e=e, p=p):
            s = subs[(c1, e)]
            inc = tensor_map(s.incl, ChainMap.identity(x(c1)), source=p.part(c1), target=x.act_source(c1, e))
            return x.act(c1, e) @ inc

        comps[e] = p.map_out(x(e), block)
    return Skeleton(n, d, pres, subs, Transformation(d, x, comps))


@dataclass
class SkeletonReport:
    n: int
    full_at_degree: dict
    latching_identified: dict
    square_commutes: dict
    square_pushout: dict

    @property
    def ok(self) -> bool:
        return all(self.full_at_degree.values()) and all(self.latching_identified.values()) \
            and all(self.square_commutes.values()) and all(self.square_pushout.values())


def skeleton_check(R: ReedyStructure, x: Diagram, n: int) -> SkeletonReport:
    """Check (sk_n X)c = X(c) and (sk_{n-1} X)c = L_c X for |c| = n, and the skeleton pushout square."""
    S = R.shape
    top, bot = skeleton(R, x, n - 1), skeleton(R, x, n)
    layer = [c for c in R.objects_by_degree() if R.degree[c] == n]
    full, ident = {}, {}
    lat, kappa = {}, {}
    for c in layer:
        full[c] = is_isomorphism(bot.comparison[c])
        lat[c] = latching(R, x, c)
        # L_c X and (sk_{n-1} X)(c) have the same generators: d != c versus |d| <= n-1
        pl, pt = lat[c].presentation, top.presentations[c]
        dec = R.decomposition

        def block(c1, c=c, pl=pl, pt=pt):
            if c1 not in pt.keys:
                return None
            small = R.sub_hom(c1, c, lambda d, c=c: d != c, ("w", c, "boundary"))
            big = top.subs[(c1, c)]
            inc = _sub_inclusion(small, big, dec(c1, c))
            return pt.inject(c1) @ tensor_map(inc, ChainMap.identity(x(c1)), source=pl.part(c1), target=pt.part(c1))

        kappa[c] = pl.map_out(pt.complex, block)
        ident[c] = is_isomorphism(kappa[c])
    commutes, is_po = {}, {}
    for e in S.objects:
        tl_parts, bl_parts = [], []
        tl_maps_down, tl_maps_right, bl_maps = [], [], []
        for c in layer:
            ld = lat[c]
            sub = R.sub_hom(c, e, lambda d, c=c: d != c, ("y", c, "boundary"))
            h = S.hom(c, e)
            L = ld.complex
            f1 = tensor_map(sub.incl, ChainMap.identity(L))
            f2 = tensor_map(ChainMap.identity(sub.complex), ld.map, source=f1.source)
            po = pushout(f1, f2)
            tl_parts.append(po.complex)
            # down: R_c (x) L -> R_c (x) X(c), boundary (x) X(c) -> R_c (x) X(c)
            rx = tensor(h, x(c))
            down_b = tensor_map(ChainMap.identity(h), ld.map, source=f1.target, target=rx)
            down_c = tensor_map(sub.incl, ChainMap.identity(x(c)), source=f2.target, target=rx)
            tl_maps_down.append((po, down_b, down_c, rx))
            # right: into sk_{n-1} X (e)
            pt = top.presentations[e]
            act_top = top.diagram.act(c, e)
            right_b = act_top @ tensor_map(ChainMap.identity(h), kappa[c], source=f1.target,
                                           target=top.diagram.act_source(c, e))
            if c in pt.keys:
                big = top.subs[(c, e)]
                inc = _sub_inclusion(sub, big, R.decomposition(c, e))
                right_c = pt.inject(c) @ tensor_map(inc, ChainMap.identity(x(c)), source=f2.target,
                                                    target=pt.part(c))
            else:
                right_c = ChainMap.zero(f2.target, pt.complex)
            tl_maps_right.append((right_b, right_c))
            bl_parts.append(rx)
            pb = bot.presentations[e]
            if c in pb.keys:
                s = bot.subs[(c, e)]
                bl_maps.append(pb.inject(c) @ tensor_map(s.proj, ChainMap.identity(x(c)), source=rx,
                                                         target=pb.part(c)))
            else:
                bl_maps.append(ChainMap.zero(rx, pb.complex))
        tl = direct_sum(tl_parts)
        bl = direct_sum(bl_parts)
        tr, br = top.diagram(e), bot.diagram(e)
        if layer:
            down = copair([bl.inclusions[i] @ copair([db, dc], source=po.complex)
                           for i, (po, db, dc, _) in enumerate(tl_maps_down)], source=tl.complex)
            right = copair([copair([rb, rc], source=tl_maps_down[i][0].complex)
                            for i, (rb, rc) in enumerate(tl_maps_right)], source=tl.complex)
            bottom = copair(bl_maps, source=bl.complex)
        else:
            down = ChainMap.zero(tl.complex, bl.complex)
            right = ChainMap.zero(tl.complex, tr)
            bottom = ChainMap.zero(bl.complex, br)
        pt, pb = top.presentations[e], bot.presentations[e]

        def vblock(c1, e=e, pt=pt, pb=pb):
            if c1 not in pb.keys:
                return None
            inc = _sub_inclusion(top.subs[(c1, e)], bot.subs[(c1, e)], R.decomposition(c1, e))
            return pb.inject(c1) @ tensor_map(inc, ChainMap.identity(x(c1)), source=pt.part(c1), target=pb.part(c1))

        vert = pt.map_out(br, vblock)
        z, a, b = frozenset(), frozenset(["d"]), frozenset(["r"])
        cube = Cube(["d", "r"], {z: tl.complex, a: bl.complex, b: tr, a | b: br},
                    {(z, "d"): down, (z, "r"): right, (a, "r"): bottom, (b, "d"): vert})
        commutes[e] = not cube.check()
        _, corner = cube.pcm()
        is_po[e] = is_isomorphism(corner)
    return SkeletonReport(n, full, ident, commutes, is_po)


# flatness of cells --------------------------------------------------------------


@dataclass
class CellsFlatnessReport:
    c: Obj
    c1: Obj
    skipped: bool
    reason: str = ""
    corners_identified: dict = field(default_factory=dict)
    pcm_isomorphism: bool = False
    pcm_injective: bool = False
    cokernel: dict = field(default_factory=dict)
    flat: bool = False

    @property
    def ok(self) -> bool:
        if self.skipped:
            return True
        if not all(self.corners_identified.values()) or not self.flat:
            return False
        if self.c != self.c1:
            return self.pcm_isomorphism
        coker_z = {n: str(g) for n, g in self.cokernel.items() if not g.is_zero()} == {0: "Z"}
        return self.pcm_injective and coker_z


def cells_flatness_check(R: ReedyStructure, c: Obj, c1: Obj) -> CellsFlatnessReport:
    """pcm(j^c (x)_R j_c1) computed from four weighted colimits and compared with sub-coproducts."""
    lf = is_locally_flat(R.shape)
    if not lf:
        return CellsFlatnessReport(c, c1, True, f"not locally flat at {sorted(lf.failures, key=str)[0]}")
    S = R.shape
    w0, jw = boundary_weight(R, c)
    w1 = corepresentable(S, c)
    y0, jy = boundary_corepresentable(R, c1)
    y1 = representable(S, c1)
    p00, p10 = weighted_colimit(w0, y0), weighted_colimit(w1, y0)
    p01, p11 = weighted_colimit(w0, y1), weighted_colimit(w1, y1)
    top = weighted_colimit_map(jw, None, p00, p10, x=y0)
    left = weighted_colimit_map(None, jy, p00, p01, w=w0)
    right = weighted_colimit_map(None, jy, p10, p11, w=w1)
    bottom = weighted_colimit_map(jw, None, p01, p11, x=y1)
    z, a, b = frozenset(), frozenset(["w"]), frozenset(["y"])
    cube = Cube(["w", "y"], {z: p00.complex, a: p10.complex, b: p01.complex, a | b: p11.complex},
                {(z, "w"): top, (z, "y"): left, (a, "y"): right, (b, "w"): bottom})
    _, corner = cube.pcm()

    # identify the corners with sub-coproducts of R(c1, c) by composition
    def compose_out(pres, winc, yinc, sub):
        def block(e):
            part = pres.part(e)
            m = tensor_map(winc(e), yinc(e), source=part, target=S.hom_tensor(c1, e, c))
            return sub.proj @ S.comp(c1, e, c) @ m
        return pres.map_out(sub.complex, block)

    ident = lambda e, d: ChainMap.identity(S.hom(e, c) if d == "w" else S.hom(c1, e))
    subs = {
        "mono": R.sub_hom(c1, c, lambda d: d != c and d != c1),
        "pos": R.sub_hom(c1, c, lambda d: d != c1),
        "neg": R.sub_hom(c1, c, lambda d: d != c),
        "all": R.sub_hom(c1, c, lambda d: True),
    }
    corners = {
        "mono": compose_out(p00, lambda e: jw[e], lambda e: jy[e], subs["mono"]),
        "pos": compose_out(p10, lambda e: ident(e, "w"), lambda e: jy[e], subs["pos"]),
        "neg": compose_out(p01, lambda e: jw[e], lambda e: ident(e, "y"), subs["neg"]),
        "all": compose_out(p11, lambda e: ident(e, "w"), lambda e: ident(e, "y"), subs["all"]),
    }
    identified = {k: is_isomorphism(m) for k, m in corners.items()}
    iso = is_isomorphism(corner)
    inj = all(map_injective(corner, n) for n in corner.source.degrees)
    coker = {n: cokernel_invariants(corner, n) for n in corner.target.degrees}
    flat = is_cofibration(corner) and bool(is_flat(corner.target))
    return CellsFlatnessReport(c, c1, False, "", identified, iso, inj, coker, flat)


# relative replacement over direct shapes ---------------------------------------


@dataclass
class RelativeBase:
    diagram: Diagram
    augmentation: Transformation


def relative_base(F: Diagram, away_from: Sequence[Obj]) -> RelativeBase:
    """iota_! iota^* F, with values at the subcategory equal to those of F on the nose."""
    D = F.shape
    sub_objs = [c for c in D.objects if c in set(away_from)]
    if not sub_objs:
        z = zero_diagram(D)
        return RelativeBase(z, Transformation(z, F, {}))
    for a in D.objects:
        for b in sub_objs:
            if a not in sub_objs and not D.hom(a, b).is_zero_complex():
                raise ReedyError(f"{sub_objs} is not an initial part: hom({a}, {b}) is nonzero")
    sub = D.full_subcategory(sub_objs)
    ext = left_kan(inclusion_functor(sub, D), restriction_along_inclusion(F, sub))
    pres = ext.presentations
    inside = set(sub_objs)
    vals = {e: F(e) if e in inside else pres[e].complex for e in D.objects}

    def act(a, b):
        if a in inside and b in inside:
            return F.act(a, b)
        if a in inside:
            if a not in pres[b].keys:
                return None
            return pres[b].inject(a).with_source(tensor(D.hom(a, b), F(a)))
        if b in inside:
            return None
        return ext.result.act(a, b)

    base = Diagram(D, vals, act, name="relative base")
    comps = {}
    for e in D.objects:
        if e in inside:
            comps[e] = ChainMap.identity(F(e))
        else:
            p = pres[e]
            comps[e] = p.map_out(F(e), lambda d, e=e, p=p: F.act(d, e).with_source(p.part(d)))
    return RelativeBase(base, Transformation(base, F, comps))


@dataclass
class Replacement:
    diagram: Diagram
    augmentation: Transformation
    presentation: CellPresentation
    attached: list
    skipped: list
    away_from: list

    def check(self, R: ReedyStructure | None = None) -> dict:
        """The invariants of a replacement, as named booleans."""
        g, lam = self.diagram, self.augmentation
        F = lam.target
        out = {
            "pointwise_we": is_pointwise_we(lam),
            "replay": self.presentation.verify(),
            "cells_cofibrations": all(is_cofibration(c.k) for c in self.presentation.cells),
            "agrees_on_subcategory": all(g(d).identical(F(d)) and lam[d] == ChainMap.identity(F(d))
                                         for d in self.away_from),
        }
        R = R or direct_reedy(g.shape)
        out["latching_cofibrations"] = all(
            is_cofibration(latching(R, g, c).map) for c in g.shape.objects if c not in self.away_from)
        return out


def _check_direct(D: DgCategory) -> None:
    if D.degree is None or not D.is_direct():
        raise ReedyError(f"{D.name} is not a direct shape: {D.check_direct()[:1]}")
    lf = is_locally_flat(D)
    if not lf:
        raise ReedyError(f"{D.name} is not locally flat at {sorted(lf.failures, key=str)[0]}")


FactorFn = Callable[[ChainMap, Obj], tuple[ChainMap, ChainMap]]


def _attach_by_degree(base: Diagram, lam: Transformation, objects: Sequence[Obj], factor: FactorFn,
                      skip_isomorphisms: bool = True) -> tuple[Diagram, Transformation, CellPresentation, list, list]:
    """Attach cells shape_c (x) g_c in degree order, where lam_c = h_c g_c.

    Returns the new diagram, the new map to the target, the cell
    presentation over ``base``, and the attached and skipped objects.
    """
    D = base.shape
    F = lam.target
    order = sorted(objects, key=lambda c: (D.degree[c], D.index(c)))
    pres = CellPresentation(base)
    cur = base
    attached, skipped = [], []
    for c in order:
        m = lam[c]
        if skip_isomorphisms and is_isomorphism(m):
            skipped.append(c)
            continue
        g, h = factor(m, c)
        a = pres.extend(Cell(c, g, ChainMap.identity(cur(c))))
        new = a.result
        comps = {}
        for e in D.objects:
            hom = D.hom(c, e)
            cell = tensor(hom, g.target)
            right = F.act(c, e) @ tensor_map(ChainMap.identity(hom), h, source=cell, target=F.act_source(c, e))
            comps[e] = copair([lam[e], right], source=new(e))
        lam = Transformation(new, F, comps)
        cur = new
        attached.append(c)
    return cur, lam, pres, attached, skipped


def _factor_plain(m: ChainMap, c) -> tuple[ChainMap, ChainMap]:
    return factorize(m)


def _factor_seeded(F: Diagram) -> FactorFn:
    """Factor cur(c) + resolution(F c) -> F c, as in the two-object example."""

    def factor(m: ChainMap, c) -> tuple[ChainMap, ChainMap]:
        eps = free_resolution(F(c))
        s = direct_sum([m.source, eps.source])
        g2, h = factorize(copair([m, eps], source=s.complex))
        return g2 @ s.inclusions[0], h

    return factor


def replace_direct(F: Diagram, away_from: Sequence[Obj] = (), seed_with_resolution: bool = False) -> Replacement:
    """Projective cofibrant replacement of F over a locally flat direct shape, relative to away_from."""
    D = F.shape
    _check_direct(D)
    inside = [c for c in D.objects if c in set(away_from)]
    bad = [d for d in inside if not F(d).is_cofibrant()]
    if bad:
        raise ReedyError(f"values at {bad} are not cofibrant")
    rb = relative_base(F, inside)
    outside = [c for c in D.objects if c not in set(inside)]
    bad = [c for c in outside if not rb.diagram(c).is_cofibrant()]
    if bad:
        raise ReedyError(f"the relative base is not cofibrant at {bad}")
    factor = _factor_seeded(F) if seed_with_resolution else _factor_plain
    g, lam, pres, att, skip = _attach_by_degree(rb.diagram, rb.augmentation, outside, factor)
    return Replacement(g, lam, pres, att, skip, inside)


@dataclass
class DiagramFactorization:
    cofibration: Transformation
    equivalence: Transformation
    presentation: CellPresentation

    @property
    def middle(self) -> Diagram:
        return self.cofibration.target


def factorize_diagram(f: Transformation) -> DiagramFactorization:
    """f = h g with g a projective cofibration (by cells) and h a pointwise weak equivalence."""
    X = f.source
    D = X.shape
    _check_direct(D)
    bad = [c for c in D.objects if not X(c).is_cofibrant()]
    if bad:
        raise ReedyError(f"source is not pointwise cofibrant at {bad}")
    g, h, pres, _, _ = _attach_by_degree(X, f, D.objects, _factor_plain, skip_isomorphisms=False)
    _, inc = pres.replay()
    inc = Transformation(X, g, inc.comps)
    return DiagramFactorization(inc, h, pres)


def arrow_diagram(f: Transformation) -> Diagram:
    """The diagram on D (x) [1] with f between the two layers; degrees 2|d| + i."""
    D = f.source.shape
    A = linearize(arrow_category(), {0: 0, 1: 1})
    P = product_category(D, A)
    P.degree = {(d, i): 2 * D.degree[d] + i for d, i in P.objects}
    X, Y = f.source, f.target
    layer = {0: X, 1: Y}
    vals = {(d, i): layer[i](d) for d, i in P.objects}

    def act(s, t):
        (a, i), (b, j) = s, t
        src = tensor(P.hom(s, t), vals[s])
        if P.hom(s, t).is_zero_complex() or src.is_zero_complex():
            return None
        if i == j:
            return layer[i].act(a, b).with_source(src)
        return (f[b] @ X.act(a, b)).with_source(src)

    return Diagram(P, vals, act, name="arrow")


def factorize_via_arrow(f: Transformation) -> Replacement:
    """The factorization of f computed as a relative replacement over D (x) [1]."""
    F = arrow_diagram(f)
    return replace_direct(F, away_from=[(d, 0) for d in f.source.shape.objects])


# Reedy cofibrancy away from a subcategory ------------------------------------------


@dataclass
class AwayReport:
    ok: bool
    failures: dict
    presentation: CellPresentation | None
    augmentation: Transformation | None = None


def reedy_cofibrant_away(R: ReedyStructure, x: Diagram, away_from: Sequence[Obj]) -> AwayReport:
    """Latching maps outside away_from are cofibrations; over direct shapes also emits cells."""
    inside = set(away_from)
    failures = {}
    for c in R.objects_by_degree():
        if c in inside:
            continue
        ld = latching(R, x, c)
        if not ld.complex.is_cofibrant():
            failures[c] = "latching object is not cofibrant"
        elif not x(c).is_cofibrant():
            failures[c] = "value is not cofibrant"
        elif not is_cofibration(ld.map):
            failures[c] = "latching map is not a cofibration"
    if failures or not R.is_direct():
        return AwayReport(not failures, failures, None)
    rb = relative_base(x, [c for c in x.shape.objects if c in inside])
    outside = [c for c in x.shape.objects if c not in inside]

    def factor(m, c):
        return m, ChainMap.identity(m.target)

    g, lam, pres, _, _ = _attach_by_degree(rb.diagram, rb.augmentation, outside, factor)
    if not is_pointwise_iso(lam):
        failures["augmentation"] = "cells do not rebuild the diagram"
    return AwayReport(not failures, failures, pres, lam)
