"""Bounded chain complexes of finitely presented abelian groups.

A complex stores, per degree n, a number of generators, a relation matrix
(columns are relators) and the differential d_n: C_n -> C_{n-1} written on
generators.  Maps are matrices on generators; two maps are equal when they
agree modulo the relations of the target.

Conventions used throughout the package:

* cofibrations are degreewise injections with free cokernel, so the
  cofibrant complexes are the degreewise free ones;
* weak equivalences are quasi-isomorphisms, detected by an acyclic cone;
* d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from .zmat import (
    IntMatrix,
    IntSolver,
    block_diag,
    hstack,
    image_basis,
    invariant_factors,
    kernel,
    EchelonLattice,
    kron,
    lattice_basis,
    smith_normal_form,
    vstack,
)


class MalformedComplex(ValueError):
    pass


class MalformedMap(ValueError):
    pass


# groups ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class GroupInvariants:
    """Isomorphism type of a finitely generated abelian group."""

    rank: int
    torsion: tuple[int, ...] = ()

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def is_free(self) -> bool:
        return not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"


def presentation_invariants(ngens: int, relations: IntMatrix | None) -> GroupInvariants:
    if relations is None or relations.ncols == 0:
        return GroupInvariants(ngens)
    if relations.ncols > relations.nrows:
        relations = lattice_basis(relations)
    d = invariant_factors(relations)
    nonzero = [x for x in d if x]
    return GroupInvariants(ngens - len(nonzero), tuple(x for x in nonzero if x > 1))


@dataclass(frozen=True)
class FpAbGroup:
    """The group Z^ngens / (column span of relations)."""

    ngens: int
    relations: IntMatrix

    @classmethod
    def free(cls, n: int) -> FpAbGroup:
        return cls(n, IntMatrix.zeros(n, 0))

    @classmethod
    def cyclic(cls, order: int) -> FpAbGroup:
        return cls(1, IntMatrix([[order]]))

    def invariants(self) -> GroupInvariants:
        return presentation_invariants(self.ngens, self.relations)

    def is_isomorphic(self, other: FpAbGroup) -> bool:
        return self.invariants() == other.invariants()


# complexes ------------------------------------------------------------


def _mat(m, nrows: int, ncols: int) -> IntMatrix:
    if isinstance(m, IntMatrix):
        mat = m
    else:
        mat = IntMatrix(m, ncols)
    if mat.shape != (nrows, ncols):
        raise MalformedComplex(f"expected a {nrows}x{ncols} matrix, got {mat.shape}")
    return mat


def _span_contains(lattice: EchelonLattice | None, nrows: int, m: IntMatrix) -> int | None:
    """Index of the first column of m outside the lattice, or None."""
    for j, c in enumerate(m.columns()):
        if not any(c):
            continue
        if lattice is None or not lattice.contains(c):
            return j
    return None


class ChainComplex:
    """Bounded complex of finitely presented abelian groups.

    ``gens`` maps degrees to generator counts; ``diffs[n]`` is the matrix of
    d_n: C_n -> C_{n-1}; ``rels[n]`` has the relators of C_n as columns.
    """

    def __init__(
        self,
        gens: Mapping[int, int],
        diffs: Mapping[int, object] | None = None,
        rels: Mapping[int, object] | None = None,
        check: bool = True,
    ):
        self._gens = {int(n): int(g) for n, g in gens.items() if g}
        if any(g < 0 for g in self._gens.values()):
            raise MalformedComplex("negative generator count")
        self._d: dict[int, IntMatrix] = {}
        for n, m in (diffs or {}).items():
            n = int(n)
            mat = _mat(m, self.ngens(n - 1), self.ngens(n))
            if mat.nrows and mat.ncols and not mat.is_zero():
                self._d[n] = mat
        self._r: dict[int, IntMatrix] = {}
        for n, m in (rels or {}).items():
            n = int(n)
            g = self.ngens(n)
            mat = m if isinstance(m, IntMatrix) else IntMatrix(m, len(m[0]) if m else 0)
            if mat.nrows != g:
                raise MalformedComplex(
                    f"relations in degree {n} have {mat.nrows} rows, expected {g}"
                )
            mat = mat.without_zero_columns()
            if mat.ncols:
                self._r[n] = mat
        self._solvers: dict[int, IntSolver | None] = {}
        self._lattices: dict[int, EchelonLattice | None] = {}
        if check:
            self.validate()

    # accessors --------------------------------------------------------

    def ngens(self, n: int) -> int:
        return self._gens.get(n, 0)

    def d(self, n: int) -> IntMatrix:
        m = self._d.get(n)
        return m if m is not None else IntMatrix.zeros(self.ngens(n - 1), self.ngens(n))

    def rel(self, n: int) -> IntMatrix:
        m = self._r.get(n)
        return m if m is not None else IntMatrix.zeros(self.ngens(n), 0)

    def has_relations(self, n: int | None = None) -> bool:
        if n is None:
            return bool(self._r)
        return n in self._r

    @property
    def degrees(self) -> list[int]:
        return sorted(self._gens)

    @property
    def lo(self) -> int:
        return min(self._gens) if self._gens else 0

    @property
    def hi(self) -> int:
        return max(self._gens) if self._gens else -1

    def is_zero_complex(self) -> bool:
        return not self._gens

    def group(self, n: int) -> FpAbGroup:
        return FpAbGroup(self.ngens(n), self.rel(n))

    def group_invariants(self, n: int) -> GroupInvariants:
        return presentation_invariants(self.ngens(n), self._r.get(n))

    def solver(self, n: int) -> IntSolver | None:
        """Solver for the relation lattice in degree n (None if it is zero)."""
        if n not in self._solvers:
            r = self._r.get(n)
            self._solvers[n] = IntSolver(r) if r is not None else None
        return self._solvers[n]

    def in_relations(self, n: int, m: IntMatrix) -> bool:
        """All columns of m (vectors in C_n generators) vanish in the group."""
        return _span_contains(self.lattice(n), self.ngens(n), m) is None

    def lattice(self, n: int) -> EchelonLattice | None:
        """Echelon basis of the relation lattice in degree n (None if it is zero)."""
        if n not in self._lattices:
            r = self._r.get(n)
            self._lattices[n] = EchelonLattice(r) if r is not None else None
        return self._lattices[n]

    def validate(self) -> None:
        for n in sorted(self._d):
            if n - 2 in self._gens and n - 1 in self._d:
                dd = self.d(n - 1) @ self.d(n)
                if not self.in_relations(n - 2, dd):
                    raise MalformedComplex(f"d_{n - 1} d_{n} is nonzero (degree {n})")
        for n, r in self._r.items():
            if n in self._d and not self.in_relations(n - 1, self.d(n) @ r):
                raise MalformedComplex(f"d_{n} does not preserve the relations of degree {n}")

    # comparisons ------------------------------------------------------

    def identical(self, other: ChainComplex) -> bool:
        """On-the-nose equality of presentations."""
        if self is other:
            return True
        return (
            self._gens == other._gens
            and self._d == other._d
            and self._r == other._r
        )

    def __repr__(self) -> str:
        parts = []
        for n in self.degrees:
            s = str(self.group_invariants(n))
            parts.append(f"{n}:{s}")
        return f"ChainComplex({', '.join(parts)})"

    # homology ---------------------------------------------------------

    def homology_group(self, n: int) -> GroupInvariants:
        g = self.ngens(n)
        if g == 0:
            return GroupInvariants(0)
        d_out = self.d(n)
        d_in = self.d(n + 1)
        if n not in self._r and n - 1 not in self._r:
            r_out = sum(1 for x in invariant_factors(d_out) if x)
            f_in = [x for x in invariant_factors(d_in) if x]
            return GroupInvariants(g - r_out - len(f_in), tuple(x for x in f_in if x > 1))
        m = hstack([d_out, self.rel(n - 1)])
        cyc = EchelonLattice(m, track=True).kernel_matrix(m.ncols)
        z = EchelonLattice(cyc.submatrix(range(g), range(cyc.ncols)))
        bnd = hstack([d_in, self.rel(n)])
        cols = []
        for j in range(bnd.ncols):
            x = z.coordinates([r[j] for r in bnd.rows])
            if x is None:
                raise MalformedComplex(f"boundaries are not cycles in degree {n}")
            cols.append(x)
        return presentation_invariants(z.rank, IntMatrix.from_columns(cols, z.rank))

    @cached_property
    def homology(self) -> Homology:
        return Homology({n: self.homology_group(n) for n in self.degrees})

    def is_acyclic(self) -> bool:
        return all(h.is_zero() for h in self.homology.groups.values())

    # structure --------------------------------------------------------

    def is_cofibrant(self) -> bool:
        return all(self.group_invariants(n).is_free() for n in self._r)

    def torsion_primes(self) -> list[int]:
        primes = set()
        for n in self._r:
            for t in self.group_invariants(n).torsion:
                primes.update(_prime_factors(t))
        return sorted(primes)


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return sorted(set(out))


@dataclass(frozen=True)
class Homology:
    groups: dict[int, GroupInvariants]

    def __getitem__(self, n: int) -> GroupInvariants:
        return self.groups.get(n, GroupInvariants(0))

    def nonzero(self) -> dict[int, GroupInvariants]:
        return {n: h for n, h in self.groups.items() if not h.is_zero()}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Homology):
            return NotImplemented
        return self.nonzero() == other.nonzero()

    def __str__(self) -> str:
        if not self.groups:
            return "0"
        return ", ".join(f"H{n} = {h}" for n, h in sorted(self.groups.items()))


def invariants_equal(a: ChainComplex, b: ChainComplex) -> bool:
    """Isomorphism-insensitive comparison: degreewise groups and homology."""
    degs = set(a.degrees) | set(b.degrees)
    return all(a.group_invariants(n) == b.group_invariants(n) for n in degs) and (
        a.homology == b.homology
    )


def homology(c: ChainComplex) -> Homology:
    return c.homology


# standard complexes ---------------------------------------------------


def zero_complex() -> ChainComplex:
    return ChainComplex({})


def unit_complex() -> ChainComplex:
    """The tensor unit: Z in degree 0."""
    return ChainComplex({0: 1})


def free_complex(gens: Mapping[int, int], diffs: Mapping[int, object] | None = None) -> ChainComplex:
    return ChainComplex(gens, diffs)


def cyclic(order: int, degree: int = 0) -> ChainComplex:
    """Z/order concentrated in one degree (order 0 gives Z)."""
    return ChainComplex({degree: 1}, rels={degree: [[order]]} if order else None)


def shift(c: ChainComplex, k: int) -> ChainComplex:
    """C[k]_n = C_{n-k} with differential (-1)^k d."""
    sign = -1 if k % 2 else 1
    return ChainComplex(
        {n + k: g for n, g in c._gens.items()},
        {n + k: m.scale(sign) for n, m in c._d.items()},
        {n + k: m for n, m in c._r.items()},
        check=False,
    )


# maps -----------------------------------------------------------------


class ChainMap:
    """Degree-zero map of complexes, given by matrices on generators."""

    def __init__(
        self,
        source: ChainComplex,
        target: ChainComplex,
        comps: Mapping[int, object] | None = None,
        check: bool = True,
    ):
        self.source = source
        self.target = target
        self._c: dict[int, IntMatrix] = {}
        for n, m in (comps or {}).items():
            n = int(n)
            rows, cols = target.ngens(n), source.ngens(n)
            mat = m if isinstance(m, IntMatrix) else IntMatrix(m, cols)
            if mat.shape != (rows, cols):
                raise MalformedMap(f"component {n} has shape {mat.shape}, expected {(rows, cols)}")
            if rows and cols and not mat.is_zero():
                self._c[n] = mat
        if check:
            self.validate()

    def __getitem__(self, n: int) -> IntMatrix:
        m = self._c.get(n)
        return m if m is not None else IntMatrix.zeros(self.target.ngens(n), self.source.ngens(n))

    @property
    def degrees(self) -> list[int]:
        return sorted(set(self.source.degrees) | set(self.target.degrees))

    def validate(self) -> None:
        a, b = self.source, self.target
        for n in a._r:
            if n in self._c and not b.in_relations(n, self[n] @ a.rel(n)):
                raise MalformedMap(f"map does not preserve relations in degree {n}")
        for n in a.degrees:
            if b.ngens(n - 1) == 0:
                continue
            diff = b.d(n) @ self[n] - self[n - 1] @ a.d(n)
            if not b.in_relations(n - 1, diff):
                raise MalformedMap(f"map does not commute with differentials in degree {n}")

    @classmethod
    def identity(cls, c: ChainComplex) -> ChainMap:
        return cls(c, c, {n: IntMatrix.identity(g) for n, g in c._gens.items()}, check=False)

    @classmethod
    def zero(cls, a: ChainComplex, b: ChainComplex) -> ChainMap:
        return cls(a, b, {}, check=False)

    def __matmul__(self, other: ChainMap) -> ChainMap:
        """Composition: (self @ other)(x) = self(other(x))."""
        if other.target is not self.source and not other.target.identical(self.source):
            raise MalformedMap("composing maps with mismatched complexes")
        comps = {}
        for n in other.source.degrees:
            if n in self._c and n in other._c:
                comps[n] = self._c[n] @ other._c[n]
        return ChainMap(other.source, self.target, comps, check=False)

    def _check_parallel(self, other: ChainMap) -> None:
        if not (self.source.identical(other.source) and self.target.identical(other.target)):
            raise MalformedMap("maps are not parallel")

    def __add__(self, other: ChainMap) -> ChainMap:
        self._check_parallel(other)
        return ChainMap(
            self.source, self.target,
            {n: self[n] + other[n] for n in set(self._c) | set(other._c)}, check=False,
        )

    def __sub__(self, other: ChainMap) -> ChainMap:
        self._check_parallel(other)
        return ChainMap(
            self.source, self.target,
            {n: self[n] - other[n] for n in set(self._c) | set(other._c)}, check=False,
        )

    def __neg__(self) -> ChainMap:
        return ChainMap(self.source, self.target, {n: -m for n, m in self._c.items()}, check=False)

    def scale(self, k: int) -> ChainMap:
        return ChainMap(self.source, self.target, {n: m.scale(k) for n, m in self._c.items()}, check=False)

    def __eq__(self, other: object) -> bool:
        """Exact equality of the defining matrices."""
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (
            self.source.identical(other.source)
            and self.target.identical(other.target)
            and self._c == other._c
        )

    __hash__ = None

    def equals(self, other: ChainMap) -> bool:
        """Equality as maps of groups (modulo relations of the target)."""
        self._check_parallel(other)
        for n in set(self._c) | set(other._c):
            if not self.target.in_relations(n, self[n] - other[n]):
                return False
        return True

    def is_zero(self) -> bool:
        return all(self.target.in_relations(n, m) for n, m in self._c.items())

    def with_source(self, source: ChainComplex) -> ChainMap:
        return ChainMap(source, self.target, self._c, check=False)

    def with_target(self, target: ChainComplex) -> ChainMap:
        return ChainMap(self.source, target, self._c, check=False)

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"


# group-level predicates -----------------------------------------------


def _group_surjective(f: IntMatrix, rb: IntMatrix) -> bool:
    g = f.nrows
    if g == 0:
        return True
    return EchelonLattice(hstack([f, rb])).is_everything()


def _group_kernel_lattice(f: IntMatrix, rb: IntMatrix) -> IntMatrix:
    """Generators of {x : f x in span(rb)}."""
    a = f.ncols
    m = hstack([f, rb])
    k = EchelonLattice(m, track=True).kernel_matrix(m.ncols)
    return k.submatrix(range(a), range(k.ncols))


def map_injective(f: ChainMap, n: int) -> bool:
    a = f.source
    if a.ngens(n) == 0:
        return True
    ker = _group_kernel_lattice(f[n], f.target.rel(n))
    return a.in_relations(n, ker)


def map_surjective(f: ChainMap, n: int) -> bool:
    return _group_surjective(f[n], f.target.rel(n))


def cokernel_invariants(f: ChainMap, n: int) -> GroupInvariants:
    return presentation_invariants(f.target.ngens(n), hstack([f.target.rel(n), f[n]]))


def is_isomorphism(f: ChainMap) -> bool:
    return all(map_injective(f, n) and map_surjective(f, n) for n in f.degrees)


def is_degreewise_surjective(f: ChainMap) -> bool:
    return all(map_surjective(f, n) for n in f.target.degrees)


def is_cofibration(f: ChainMap) -> bool:
    """Degreewise injective with free cokernel (hence split)."""
    for n in f.target.degrees:
        if not map_injective(f, n):
            return False
        if not cokernel_invariants(f, n).is_free():
            return False
    return all(map_injective(f, n) for n in f.source.degrees)


def is_cofibrant(c: ChainComplex) -> bool:
    return c.is_cofibrant()


def inverse(f: ChainMap) -> ChainMap:
    """Inverse of an isomorphism, as matrices on generators."""
    if not is_isomorphism(f):
        raise MalformedMap("map is not an isomorphism")
    comps = {}
    for n in f.target.degrees:
        a = f.source.ngens(n)
        if a == 0:
            continue
        solver = IntSolver(hstack([f[n], f.target.rel(n)]))
        cols = []
        for j in range(f.target.ngens(n)):
            e = [0] * f.target.ngens(n)
            e[j] = 1
            x = solver.solve(e)
            cols.append(x[:a])
        comps[n] = IntMatrix.from_columns(cols, a)
    return ChainMap(f.target, f.source, comps, check=False)


# cones and weak equivalences -----------------------------------------


def mapping_cone(f: ChainMap) -> ChainComplex:
    """cone_n = A_{n-1} + B_n with d(a, b) = (-da, f a + db)."""
    a, b = f.source, f.target
    degs = sorted(set(n + 1 for n in a.degrees) | set(b.degrees))
    gens, diffs, rels = {}, {}, {}
    for n in degs:
        gens[n] = a.ngens(n - 1) + b.ngens(n)
        rels[n] = block_diag([a.rel(n - 1), b.rel(n)])
    for n in degs:
        if gens.get(n - 1, 0) == 0:
            continue
        top = hstack([-a.d(n - 1), IntMatrix.zeros(a.ngens(n - 2), b.ngens(n))])
        bot = hstack([f[n - 1], b.d(n)])
        diffs[n] = vstack([top, bot])
    return ChainComplex(gens, diffs, rels, check=False)


def is_weak_equivalence(f: ChainMap) -> bool:
    return mapping_cone(f).is_acyclic()


# sums, kernels, cokernels, pushouts ------------------------------------


@dataclass
class DirectSum:
    complex: ChainComplex
    inclusions: list[ChainMap]
    projections: list[ChainMap]


def direct_sum(cs: Sequence[ChainComplex]) -> DirectSum:
    degs = sorted(set().union(*(c.degrees for c in cs))) if cs else []
    gens = {n: sum(c.ngens(n) for c in cs) for n in degs}
    diffs = {n: block_diag([c.d(n) for c in cs]) for n in degs}
    rels = {n: block_diag([c.rel(n) for c in cs]) for n in degs}
    s = ChainComplex(gens, diffs, rels, check=False)
    incs, projs = [], []
    offsets = {n: 0 for n in degs}
    for c in cs:
        inc, proj = {}, {}
        for n in c.degrees:
            g, total, off = c.ngens(n), gens[n], offsets[n]
            inc[n] = IntMatrix([[1 if i == j + off else 0 for j in range(g)] for i in range(total)], g)
            proj[n] = IntMatrix([[1 if j == i + off else 0 for j in range(total)] for i in range(g)], total)
            offsets[n] += g
        incs.append(ChainMap(c, s, inc, check=False))
        projs.append(ChainMap(s, c, proj, check=False))
    return DirectSum(s, incs, projs)


def copair(maps: Sequence[ChainMap], source: ChainComplex | None = None) -> ChainMap:
    """The map out of a direct sum determined by its components."""
    target = maps[0].target
    if source is None:
        source = direct_sum([m.source for m in maps]).complex
    comps = {}
    for n in source.degrees:
        comps[n] = hstack([m[n] for m in maps], target.ngens(n))
    return ChainMap(source, target, comps, check=False)


def cokernel(f: ChainMap) -> tuple[ChainComplex, ChainMap]:
    """Cokernel presented on the target generators, with the projection."""
    b = f.target
    rels = {n: lattice_basis(hstack([b.rel(n), f[n]])) for n in b.degrees}
    c = ChainComplex(b._gens, b._d, rels, check=False)
    return c, ChainMap(b, c, {n: IntMatrix.identity(g) for n, g in b._gens.items()}, check=False)


@dataclass
class Pushout:
    complex: ChainComplex
    left: ChainMap   # B -> P, for the span B <- A -> C
    right: ChainMap  # C -> P


def pushout(f: ChainMap, g: ChainMap) -> Pushout:
    """Pushout of B <-f- A -g-> C as the cokernel of (f, -g): A -> B + C."""
    if not f.source.identical(g.source):
        raise MalformedMap("pushout of maps with different sources")
    s = direct_sum([f.target, g.target])
    fg = copair_into(s, [f, -g])
    p, q = cokernel(fg)
    return Pushout(p, q @ s.inclusions[0], q @ s.inclusions[1])


def copair_into(s: DirectSum, maps: Sequence[ChainMap]) -> ChainMap:
    """The map into a direct sum with the given components."""
    src = maps[0].source
    comps = {}
    for n in src.degrees:
        comps[n] = vstack([m[n] for m in maps], src.ngens(n))
    return ChainMap(src, s.complex, comps, check=False)


# minimal presentations ------------------------------------------------


@dataclass
class Simplified:
    complex: ChainComplex
    to_simple: ChainMap
    from_simple: ChainMap


def simplify(c: ChainComplex) -> Simplified:
    """Minimal presentation: free generators plus one per torsion summand."""
    if not c.has_relations():
        idm = ChainMap.identity(c)
        return Simplified(c, idm, idm)
    P, Q, gens, rels = {}, {}, {}, {}
    for n in c.degrees:
        g = c.ngens(n)
        r = c.rel(n)
        if r.ncols == 0:
            P[n] = IntMatrix.identity(g)
            Q[n] = IntMatrix.identity(g)
            gens[n] = g
            continue
        snf = smith_normal_form(r)
        keep = [i for i in range(g) if not (i < len(snf.d) and snf.d[i] == 1)]
        P[n] = snf.U.submatrix(keep, range(g))
        Q[n] = snf.U_inv.submatrix(range(g), keep)
        gens[n] = len(keep)
        tors = [(k, snf.d[i]) for k, i in enumerate(keep) if i < len(snf.d) and snf.d[i] > 1]
        if tors:
            rels[n] = IntMatrix.from_columns(
                [[t if row == k else 0 for row in range(len(keep))] for k, t in tors], len(keep)
            )
    diffs = {}
    for n in c.degrees:
        if n - 1 in P and gens.get(n) and gens.get(n - 1):
            diffs[n] = P[n - 1] @ c.d(n) @ Q[n]
    s = ChainComplex(gens, diffs, rels, check=False)
    return Simplified(
        s,
        ChainMap(c, s, P, check=False),
        ChainMap(s, c, Q, check=False),
    )


# resolutions, lifts, factorizations ------------------------------------


def _independent_relations(c: ChainComplex) -> dict[int, IntMatrix]:
    return {n: image_basis(c.rel(n)) for n in c.degrees if c.has_relations(n)}


def free_resolution(c: ChainComplex) -> ChainMap:
    """A trivial fibration F -> C with F degreewise free.

    F_m = Z^{g_m} + Z^{r_{m-1}} where r counts independent relators, with
    D(x, y) = (d x + R y, -k x - h y), d R = R h and d d = R k.
    """
    if not c.has_relations():
        return ChainMap.identity(c)
    R = _independent_relations(c)

    def rel(n):
        return R.get(n, IntMatrix.zeros(c.ngens(n), 0))

    def solve_into(n, m):
        # matrix X with rel(n) X = m
        r = rel(n)
        if m.ncols == 0 or m.is_zero():
            return IntMatrix.zeros(r.ncols, m.ncols)
        if r.ncols == 0:
            raise MalformedComplex(f"inconsistent relations in degree {n}")
        x = IntSolver(r).solve_matrix(m)
        if x is None:
            raise MalformedComplex(f"differential does not preserve relations in degree {n}")
        return x

    h = {n: solve_into(n - 1, c.d(n) @ rel(n)) for n in c.degrees}  # r_n -> r_{n-1}
    k = {n: solve_into(n - 2, c.d(n - 1) @ c.d(n)) for n in c.degrees}  # g_n -> r_{n-2}
    degs = sorted(set(c.degrees) | {n + 1 for n in R})
    gens = {m: c.ngens(m) + rel(m - 1).ncols for m in degs}
    diffs = {}
    for m in degs:
        g1, r1 = c.ngens(m - 1), rel(m - 2).ncols
        if g1 + r1 == 0:
            continue
        gm, rm = c.ngens(m), rel(m - 1).ncols
        hm = h.get(m - 1, IntMatrix.zeros(r1, rm)) if rm else IntMatrix.zeros(r1, 0)
        km = k.get(m, IntMatrix.zeros(r1, gm)) if gm else IntMatrix.zeros(r1, 0)
        top = hstack([c.d(m), rel(m - 1)], g1)
        bot = hstack([-km, -hm], r1)
        diffs[m] = vstack([top, bot], gm + rm)
    f = ChainComplex(gens, diffs, check=False)
    eps = {m: hstack([IntMatrix.identity(c.ngens(m)), IntMatrix.zeros(c.ngens(m), rel(m - 1).ncols)])
           for m in c.degrees}
    return ChainMap(f, c, eps, check=False)


def lift_against_trivial_fibration(
    i: ChainMap, p: ChainMap, top: ChainMap, bottom: ChainMap, check: bool = True
) -> ChainMap:
    """Diagonal l: B -> E with l i = top and p l = bottom.

    ``i: A -> B`` must be a cofibration, ``p: E -> Y`` a degreewise surjective
    quasi-isomorphism, and ``p top = bottom i``.
    """
    A, B = i.source, i.target
    E, Y = p.source, p.target
    if check:
        if not is_cofibration(i):
            raise ValueError("left map is not a cofibration")
        if not (is_degreewise_surjective(p) and is_weak_equivalence(p)):
            raise ValueError("right map is not a trivial fibration")
        if not (p @ top).equals(bottom @ i):
            raise ValueError("the square does not commute")
    lift: dict[int, IntMatrix] = {}
    for n in B.degrees:
        gb, ge = B.ngens(n), E.ngens(n)
        if ge == 0:
            continue
        # split B_n = i(A_n) + Q with Q free: pi projects onto Q, sec lifts Q
        m = hstack([B.rel(n), i[n]], gb)
        snf = smith_normal_form(m)
        rk = snf.rank
        pi = snf.U.submatrix(range(rk, gb), range(gb))
        sec = snf.U_inv.submatrix(range(gb), range(rk, gb))
        q = gb - rk
        # retraction coordinates r: x - sec pi x = R s + i a  ->  a
        msolver = IntSolver(m)
        resid = IntMatrix.identity(gb) - sec @ pi
        ra = A.ngens(n)
        rcols = []
        for col in resid.columns():
            x = msolver.solve(col)
            rcols.append(x[m.ncols - ra:])
        r = IntMatrix.from_columns(rcols, ra)
        # lift of the free complement: p e = bottom(q), d e = l(d q) mod relations
        if q:
            prev = lift.get(n - 1, IntMatrix.zeros(E.ngens(n - 1), B.ngens(n - 1)))
            target_d = prev @ B.d(n) @ sec
            target_p = bottom[n] @ sec
            gy, ge1 = Y.ngens(n), E.ngens(n - 1)
            ry, re1 = Y.rel(n).ncols, E.rel(n - 1).ncols
            system = vstack([
                hstack([p[n], Y.rel(n), IntMatrix.zeros(gy, re1)], gy),
                hstack([E.d(n), IntMatrix.zeros(ge1, ry), E.rel(n - 1)], ge1),
            ], ge + ry + re1)
            ssolver = IntSolver(system)
            lcols = []
            for j in range(q):
                rhs = target_p.column(j) + target_d.column(j)
                x = ssolver.solve(rhs)
                if x is None:
                    raise ValueError(f"no lift exists in degree {n}")
                lcols.append(x[:ge])
            lq = IntMatrix.from_columns(lcols, ge)
            lift[n] = top[n] @ r + lq @ pi
        else:
            lift[n] = top[n] @ r
    return ChainMap(B, E, lift, check=check)


def mapping_cylinder(f: ChainMap) -> tuple[ChainComplex, ChainMap, ChainMap, ChainMap]:
    """Cyl_n = A_n + A_{n-1} + B_n, d(a, s, b) = (da - s, -ds, db + f s).

    Returns the cylinder, the front inclusion A -> Cyl, the back inclusion
    B -> Cyl and the projection Cyl -> B.
    """
    a, b = f.source, f.target
    degs = sorted(set(a.degrees) | {n + 1 for n in a.degrees} | set(b.degrees))
    gens = {n: a.ngens(n) + a.ngens(n - 1) + b.ngens(n) for n in degs}
    rels = {n: block_diag([a.rel(n), a.rel(n - 1), b.rel(n)]) for n in degs}
    diffs = {}
    for n in degs:
        a0, a1, a2 = a.ngens(n - 1), a.ngens(n - 2), b.ngens(n - 1)
        if a0 + a1 + a2 == 0:
            continue
        an, sn, bn = a.ngens(n), a.ngens(n - 1), b.ngens(n)
        diffs[n] = vstack([
            hstack([a.d(n), -IntMatrix.identity(sn), IntMatrix.zeros(a0, bn)], a0),
            hstack([IntMatrix.zeros(a1, an), -a.d(n - 1), IntMatrix.zeros(a1, bn)], a1),
            hstack([IntMatrix.zeros(a2, an), f[n - 1], b.d(n)], a2),
        ], an + sn + bn)
    cyl = ChainComplex(gens, diffs, rels, check=False)
    front, back, proj = {}, {}, {}
    for n in degs:
        an, sn, bn = a.ngens(n), a.ngens(n - 1), b.ngens(n)
        front[n] = vstack([IntMatrix.identity(an), IntMatrix.zeros(sn + bn, an)], an)
        back[n] = vstack([IntMatrix.zeros(an + sn, bn), IntMatrix.identity(bn)], bn)
        proj[n] = hstack([f[n], IntMatrix.zeros(bn, sn), IntMatrix.identity(bn)], bn)
    return (
        cyl,
        ChainMap(a, cyl, front, check=False),
        ChainMap(b, cyl, back, check=False),
        ChainMap(cyl, b, proj, check=False),
    )


def factorize(f: ChainMap) -> tuple[ChainMap, ChainMap]:
    """(cofibration g, weak equivalence h) with h g = f.

    The source must be cofibrant.  f is lifted through the free resolution
    eps: F -> B of its target and g is the front inclusion of the mapping
    cylinder of the lift; h combines f with eps.
    """
    a, b = f.source, f.target
    if not a.is_cofibrant():
        raise ValueError("factorize requires a cofibrant source")
    simple = simplify(a)
    a0 = simple.complex
    f0 = f @ simple.from_simple
    eps = free_resolution(b)
    zero = zero_complex()
    lifted = lift_against_trivial_fibration(
        ChainMap.zero(zero, a0), eps, ChainMap.zero(zero, eps.source), f0, check=False
    )
    cyl, front, _, _ = mapping_cylinder(lifted)
    h_comps = {}
    for n in cyl.degrees:
        sn = a0.ngens(n - 1)
        h_comps[n] = hstack([f0[n], IntMatrix.zeros(b.ngens(n), sn), eps[n]], b.ngens(n))
    h = ChainMap(cyl, b, h_comps, check=False)
    g = front @ simple.to_simple
    return g, h


# tensor products -------------------------------------------------------


def _tensor_blocks(c: ChainComplex, d: ChainComplex, n: int) -> list[tuple[int, int, int]]:
    """(p, offset, size) for the blocks C_p (x) D_{n-p} of degree n."""
    out, off = [], 0
    for p in c.degrees:
        q = n - p
        size = c.ngens(p) * d.ngens(q)
        if size:
            out.append((p, off, size))
            off += size
    return out


def tensor(c: ChainComplex, d: ChainComplex) -> ChainComplex:
    if c.is_zero_complex() or d.is_zero_complex():
        return zero_complex()
    degs = sorted({p + q for p in c.degrees for q in d.degrees})
    blocks = {n: _tensor_blocks(c, d, n) for n in degs}
    gens = {n: sum(s for _, _, s in blocks[n]) for n in degs}
    rels, diffs = {}, {}
    for n in degs:
        parts = []
        for p, _, _ in blocks[n]:
            q = n - p
            parts.append(hstack([
                kron(c.rel(p), IntMatrix.identity(d.ngens(q))),
                kron(IntMatrix.identity(c.ngens(p)), d.rel(q)),
            ]))
        rels[n] = block_diag(parts)
        if gens.get(n - 1, 0) == 0:
            continue
        rows = [[0] * gens[n] for _ in range(gens[n - 1])]
        lower = {p: off for p, off, _ in blocks[n - 1]}
        for p, off, size in blocks[n]:
            q = n - p
            if p - 1 in lower and c.ngens(p - 1):
                m = kron(c.d(p), IntMatrix.identity(d.ngens(q)))
                _add_block(rows, m, lower[p - 1], off)
            if p in lower and d.ngens(q - 1):
                m = kron(IntMatrix.identity(c.ngens(p)), d.d(q))
                if p % 2:
                    m = -m
                _add_block(rows, m, lower[p], off)
        diffs[n] = IntMatrix(rows, gens[n])
    return ChainComplex(gens, diffs, rels, check=False)


def _add_block(rows: list[list[int]], m: IntMatrix, r0: int, c0: int) -> None:
    for i, r in enumerate(m.rows):
        row = rows[r0 + i]
        for j, v in enumerate(r):
            if v:
                row[c0 + j] += v


def tensor_map(f: ChainMap, g: ChainMap, source: ChainComplex | None = None,
               target: ChainComplex | None = None) -> ChainMap:
    a = source if source is not None else tensor(f.source, g.source)
    b = target if target is not None else tensor(f.target, g.target)
    comps = {}
    for n in a.degrees:
        if b.ngens(n) == 0:
            continue
        rows = [[0] * a.ngens(n) for _ in range(b.ngens(n))]
        tblocks = {p: off for p, off, _ in _tensor_blocks(f.target, g.target, n)}
        for p, off, _ in _tensor_blocks(f.source, g.source, n):
            if p in tblocks:
                _add_block(rows, kron(f[p], g[n - p]), tblocks[p], off)
        comps[n] = IntMatrix(rows, a.ngens(n))
    return ChainMap(a, b, comps, check=False)


# maps out of tensor products of direct sums -----------------------------


def summand_locator(parts: Sequence[ChainComplex]) -> dict[int, list[tuple[int, int]]]:
    """For each degree, the (summand, local index) of every generator of the sum."""
    out: dict[int, list[tuple[int, int]]] = {}
    degs = sorted(set().union(*(p.degrees for p in parts))) if parts else []
    for n in degs:
        out[n] = [(i, k) for i, p in enumerate(parts) for k in range(p.ngens(n))]
    return out


def bilinear_map(
    a_parts: Sequence[ChainComplex],
    b_parts: Sequence[ChainComplex],
    target: ChainComplex,
    block_map,
    source: ChainComplex | None = None,
) -> ChainMap:
    """Map (sum A_i) (x) (sum B_j) -> target assembled from blocks.

    ``block_map(i, j)`` returns a ChainMap tensor(A_i, B_j) -> target, or
    None for a zero block.  ``source`` may supply the already built
    tensor product of the two direct sums.
    """
    a = direct_sum(a_parts).complex
    b = direct_sum(b_parts).complex
    src = source if source is not None else tensor(a, b)
    la, lb = summand_locator(a_parts), summand_locator(b_parts)
    blocks: dict = {}
    trees: dict = {}

    def get(i, j):
        if (i, j) not in blocks:
            m = block_map(i, j)
            blocks[(i, j)] = m
            if m is not None:
                trees[(i, j)] = {}
        return blocks[(i, j)]

    def offsets(i, j, n):
        cache = trees[(i, j)]
        if n not in cache:
            cache[n] = {p: off for p, off, _ in _tensor_blocks(a_parts[i], b_parts[j], n)}
        return cache[n]

    comps = {}
    for n in src.degrees:
        gt = target.ngens(n)
        if gt == 0:
            continue
        cols = []
        for p in a.degrees:
            q = n - p
            if b.ngens(q) == 0:
                continue
            for i, ka in la[p]:
                for j, kb in lb[q]:
                    m = get(i, j)
                    if m is None:
                        cols.append((0,) * gt)
                        continue
                    off = offsets(i, j, n)[p]
                    pos = off + ka * b_parts[j].ngens(q) + kb
                    cols.append(m[n].column(pos))
        comps[n] = IntMatrix.from_columns(cols, gt)
    return ChainMap(src, target, comps, check=False)


# general rearrangements of iterated tensor products ---------------------


class TensorTree:
    """A bracketing of tensor factors, e.g. ((A, B), C).

    Leaves are ChainComplexes.  The tree knows its complex (built by nested
    binary tensor products) and enumerates basis elements per degree as
    (leaf degrees, leaf indices) in the layout order of that complex.
    """

    def __init__(self, spec):
        self.spec = spec
        if isinstance(spec, ChainComplex):
            self.leaves = [spec]
            self.left = self.right = None
            self.complex = spec
        else:
            l, r = spec
            self.left = l if isinstance(l, TensorTree) else TensorTree(l)
            self.right = r if isinstance(r, TensorTree) else TensorTree(r)
            self.leaves = self.left.leaves + self.right.leaves
            self.complex = tensor(self.left.complex, self.right.complex)
        self._basis: dict[int, list] = {}

    def basis(self, n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        if n in self._basis:
            return self._basis[n]
        if self.left is None:
            out = [((n,), (i,)) for i in range(self.complex.ngens(n))]
        else:
            out = []
            for p in self.left.complex.degrees:
                lb = self.left.basis(p)
                rb = self.right.basis(n - p)
                if not lb or not rb:
                    continue
                for ld, li in lb:
                    for rd, ri in rb:
                        out.append((ld + rd, li + ri))
        self._basis[n] = out
        return out

    def position(self, n: int) -> dict:
        return {b: k for k, b in enumerate(self.basis(n))}


def rearrange(src: TensorTree, dst: TensorTree, perm: Sequence[int]) -> ChainMap:
    """Symmetry isomorphism moving leaf perm[j] of src to leaf j of dst.

    Carries the Koszul sign of the permutation.
    """
    k = len(perm)
    for j in range(k):
        if not src.leaves[perm[j]].identical(dst.leaves[j]):
            raise MalformedMap("rearrangement does not match the tensor factors")
    comps = {}
    for n in src.complex.degrees:
        pos = dst.position(n)
        rows = [[0] * src.complex.ngens(n) for _ in range(dst.complex.ngens(n))]
        for col, (degs, idx) in enumerate(src.basis(n)):
            ndegs = tuple(degs[perm[j]] for j in range(k))
            nidx = tuple(idx[perm[j]] for j in range(k))
            sign = 1
            for a in range(k):
                for b in range(a + 1, k):
                    if perm[a] > perm[b] and degs[perm[a]] % 2 and degs[perm[b]] % 2:
                        sign = -sign
            rows[pos[(ndegs, nidx)]][col] = sign
        comps[n] = IntMatrix(rows, src.complex.ngens(n))
    return ChainMap(src.complex, dst.complex, comps, check=False)


def associator(a: ChainComplex, b: ChainComplex, c: ChainComplex) -> ChainMap:
    """(A (x) B) (x) C -> A (x) (B (x) C)."""
    return rearrange(TensorTree(((a, b), c)), TensorTree((a, (b, c))), [0, 1, 2])


def braiding(a: ChainComplex, b: ChainComplex) -> ChainMap:
    """A (x) B -> B (x) A, x (x) y -> (-1)^{|x||y|} y (x) x."""
    return rearrange(TensorTree((a, b)), TensorTree((b, a)), [1, 0])


# flatness ----------------------------------------------------------------


def resolution_of_cyclic(p: int) -> ChainMap:
    """The weak equivalence (Z --p--> Z) -> Z/p."""
    return free_resolution(cyclic(p))


@dataclass
class Falsifier:
    kind: str  # "weak_equivalence" or "cofibration"
    map: ChainMap
    image: ChainMap

    def describe(self) -> str:
        if self.kind == "weak_equivalence":
            return "tensoring destroys the weak equivalence " + _describe_map(self.map)
        return "tensoring destroys the cofibration " + _describe_map(self.map)


def _describe_map(f: ChainMap) -> str:
    return f"{f.source.homology} -> {f.target.homology}"


@dataclass
class FlatnessVerdict:
    flat: bool
    falsifier: Falsifier | None = None
    checked: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.flat


class FlatnessDisagreement(RuntimeError):
    pass


def is_flat(c: ChainComplex) -> FlatnessVerdict:
    """Flat iff degreewise free; the verdict is cross-checked empirically.

    For a non-free complex a falsifier is produced: the resolution of Z/p
    for a torsion prime p if tensoring breaks it, otherwise the cofibration
    0 -> Z, whose image 0 -> C is not a cofibration.  For a free complex a
    small battery of maps is checked and any failure raises.
    """
    free = c.is_cofibrant()
    zero = zero_complex()
    unit_cof = ChainMap.zero(zero, unit_complex())
    if not free:
        for p in c.torsion_primes():
            w = resolution_of_cyclic(p)
            image = tensor_map(ChainMap.identity(c), w)
            if not is_weak_equivalence(image):
                return FlatnessVerdict(False, Falsifier("weak_equivalence", w, image))
        image = tensor_map(ChainMap.identity(c), unit_cof)
        if is_cofibration(image):
            raise FlatnessDisagreement("non-free complex passed the cofibration probe")
        return FlatnessVerdict(False, Falsifier("cofibration", unit_cof, image))
    checked = []
    for p in (2, 3):
        w = resolution_of_cyclic(p)
        if not is_weak_equivalence(tensor_map(ChainMap.identity(c), w)):
            raise FlatnessDisagreement(f"free complex fails the Z/{p} probe")
        checked.append(f"Z/{p} resolution")
    if not is_cofibration(tensor_map(ChainMap.identity(c), unit_cof)):
        raise FlatnessDisagreement("free complex fails the cofibration probe")
    checked.append("0 -> Z")
    return FlatnessVerdict(True, None, checked)


# chain maps from linear constraints ------------------------------------


def hom_space(a: ChainComplex, b: ChainComplex) -> list[ChainMap]:
    """A Z-basis-generating set of the group of chain maps A -> B.

    Computed as the kernel of the linear constraints on the matrix entries,
    with slack variables for the relations of B.  Matrices that differ by
    relation-valued entries give the same map, so the family spans but need
    not be independent.
    """
    degs = sorted(set(a.degrees) & set(b.degrees))
    var = {}
    nvar = 0
    for n in degs:
        var[n] = nvar
        nvar += a.ngens(n) * b.ngens(n)
    slack_start = nvar
    eqs: list[dict[int, int]] = []

    def entry(n, i, j):
        return var[n] + i * a.ngens(n) + j

    # relations map into relations: f R_A = R_B s
    for n in degs:
        ra, rb = a.rel(n), b.rel(n)
        for col in range(ra.ncols):
            slacks = list(range(nvar, nvar + rb.ncols))
            nvar += rb.ncols
            for i in range(b.ngens(n)):
                eq = {}
                for j in range(a.ngens(n)):
                    if ra[j, col]:
                        eq[entry(n, i, j)] = eq.get(entry(n, i, j), 0) + ra[j, col]
                for t, s in enumerate(slacks):
                    if rb[i, t]:
                        eq[s] = -rb[i, t]
                eqs.append(eq)
    # d f - f d = R_B s in degree n-1
    for n in a.degrees:
        m = n - 1
        if b.ngens(m) == 0:
            continue
        rb = b.rel(m)
        for j in range(a.ngens(n)):
            slacks = list(range(nvar, nvar + rb.ncols))
            nvar += rb.ncols
            for i in range(b.ngens(m)):
                eq = {}
                if n in var:
                    for k in range(b.ngens(n)):
                        if b.d(n)[i, k]:
                            e = entry(n, k, j)
                            eq[e] = eq.get(e, 0) + b.d(n)[i, k]
                if m in var:
                    for k in range(a.ngens(m)):
                        if a.d(n)[k, j]:
                            e = entry(m, i, k)
                            eq[e] = eq.get(e, 0) - a.d(n)[k, j]
                for t, s in enumerate(slacks):
                    if rb[i, t]:
                        eq[s] = -rb[i, t]
                if eq:
                    eqs.append(eq)
    if slack_start == 0:
        return []
    mat = IntMatrix([[eq.get(v, 0) for v in range(nvar)] for eq in eqs], nvar) if eqs else \
        IntMatrix.zeros(0, nvar)
    ker = kernel(mat)
    maps = []
    for col in ker.columns():
        comps = {}
        for n in degs:
            g_a, g_b = a.ngens(n), b.ngens(n)
            vals = col[var[n]:var[n] + g_a * g_b]
            comps[n] = IntMatrix([vals[i * g_a:(i + 1) * g_a] for i in range(g_b)], g_a)
        f = ChainMap(a, b, comps, check=False)
        if not f.is_zero():
            maps.append(f)
    return maps
