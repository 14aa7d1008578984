"""Exact integer matrices and Smith normal form.

Everything in the package reduces to linear algebra over the integers.
Matrices act on column vectors; entries are Python ints, so intermediate
growth during elimination is never truncated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class IntMatrix:
    """Immutable dense integer matrix."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable[int]] = (), ncols: int | None = None):
        rows = tuple(tuple(map(int, r)) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        if ncols < 0:
            raise ValueError("negative dimension")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _trusted(cls, rows: tuple, ncols: int) -> IntMatrix:
        """Wrap a tuple of int tuples without copying or validation."""
        m = object.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        m._hash = None
        return m

    # construction -----------------------------------------------------

    @classmethod
    def zeros(cls, m: int, n: int) -> IntMatrix:
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int) -> IntMatrix:
        cols = [tuple(c) for c in columns]
        for c in cols:
            if len(c) != nrows:
                raise ValueError("column length mismatch")
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols))

    @classmethod
    def diagonal(cls, entries: Sequence[int], m: int | None = None, n: int | None = None) -> IntMatrix:
        m = len(entries) if m is None else m
        n = len(entries) if n is None else n
        rows = [[0] * n for _ in range(m)]
        for i, d in enumerate(entries):
            rows[i][i] = d
        return cls(rows, n)

    @classmethod
    def unit_vector(cls, n: int, i: int) -> IntMatrix:
        return cls([[1 if k == i else 0] for k in range(n)], 1)

    # basic protocol ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]!r}, ncols={self.ncols})"

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def is_zero(self) -> bool:
        return all(v == 0 for r in self.rows for v in r)

    # arithmetic -------------------------------------------------------

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} + {other.shape}")
        return IntMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols
        )

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} - {other.shape}")
        return IntMatrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix([[-a for a in r] for r in self.rows], self.ncols)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix([[k * a for a in r] for r in self.rows], self.ncols)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        n = other.ncols
        brows = other.rows
        out = []
        for r in self.rows:
            acc = [0] * n
            for k, a in enumerate(r):
                if a:
                    b = brows[k]
                    for j in range(n):
                        bj = b[j]
                        if bj:
                            acc[j] += a * bj
            out.append(tuple(acc))
        return IntMatrix._trusted(tuple(out), n)

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(r, v) if a) for r in self.rows)

    @property
    def T(self) -> IntMatrix:
        if not self.nrows:
            return IntMatrix._trusted(((),) * self.ncols, 0)
        return IntMatrix._trusted(tuple(zip(*self.rows)), self.nrows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> IntMatrix:
        return IntMatrix([[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def without_zero_columns(self) -> IntMatrix:
        keep = [j for j in range(self.ncols) if any(r[j] for r in self.rows)]
        return self.submatrix(range(self.nrows), keep)


def hstack(mats: Sequence[IntMatrix], nrows: int | None = None) -> IntMatrix:
    if not mats:
        if nrows is None:
            raise ValueError("nrows required for empty hstack")
        return IntMatrix.zeros(nrows, 0)
    m = mats[0].nrows
    if any(a.nrows != m for a in mats):
        raise ValueError("row count mismatch in hstack")
    return IntMatrix(
        [sum((a.rows[i] for a in mats), ()) for i in range(m)], sum(a.ncols for a in mats)
    )


def vstack(mats: Sequence[IntMatrix], ncols: int | None = None) -> IntMatrix:
    if not mats:
        if ncols is None:
            raise ValueError("ncols required for empty vstack")
        return IntMatrix.zeros(0, ncols)
    n = mats[0].ncols
    if any(a.ncols != n for a in mats):
        raise ValueError("column count mismatch in vstack")
    return IntMatrix([r for a in mats for r in a.rows], n)


def block_diag(mats: Sequence[IntMatrix]) -> IntMatrix:
    n = sum(a.ncols for a in mats)
    rows = []
    off = 0
    for a in mats:
        for r in a.rows:
            rows.append([0] * off + list(r) + [0] * (n - off - a.ncols))
        off += a.ncols
    return IntMatrix(rows, n)


def kron(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    """Kronecker product; index (i, j) of the product is i * b.size + j."""
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            rows.append([x * y for x in ra for y in rb])
    return IntMatrix(rows, a.ncols * b.ncols)


def place(block: IntMatrix, m: int, n: int, r0: int, c0: int) -> IntMatrix:
    """Embed ``block`` into an m x n zero matrix at offset (r0, c0)."""
    rows = [[0] * n for _ in range(m)]
    for i, r in enumerate(block.rows):
        rows[r0 + i][c0:c0 + block.ncols] = r
    return IntMatrix(rows, n)


def determinant(a: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = a.nrows
    if n != a.ncols:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    m = [list(r) for r in a.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# Smith normal form ----------------------------------------------------


@dataclass(frozen=True)
class SnfResult:
    """``U @ A @ V == diag(d)`` with U, V unimodular.

    ``d`` lists the diagonal invariants (length min(m, n)), each dividing
    the next, zeros last.  ``U_inv`` is the inverse of ``U``.
    """

    d: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x)

    def diagonal_matrix(self) -> IntMatrix:
        return IntMatrix.diagonal(self.d, self.U.nrows, self.V.nrows)


def _find_pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            v = row[j]
            if v:
                av = v if v > 0 else -v
                if av == 1:
                    return i, j
                if best is None or av < best[0]:
                    best = (av, i, j)
    if best is None:
        return None
    return best[1], best[2]


def _snf_core(rows, m, n, track):
    """In-place diagonalization.

    ``track`` is (U, U_inv, V) as lists of lists, or None when only the
    invariants are wanted.
    """
    a = rows
    if track is not None:
        U, Ui, V = track
    t = 0
    while t < m and t < n:
        pos = _find_pivot(a, t, m, n)
        if pos is None:
            break
        while True:
            pi, pj = pos
            if pi != t:
                a[pi], a[t] = a[t], a[pi]
                if track is not None:
                    U[pi], U[t] = U[t], U[pi]
                    for r in Ui:
                        r[pi], r[t] = r[t], r[pi]
            if pj != t:
                for r in a:
                    r[pj], r[t] = r[t], r[pj]
                if track is not None:
                    for r in V:
                        r[pj], r[t] = r[t], r[pj]
            p = a[t][t]
            rt = a[t]
            dirty = False
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = v // p
                    ri = a[i]
                    for j in range(t, n):
                        if rt[j]:
                            ri[j] -= q * rt[j]
                    if track is not None:
                        ui, ut = U[i], U[t]
                        for j in range(m):
                            if ut[j]:
                                ui[j] -= q * ut[j]
                        for r in Ui:
                            if r[i]:
                                r[t] += q * r[i]
                    # entries of ri left of t are zero already
                    if ri[t]:
                        dirty = True
            col_rows = [r for r in a if r[t]]
            col_v = [r for r in V if r[t]] if track is not None else []
            for j in range(t + 1, n):
                v = rt[j]
                if v:
                    q = v // p
                    for r in col_rows:
                        r[j] -= q * r[t]
                    for r in col_v:
                        r[j] -= q * r[t]
                    if rt[j]:
                        dirty = True
            if dirty:
                pos = _find_pivot_cross(a, t, m, n)
                continue
            # pivot row and column are clear; enforce divisibility
            bad = None
            for i in range(t + 1, m):
                ri = a[i]
                for j in range(t + 1, n):
                    if ri[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            rb = a[bad]
            for j in range(t, n):
                rt[j] += rb[j]
            if track is not None:
                ut, ub = U[t], U[bad]
                for j in range(m):
                    ut[j] += ub[j]
                for r in Ui:
                    if r[t]:
                        r[bad] -= r[t]
            pos = _find_pivot_cross(a, t, m, n)
        if a[t][t] < 0:
            a[t] = [-v for v in a[t]]
            if track is not None:
                U[t] = [-v for v in U[t]]
                for r in Ui:
                    r[t] = -r[t]
        t += 1
    return [a[i][i] for i in range(min(m, n))]


def _find_pivot_cross(a, t, m, n):
    """Smallest nonzero entry in pivot row t / column t (ties: lexicographic)."""
    best = None
    for i in range(t, m):
        v = a[i][t]
        if v:
            av = abs(v)
            if best is None or av < best[0] or (av == best[0] and (i, t) < best[1:]):
                best = (av, i, t)
    for j in range(t + 1, n):
        v = a[t][j]
        if v:
            av = abs(v)
            if best is None or av < best[0] or (av == best[0] and (t, j) < best[1:]):
                best = (av, t, j)
    return best[1], best[2]


def smith_normal_form(a: IntMatrix) -> SnfResult:
    m, n = a.shape
    rows = [list(r) for r in a.rows]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Ui = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    d = _snf_core(rows, m, n, (U, Ui, V))
    return SnfResult(tuple(d), IntMatrix(U, m), IntMatrix(V, n), IntMatrix(Ui, m))


def invariant_factors(a: IntMatrix) -> tuple[int, ...]:
    """Diagonal of the Smith form, without computing transforms."""
    m, n = a.shape
    rows = [list(r) for r in a.rows]
    return tuple(_snf_core(rows, m, n, None))


def rank(a: IntMatrix) -> int:
    return sum(1 for x in invariant_factors(a) if x)


# solving --------------------------------------------------------------


@dataclass(frozen=True)
class Obstruction:
    """Witness that ``A x = b`` has no integer solution.

    ``functional @ A`` is divisible by ``modulus`` (identically zero when
    ``modulus == 0``) while ``functional . b`` is not.
    """

    functional: tuple[int, ...]
    modulus: int


class IntSolver:
    """Caches the Smith form of A to solve ``A x = b`` for many b."""

    def __init__(self, a: IntMatrix):
        self.a = a
        self.snf = smith_normal_form(a)
        self._u = [[(j, x) for j, x in enumerate(r) if x] for r in self.snf.U.rows]
        self._v = [[(j, x) for j, x in enumerate(r) if x] for r in self.snf.V.rows]

    def solve(self, b: Sequence[int]) -> tuple[int, ...] | None:
        x = self._solve(b)
        return None if isinstance(x, Obstruction) else x

    def obstruction(self, b: Sequence[int]) -> Obstruction | None:
        x = self._solve(b)
        return x if isinstance(x, Obstruction) else None

    def _solve(self, b):
        m, n = self.a.shape
        if len(b) != m:
            raise ValueError(f"right-hand side has length {len(b)}, expected {m}")
        snf = self.snf
        ub = [sum(x * b[j] for j, x in r) for r in self._u]
        y = [0] * n
        for i in range(m):
            di = snf.d[i] if i < len(snf.d) else 0
            if di == 0:
                if ub[i]:
                    return Obstruction(snf.U.rows[i], 0)
            elif ub[i] % di:
                return Obstruction(snf.U.rows[i], di)
            else:
                y[i] = ub[i] // di
        return tuple(sum(x * y[j] for j, x in r) for r in self._v)

    def solve_matrix(self, b: IntMatrix) -> IntMatrix | None:
        cols = []
        for c in b.columns():
            x = self.solve(c)
            if x is None:
                return None
            cols.append(x)
        return IntMatrix.from_columns(cols, self.a.ncols)


def solve_integer(a: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """An integer solution of ``a @ x == b``, or None if there is none."""
    return IntSolver(a).solve(b)


def kernel_and_image(a: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Bases (as matrix columns) of the kernel and image lattices of ``a``.

    The kernel basis spans a saturated lattice.  The image basis spans
    exactly the column lattice of ``a`` (which need not be saturated).
    """
    snf = smith_normal_form(a)
    r = snf.rank
    m, n = a.shape
    ker = _sign_normalize(snf.V.submatrix(range(n), range(r, n)))
    im = IntMatrix(
        [[snf.U_inv.rows[i][k] * snf.d[k] for k in range(r)] for i in range(m)], r
    )
    return ker, im


def _sign_normalize(basis: IntMatrix) -> IntMatrix:
    """Flip columns so that each has a positive first nonzero entry."""
    cols = []
    for c in basis.columns():
        lead = next((v for v in c if v), 0)
        cols.append(tuple(-v for v in c) if lead < 0 else c)
    return IntMatrix.from_columns(cols, basis.nrows)


def kernel(a: IntMatrix) -> IntMatrix:
    return kernel_and_image(a)[0]


def image_basis(a: IntMatrix) -> IntMatrix:
    return kernel_and_image(a)[1]


def lattice_contains(basis: IntMatrix, v: Sequence[int]) -> bool:
    return solve_integer(basis, v) is not None


def same_lattice(a: IntMatrix, b: IntMatrix) -> bool:
    """Column lattices of a and b coincide."""
    if a.nrows != b.nrows:
        return False
    sa, sb = IntSolver(a), IntSolver(b)
    return all(sa.solve(c) is not None for c in b.columns()) and all(
        sb.solve(c) is not None for c in a.columns()
    )


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def lattice_basis(a: IntMatrix) -> IntMatrix:
    """A basis (as columns) of the lattice spanned by the columns of a.

    Columns are inserted one at a time into a triangular basis kept as
    sparse dictionaries; clashing pivots are merged by the unimodular
    extended-gcd step, so the span never changes.
    """
    basis: dict[int, dict[int, int]] = {}
    for j in range(a.ncols):
        v = {i: a.rows[i][j] for i in range(a.nrows) if a.rows[i][j]}
        while v:
            r = min(v)
            b = basis.get(r)
            if b is None:
                if v[r] < 0:
                    v = {i: -x for i, x in v.items()}
                basis[r] = v
                break
            p, x = b[r], v[r]
            if x % p == 0:
                q = x // p
                v = _axpy(v, b, -q)
                continue
            g, s, t = _ext_gcd(p, x)
            nb = _lincomb(b, s, v, t)
            v = _lincomb(v, p // g, b, -(x // g))
            basis[r] = nb
    cols = []
    for r in sorted(basis):
        col = [0] * a.nrows
        for i, x in basis[r].items():
            col[i] = x
        cols.append(col)
    return IntMatrix.from_columns(cols, a.nrows)


def _axpy(v: dict, b: dict, q: int) -> dict:
    out = dict(v)
    for i, x in b.items():
        y = out.get(i, 0) + q * x
        if y:
            out[i] = y
        else:
            out.pop(i, None)
    return out


def _lincomb(u: dict, a: int, v: dict, b: int) -> dict:
    out = {}
    for i in set(u) | set(v):
        y = a * u.get(i, 0) + b * v.get(i, 0)
        if y:
            out[i] = y
    return out


class EchelonLattice:
    """Triangular sparse basis of a column lattice.

    With ``track`` the column operations are recorded, so the columns that
    reduce to zero give a basis of the kernel of the input matrix.
    """

    def __init__(self, a: IntMatrix, track: bool = False):
        self.nrows = a.nrows
        self.basis: dict[int, dict[int, int]] = {}
        self._trk: dict[int, dict[int, int]] = {}
        self.kernel_vectors: list[dict[int, int]] = []
        cols = [{} for _ in range(a.ncols)]
        for i, row in enumerate(a.rows):
            for j, x in enumerate(row):
                if x:
                    cols[j][i] = x
        for j, v in enumerate(cols):
            t = {j: 1} if track else None
            self._insert(v, t)

    def _insert(self, v: dict, t: dict | None) -> None:
        basis, trk = self.basis, self._trk
        while v:
            r = min(v)
            b = basis.get(r)
            if b is None:
                if v[r] < 0:
                    v = {i: -x for i, x in v.items()}
                    if t is not None:
                        t = {i: -x for i, x in t.items()}
                basis[r] = v
                if t is not None:
                    trk[r] = t
                return
            p, x = b[r], v[r]
            if x % p == 0:
                q = x // p
                v = _axpy(v, b, -q)
                if t is not None:
                    t = _axpy(t, trk[r], -q)
                continue
            g, s, u = _ext_gcd(p, x)
            nb = _lincomb(b, s, v, u)
            v = _lincomb(v, p // g, b, -(x // g))
            basis[r] = nb
            if t is not None:
                tb = trk[r]
                trk[r] = _lincomb(tb, s, t, u)
                t = _lincomb(t, p // g, tb, -(x // g))
        if t is not None and t:
            self.kernel_vectors.append(t)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence[int]) -> bool:
        w = {i: x for i, x in enumerate(v) if x}
        while w:
            r = min(w)
            b = self.basis.get(r)
            if b is None or w[r] % b[r]:
                return False
            w = _axpy(w, b, -(w[r] // b[r]))
        return True

    def coordinates(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Coefficients of v in the basis (ordered by pivot), or None."""
        order = {r: k for k, r in enumerate(sorted(self.basis))}
        out = [0] * len(order)
        w = {i: x for i, x in enumerate(v) if x}
        while w:
            r = min(w)
            b = self.basis.get(r)
            if b is None or w[r] % b[r]:
                return None
            q = w[r] // b[r]
            out[order[r]] = q
            w = _axpy(w, b, -q)
        return tuple(out)

    def is_everything(self) -> bool:
        """The lattice is all of Z^nrows."""
        return len(self.basis) == self.nrows and all(b[r] == 1 for r, b in self.basis.items())

    def matrix(self) -> IntMatrix:
        cols = []
        for r in sorted(self.basis):
            col = [0] * self.nrows
            for i, x in self.basis[r].items():
                col[i] = x
            cols.append(col)
        return IntMatrix.from_columns(cols, self.nrows)

    def kernel_matrix(self, ncols: int) -> IntMatrix:
        cols = []
        for t in self.kernel_vectors:
            col = [0] * ncols
            for i, x in t.items():
                col[i] = x
            cols.append(col)
        return IntMatrix.from_columns(cols, ncols)
