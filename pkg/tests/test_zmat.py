from itertools import permutations

from hypothesis import given, settings, strategies as st

from hocolim.zmat import (
    EchelonLattice,
    IntMatrix,
    IntSolver,
    determinant,
    image_basis,
    invariant_factors,
    kernel,
    lattice_contains,
    rank,
    same_lattice,
    smith_normal_form,
)

small = st.integers(min_value=-6, max_value=6)


def matrices(max_dim=4):
    return st.integers(1, max_dim).flatmap(
        lambda m: st.integers(1, max_dim).flatmap(
            lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)
        )
    ).map(lambda rows: IntMatrix(rows, len(rows[0])))


def leibniz(a):
    n = a.nrows
    total = 0
    for p in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if p[i] > p[j])
        prod = 1
        for i in range(n):
            prod *= a[i, p[i]]
        total += -prod if inv % 2 else prod
    return total


def test_snf_known_example():
    a = IntMatrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert invariant_factors(a) == (2, 6, 12)


def test_snf_of_zero_and_identity():
    assert smith_normal_form(IntMatrix.zeros(2, 3)).d == (0, 0)
    assert invariant_factors(IntMatrix.identity(3)) == (1, 1, 1)


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_decomposition(a):
    r = smith_normal_form(a)
    assert r.U @ a @ r.V == r.diagonal_matrix()
    assert r.U @ r.U_inv == IntMatrix.identity(a.nrows)
    assert abs(determinant(r.U)) == 1 and abs(determinant(r.V)) == 1
    nz = [x for x in r.d if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert r.d[len(nz):] == (0,) * (len(r.d) - len(nz))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_determinant_matches_leibniz_and_snf(rows):
    a = IntMatrix(rows, len(rows))
    assert determinant(a) == leibniz(a)
    prod = 1
    for x in invariant_factors(a):
        prod *= x
    assert abs(determinant(a)) == prod


@settings(max_examples=100, deadline=None)
@given(matrices(), st.lists(small, min_size=4, max_size=4))
def test_solver_solution_or_obstruction(a, x):
    b = a.apply(x[: a.ncols])
    s = IntSolver(a)
    y = s.solve(b)
    assert y is not None and a.apply(y) == b
    shifted = list(b)
    shifted[0] += 1
    y = s.solve(shifted)
    if y is None:
        ob = s.obstruction(shifted)
        fa = IntMatrix([list(ob.functional)], a.nrows) @ a
        value = sum(f * v for f, v in zip(ob.functional, shifted))
        if ob.modulus == 0:
            assert fa.is_zero() and value != 0
        else:
            assert all(v % ob.modulus == 0 for v in fa.rows[0]) and value % ob.modulus
    else:
        assert a.apply(y) == tuple(shifted)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_kernel_and_rank(a):
    k = kernel(a)
    assert (a @ k).is_zero()
    assert k.ncols + rank(a) == a.ncols
    assert rank(image_basis(a)) == rank(a)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_echelon_lattice_agrees_with_snf(a):
    e = EchelonLattice(a, track=True)
    assert e.rank == rank(a)
    assert same_lattice(e.matrix(), a)
    km = e.kernel_matrix(a.ncols)
    assert (a @ km).is_zero() and km.ncols == a.ncols - rank(a)
    for j in range(a.ncols):
        col = a.column(j)
        assert e.contains(col) and lattice_contains(a, col)
        coords = e.coordinates(col)
        assert e.matrix().apply(coords) == col


def test_lattice_membership_detects_index():
    a = IntMatrix([[2, 0], [0, 3]])
    e = EchelonLattice(a)
    assert not e.contains([1, 0]) and e.contains([4, 9])
    assert e.coordinates([1, 0]) is None
    assert not e.is_everything()
    assert EchelonLattice(IntMatrix([[2, 3]])).is_everything()
