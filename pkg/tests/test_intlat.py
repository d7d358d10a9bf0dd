import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracle as ref
from neron.intlat import (AbHom, EchelonLattice, FgAbGroup, Solver, Subquotient, cokernel_group,
                          determinant, diagonal, exact_at, identity, in_span, intmat, inverse,
                          kernel_basis, preimage, saturation, smith_normal_form, xgcd, zeros)

small = st.integers(-9, 9)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(lambda m: st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=m, max_size=m)))


def factors(A):
    _, D, _ = smith_normal_form(intmat(A))
    return [d for d in diagonal(D) if d]


@pytest.mark.parametrize("label", sorted(ref.freeze_table([])["snf"]))
def test_snf_matches_frozen_oracle(oracle, label):
    A = eval(label)  # labels are literal matrices
    assert factors(A) == oracle["snf"][label]


def test_snf_examples():
    assert diagonal(smith_normal_form(intmat([[1, 0], [0, 1]]))[1]) == [1, 1]
    assert diagonal(smith_normal_form(intmat([[2, 4], [6, 8]]))[1]) == [2, 4]
    assert diagonal(smith_normal_form(zeros(2, 2))[1]) == [0, 0]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_is_a_unimodular_diagonalization(A):
    A = intmat(A)
    U, D, V = smith_normal_form(A)
    assert (U @ A @ V == D).all()
    assert abs(determinant(U)) == 1 and abs(determinant(V)) == 1
    off = D.copy()
    for i in range(min(D.shape)):
        off[i, i] = 0
    assert not off.any()
    d = diagonal(D)
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert d[:len(nz)] == nz  # zeros trail


@settings(max_examples=60, deadline=None)
@given(matrices(3, 3))
def test_snf_agrees_with_both_oracles(A):
    assert factors(A) == ref.determinantal_divisors(A) == sorted(ref.elementary_divisors(A))


def test_kernel_examples():
    assert kernel_basis(intmat([[1, 1]])).T.tolist() in ([[1, -1]], [[-1, 1]])
    assert kernel_basis(intmat([[2]])).shape == (1, 0)
    assert kernel_basis(intmat([[1, 2], [2, 4]])).T.tolist() in ([[2, -1]], [[-2, 1]])


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_kernel_is_saturated_and_complete(A):
    A = intmat(A)
    K = kernel_basis(A)
    assert K.shape[1] == A.shape[1] - len(factors(A))
    if K.shape[1]:
        assert not (A @ K).any()
        # saturated: ℤⁿ / K is torsion-free
        assert not cokernel_group(K)[0].invariant_factors


def test_cokernel_examples():
    assert str(cokernel_group(intmat([[2]]))[0]) == "Z/2"
    assert cokernel_group(intmat([[2, 4], [6, 8]]))[0] == FgAbGroup(0, (2, 4))
    assert cokernel_group(zeros(2, 0))[0] == FgAbGroup(2)
    assert cokernel_group(zeros(2, 1))[0] == FgAbGroup(2)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_cokernel_matches_oracle(A):
    n = len(A)
    r, f = ref.cokernel(A, n)
    assert cokernel_group(intmat(A))[0] == FgAbGroup(r, tuple(f))


def test_from_orders_canonicalizes():
    assert FgAbGroup.from_orders(0, [6, 4]) == FgAbGroup(0, (2, 12))
    assert FgAbGroup.from_orders(1, [0, 1]) == FgAbGroup(2)
    with pytest.raises(ValueError):
        FgAbGroup(0, (4, 6))
    assert str(FgAbGroup(2, (2,))) == "Z/2 + Z^2"
    assert FgAbGroup(0, (3,)) + FgAbGroup(0, (2,)) == FgAbGroup(0, (6,))


def test_solver_and_preimage():
    A = intmat([[2, 0], [0, 3]])
    s = Solver(A)
    assert s.solve(intmat([[4], [9]])).T.tolist() == [[2, 3]]
    assert s.solve(intmat([[1], [0]])) is None
    assert in_span(A, [2, 3]) and not in_span(A, [1, 3])
    # x with A x ∈ 6ℤ²
    P = preimage(A, intmat([[6, 0], [0, 6]]))
    assert abs(determinant(P)) == 6
    assert saturation(intmat([[2], [4]])).T.tolist() in ([[1, 2]], [[-1, -2]])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)))
def test_inverse_of_unimodular(A):
    A = intmat(A)
    if abs(determinant(A)) != 1:
        return
    assert (inverse(A) @ A == identity(A.shape[0])).all()


def test_subquotient_coordinates():
    sq = Subquotient(identity(2), intmat([[2, 0], [0, 3]]))
    assert sq.group == FgAbGroup(0, (6,))
    assert sq.is_zero(intmat([[2], [3]]))
    assert not sq.is_zero(intmat([[1], [0]]))
    assert sq.coords(intmat([[1], [1]])).shape == (1, 1)


def test_abhom_exactness():
    # ℤ -2-> ℤ -> ℤ/2
    f = AbHom([0], [0], [[2]])
    g = AbHom([0], [2], [[1]])
    assert f.is_injective() and g.is_surjective()
    assert exact_at(f, g)
    assert not exact_at(AbHom([0], [0], [[4]]), g)
    assert f.cokernel() == FgAbGroup(0, (2,))
    with pytest.raises(ValueError):
        AbHom([2], [0], [[1]])  # ℤ/2 -> ℤ nonzero is not a homomorphism


@given(st.integers(-500, 500), st.integers(-500, 500))
def test_xgcd(a, b):
    g, x, y = xgcd(a, b)
    assert g == np.gcd(a, b) and a * x + b * y == g


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), max_size=6))
def test_echelon_lattice_membership(rows):
    E = EchelonLattice(3)
    for r in rows:
        member = r in E
        assert E.add(r) == (not member)  # the lattice grows iff r was new
        assert r in E
    if rows:
        assert E.rank == len(factors(rows))
