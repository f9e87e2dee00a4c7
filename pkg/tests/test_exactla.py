import random

import numpy as np
import pytest

from qhorrocks.exactla import (
    DEFAULT_PRIME,
    Matrix,
    NoSolution,
    PrimeField,
    RationalField,
    get_field,
    hstack,
    preimage_basis,
    quotient_data,
    random_matrix,
    span_basis,
    subspace_equal,
)

F = PrimeField(DEFAULT_PRIME)
Q = RationalField()


def test_get_field():
    assert get_field("p=7").p == 7
    assert get_field(5).p == 5
    assert isinstance(get_field("rationals"), RationalField)


def test_rank_identity_and_zero():
    assert Matrix.identity(F, 2).rank() == 2
    assert Matrix.zeros(F, 3, 4).rank() == 0


def test_rank_dependent_rows_over_q():
    # hand elimination: second row is twice the first
    m = Matrix.make(Q, [[1, 2], [2, 4]])
    assert m.rank() == 1


def test_kernel_identity_empty():
    assert Matrix.identity(F, 3).kernel_basis() == []


def test_kernel_zero_matrix():
    ker = Matrix.zeros(F, 2, 3).kernel_basis()
    assert len(ker) == 3
    assert sorted(tuple(int(x) for x in v) for v in ker) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_kernel_single_equation():
    # one equation in three unknowns: two independent solutions
    m = Matrix.make(F, [[1, 1, 0]])
    ker = m.kernel_basis()
    assert len(ker) == 2
    for v in ker:
        assert np.all((m @ v) % F.p == 0)


def test_solve_identity():
    m = Matrix.identity(F, 3)
    rhs = F.array([[4], [5], [6]])[:, 0]
    assert np.all(m.solve(rhs) == rhs)


def test_solve_no_solution():
    m = Matrix.make(F, [[1, 0], [0, 0]])
    with pytest.raises(NoSolution):
        m.solve(F.array([[0], [1]])[:, 0])


def test_solve_mod_5():
    # 2 * 3 = 6 = 1 mod 5
    f5 = PrimeField(5)
    m = Matrix.make(f5, [[2]])
    assert int(m.solve(f5.array([[1]])[:, 0])[0]) == 3


def test_solve_reproduces_rhs_exactly():
    rng = random.Random(7)
    for _ in range(20):
        m = random_matrix(F, rng, 5, 7)
        x = random_matrix(F, rng, 7, 1)
        rhs = (m @ x).a[:, 0]
        sol = m.solve(rhs)
        assert np.all((m @ sol) == rhs)


def test_rank_nullity_random():
    rng = random.Random(11)
    for _ in range(25):
        r, c = rng.randrange(1, 8), rng.randrange(1, 8)
        m = random_matrix(F, rng, r, c)
        assert m.rank() + len(m.kernel_basis()) == c


def test_quotient_trivial_subspace():
    reps, proj = quotient_data(F, 3, [])
    assert proj == Matrix.identity(F, 3)
    assert reps == Matrix.identity(F, 3)


def test_quotient_full_subspace():
    vecs = list(Matrix.identity(F, 2).columns())
    reps, proj = quotient_data(F, 2, vecs)
    assert proj.rows == 0 and reps.cols == 0


def test_quotient_kills_subspace():
    v = F.array([[1], [1], [0]])[:, 0]
    reps, proj = quotient_data(F, 3, [v])
    assert proj.rows == 2
    assert np.all((proj @ v) == 0)
    # projection of the coset representatives is the identity
    assert (proj @ reps) == Matrix.identity(F, 2)
    assert proj.rank() == 2


def test_quotient_over_rationals():
    v = Q.array([[1], [2]])[:, 0]
    reps, proj = quotient_data(Q, 2, [v])
    assert proj.rows == 1
    assert np.all(proj @ v == 0)


def test_span_and_subspace_equal():
    a = Matrix.make(F, [[1, 0], [1, 1], [0, 2]])
    b = Matrix.make(F, [[1, 1], [2, 0], [2, -2]])
    # b columns = {a1 + a2, 2 a1 - ... } hand-cooked to span the same plane
    assert subspace_equal(a, hstack([a, a]))
    assert span_basis(F, list(a.columns()), 3).cols == 2
    assert not subspace_equal(a, Matrix.identity(F, 3))
    assert subspace_equal(b, b)


def test_preimage_basis():
    m = Matrix.make(F, [[1, 0, 0], [0, 1, 0]])
    target = Matrix.make(F, [[1], [0]])
    pre = preimage_basis(m, target)
    # {x : (x0, x1) in span{(1,0)}} = {x1 = 0}: dimension 2
    assert pre.cols == 2
    for v in pre.columns():
        assert int(v[1]) == 0


def test_solve_matrix_multi_rhs():
    rng = random.Random(3)
    m = random_matrix(F, rng, 4, 4)
    x = random_matrix(F, rng, 4, 3)
    sol = m.solve_matrix(m @ x)
    assert (m @ sol) == (m @ x)
