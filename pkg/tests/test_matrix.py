import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as O
from deborder.errors import DimensionMismatch, InstanceTooLarge, LimitUndefined, NonSquare, RankTooHigh
from deborder.matrix import (
    Matrix,
    MultilinearPoly,
    RankOneInstance,
    assemble,
    check_grassmann_plucker,
    det,
    expand_cauchy_binet,
    extract_coefficients,
    factor_rank_one,
    inverse,
    minor_table,
    outer,
    rank,
    rref,
)
from deborder.scalars import EPS, parse_expression, rational

e = parse_expression


def Q(rows):
    return Matrix([[rational(x) for x in row] for row in rows])


def test_det_examples():
    assert det(Matrix.identity(3)) == 1
    assert det(Matrix([[EPS, 1], [1, 1 / EPS]])) == 0
    assert det(Matrix([[1, EPS], [0, 1]])) == 1
    with pytest.raises(NonSquare):
        det(Matrix([[1, 2]]))


def test_minor_table_examples():
    t = minor_table(Matrix([[1, 0, EPS], [0, 1, 1]]))
    assert dict(t.items()) == {(0, 1): 1, (0, 2): 1, (1, 2): -EPS}
    z = minor_table(Matrix.zeros(2, 4))
    assert all(v == 0 for _, v in z.items()) and len(z.values) == 6


def test_rank_examples():
    assert rank(Matrix.identity(3)) == 3
    assert rank(outer([1, 2, 3], [4, 5])) == 1
    assert rank(Matrix([[EPS, 1], [EPS**2, EPS]])) == 1


def test_factor_rank_one_examples():
    for a in (Q([[1, 2], [2, 4]]), Matrix([[0, EPS], [0, EPS**2]]), Matrix.zeros(2, 3)):
        u, v = factor_rank_one(a)
        assert outer(u, v) == a
    with pytest.raises(RankTooHigh):
        factor_rank_one(Matrix.identity(2))


def test_assemble_examples():
    assert assemble(RankOneInstance(Q([[1, 2]]), Q([[3, 4]]), Matrix.identity(1)), [0, 0]) == Matrix.identity(1)
    inst = RankOneInstance(Q([[1]]), Q([[1]]))
    assert assemble(inst, [rational(7)]) == Q([[7]])


def test_cauchy_binet_and_coefficients_examples():
    inst = RankOneInstance(Matrix([[1, 1 / EPS]]), Matrix([[1, EPS]]))
    p = expand_cauchy_binet(inst)
    assert p.coeffs == {(0,): 1, (1,): 1}
    assert extract_coefficients(inst) == p
    c = rational(5)
    q = extract_coefficients(RankOneInstance(Q([[1]]), Q([[1]]), Q([[c]])))
    assert q.coeffs == {(): c, (0,): 1}
    a0 = Q([[2, 1], [1, 3]])
    zero = extract_coefficients(RankOneInstance(Matrix.zeros(2, 3), Matrix.zeros(2, 3), a0))
    assert zero.coeffs == {(): 5}


def test_limit_names_first_bad_subset():
    p = MultilinearPoly(2, {(0,): rational(1), (1,): 1 / EPS})
    with pytest.raises(LimitUndefined) as info:
        p.limit()
    assert info.value.subset == (1,)


def test_grassmann_plucker_examples():
    rng = random.Random(0)
    a = [[rational(rng.randint(-5, 5)) for _ in range(2)] for _ in range(3)]
    b = [[rational(rng.randint(-5, 5)) for _ in range(2)]]
    assert check_grassmann_plucker(a, b) == 0
    a = [[EPS ** rng.randint(-1, 2) + rng.randint(-3, 3) for _ in range(3)] for _ in range(4)]
    b = [[e("1/(1+eps)") + rng.randint(-3, 3) for _ in range(3)] for _ in range(2)]
    assert check_grassmann_plucker(a, b) == 0
    rep = [[rational(1), rational(2)]] * 3
    assert check_grassmann_plucker(rep, [[rational(1), rational(0)]]) == 0
    with pytest.raises(DimensionMismatch):
        check_grassmann_plucker(a, b[:1])


def test_grassmann_plucker_needs_alternating_sign():
    """The unsigned sum is not an identity; guard against dropping the sign."""
    a = [[rational(1), rational(0)], [rational(0), rational(1)], [rational(1), rational(1)]]
    b = [[rational(1), rational(2)]]
    unsigned = 0
    for i in range(3):
        left = [[a[j][k] for j in range(3) if j != i] for k in range(2)]
        right = [[a[i][k], b[0][k]] for k in range(2)]
        unsigned += O.det_cofactor(left) * O.det_cofactor(right)
    assert unsigned != 0
    assert check_grassmann_plucker(a, b) == 0


matrices = st.integers(1, 3).flatmap(
    lambda r: st.integers(r, 6).flatmap(
        lambda n: st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=r, max_size=r)
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices, st.integers(0, 2**32))
def test_minor_table_matches_cofactor_oracle(rows, seed):
    rng = random.Random(seed)
    shifts = [rng.randint(-2, 2) for _ in rows[0]]
    m = Matrix([[rational(x) * EPS**s if x else rational(0) for x, s in zip(row, shifts)] for row in rows])
    t = minor_table(m)
    r = len(rows)
    for s in combinations(range(len(rows[0])), r):
        ref = O.det_cofactor([[Fraction(rows[i][j]) for j in s] for i in range(r)])
        assert t[s] == (ref * EPS ** sum(shifts[j] for j in s) if ref else 0)
        assert det(m.columns(s)) == t[s]


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_rref_inverse(rows):
    m = Q(rows)
    red, piv = rref(m)
    assert rank(m) == len(piv) == O.rank_fraction(rows)
    if len(rows) == len(rows[0]) and len(piv) == len(rows):
        assert m @ inverse(m) == Matrix.identity(len(rows))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2**32), st.booleans())
def test_multilinear_expansion_matches_evaluation(r, n, seed, with_a0):
    rng = random.Random(seed)
    ent = lambda: rational(rng.randint(-3, 3)) + (EPS ** rng.randint(-1, 1) if rng.random() < 0.3 else 0)
    u = Matrix([[ent() for _ in range(n)] for _ in range(r)])
    v = Matrix([[ent() for _ in range(n)] for _ in range(r)])
    a0 = Matrix([[ent() for _ in range(r)] for _ in range(r)]) if with_a0 else None
    inst = RankOneInstance(u, v, a0)
    p = extract_coefficients(inst)
    if not with_a0:
        assert p == expand_cauchy_binet(inst)
    for _ in range(3):
        x = [rational(Fraction(rng.randint(-5, 5), rng.randint(1, 3))) for _ in range(n)]
        assert p.evaluate(x) == det(assemble(inst, x))
    for s in p.coeffs:
        assert p[s] != 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_factor_reconstructs(u, v):
    a = outer([rational(x) * EPS for x in u], [rational(y) / EPS for y in v])
    fu, fv = factor_rank_one(a)
    assert outer(fu, fv) == a


def test_from_matrices_factors_each_coefficient():
    mats = [outer([1, EPS], [2, 1]), Matrix.zeros(2, 2), outer([0, 1], [1, 1 / EPS])]
    inst = RankOneInstance.from_matrices(mats)
    for i, m in enumerate(mats):
        assert inst.coefficient_matrix(i) == m
    with pytest.raises(RankTooHigh):
        RankOneInstance.from_matrices([Matrix.identity(2)])


def test_instance_size_cap(monkeypatch):
    monkeypatch.setenv("DEBORDER_MAX_N", "3")
    inst = RankOneInstance(Q([[1, 1, 1, 1]]), Q([[1, 1, 1, 1]]))
    with pytest.raises(InstanceTooLarge):
        extract_coefficients(inst)
