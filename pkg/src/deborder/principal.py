"""Closure of the size-k principal minor map on matrices of rank at most k."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import CertificateFailure, LimitUndefined, NonSquare, RankMismatch, RankTooHigh
from .matrix import Matrix, MinorTable, _fmt_subset, det, minor_table, rank, rref
from .extract import extract
from .matroid import from_minor_table
from .scalars import INF, limit0, val
from .splitting import normalize_pair


@dataclass(frozen=True)
class PrincipalMinorInstance:
    A: Matrix
    k: int

    def __post_init__(self):
        if self.A.nrows != self.A.ncols:
            raise NonSquare("principal minors need a square matrix")
        if not 1 <= self.k <= self.A.nrows:
            raise ValueError(f"k must lie in 1..{self.A.nrows}")
        rk = rank(self.A)
        if rk > self.k:
            raise RankTooHigh(f"rank(A) = {rk} exceeds k = {self.k}")

    @property
    def n(self) -> int:
        return self.A.nrows


def principal_minors(a: Matrix, k: int) -> MinorTable:
    if a.nrows != a.ncols:
        raise NonSquare("principal minors need a square matrix")
    n = a.nrows
    return MinorTable(n, k, {s: det(a.submatrix(s, s)) for s in combinations(range(n), k)})


def rank_factorize(a: Matrix, k: int) -> tuple[Matrix, Matrix]:
    """k x n matrices U, V of full row rank with ``a == U.T @ V``.

    ``U.T`` is the pivot columns of ``a``; ``V`` is the nonzero part of its RREF.
    """
    red, pivots = rref(a)
    if len(pivots) != k:
        raise RankMismatch(f"rank(A) = {len(pivots)}, expected {k}")
    return a.columns(pivots).T, red.submatrix(range(k), range(a.ncols))


def minor_limits(table: MinorTable) -> MinorTable:
    out = {}
    for s, d in table.items():
        v = val(d)
        if v is not INF and v < 0:
            raise LimitUndefined(f"principal minor on {_fmt_subset(s)} has valuation {v}", subset=s)
        out[s] = limit0(d)
    return MinorTable(table.n, table.r, out)


def close_principal_minors(inst: PrincipalMinorInstance) -> tuple[Matrix, MinorTable]:
    """Base-field B with ``det(B_I) = lim det(A_I)`` for every size-k I.

    Returns ``(B, limits)``.
    """
    a, k, n = inst.A, inst.k, inst.n
    limits = minor_limits(principal_minors(a, k))
    if rank(a) < k or not any(limits.values.values()):
        return Matrix.zeros(n, n), limits
    u, v = rank_factorize(a, k)
    tu, tv = minor_table(u), minor_table(v)
    pair = normalize_pair(u, v, from_minor_table(tu), from_minor_table(tv))
    u_hat = extract(pair.U_tilde, pair.minor_table_u(tu)).U_hat
    v_hat = extract(pair.V_tilde, pair.minor_table_v(tv)).U_hat
    b = u_hat.T @ v_hat
    got = principal_minors(b, k)
    for s, lim in limits.items():
        if got.values[s] != lim:
            raise CertificateFailure(f"principal minor on {_fmt_subset(s)} does not match its limit")
    return b, limits
