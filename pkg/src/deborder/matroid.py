"""Valuated linear matroids: bases of a full-row-rank matrix over Q(eps)
weighted by ``omega(B) = val(det(U_B))``.

Everything is minimization: the exchange inequality reads
``omega(B) + omega(B') >= omega(B - a + b) + omega(B' - b + a)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyBaseFamily, NoWitness, RankDeficient
from .matrix import Matrix, MinorTable, Subset, _fmt_subset, minor_table, rank
from .scalars import INF, Valuation, val

WeightVector = Sequence[int]


@dataclass(frozen=True)
class ValuatedLinearMatroid:
    n: int
    r: int
    omega: Mapping[Subset, int]
    source: MinorTable | None = None

    @property
    def bases(self) -> list[Subset]:
        return list(self.omega)

    def is_base(self, s: Iterable[int]) -> bool:
        return tuple(s) in self.omega

    def valuation(self, s: Iterable[int]) -> Valuation:
        """``omega`` extended by +inf off the base family."""
        return self.omega.get(tuple(sorted(s)), INF)

    def weight(self, s: Subset, w: WeightVector) -> Valuation:
        v = self.valuation(s)
        return v if v is INF else v + sum(w[i] for i in s)

    def dump(self) -> str:
        """One line per base, ``{1,2} omega``, lexicographic order."""
        return "\n".join(f"{_fmt_subset(s)} {v}" for s, v in sorted(self.omega.items()))


def from_minor_table(table: MinorTable) -> ValuatedLinearMatroid:
    omega = {s: val(d) for s, d in sorted(table.items()) if d}
    return ValuatedLinearMatroid(table.n, table.r, omega, table)


def from_matrix(u: Matrix) -> ValuatedLinearMatroid:
    """Linear matroid of ``u`` with its eps-valuation. ``u`` must have full row rank."""
    rk = rank(u)
    if rk < u.nrows:
        raise RankDeficient(f"matrix has rank {rk} < {u.nrows} rows")
    return from_minor_table(minor_table(u))


def _swap(s: Subset, out: int, into: int) -> Subset:
    return tuple(sorted([x for x in s if x != out] + [into]))


def check_exchange(m: ValuatedLinearMatroid, b1: Iterable[int], b2: Iterable[int], a: int) -> int:
    """Witness ``b in B2 \\ B1`` for the valuated exchange axiom at ``a in B1 \\ B2``."""
    b1, b2 = tuple(sorted(b1)), tuple(sorted(b2))
    if not (m.is_base(b1) and m.is_base(b2)):
        raise ValueError("both sets must be bases")
    if a not in b1 or a in b2:
        raise ValueError("a must lie in B1 \\ B2")
    lhs = m.omega[b1] + m.omega[b2]
    for b in b2:
        if b in b1:
            continue
        s1, s2 = _swap(b1, a, b), _swap(b2, b, a)
        if m.is_base(s1) and m.is_base(s2) and lhs >= m.omega[s1] + m.omega[s2]:
            return b
    raise NoWitness(f"exchange axiom fails for B={_fmt_subset(b1)}, B'={_fmt_subset(b2)}, a={a + 1}")


def min_weight_base(m: ValuatedLinearMatroid, w: WeightVector | None = None) -> tuple[Subset, int]:
    """Base minimizing ``omega(B) + w(B)``; lexicographically smallest on ties."""
    if not m.omega:
        raise EmptyBaseFamily("matroid has no bases")
    w = [0] * m.n if w is None else list(w)
    best: Subset | None = None
    best_val = 0
    for s, om in m.omega.items():  # keys are in lexicographic order
        v = om + sum(w[i] for i in s)
        if best is None or v < best_val:
            best, best_val = s, v
    return best, best_val


def min_weight_base_local(
    m: ValuatedLinearMatroid, w: WeightVector | None = None, start: Subset | None = None
) -> tuple[Subset, int]:
    """Exchange descent from ``start``: move to the best improving ``B - a + b``.

    Local optimality is global for valuated matroids, so this agrees with
    :func:`min_weight_base` in value (the base itself may differ on ties).
    """
    if not m.omega:
        raise EmptyBaseFamily("matroid has no bases")
    w = [0] * m.n if w is None else list(w)
    cur = next(iter(m.omega)) if start is None else tuple(sorted(start))
    cur_val = m.weight(cur, w)
    while True:
        best, best_val = None, cur_val
        for a in cur:
            for b in range(m.n):
                if b in cur:
                    continue
                s = _swap(cur, a, b)
                v = m.weight(s, w)
                if v < best_val:
                    best, best_val = s, v
        if best is None:
            return cur, cur_val
        cur, cur_val = best, best_val
