"""Exact matrices over Q or Q(eps), maximal minors, and rank-one determinants.

Column subsets are 0-based sorted tuples in the Python API; JSON forms use
1-based indices to match the usual ``x_1 .. x_n`` numbering.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    DimensionMismatch,
    DivisionByZero,
    InstanceTooLarge,
    LimitUndefined,
    NonSquare,
    RankTooHigh,
)
from .scalars import (
    INF,
    RationalFunction,
    Valuation,
    is_eps_free,
    limit0,
    parse_expression,
    parse_rational,
    rational,
    to_rational,
    val,
)

Scalar = object  # Rational (gmpy2.mpq) or RationalFunction
Subset = tuple[int, ...]

DEFAULT_MAX_N = 16


def max_n() -> int:
    """Instance-size cap, read from ``DEBORDER_MAX_N`` at call time."""
    raw = os.environ.get("DEBORDER_MAX_N")
    return int(raw) if raw else DEFAULT_MAX_N


def _check_size(n: int, limit: int | None) -> None:
    cap = max_n() if limit is None else limit
    if n > cap:
        raise InstanceTooLarge(f"n = {n} exceeds the cap of {cap} (set DEBORDER_MAX_N to raise it)")


def scalar(x: object) -> Scalar:
    """Coerce input to an exact scalar. Strings may be ``"p/q"`` or eps expressions."""
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, str):
        try:
            return parse_rational(x)
        except ValueError:
            return parse_expression(x)
    return rational(x)


class Matrix:
    """Immutable dense matrix with exact entries."""

    __slots__ = ("_rows", "nrows", "ncols")

    def __init__(self, rows: Iterable[Iterable[object]], ncols: int | None = None):
        data = tuple(tuple(scalar(x) for x in row) for row in rows)
        if data:
            widths = {len(r) for r in data}
            if len(widths) != 1:
                raise DimensionMismatch("ragged matrix rows")
            (w,) = widths
        else:
            w = ncols or 0
        if ncols is not None and w != ncols:
            raise DimensionMismatch(f"expected {ncols} columns, got {w}")
        self._rows = data
        self.nrows = len(data)
        self.ncols = w

    @classmethod
    def _wrap(cls, rows: tuple[tuple[Scalar, ...], ...], ncols: int) -> "Matrix":
        m = cls.__new__(cls)
        m._rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        one, zero = rational(1), rational(0)
        return cls._wrap(tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)), n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "Matrix":
        zero = rational(0)
        return cls._wrap(tuple((zero,) * n for _ in range(m)), n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[object]], nrows: int | None = None) -> "Matrix":
        if not cols:
            return cls.zeros(nrows or 0, 0)
        return cls(zip(*cols))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        rows: list[tuple] = []
        for brow in blocks:
            h = {b.nrows for b in brow}
            if len(h) != 1:
                raise DimensionMismatch("block row with inconsistent heights")
            for i in range(h.pop()):
                rows.append(tuple(x for b in brow for x in b._rows[i]))
        return cls._wrap(tuple(rows), len(rows[0]) if rows else 0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def rows(self) -> tuple[tuple[Scalar, ...], ...]:
        return self._rows

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self._rows)

    def columns(self, cols: Sequence[int]) -> "Matrix":
        return Matrix._wrap(tuple(tuple(r[j] for j in cols) for r in self._rows), len(cols))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix._wrap(tuple(tuple(self._rows[i][j] for j in cols) for i in rows), len(cols))

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(tuple(zip(*self._rows)) if self.nrows else (), self.nrows)

    def map(self, fn: Callable[[Scalar], Scalar]) -> "Matrix":
        return Matrix._wrap(tuple(tuple(fn(x) for x in r) for r in self._rows), self.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._rows, other._rows)), self.ncols
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def __neg__(self) -> "Matrix":
        return self.map(lambda x: -x)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.T._rows
        zero = rational(0)
        out = []
        for r in self._rows:
            out.append(tuple(_dot(r, c, zero) for c in cols))
        return Matrix._wrap(tuple(out), other.ncols)

    def scale_row(self, i: int, c: object) -> "Matrix":
        rows = list(self._rows)
        rows[i] = tuple(c * x for x in rows[i])
        return Matrix._wrap(tuple(rows), self.ncols)

    def scale_columns(self, factors: Sequence[object]) -> "Matrix":
        if len(factors) != self.ncols:
            raise DimensionMismatch("one factor per column required")
        return Matrix._wrap(tuple(tuple(x * f for x, f in zip(r, factors)) for r in self._rows), self.ncols)

    def is_zero(self) -> bool:
        return not any(x for r in self._rows for x in r)

    def is_eps_free(self) -> bool:
        return all(is_eps_free(x) for r in self._rows for x in r)

    def to_base_field(self) -> "Matrix":
        """Same matrix with every entry as a plain rational (must be eps-free)."""
        return self.map(to_rational)

    def limit0(self) -> "Matrix":
        return self.map(limit0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(x) for x in r) for r in self._rows)
        return f"Matrix({self.nrows}x{self.ncols}: [{body}])"

    def tolist(self) -> list[list[Scalar]]:
        return [list(r) for r in self._rows]


def _dot(a: Sequence[Scalar], b: Sequence[Scalar], zero: Scalar) -> Scalar:
    acc = zero
    for x, y in zip(a, b):
        if x and y:
            acc = acc + x * y
    return acc


def outer(u: Sequence[object], v: Sequence[object]) -> Matrix:
    return Matrix([[a * b for b in v] for a in u])


def diag(entries: Sequence[object]) -> Matrix:
    n = len(entries)
    zero = rational(0)
    return Matrix._wrap(
        tuple(tuple(scalar(entries[i]) if i == j else zero for j in range(n)) for i in range(n)), n
    )


# ---------------------------------------------------------------------------
# elimination


def _echelon(rows: list[list[Scalar]], ncols: int, *, reduce: bool) -> tuple[list[int], int]:
    """In-place row reduction. Returns (pivot columns, permutation sign).

    Pivot = first nonzero entry at or below the current row. With
    ``reduce=True`` the result is the reduced row echelon form.
    """
    m = len(rows)
    pivots: list[int] = []
    sign = 1
    r = 0
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c]), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            sign = -sign
        prow = rows[r]
        piv = prow[c]
        if reduce:
            inv = 1 / piv
            prow = rows[r] = [x * inv if x else x for x in prow]
            targets = (i for i in range(m) if i != r)
        else:
            targets = range(r + 1, m)
        for i in targets:
            row = rows[i]
            a = row[c]
            if not a:
                continue
            f = a if reduce else a / piv
            for j in range(c, ncols):
                if prow[j]:
                    row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return pivots, sign


def det(m: Matrix) -> Scalar:
    """Exact determinant by fraction-field Gaussian elimination."""
    if m.nrows != m.ncols:
        raise NonSquare(f"determinant of a {m.nrows}x{m.ncols} matrix")
    n = m.nrows
    if n == 0:
        return rational(1)
    if n == 1:
        return m._rows[0][0]
    if n == 2:
        (a, b), (c, d) = m._rows
        return a * d - b * c
    rows = [list(r) for r in m._rows]
    pivots, sign = _echelon(rows, n, reduce=False)
    if len(pivots) < n:
        return rational(0)
    out = rows[0][0]
    for i in range(1, n):
        out = out * rows[i][i]
    return -out if sign < 0 else out


def rank(m: Matrix) -> int:
    rows = [list(r) for r in m._rows]
    pivots, _ = _echelon(rows, m.ncols, reduce=False)
    return len(pivots)


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and its pivot columns (zero rows kept at the bottom)."""
    rows = [list(r) for r in m._rows]
    pivots, _ = _echelon(rows, m.ncols, reduce=True)
    return Matrix._wrap(tuple(tuple(r) for r in rows), m.ncols), pivots


def inverse(m: Matrix) -> Matrix:
    if m.nrows != m.ncols:
        raise NonSquare("inverse of a non-square matrix")
    n = m.nrows
    aug = Matrix.block([[m, Matrix.identity(n)]])
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise DivisionByZero("matrix is singular")
    return red.submatrix(range(n), range(n, 2 * n))


# ---------------------------------------------------------------------------
# maximal minors


@dataclass(frozen=True)
class MinorTable:
    """All maximal minors ``det(M_S)`` of an r x n matrix, keyed by 0-based subset."""

    n: int
    r: int
    values: Mapping[Subset, Scalar]

    def __getitem__(self, s: Iterable[int]) -> Scalar:
        return self.values[tuple(s)]

    def __iter__(self) -> Iterator[Subset]:
        return iter(self.values)

    def items(self):
        return self.values.items()

    def valuations(self) -> dict[Subset, Valuation]:
        return {s: val(v) for s, v in self.values.items()}

    def support(self) -> list[Subset]:
        return [s for s, v in self.values.items() if v]

    def limits(self) -> "MinorTable":
        return MinorTable(self.n, self.r, {s: limit0(v) for s, v in self.values.items()})


def _unit_minor(red: Matrix, pivots: list[int], pos: Mapping[int, int], s: Subset) -> Scalar:
    """det(R_S) for R in RREF with unit columns at ``pivots``.

    Columns of R_S that are pivot columns are unit vectors; expanding along
    them leaves the minor on rows {i : pivots[i] not in S} and the non-pivot
    columns of S, times the sign of the induced column permutation.
    """
    r = len(pivots)
    free_rows = [i for i in range(r) if pivots[i] not in s]
    it = iter(free_rows)
    targets = []
    extra = []
    for c in s:
        i = pos.get(c)
        if i is None:
            targets.append(next(it))
            extra.append(c)
        else:
            targets.append(i)
    inversions = sum(1 for a in range(r) for b in range(a + 1, r) if targets[a] > targets[b])
    k = len(extra)
    if k == 0:
        d = rational(1)
    else:
        d = det(red.submatrix(free_rows, extra))
    return -d if inversions & 1 else d


def minor_table(m: Matrix, r: int | None = None, *, limit: int | None = None) -> MinorTable:
    """Every r x r minor on column subsets of an r x n matrix.

    One row reduction gives ``R = M_{S0}^{-1} M`` for the lexicographically
    first basis ``S0``; then ``det(M_S) = det(M_{S0}) * det(R_S)`` and
    ``det(R_S)`` collapses to a small minor of ``R``.
    """
    rows, n = m.shape
    if r is not None and r != rows:
        raise DimensionMismatch(f"matrix has {rows} rows, expected {r}")
    r = rows
    _check_size(n, limit)
    subsets = list(combinations(range(n), r))
    red, pivots = rref(m)
    if len(pivots) < r:
        zero = rational(0)
        return MinorTable(n, r, {s: zero for s in subsets})
    base = det(m.columns(pivots))
    pos = {c: i for i, c in enumerate(pivots)}
    values = {}
    for s in subsets:
        d = _unit_minor(red, pivots, pos, s)
        values[s] = base * d if d else d
    return MinorTable(n, r, values)


def factor_rank_one(a: Matrix) -> tuple[tuple[Scalar, ...], tuple[Scalar, ...]]:
    """Vectors ``u, v`` with ``a == outer(u, v)``; zeros for the zero matrix."""
    for i, row in enumerate(a.rows):
        for j, x in enumerate(row):
            if x:
                u = a.column(j)
                v = tuple(y / x for y in row)
                if outer(u, v) != a:
                    raise RankTooHigh(f"matrix has rank {rank(a)} > 1")
                return u, v
    zero = rational(0)
    return (zero,) * a.nrows, (zero,) * a.ncols


# ---------------------------------------------------------------------------
# multilinear polynomials and rank-one symbolic determinants


@dataclass(frozen=True)
class MultilinearPoly:
    """``sum_S coeffs[S] * prod_{i in S} x_i`` with no zero coefficients stored."""

    n: int
    coeffs: Mapping[Subset, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        clean = {tuple(s): c for s, c in self.coeffs.items() if c}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __getitem__(self, s: Iterable[int]) -> Scalar:
        return self.coeffs.get(tuple(s), rational(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def evaluate(self, x: Sequence[object]) -> Scalar:
        if len(x) != self.n:
            raise DimensionMismatch(f"need {self.n} values, got {len(x)}")
        acc = rational(0)
        for s, c in self.coeffs.items():
            t = c
            for i in s:
                t = t * x[i]
            acc = acc + t
        return acc

    def limit(self) -> "MultilinearPoly":
        """Coefficientwise limit at eps = 0; names the first failing subset."""
        out = {}
        for s, c in self.coeffs.items():
            v = val(c)
            if v is not INF and v < 0:
                raise LimitUndefined(
                    f"coefficient of X_{_fmt_subset(s)} has valuation {v}; the limit does not exist",
                    subset=s,
                )
            out[s] = limit0(c)
        return MultilinearPoly(self.n, out)

    def first_difference(self, other: "MultilinearPoly") -> Subset | None:
        keys = sorted(set(self.coeffs) | set(other.coeffs))
        for s in keys:
            if self[s] != other[s]:
                return s
        return None

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for s, c in self.coeffs.items():
            mono = "*".join(f"x{i + 1}" for i in s)
            terms.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(terms)


def _fmt_subset(s: Subset) -> str:
    return "{" + ",".join(str(i + 1) for i in s) + "}"


@dataclass(frozen=True)
class RankOneInstance:
    """``det(A0 + U diag(x) V^T)``: column i of U, V gives ``A_i = u^i (v^i)^T``."""

    U: Matrix
    V: Matrix
    A0: Matrix | None = None

    def __post_init__(self):
        if self.U.shape != self.V.shape:
            raise DimensionMismatch(f"U is {self.U.shape} but V is {self.V.shape}")
        if self.A0 is not None and self.A0.shape != (self.r, self.r):
            raise DimensionMismatch(f"A0 must be {self.r}x{self.r}, got {self.A0.shape}")

    @property
    def n(self) -> int:
        return self.U.ncols

    @property
    def r(self) -> int:
        return self.U.nrows

    @property
    def homogeneous(self) -> bool:
        return self.A0 is None or self.A0.is_zero()

    @classmethod
    def from_matrices(cls, coefficient_matrices: Sequence[Matrix], A0: Matrix | None = None) -> "RankOneInstance":
        """Factor each ``A_i`` as ``u v^T`` (raises RankTooHigh when rank >= 2)."""
        if not coefficient_matrices:
            raise DimensionMismatch("need at least one coefficient matrix")
        us, vs = [], []
        for a in coefficient_matrices:
            if a.nrows != a.ncols:
                raise NonSquare("coefficient matrices must be square")
            u, v = factor_rank_one(a)
            us.append(u)
            vs.append(v)
        return cls(Matrix.from_columns(us), Matrix.from_columns(vs), A0)

    def coefficient_matrix(self, i: int) -> Matrix:
        return outer(self.U.column(i), self.V.column(i))

    def assemble(self, x: Sequence[object]) -> Matrix:
        """``A0 + U diag(x) V^T`` at a concrete assignment."""
        if len(x) != self.n:
            raise DimensionMismatch(f"need {self.n} values, got {len(x)}")
        m = self.U.scale_columns([scalar(t) for t in x]) @ self.V.T
        return m if self.A0 is None else self.A0 + m

    def is_eps_free(self) -> bool:
        return (
            self.U.is_eps_free()
            and self.V.is_eps_free()
            and (self.A0 is None or self.A0.is_eps_free())
        )


def assemble(instance: RankOneInstance, x: Sequence[object]) -> Matrix:
    return instance.assemble(x)


def expand_cauchy_binet(instance: RankOneInstance, *, limit: int | None = None) -> MultilinearPoly:
    """Coefficients ``det(U_S) det(V_S)`` of the homogeneous rank-one determinant."""
    if not instance.homogeneous:
        raise ValueError("Cauchy-Binet expansion needs A0 = 0")
    tu = minor_table(instance.U, limit=limit)
    tv = minor_table(instance.V, limit=limit)
    coeffs = {}
    for s, a in tu.items():
        if a:
            b = tv.values[s]
            if b:
                coeffs[s] = a * b
    return MultilinearPoly(instance.n, coeffs)


def extract_coefficients(instance: RankOneInstance, *, limit: int | None = None) -> MultilinearPoly:
    """Full coefficient table of ``det(A0 + sum A_i x_i)``.

    The determinant is multilinear in x, so its value at the 0/1 point
    ``1_T`` is ``sum_{S <= T} c_S``; Moebius inversion over the subset
    lattice recovers every ``c_S`` from the 2^n evaluations.
    """
    n, r = instance.n, instance.r
    _check_size(n, limit)
    base = instance.A0 if instance.A0 is not None else Matrix.zeros(r, r)
    outers = [instance.coefficient_matrix(i) for i in range(n)]
    mats: list[Matrix] = [base]
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        mats.append(mats[mask & (mask - 1)] + outers[low])
    vals = [det(m) for m in mats]
    for i in range(n):
        bit = 1 << i
        for mask in range(1 << n):
            if mask & bit:
                prev = vals[mask ^ bit]
                if prev:
                    vals[mask] = vals[mask] - prev
    coeffs = {}
    for mask, c in enumerate(vals):
        if c:
            coeffs[tuple(i for i in range(n) if mask >> i & 1)] = c
    return MultilinearPoly(n, coeffs)


def check_grassmann_plucker(a: Sequence[Sequence[object]], b: Sequence[Sequence[object]]) -> Scalar:
    """``sum_i (-1)^i det(a_0..a_n without a_i) * det(a_i, b_2..b_n)``; always 0.

    ``a`` holds n + 1 vectors and ``b`` holds n - 1 vectors, all of length n.
    The alternating sign is required: without it the sum is nonzero in general.
    """
    n = len(a) - 1
    if n < 1 or len(b) != n - 1 or any(len(v) != n for v in (*a, *b)):
        raise DimensionMismatch("need n+1 vectors a_i and n-1 vectors b_j in dimension n")
    total = rational(0)
    for i in range(n + 1):
        ui = Matrix.from_columns([a[j] for j in range(n + 1) if j != i])
        vi = Matrix.from_columns([a[i], *b])
        term = det(ui) * det(vi)
        total = total - term if i & 1 else total + term
    return total
