"""Seeded random border instances with known limits.

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64 seeded through
a SeedSequence, so streams can be split with ``spawn``). Exact values are drawn
from small integers and turned into rationals before any arithmetic happens,
so output depends only on the seed and the numpy bit generator.

Construction: exact ``U_hat``, ``V_hat`` of full row rank, an integral shift
``z``, and ``U = U_hat diag(eps^-z)``, ``V = V_hat diag(eps^z)``. Every minor
product ``det(U_S) det(V_S)`` then equals ``det(U_hat_S) det(V_hat_S)``, and
row transvections (determinant 1) keep it that way, so the limit polynomial
is known in advance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import Matrix, MultilinearPoly, RankOneInstance, expand_cauchy_binet, extract_coefficients, rank
from .scalars import EPS, rational

ENTRY_RANGE = 3
# nonzero transvection coefficients
MIX_COEFFS = ("-2", "-1", "-1/2", "1/2", "1", "2")
MAX_RESAMPLES = 1000


@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    r: int
    seed: int
    z_range: int = 3
    mixing_steps: int = 4
    include_A0: bool = False

    def __post_init__(self):
        if not self.n >= self.r >= 1:
            raise ValueError(f"need n >= r >= 1, got n={self.n}, r={self.r}")
        if self.z_range < 0 or self.mixing_steps < 0:
            raise ValueError("z_range and mixing_steps must be nonnegative")


@dataclass(frozen=True)
class GeneratedInstance:
    instance: RankOneInstance
    ground_truth: MultilinearPoly
    U_hat: Matrix
    V_hat: Matrix
    A0_hat: Matrix | None
    z: tuple[int, ...]


def _int_matrix(rng: np.random.Generator, rows: int, cols: int, bound: int = ENTRY_RANGE) -> Matrix:
    a = rng.integers(-bound, bound + 1, size=(rows, cols))
    return Matrix([[rational(int(x)) for x in row] for row in a], ncols=cols)


def full_rank_matrix(rng: np.random.Generator, rows: int, cols: int) -> Matrix:
    for _ in range(MAX_RESAMPLES):
        m = _int_matrix(rng, rows, cols)
        if rank(m) == rows:
            return m
    raise RuntimeError("could not sample a full-row-rank matrix")


def eps_diag_scale(m: Matrix, z: tuple[int, ...]) -> Matrix:
    return m.scale_columns([EPS**t if t else rational(1) for t in z])


def transvections(rng: np.random.Generator, rows: int, steps: int) -> list[tuple[int, int, object]]:
    """``steps`` operations ``row_i += c row_j`` with i != j; empty for one row."""
    if rows < 2:
        return []
    ops = []
    for _ in range(steps):
        i, j = (int(t) for t in rng.choice(rows, size=2, replace=False))
        c = rational(MIX_COEFFS[int(rng.integers(len(MIX_COEFFS)))])
        ops.append((i, j, c))
    return ops


def apply_row_ops(m: Matrix, ops) -> Matrix:
    rows = [list(row) for row in m.rows]
    for i, j, c in ops:
        rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
    return Matrix(rows, ncols=m.ncols)


def apply_col_ops(m: Matrix, ops) -> Matrix:
    return apply_row_ops(m.T, ops).T


def generate(spec: GeneratorSpec) -> GeneratedInstance:
    rng = np.random.default_rng(spec.seed)
    n, r = spec.n, spec.r
    for _ in range(MAX_RESAMPLES):
        u_hat = full_rank_matrix(rng, r, n)
        v_hat = full_rank_matrix(rng, r, n)
        a0_hat = _int_matrix(rng, r, r) if spec.include_A0 else None
        if a0_hat is not None and a0_hat.is_zero():
            continue
        if a0_hat is None:
            truth = expand_cauchy_binet(RankOneInstance(u_hat, v_hat))
        else:
            truth = extract_coefficients(RankOneInstance(u_hat, v_hat, a0_hat))
        if truth.coeffs:
            break
    else:
        raise RuntimeError("could not sample an instance with a nonzero limit")
    z = tuple(int(t) for t in rng.integers(-spec.z_range, spec.z_range + 1, size=n))
    g = transvections(rng, r, spec.mixing_steps)
    h = transvections(rng, r, spec.mixing_steps)
    u = apply_row_ops(eps_diag_scale(u_hat, tuple(-t for t in z)), g)
    v = apply_row_ops(eps_diag_scale(v_hat, z), h)
    # det(G A0 H^T + G U X V^T H^T) = det(A0_hat + U_hat X V_hat^T)
    a0 = apply_col_ops(apply_row_ops(a0_hat, g), h) if a0_hat is not None else None
    return GeneratedInstance(RankOneInstance(u, v, a0), truth, u_hat, v_hat, a0_hat, z)


def nonnegative_border_matrix(rng: np.random.Generator, r: int, n: int, z_range: int = 3, mixing_steps: int = 4) -> tuple[Matrix, Matrix]:
    """``(U, W)`` with ``U = G W diag(eps^z)``, z >= 0 and det G = 1, so every
    maximal minor of U has valuation >= 0."""
    w = full_rank_matrix(rng, r, n)
    z = tuple(int(t) for t in rng.integers(0, z_range + 1, size=n))
    return apply_row_ops(eps_diag_scale(w, z), transvections(rng, r, mixing_steps)), w
