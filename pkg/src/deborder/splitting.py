"""Weight splitting for two valuated linear matroids on one ground set.

For ``f1(z) = min_{B in B1} omega1(B) + z(B)`` and
``f2(z) = min_{B in B2} omega2(B) - z(B)``, weak duality gives
``f1(z) + f2(z) <= m* = min_{B in B1 & B2} omega1(B) + omega2(B)`` for every
integer z, and an integral z attaining equality always exists. The function
``g = f1 + f2`` is L-concave, so steepest ascent with steps ``+-1_S`` reaches
its maximum; the result is checked against the exhaustive ``m*`` before it is
returned.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CertificateFailure, LimitUndefined, NoCommonBase
from .matrix import Matrix, MinorTable, Subset, _fmt_subset
from .matroid import ValuatedLinearMatroid, from_matrix
from .scalars import EPS, Valuation, rational

logger = logging.getLogger(__name__)

# cap on the (subsets x bases) block evaluated at once
_BLOCK = 1 << 22


@dataclass(frozen=True)
class SplitCertificate:
    z: tuple[int, ...]
    m_star: int
    witness_base: Subset
    f1: int
    f2: int
    steps: int = 0

    def to_json(self) -> dict:
        return {"z": list(self.z), "m_star": self.m_star, "witness": [i + 1 for i in self.witness_base]}


def rescale_minor_table(table: MinorTable, z: tuple[int, ...], shift: int) -> MinorTable:
    """Minors of ``U diag(eps^z)`` with its first row times ``eps^shift``."""
    values = {}
    for s, d in table.items():
        k = sum(z[i] for i in s) + shift
        values[s] = d * EPS**k if d and k else d
    return MinorTable(table.n, table.r, values)


@dataclass(frozen=True)
class NormalizedPair:
    U_tilde: Matrix
    V_tilde: Matrix
    certificate: SplitCertificate
    shift: int

    def minor_table_u(self, original: MinorTable) -> MinorTable:
        """Minor table of ``U_tilde`` from that of the original U, without recomputation."""
        return rescale_minor_table(original, self.certificate.z, -self.shift)

    def minor_table_v(self, original: MinorTable) -> MinorTable:
        return rescale_minor_table(original, tuple(-t for t in self.certificate.z), self.shift)


def mval(u: Matrix | ValuatedLinearMatroid) -> Valuation:
    """Smallest valuation among the maximal minors of a full-row-rank matrix."""
    m = u if isinstance(u, ValuatedLinearMatroid) else from_matrix(u)
    return min(m.omega.values())


def common_base_minimum(m1: ValuatedLinearMatroid, m2: ValuatedLinearMatroid) -> tuple[Subset, int]:
    best: Subset | None = None
    best_val = 0
    for s, w1 in m1.omega.items():
        w2 = m2.omega.get(s)
        if w2 is None:
            continue
        if best is None or w1 + w2 < best_val:
            best, best_val = s, w1 + w2
    if best is None:
        raise NoCommonBase("the two matroids share no base; the expanded determinant is identically zero")
    return best, best_val


def _lex_masks(n: int) -> np.ndarray:
    """Bitmasks of all nonempty subsets of range(n), in lexicographic tuple order."""
    subsets = sorted(s for k in range(1, n + 1) for s in combinations(range(n), k))
    return np.array([sum(1 << i for i in s) for s in subsets], dtype=np.int64)


def _popcount(x: np.ndarray) -> np.ndarray:
    out = np.zeros(x.shape, dtype=np.int8)
    x = x.copy()
    while x.any():
        out += (x & 1).astype(np.int8)
        x >>= 1
    return out


class _Side:
    """One matroid in array form: base bitmasks, omega, incidence matrix."""

    def __init__(self, m: ValuatedLinearMatroid, sign: int):
        bases = list(m.omega)
        self.sign = sign
        self.omega = np.array([m.omega[s] for s in bases], dtype=np.int64)
        self.masks = np.array([sum(1 << i for i in s) for s in bases], dtype=np.int64)
        inc = np.zeros((len(bases), m.n), dtype=np.int64)
        for k, s in enumerate(bases):
            inc[k, list(s)] = 1
        self.inc = inc

    def values(self, z: np.ndarray) -> np.ndarray:
        return self.omega + self.sign * (self.inc @ z)


def solve_split(m1: ValuatedLinearMatroid, m2: ValuatedLinearMatroid) -> SplitCertificate:
    """Integral z with ``min(omega1 + z) + min(omega2 - z) = m*``."""
    witness, m_star = common_base_minimum(m1, m2)
    n = m1.n
    s1, s2 = _Side(m1, +1), _Side(m2, -1)
    masks = _lex_masks(n)
    nb = max(len(s1.omega), len(s2.omega))
    chunk = max(1, _BLOCK // max(nb, 1))
    cached: list[tuple[np.ndarray, np.ndarray]] | None = None
    if len(masks) <= chunk:
        cached = [(_popcount(masks[:, None] & s1.masks[None, :]), _popcount(masks[:, None] & s2.masks[None, :]))]

    z = np.zeros(n, dtype=np.int64)
    steps = 0
    while True:
        w1, w2 = s1.values(z), s2.values(z)
        g = int(w1.min() + w2.min())
        if g == m_star:
            break
        best_gain, best_idx = 0, -1
        for c, start in enumerate(range(0, len(masks), chunk)):
            if cached is not None:
                p1, p2 = cached[0]
            else:
                block = masks[start : start + chunk]
                p1 = _popcount(block[:, None] & s1.masks[None, :])
                p2 = _popcount(block[:, None] & s2.masks[None, :])
            # moving z by +1_S adds |B & S| on side 1 and subtracts it on side 2
            plus = (w1[None, :] + p1).min(axis=1) + (w2[None, :] - p2).min(axis=1)
            minus = (w1[None, :] - p1).min(axis=1) + (w2[None, :] + p2).min(axis=1)
            both = np.stack([plus, minus], axis=1).ravel() - g
            k = int(both.argmax())
            if both[k] > best_gain:
                best_gain, best_idx = int(both[k]), 2 * start + k
        if best_idx < 0:
            break
        sub, sign = divmod(best_idx, 2)
        mask = int(masks[sub])
        step = np.array([(mask >> i) & 1 for i in range(n)], dtype=np.int64)
        z = z + step if sign == 0 else z - step
        steps += 1
        logger.debug("weight split step %d: g %d -> %d", steps, g, g + best_gain)

    w1, w2 = s1.values(z), s2.values(z)
    f1, f2 = int(w1.min()), int(w2.min())
    zt = tuple(int(t) for t in z)
    if f1 + f2 != m_star:
        raise CertificateFailure(f"ascent stopped at g = {f1 + f2} below m* = {m_star} (z = {zt})")
    zw = sum(zt[i] for i in witness)
    if m1.omega[witness] + zw != f1 or m2.omega[witness] - zw != f2:
        raise CertificateFailure(f"witness base {_fmt_subset(witness)} does not attain both minima")
    logger.info("weight split: m* = %d reached after %d steps", m_star, steps)
    return SplitCertificate(zt, m_star, witness, f1, f2, steps)


def _eps_power(k: int):
    return rational(1) if k == 0 else EPS**k


def normalize_pair(
    u: Matrix,
    v: Matrix,
    m1: ValuatedLinearMatroid | None = None,
    m2: ValuatedLinearMatroid | None = None,
) -> NormalizedPair:
    """Rescale columns by ``eps^{+-z}`` and row 1 by ``eps^{-+c}`` so both mvals are 0.

    Every product ``det(U_S) det(V_S)`` is unchanged. ``m1``/``m2`` may be
    passed when the matroids of ``u`` and ``v`` are already known.
    """
    m1 = from_matrix(u) if m1 is None else m1
    m2 = from_matrix(v) if m2 is None else m2
    witness, m_star = common_base_minimum(m1, m2)
    if m_star < 0:
        raise LimitUndefined(
            f"minor product on {_fmt_subset(witness)} has valuation {m_star}; the limit does not exist",
            subset=witness,
        )
    if m_star > 0:
        raise ValueError("every minor product vanishes at eps = 0; nothing to normalize")
    cert = solve_split(m1, m2)
    u1 = u.scale_columns([_eps_power(t) for t in cert.z])
    v1 = v.scale_columns([_eps_power(-t) for t in cert.z])
    c = cert.f1
    ut = u1.scale_row(0, _eps_power(-c)) if c else u1
    vt = v1.scale_row(0, _eps_power(c)) if c else v1
    return NormalizedPair(ut, vt, cert, c)
