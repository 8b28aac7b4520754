"""Debordering of rank-one symbolic determinants.

Input: ``det(A0 + sum_i A_i x_i)`` over Q(eps), each ``A_i = u^i (v^i)^T``,
whose coefficientwise limit at eps = 0 exists. Output: base-field matrices
``B0, B_1 .. B_n`` (each ``B_i`` of rank <= 1) computing exactly that limit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .errors import CertificateFailure, LimitUndefined
from .extract import extract
from .matrix import (
    Matrix,
    MinorTable,
    MultilinearPoly,
    RankOneInstance,
    _fmt_subset,
    expand_cauchy_binet,
    extract_coefficients,
    minor_table,
    outer,
    rank,
)
from .matroid import from_minor_table
from .splitting import SplitCertificate, normalize_pair

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DeborderOutput:
    """Exact representation ``det(B0 + U_hat diag(x) V_hat^T)`` of the limit.

    ``B0`` is None in the homogeneous case. ``dimension`` is the size of the
    ``B_i``: r when A0 = 0, n + r otherwise.
    """

    U_hat: Matrix
    V_hat: Matrix
    B0: Matrix | None
    dimension: int
    limit_poly: MultilinearPoly
    certificate: SplitCertificate | None

    def instance(self) -> RankOneInstance:
        return RankOneInstance(self.U_hat, self.V_hat, self.B0)

    def B(self, i: int) -> Matrix:
        """``B_0`` for i = 0, else the rank-<=1 matrix multiplying ``x_i`` (1-based)."""
        if i == 0:
            return self.B0 if self.B0 is not None else Matrix.zeros(self.dimension, self.dimension)
        return outer(self.U_hat.column(i - 1), self.V_hat.column(i - 1))

    def ranks(self) -> list[int]:
        """Rank of each ``B_i``, i = 1..n (0 or 1)."""
        return [rank(self.B(i)) for i in range(1, self.U_hat.ncols + 1)]


def check_border_limit(instance: RankOneInstance) -> MultilinearPoly:
    """Coefficientwise eps -> 0 limit of the instance's determinant polynomial."""
    return extract_coefficients(instance).limit()


def _product_limits(tu: MinorTable, tv: MinorTable) -> MultilinearPoly:
    coeffs = {}
    for s, a in tu.items():
        b = tv.values[s]
        if a and b:
            coeffs[s] = a * b
    return MultilinearPoly(tu.n, coeffs).limit()


def _split_and_extract(
    u: Matrix, v: Matrix
) -> tuple[Matrix, Matrix, MultilinearPoly, SplitCertificate | None]:
    """Core of the homogeneous case: returns U_hat, V_hat, limit polynomial, certificate."""
    r, n = u.shape
    tu, tv = minor_table(u), minor_table(v)
    limit_poly = _product_limits(tu, tv)
    zero = Matrix.zeros(r, n)
    if not limit_poly.coeffs:
        # rank(U) < r, rank(V) < r, no common base, or m* > 0: the limit is 0
        logger.info("limit polynomial is identically zero; emitting zero matrices")
        return zero, zero, limit_poly, None
    m1, m2 = from_minor_table(tu), from_minor_table(tv)
    pair = normalize_pair(u, v, m1, m2)
    cert = pair.certificate
    eu = extract(pair.U_tilde, pair.minor_table_u(tu))
    ev = extract(pair.V_tilde, pair.minor_table_v(tv))
    return eu.U_hat, ev.U_hat, limit_poly, cert


def deborder_homogeneous(instance: RankOneInstance, *, certify: str = "mobius") -> DeborderOutput:
    """Case A0 = 0: output ``B_i`` are r x r.

    ``certify`` selects how the output is re-verified against the limit:
    ``"mobius"`` (full coefficient extraction, 2^n determinants) or
    ``"cauchy_binet"`` (minor products, C(n, r) pairs).
    """
    if not instance.homogeneous:
        raise ValueError("deborder_homogeneous needs A0 = 0; use deborder_general")
    u_hat, v_hat, limit_poly, cert = _split_and_extract(instance.U, instance.V)
    out = DeborderOutput(u_hat, v_hat, None, instance.r, limit_poly, cert)
    _certify(out.instance(), limit_poly, certify)
    return out


def _certify(exact: RankOneInstance, expected: MultilinearPoly, how: str) -> None:
    if how == "mobius":
        got = extract_coefficients(exact)
    elif how == "cauchy_binet":
        got = expand_cauchy_binet(exact)
    else:
        raise ValueError(f"unknown certification method {how!r}")
    if got != expected:
        s = got.first_difference(expected)
        raise CertificateFailure(f"output disagrees with the limit at X_{_fmt_subset(s)}")


def build_constant_reduction(instance: RankOneInstance) -> RankOneInstance:
    """Homogeneous instance in 2n + r variables whose determinant, at
    ``x_{n+1} = .. = x_{2n+r} = 1``, is ``det(A0 + U diag(x) V^T)``.

    ``U' = [[0, I_n, V^T], [-U, 0, A0]]`` and ``V' = [[I_n, I_n, 0], [0, 0, I_r]]``;
    by the Schur complement ``det(U' X' V'^T) = det(X1) det(X2) det(A0 + U X X1^{-1} V^T)``.
    """
    n, r = instance.n, instance.r
    a0 = instance.A0 if instance.A0 is not None else Matrix.zeros(r, r)
    Z, I = Matrix.zeros, Matrix.identity
    u2 = Matrix.block([[Z(n, n), I(n), instance.V.T], [-instance.U, Z(r, n), a0]])
    v2 = Matrix.block([[I(n), I(n), Z(n, r)], [Z(r, n), Z(r, n), I(r)]])
    return RankOneInstance(u2, v2)


def deborder_general(instance: RankOneInstance) -> DeborderOutput:
    """Any A0. Homogeneous inputs are delegated; otherwise the output is (n+r) x (n+r)
    with ``B0 = sum_{i > n} B_i`` from the debordered reduced instance."""
    if instance.homogeneous:
        return deborder_homogeneous(RankOneInstance(instance.U, instance.V))
    n, r = instance.n, instance.r
    limit_poly = check_border_limit(instance)
    reduced = build_constant_reduction(instance)
    try:
        u_hat, v_hat, _, cert = _split_and_extract(reduced.U, reduced.V)
    except LimitUndefined as exc:
        raise CertificateFailure(f"reduced instance has no limit although the input does: {exc}") from exc
    rest = range(n, 2 * n + r)
    b0 = u_hat.columns(rest) @ v_hat.columns(rest).T
    out = DeborderOutput(u_hat.columns(range(n)), v_hat.columns(range(n)), b0, n + r, limit_poly, cert)
    _certify(out.instance(), limit_poly, "mobius")
    return out


def deborder(instance: RankOneInstance) -> DeborderOutput:
    return deborder_general(instance)
