"""Base-field matrix whose maximal minors are the eps -> 0 limits of a given matrix's."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CertificateFailure, LimitUndefined
from .matrix import Matrix, MinorTable, Subset, _fmt_subset, inverse, minor_table
from .scalars import INF, Rational, limit0, rational, val


@dataclass(frozen=True)
class ExtractionResult:
    U_hat: Matrix
    pivot: Subset | None
    alpha: Rational


def extract(u: Matrix, table: MinorTable | None = None) -> ExtractionResult:
    """Build ``U_hat`` over Q with ``det(U_hat_S) = lim det(U_S)`` for all S.

    Requires every maximal minor to have valuation >= 0. The pivot ``S*`` is
    the lexicographically first subset whose minor has valuation 0;
    ``U' = U_{S*}^{-1} U`` then has entries with limits, and scaling the first
    row of ``lim U'`` by ``alpha = lim det(U_{S*})`` fixes every minor.
    An eps-free ``u`` is returned unchanged.
    """
    table = minor_table(u) if table is None else table
    pivot: Subset | None = None
    for s, d in table.items():
        v = val(d)
        if v is not INF and v < 0:
            raise LimitUndefined(f"minor on {_fmt_subset(s)} has valuation {v}", subset=s)
        if v == 0 and pivot is None:
            pivot = s
    if pivot is None:
        return ExtractionResult(Matrix.zeros(*u.shape), None, rational(0))
    alpha = limit0(table[pivot])
    if u.is_eps_free():
        return ExtractionResult(u.to_base_field(), pivot, alpha)
    reduced = inverse(u.columns(pivot)) @ u
    for i, row in enumerate(reduced.rows):
        for j, x in enumerate(row):
            if val(x) < 0:
                raise CertificateFailure(f"entry ({i + 1},{j + 1}) of U_S*^-1 U has negative valuation")
    u_tilde = reduced.limit0()
    return ExtractionResult(u_tilde.scale_row(0, alpha), pivot, alpha)
