"""JSON forms of scalars, matrices, polynomials, instances and instance files.

* rational: ``"p/q"`` (``"p"`` when q = 1)
* rational function: ``{"num": [[e, "p/q"], ...], "den": [...]}``
* matrix: ``{"rows": r, "cols": n, "entries": [[scalar, ...], ...]}``
* multilinear polynomial: ``[{"subset": [i, ...], "coeff": scalar}, ...]``, 1-based,
  subsets in lexicographic order

Readers also accept ints and expression strings such as ``"1/eps"`` for
scalars. Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .matrix import Matrix, MinorTable, MultilinearPoly, RankOneInstance, scalar
from .principal import PrincipalMinorInstance
from .scalars import INF, RationalFunction, format_rational, rational, to_rational, val

SCHEMA_VERSION = "1"
KINDS = ("rank_one_det", "principal_minor")


class SchemaError(ValueError):
    pass


def _expect_keys(obj: Any, required: set[str], optional: set[str] = frozenset(), what: str = "object") -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{what} must be a JSON object")
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - set(optional)
    if missing:
        raise SchemaError(f"{what} is missing {sorted(missing)}")
    if unknown:
        raise SchemaError(f"{what} has unknown fields {sorted(unknown)}")


def dump_scalar(x: object) -> Any:
    if isinstance(x, RationalFunction) and not x.is_constant():
        return x.to_json()
    return format_rational(to_rational(x))


def load_scalar(obj: Any) -> object:
    if isinstance(obj, bool):
        raise SchemaError("booleans are not scalars")
    if isinstance(obj, int):
        return rational(obj)
    if isinstance(obj, str):
        return scalar(obj)
    if isinstance(obj, dict):
        return RationalFunction.from_json(obj)
    raise SchemaError(f"not an exact scalar: {obj!r}")


def dump_valuation(v) -> Any:
    return "+inf" if v is INF else v


def matrix_to_json(m: Matrix) -> dict:
    return {"rows": m.nrows, "cols": m.ncols, "entries": [[dump_scalar(x) for x in row] for row in m.rows]}


def matrix_from_json(obj: Any) -> Matrix:
    _expect_keys(obj, {"rows", "cols", "entries"}, what="matrix")
    rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
    if not isinstance(entries, list) or len(entries) != rows:
        raise SchemaError(f"matrix declares {rows} rows but has {len(entries) if isinstance(entries, list) else '?'}")
    for row in entries:
        if not isinstance(row, list) or len(row) != cols:
            raise SchemaError(f"matrix row does not have {cols} entries")
    m = Matrix([[load_scalar(x) for x in row] for row in entries], ncols=cols)
    if m.is_eps_free():
        m = m.to_base_field()
    return m


def subset_to_json(s: tuple[int, ...]) -> list[int]:
    return [i + 1 for i in s]


def subset_from_json(obj: Any, n: int) -> tuple[int, ...]:
    if not isinstance(obj, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in obj):
        raise SchemaError(f"subset must be a list of integers: {obj!r}")
    s = tuple(i - 1 for i in obj)
    if list(s) != sorted(set(s)) or any(not 0 <= i < n for i in s):
        raise SchemaError(f"subset {obj!r} must be strictly increasing within 1..{n}")
    return s


def poly_to_json(p: MultilinearPoly) -> list[dict]:
    return [{"subset": subset_to_json(s), "coeff": dump_scalar(c)} for s, c in sorted(p.coeffs.items())]


def poly_from_json(obj: Any, n: int) -> MultilinearPoly:
    if not isinstance(obj, list):
        raise SchemaError("polynomial must be a list of terms")
    coeffs = {}
    for term in obj:
        _expect_keys(term, {"subset", "coeff"}, what="polynomial term")
        s = subset_from_json(term["subset"], n)
        if s in coeffs:
            raise SchemaError(f"duplicate monomial {term['subset']}")
        coeffs[s] = load_scalar(term["coeff"])
    return MultilinearPoly(n, coeffs)


def minor_table_to_json(t: MinorTable, *, with_val: bool = False) -> dict:
    minors = []
    for s, d in t.items():
        item = {"subset": subset_to_json(s), "value": dump_scalar(d)}
        if with_val:
            item["val"] = dump_valuation(val(d))
        minors.append(item)
    return {"n": t.n, "r": t.r, "minors": minors}


def instance_to_json(inst: RankOneInstance) -> dict:
    return {
        "n": inst.n,
        "r": inst.r,
        "A0": matrix_to_json(inst.A0) if inst.A0 is not None else None,
        "U": matrix_to_json(inst.U),
        "V": matrix_to_json(inst.V),
    }


def instance_from_json(obj: Any) -> RankOneInstance:
    """Factored form ``{n, r, A0, U, V}`` or matrix form ``{n, r, A0, A: [...]}``."""
    if isinstance(obj, dict) and "A" in obj:
        _expect_keys(obj, {"n", "r", "A"}, {"A0"}, what="rank-one instance")
        a0 = matrix_from_json(obj["A0"]) if obj.get("A0") is not None else None
        mats = [matrix_from_json(a) for a in obj["A"]]
        inst = RankOneInstance.from_matrices(mats, a0)
    else:
        _expect_keys(obj, {"n", "r", "U", "V"}, {"A0"}, what="rank-one instance")
        a0 = matrix_from_json(obj["A0"]) if obj.get("A0") is not None else None
        inst = RankOneInstance(matrix_from_json(obj["U"]), matrix_from_json(obj["V"]), a0)
    if (inst.n, inst.r) != (obj["n"], obj["r"]):
        raise SchemaError(f"declared n={obj['n']}, r={obj['r']} but matrices give n={inst.n}, r={inst.r}")
    return inst


def pm_instance_to_json(inst: PrincipalMinorInstance) -> dict:
    return {"A": matrix_to_json(inst.A), "k": inst.k}


def pm_instance_from_json(obj: Any) -> PrincipalMinorInstance:
    _expect_keys(obj, {"A", "k"}, what="principal-minor instance")
    return PrincipalMinorInstance(matrix_from_json(obj["A"]), obj["k"])


def make_instance_file(payload: RankOneInstance | PrincipalMinorInstance, ground_truth: MultilinearPoly | None = None) -> dict:
    if isinstance(payload, RankOneInstance):
        doc = {"schema_version": SCHEMA_VERSION, "kind": "rank_one_det", "payload": instance_to_json(payload)}
    else:
        doc = {"schema_version": SCHEMA_VERSION, "kind": "principal_minor", "payload": pm_instance_to_json(payload)}
    if ground_truth is not None:
        doc["ground_truth"] = poly_to_json(ground_truth)
    return doc


def parse_instance_file(doc: Any) -> tuple[RankOneInstance | PrincipalMinorInstance, MultilinearPoly | None]:
    _expect_keys(doc, {"schema_version", "kind", "payload"}, {"ground_truth"}, what="instance file")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    kind = doc["kind"]
    if kind == "rank_one_det":
        inst = instance_from_json(doc["payload"])
        truth = poly_from_json(doc["ground_truth"], inst.n) if doc.get("ground_truth") is not None else None
        return inst, truth
    if kind == "principal_minor":
        if doc.get("ground_truth") is not None:
            raise SchemaError("ground_truth is only defined for rank_one_det files")
        return pm_instance_from_json(doc["payload"]), None
    raise SchemaError(f"unknown kind {kind!r}; expected one of {KINDS}")


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def read_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_json(path: str | Path, doc: Any) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


__all__ = [
    "SchemaError",
    "dump_scalar",
    "load_scalar",
    "matrix_to_json",
    "matrix_from_json",
    "poly_to_json",
    "poly_from_json",
    "minor_table_to_json",
    "instance_to_json",
    "instance_from_json",
    "pm_instance_from_json",
    "make_instance_file",
    "parse_instance_file",
    "dumps",
    "read_json",
    "write_json",
]
