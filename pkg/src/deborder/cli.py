"""``deborder`` command-line tool.

Exit codes: 0 success, 1 I/O or parse error, 2 limit does not exist,
3 rank precondition violated, 4 internal certificate failure, 5 verify mismatch.
Data goes to files or stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import io
from .errors import (
    CertificateFailure,
    DeborderError,
    InstanceTooLarge,
    LimitUndefined,
    NoCommonBase,
    NonSquare,
    RankError,
)
from .generate import GeneratorSpec, generate
from .matrix import RankOneInstance, _fmt_subset, extract_coefficients, minor_table
from .matroid import from_matrix
from .pipeline import DeborderOutput, check_border_limit, deborder
from .principal import PrincipalMinorInstance, close_principal_minors
from .scalars import INF, limit0, parse_expression, val
from .splitting import solve_split

log = logging.getLogger("deborder")

EXIT_OK = 0
EXIT_IO = 1
EXIT_NO_LIMIT = 2
EXIT_RANK = 3
EXIT_CERTIFICATE = 4
EXIT_MISMATCH = 5


def _load(path: str | None):
    if path is None or path == "-":
        return json.load(sys.stdin)
    return io.read_json(path)


def _emit(doc, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(io.dumps(doc))
    else:
        io.write_json(path, doc)


def _rank_one(doc) -> RankOneInstance:
    inst, _ = io.parse_instance_file(doc)
    if not isinstance(inst, RankOneInstance):
        raise io.SchemaError("expected a rank_one_det instance file")
    return inst


def _sidecar(path: str, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(f"{p.stem}.{suffix}.json")


def cmd_deborder(args) -> int:
    inst = _rank_one(_load(args.input))
    out: DeborderOutput = deborder(inst)
    debordered = io.make_instance_file(out.instance())
    cert = out.certificate.to_json() if out.certificate is not None else None
    limit = io.poly_to_json(out.limit_poly)
    log.info("dimension %d, ranks of B_i: %s", out.dimension, out.ranks())
    if args.output is None or args.output == "-":
        _emit({"debordered": debordered, "certificate": cert, "limit_poly": limit}, None)
    else:
        io.write_json(args.output, debordered)
        io.write_json(_sidecar(args.output, "certificate"), cert)
        io.write_json(_sidecar(args.output, "limit"), limit)
    return EXIT_OK


def _debordered_instance(doc) -> RankOneInstance:
    # accept the combined stdout document of ``deborder`` as well
    if isinstance(doc, dict) and "debordered" in doc:
        doc = doc["debordered"]
    return _rank_one(doc)


def cmd_verify(args) -> int:
    original = _rank_one(_load(args.original))
    exact = _debordered_instance(_load(args.debordered))
    if original.n != exact.n:
        raise io.SchemaError(f"instances have n = {original.n} and n = {exact.n}")
    expected = check_border_limit(original)
    got = extract_coefficients(exact)
    if not exact.is_eps_free():
        got = got.limit()
    if got != expected:
        s = got.first_difference(expected)
        print(
            f"mismatch at X_{_fmt_subset(s)}: expected {expected[s]}, got {got[s]}",
            file=sys.stderr,
        )
        return EXIT_MISMATCH
    print("ok", file=sys.stderr)
    return EXIT_OK


def cmd_generate(args) -> int:
    spec = GeneratorSpec(args.n, args.r, args.seed, args.z_range, args.mixing_steps, args.with_a0)
    g = generate(spec)
    _emit(io.make_instance_file(g.instance, g.ground_truth), args.output)
    return EXIT_OK


def cmd_val(args) -> int:
    if args.expression is not None:
        x = parse_expression(args.expression)
    else:
        x = io.load_scalar(_load(args.input))
    v = val(x)
    doc = {"value": io.dump_scalar(x), "val": io.dump_valuation(v), "limit": None}
    if v is INF or v >= 0:
        doc["limit"] = io.dump_scalar(limit0(x))
    _emit(doc, args.output)
    return EXIT_OK


def cmd_minors(args) -> int:
    doc = _load(args.input)
    if isinstance(doc, dict) and "matrix" in doc:
        io._expect_keys(doc, {"matrix"}, what="minors input")
        doc = doc["matrix"]
    m = io.matrix_from_json(doc)
    _emit(io.minor_table_to_json(minor_table(m), with_val=True), args.output)
    return EXIT_OK


def cmd_weight_split(args) -> int:
    doc = _load(args.input)
    io._expect_keys(doc, {"U", "V"}, what="weight-split input")
    u, v = io.matrix_from_json(doc["U"]), io.matrix_from_json(doc["V"])
    if u.shape != v.shape:
        raise io.SchemaError(f"U is {u.shape[0]}x{u.shape[1]} but V is {v.shape[0]}x{v.shape[1]}")
    cert = solve_split(from_matrix(u), from_matrix(v))
    out = cert.to_json()
    log.info("f1 = %d, f2 = %d, %d ascent steps", cert.f1, cert.f2, cert.steps)
    _emit(out, args.output)
    return EXIT_OK


def cmd_pm_closure(args) -> int:
    doc = _load(args.input)
    if isinstance(doc, dict) and "kind" in doc:
        inst, _ = io.parse_instance_file(doc)
        if not isinstance(inst, PrincipalMinorInstance):
            raise io.SchemaError("expected a principal_minor instance file")
    else:
        inst = io.pm_instance_from_json(doc)
    b, limits = close_principal_minors(inst)
    _emit({"B": io.matrix_to_json(b), "minors": io.minor_table_to_json(limits)}, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="deborder", description="Exact debordering of rank-one symbolic determinants.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def with_io(sp: argparse.ArgumentParser, need_input: bool = True) -> argparse.ArgumentParser:
        if need_input:
            sp.add_argument("--input", help="input JSON file ('-' or omitted: stdin)")
        sp.add_argument("--output", help="output JSON file ('-' or omitted: stdout)")
        return sp

    sp = with_io(sub.add_parser("deborder", help="replace a border instance by an exact one"))
    sp.set_defaults(func=cmd_deborder)

    sp = sub.add_parser("verify", help="compare limit coefficients of two instances")
    sp.add_argument("original")
    sp.add_argument("debordered")
    sp.set_defaults(func=cmd_verify)

    sp = with_io(sub.add_parser("generate", help="sample a border instance with a known limit"), need_input=False)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--z-range", type=int, default=3)
    sp.add_argument("--mixing-steps", type=int, default=4)
    sp.add_argument("--with-a0", action="store_true")
    sp.set_defaults(func=cmd_generate)

    sp = with_io(sub.add_parser("val", help="valuation and limit of a scalar"))
    sp.add_argument("expression", nargs="?", help='e.g. "(eps^2-1)/eps"')
    sp.set_defaults(func=cmd_val)

    sp = with_io(sub.add_parser("minors", help="maximal minors with valuations"))
    sp.set_defaults(func=cmd_minors)

    sp = with_io(sub.add_parser("weight-split", help="weight-splitting certificate for a pair U, V"))
    sp.set_defaults(func=cmd_weight_split)

    sp = with_io(sub.add_parser("pm-closure", help="exact matrix with the limiting size-k principal minors"))
    sp.set_defaults(func=cmd_pm_closure)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr, format="%(message)s")
    try:
        return args.func(args)
    except LimitUndefined as exc:
        print(f"limit undefined: {exc}", file=sys.stderr)
        return EXIT_NO_LIMIT
    except (RankError, NoCommonBase, NonSquare) as exc:
        print(f"rank precondition violated: {exc}", file=sys.stderr)
        return EXIT_RANK
    except CertificateFailure as exc:
        print(f"certificate failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATE
    except (OSError, json.JSONDecodeError, io.SchemaError, InstanceTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DeborderError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
