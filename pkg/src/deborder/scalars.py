"""Exact scalars: rationals and rational functions in one indeterminate eps.

Rationals are ``gmpy2.mpq`` values (interchangeable with
:class:`fractions.Fraction`: they compare and hash equal). Polynomials in eps are
sparse ``{exponent: coefficient}`` maps; :class:`RationalFunction` keeps a
canonical ``num/den`` pair so that equality is structural.

The valuation ``val(f)`` is the order of vanishing of ``f`` at eps = 0
(``+inf`` for the zero function) and ``limit0`` takes the limit at eps = 0
whenever ``val(f) >= 0``.
"""

from __future__ import annotations

import ast
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Union

from gmpy2 import mpq

from .errors import DivisionByZero, LimitUndefined

__all__ = [
    "Rational",
    "rational",
    "INF",
    "EPS",
    "Valuation",
    "EpsPolynomial",
    "RationalFunction",
    "val",
    "limit0",
    "scale_eps_power",
    "add",
    "mul",
    "neg",
    "inv",
    "as_ratfunc",
    "is_eps_free",
    "to_rational",
    "parse_rational",
    "format_rational",
    "parse_expression",
]


class _Infinity:
    """The valuation of the zero function. Absorbs addition, beats every int."""

    __slots__ = ()
    _instance: "_Infinity | None" = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "+inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self) -> int:
        return hash("deborder.INF")

    def __eq__(self, other: object) -> bool:
        return other is self

    def __lt__(self, other: object) -> bool:
        return False

    def __le__(self, other: object) -> bool:
        return other is self

    def __gt__(self, other: object) -> bool:
        return other is not self

    def __ge__(self, other: object) -> bool:
        return True

    def __add__(self, other: object) -> "_Infinity":
        if other is self or isinstance(other, int):
            return self
        return NotImplemented

    __radd__ = __add__


INF = _Infinity()
Valuation = Union[int, _Infinity]

Rational = type(mpq())
Poly = dict  # dict[int, mpq]; treated as immutable once built

_ONE = mpq(1)


def rational(x: object) -> Rational:
    """Exact rational from an int, Fraction, mpq or ``"p/q"`` string."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, bool) or not isinstance(x, (int, _RationalABC)):
        raise TypeError(f"cannot use {type(x).__name__} as an exact rational")
    return mpq(x)


# ---------------------------------------------------------------------------
# sparse polynomial kernels (dicts are never mutated after they are returned)


def _padd(p: Poly, q: Poly) -> Poly:
    if not p:
        return q
    if not q:
        return p
    out = dict(p)
    for e, c in q.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s = s + c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _pneg(p: Poly) -> Poly:
    return {e: -c for e, c in p.items()}


def _pscale(p: Poly, c: Rational) -> Poly:
    if not c:
        return {}
    return {e: a * c for e, a in p.items()}


def _pshift(p: Poly, k: int) -> Poly:
    if not k:
        return p
    return {e + k: c for e, c in p.items()}


def _pmul(p: Poly, q: Poly) -> Poly:
    if not p or not q:
        return {}
    if len(p) > len(q):
        p, q = q, p
    if len(p) == 1:
        ((e, c),) = p.items()
        return {e + f: c * d for f, d in q.items()}
    out: dict[int, Rational] = {}
    for e, c in p.items():
        for f, d in q.items():
            k = e + f
            s = out.get(k)
            out[k] = c * d if s is None else s + c * d
    return {k: v for k, v in out.items() if v}


def _pdivmod(p: Poly, q: Poly) -> tuple[Poly, Poly]:
    dq = max(q)
    lq = q[dq]
    rem = dict(p)
    quo: dict[int, Rational] = {}
    while rem:
        dr = max(rem)
        if dr < dq:
            break
        c = rem[dr] / lq
        k = dr - dq
        quo[k] = c
        for f, d in q.items():
            e = f + k
            s = rem.get(e, 0) - c * d
            if s:
                rem[e] = s
            else:
                rem.pop(e, None)
    return quo, rem


def _pgcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd (leading coefficient 1)."""
    while q:
        _, r = _pdivmod(p, q)
        p, q = q, r
    lead = p[max(p)]
    return _pscale(p, _ONE / lead)


def _canonical(num: Poly, den: Poly) -> "RationalFunction":
    if not den:
        raise DivisionByZero("rational function with zero denominator")
    if not num:
        return _ZERO
    k = min(min(num), min(den))
    if k:
        num = _pshift(num, -k)
        den = _pshift(den, -k)
    if len(num) > 1 and len(den) > 1:
        g = _pgcd(num, den)
        if len(g) > 1 or max(g) > 0:
            num, r1 = _pdivmod(num, g)
            den, r2 = _pdivmod(den, g)
            assert not r1 and not r2
    lead = den[min(den)]
    if lead != 1:
        s = _ONE / lead
        num = _pscale(num, s)
        den = _pscale(den, s)
    return RationalFunction._raw(num, den)


def _is_monomial_one(p: Poly) -> int | None:
    """Exponent k when ``p == eps**k``, else None."""
    if len(p) == 1:
        ((e, c),) = p.items()
        if c == 1:
            return e
    return None


# ---------------------------------------------------------------------------


_coerce_coeff = rational


class EpsPolynomial:
    """Polynomial in eps with rational coefficients, stored sparsely."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, object] | Iterable[tuple[int, object]] = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[int, Rational] = {}
        for e, a in items:
            e = int(e)
            if e < 0:
                raise ValueError("EpsPolynomial exponents must be non-negative")
            a = _coerce_coeff(a)
            s = c.get(e, 0) + a
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        self._c = c

    @classmethod
    def _wrap(cls, c: Poly) -> "EpsPolynomial":
        obj = cls.__new__(cls)
        obj._c = c
        return obj

    @property
    def coeffs(self) -> dict[int, Rational]:
        return dict(self._c)

    def terms(self) -> list[tuple[int, Rational]]:
        return sorted(self._c.items())

    def mindeg(self) -> Valuation:
        return min(self._c) if self._c else INF

    def degree(self) -> int:
        return max(self._c) if self._c else -1

    def __bool__(self) -> bool:
        return bool(self._c)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, EpsPolynomial):
            return self._c == other._c
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __repr__(self) -> str:
        return f"EpsPolynomial({self.terms()!r})"

    def __str__(self) -> str:
        return _format_poly(self._c)

    def to_json(self) -> list[list]:
        return [[e, format_rational(c)] for e, c in self.terms()]

    @classmethod
    def from_json(cls, data: list) -> "EpsPolynomial":
        if not isinstance(data, list):
            raise ValueError("EpsPolynomial JSON must be a list of [exponent, coeff] pairs")
        pairs = []
        for item in data:
            if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)):
                raise ValueError(f"bad EpsPolynomial term {item!r}")
            pairs.append((item[0], parse_rational(str(item[1]))))
        return cls(pairs)


def _format_poly(c: Poly) -> str:
    if not c:
        return "0"
    parts = []
    for e, a in sorted(c.items()):
        if e == 0:
            mono = str(a)
        else:
            x = "eps" if e == 1 else f"eps^{e}"
            mono = x if a == 1 else (f"-{x}" if a == -1 else f"{a}*{x}")
        parts.append(mono)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


class RationalFunction:
    """Element of Q(eps) in canonical form.

    ``gcd(num, den) = 1`` and the lowest-order coefficient of ``den`` is 1,
    so two instances are equal exactly when they denote the same element.
    Instances compare equal to ints / Fractions with the same value.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, num: object = 0, den: object = 1):
        n = _as_ratfunc(num)
        d = _as_ratfunc(den)
        if not d._num:
            raise DivisionByZero("denominator is zero")
        r = n if d.is_one() else _canonical(_pmul(n._num, d._den), _pmul(n._den, d._num))
        self._num = r._num
        self._den = r._den

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj._num = num
        obj._den = den
        return obj

    @classmethod
    def from_polys(cls, num: EpsPolynomial, den: EpsPolynomial | None = None) -> "RationalFunction":
        return _canonical(num._c, den._c if den is not None else {0: _ONE})

    # -- accessors -------------------------------------------------------
    @property
    def num(self) -> EpsPolynomial:
        return EpsPolynomial._wrap(self._num)

    @property
    def den(self) -> EpsPolynomial:
        return EpsPolynomial._wrap(self._den)

    def is_one(self) -> bool:
        return self._num == {0: 1} and self._den == {0: 1}

    def is_constant(self) -> bool:
        return self._den == {0: 1} and (not self._num or (len(self._num) == 1 and 0 in self._num))

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError(f"{self} depends on eps")
        return self._num.get(0, mpq(0))

    def val(self) -> Valuation:
        if not self._num:
            return INF
        return min(self._num) - min(self._den)

    def limit0(self) -> Rational:
        v = self.val()
        if v is INF or v > 0:
            return mpq(0)
        if v < 0:
            raise LimitUndefined(f"limit at eps=0 of {self} does not exist (val = {v})")
        return self._num[min(self._num)] / self._den[min(self._den)]

    def scale_eps_power(self, k: int) -> "RationalFunction":
        if not self._num or not k:
            return self
        if k > 0:
            return _canonical(_pshift(self._num, k), self._den)
        return _canonical(self._num, _pshift(self._den, -k))

    # -- arithmetic ------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._num)

    def __neg__(self) -> "RationalFunction":
        if not self._num:
            return self
        return RationalFunction._raw(_pneg(self._num), self._den)

    def __pos__(self) -> "RationalFunction":
        return self

    def __add__(self, other: object) -> "RationalFunction":
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        if not o._num:
            return self
        if not self._num:
            return o
        d1, d2 = self._den, o._den
        if d1 == d2:
            return _canonical(_padd(self._num, o._num), d1)
        k1, k2 = _is_monomial_one(d1), _is_monomial_one(d2)
        if k1 is not None and k2 is not None:
            k = max(k1, k2)
            n = _padd(_pshift(self._num, k - k1), _pshift(o._num, k - k2))
            return _canonical(n, {k: _ONE})
        return _canonical(_padd(_pmul(self._num, d2), _pmul(o._num, d1)), _pmul(d1, d2))

    __radd__ = __add__

    def __sub__(self, other: object) -> "RationalFunction":
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> "RationalFunction":
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other: object) -> "RationalFunction":
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        if not self._num or not o._num:
            return _ZERO
        if o._den == {0: 1} and len(o._num) == 1 and 0 in o._num:
            c = o._num[0]
            return self if c == 1 else RationalFunction._raw(_pscale(self._num, c), self._den)
        return _canonical(_pmul(self._num, o._num), _pmul(self._den, o._den))

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self._num:
            raise DivisionByZero("inverse of the zero rational function")
        return _canonical(self._den, self._num)

    def __truediv__(self, other: object) -> "RationalFunction":
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        if not o._num:
            raise DivisionByZero("division by the zero rational function")
        return _canonical(_pmul(self._num, o._den), _pmul(self._den, o._num))

    def __rtruediv__(self, other: object) -> "RationalFunction":
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int) -> "RationalFunction":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = _ONE_RF
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison / hashing --------------------------------------------
    def __eq__(self, other: object) -> bool:
        o = _try_ratfunc(other)
        if o is None:
            return NotImplemented
        return self._num == o._num and self._den == o._den

    def __hash__(self) -> int:
        if self.is_constant():
            return hash(self._num.get(0, mpq(0)))
        return hash((frozenset(self._num.items()), frozenset(self._den.items())))

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        n = _format_poly(self._num)
        if self._den == {0: 1}:
            return n
        d = _format_poly(self._den)
        if len(self._num) > 1:
            n = f"({n})"
        if len(self._den) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    # -- serialization ---------------------------------------------------
    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: object) -> "RationalFunction":
        if not isinstance(data, dict) or set(data) != {"num", "den"}:
            raise ValueError("RationalFunction JSON must be an object with exactly 'num' and 'den'")
        return cls.from_polys(EpsPolynomial.from_json(data["num"]), EpsPolynomial.from_json(data["den"]))


_ZERO = RationalFunction._raw({}, {0: _ONE})
_ONE_RF = RationalFunction._raw({0: _ONE}, {0: _ONE})
EPS = RationalFunction._raw({1: _ONE}, {0: _ONE})


def _try_ratfunc(x: object) -> RationalFunction | None:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, (Rational, int, _RationalABC)) and not isinstance(x, bool):
        if not x:
            return _ZERO
        return RationalFunction._raw({0: mpq(x)}, {0: _ONE})
    return None


def _as_ratfunc(x: object) -> RationalFunction:
    if isinstance(x, EpsPolynomial):
        return _canonical(x._c, {0: _ONE})
    if isinstance(x, str):
        return parse_expression(x)
    r = _try_ratfunc(x)
    if r is None:
        raise TypeError(f"cannot convert {type(x).__name__} to a rational function")
    return r


def as_ratfunc(x: object) -> RationalFunction:
    """Coerce an int, Fraction, EpsPolynomial, expression string or RationalFunction."""
    return _as_ratfunc(x)


def is_eps_free(x: object) -> bool:
    if isinstance(x, RationalFunction):
        return x.is_constant()
    return True


def to_rational(x: object) -> Rational:
    """Exact rational value of an eps-free scalar."""
    if isinstance(x, RationalFunction):
        return x.constant_value()
    return rational(x)


# ---------------------------------------------------------------------------
# functional surface


def add(a: object, b: object) -> RationalFunction:
    return _as_ratfunc(a) + _as_ratfunc(b)


def mul(a: object, b: object) -> RationalFunction:
    return _as_ratfunc(a) * _as_ratfunc(b)


def neg(a: object) -> RationalFunction:
    return -_as_ratfunc(a)


def inv(a: object) -> RationalFunction:
    return _as_ratfunc(a).inverse()


def val(f: object) -> Valuation:
    """Order of vanishing at eps = 0; ``INF`` for zero."""
    if isinstance(f, RationalFunction):
        return f.val()
    return INF if not f else 0


def limit0(f: object) -> Rational:
    """Limit at eps = 0. Raises :class:`LimitUndefined` when ``val(f) < 0``."""
    if isinstance(f, RationalFunction):
        return f.limit0()
    return rational(f)


def scale_eps_power(f: object, k: int) -> RationalFunction:
    return _as_ratfunc(f).scale_eps_power(k)


# ---------------------------------------------------------------------------
# text forms


def format_rational(q: object) -> str:
    q = rational(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Rational:
    """Parse ``"p"`` or ``"p/q"`` with integer p, q (no floats)."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not an exact rational: {text!r}") from None
    if q == 0:
        raise DivisionByZero(f"zero denominator in {text!r}")
    return mpq(p, q)


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
}


def parse_expression(text: str) -> RationalFunction:
    """Parse an arithmetic expression in ``eps`` (``ε`` and ``^`` accepted).

    Only integer literals, ``eps``, ``+ - * /``, integer powers and
    parentheses are allowed, e.g. ``"(eps^2-1)/eps"`` or ``"3/2*eps**-1"``.
    """
    src = text.replace("ε", "eps").replace("^", "**").strip()
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {text!r}") from exc

    def ev(node: ast.AST) -> RationalFunction:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return _as_ratfunc(node.value)
        if isinstance(node, ast.Name) and node.id == "eps":
            return EPS
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                k = ev(node.right)
                if not k.is_constant() or k.constant_value().denominator != 1:
                    raise ValueError(f"exponent must be an integer in {text!r}")
                return ev(node.left) ** int(k.constant_value())
            op = _BINOPS.get(type(node.op))
            if op is not None:
                return op(ev(node.left), ev(node.right))
        raise ValueError(f"unsupported syntax in expression {text!r}")

    return ev(tree)
