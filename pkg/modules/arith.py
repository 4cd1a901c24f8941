"""Exact Laurent polynomials and rational functions over QQ.

A LaurentPolynomial is stored as ``x^shift * poly`` where ``poly`` is a sympy
PolyElement (graded-lex, QQ coefficients) that no variable divides. That form
is unique, so structural equality is mathematical equality.
"""
import operator
import re
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

from modules.errors import DivisionByZeroFunction, ParseError, PoleAtPoint, VariableOutOfRange

Exponent = Tuple[int, ...]
Scalar = Union[int, Fraction]


@lru_cache(maxsize=None)
def poly_ring(nvars: int) -> PolyRing:
    return PolyRing([f"x{i}" for i in range(1, nvars + 1)], QQ, grlex)


def to_fraction(c) -> Fraction:
    return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))


def to_qq(c: Scalar):
    c = Fraction(c)
    return QQ(c.numerator, c.denominator)


def parse_rational(text: str) -> Fraction:
    """'5/2', '-3', '7' -> Fraction. Raises ParseError on anything else."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not an exact rational: {text!r}", 0)


def _integer_normalizer(poly) -> Fraction:
    # scalar that makes poly primitive over ZZ with positive leading coefficient
    coeffs = [to_fraction(c) for c in poly.values()]
    common = lcm(*[c.denominator for c in coeffs])
    content = gcd(*[int(c * common) for c in coeffs])
    scale = Fraction(common, content)
    return -scale if to_fraction(poly.LC) < 0 else scale


class LaurentPolynomial:
    """Sparse Laurent polynomial in x1..xN. Treat instances as immutable."""

    __slots__ = ("nvars", "shift", "poly")

    def __init__(self, nvars: int, poly=None, shift: Optional[Sequence[int]] = None):
        ring = poly_ring(nvars)
        poly = ring.zero if poly is None else poly
        shift = (0,) * nvars if shift is None else tuple(shift)
        if not poly:
            shift = (0,) * nvars
        else:
            low = tuple(min(m[i] for m in poly.keys()) for i in range(nvars))
            if any(low):
                poly = poly.new([(tuple(a - b for a, b in zip(m, low)), c) for m, c in poly.items()])
                shift = tuple(s + l for s, l in zip(shift, low))
        self.nvars = nvars
        self.shift = shift
        self.poly = poly

    # ---- constructors ----

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Exponent, Scalar]) -> "LaurentPolynomial":
        items = [(tuple(e), c) for e, c in terms.items() if c != 0]
        for e, _ in items:
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not have {nvars} entries")
        if not items:
            return cls(nvars)
        low = tuple(min(e[i] for e, _ in items) for i in range(nvars))
        ring = poly_ring(nvars)
        poly = ring.from_dict({tuple(a - b for a, b in zip(e, low)): to_qq(c) for e, c in items})
        return cls(nvars, poly, low)

    @classmethod
    def constant(cls, nvars: int, c: Scalar) -> "LaurentPolynomial":
        return cls.from_terms(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, nvars: int, exp: Sequence[int], coef: Scalar = 1) -> "LaurentPolynomial":
        return cls.from_terms(nvars, {tuple(exp): coef})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "LaurentPolynomial":
        """x_index, 1-based."""
        if not 1 <= index <= nvars:
            raise VariableOutOfRange(index, nvars)
        return cls.monomial(nvars, tuple(int(i == index - 1) for i in range(nvars)))

    # ---- inspection ----

    @property
    def terms(self) -> Dict[Exponent, Fraction]:
        """Term map, graded-lex descending."""
        s = self.shift
        return {tuple(a + b for a, b in zip(m, s)): to_fraction(c) for m, c in self.poly.terms()}

    @property
    def is_zero(self) -> bool:
        return not self.poly

    @property
    def is_monomial(self) -> bool:
        return len(self.poly) == 1

    @property
    def is_constant(self) -> bool:
        return self.is_zero or (self.is_monomial and not any(self.shift))

    @property
    def is_polynomial(self) -> bool:
        return all(s >= 0 for s in self.shift)

    @property
    def num_terms(self) -> int:
        return len(self.poly)

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError("not a constant")
        return Fraction(0) if self.is_zero else to_fraction(self.poly.LC)

    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        return sum(self.poly.leading_expv()) + sum(self.shift)

    def leading_coefficient(self) -> Fraction:
        return to_fraction(self.poly.LC) if self.poly else Fraction(0)

    def content_free(self) -> "LaurentPolynomial":
        """The polynomial part without its monomial content."""
        return LaurentPolynomial(self.nvars, self.poly)

    # ---- arithmetic ----

    def _coerce(self, other) -> "LaurentPolynomial":
        if isinstance(other, LaurentPolynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPolynomial.constant(self.nvars, other)
        return NotImplemented

    def _lifted(self, low: Exponent):
        d = tuple(s - l for s, l in zip(self.shift, low))
        return self.poly.mul_monom(d) if any(d) else self.poly

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.poly:
            return other
        if not other.poly:
            return self
        low = tuple(map(min, self.shift, other.shift))
        return LaurentPolynomial(self.nvars, self._lifted(low) + other._lifted(low), low)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial(self.nvars, -self.poly, self.shift)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "LaurentPolynomial":
        if c == 0:
            return LaurentPolynomial(self.nvars)
        return LaurentPolynomial(self.nvars, self.poly.mul_ground(to_qq(c)), self.shift)

    def mul_monom(self, exp: Sequence[int]) -> "LaurentPolynomial":
        if self.is_zero:
            return self
        return LaurentPolynomial(self.nvars, self.poly, tuple(a + b for a, b in zip(self.shift, exp)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.poly or not other.poly:
            return LaurentPolynomial(self.nvars)
        return LaurentPolynomial(self.nvars, self.poly * other.poly,
                                 tuple(a + b for a, b in zip(self.shift, other.shift)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError(f"integer exponent expected, got {k!r}")
        if k == 0:
            return LaurentPolynomial.constant(self.nvars, 1)
        if k > 0:
            return LaurentPolynomial(self.nvars, self.poly ** k, tuple(s * k for s in self.shift))
        if not self.is_monomial:
            raise ValueError("negative powers exist only for monomials")
        c = to_fraction(self.poly.LC) ** k
        return LaurentPolynomial.monomial(self.nvars, tuple(s * k for s in self.shift), c)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPolynomial.constant(self.nvars, other)
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.nvars == other.nvars and self.shift == other.shift and self.poly == other.poly

    def __hash__(self):
        return hash((self.nvars, self.shift, frozenset(self.poly.items())))

    # ---- calculus / evaluation ----

    def diff(self, index: int) -> "LaurentPolynomial":
        """Formal partial derivative in x_index (1-based)."""
        i = index - 1
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                out[tuple(e2)] = c * e[i]
        return LaurentPolynomial.from_terms(self.nvars, out)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [Fraction(v) for v in point]
        for i, (s, v) in enumerate(zip(self.shift, pt)):
            if s < 0 and v == 0:
                raise PoleAtPoint(f"x{i + 1} = 0 appears with a negative exponent")
        total = Fraction(0)
        for m, c in self.poly.items():
            term = to_fraction(c)
            for v, e in zip(pt, m):
                if e:
                    term *= v ** e
            total += term
        for v, s in zip(pt, self.shift):
            if s:
                total *= v ** s
        return total

    def substitute(self, values: Sequence["LaurentPolynomial"]) -> "LaurentPolynomial":
        """Replace x_i by values[i-1]. Only for non-negative exponents."""
        if not self.is_polynomial:
            raise ValueError("substitute needs non-negative exponents")
        target = values[0].nvars
        powers: Dict[Tuple[int, int], LaurentPolynomial] = {}

        def power(i: int, e: int) -> LaurentPolynomial:
            if (i, e) not in powers:
                powers[(i, e)] = values[i] ** e
            return powers[(i, e)]

        parts = []
        for exp, c in self.terms.items():
            term = None
            for i, e in enumerate(exp):
                if e:
                    term = power(i, e) if term is None else term * power(i, e)
            parts.append(LaurentPolynomial.constant(target, c) if term is None else term.scale(c))
        return laurent_sum(target, parts)

    # ---- I/O ----

    def to_text(self) -> str:
        if self.is_zero:
            return "0"
        out = []
        for exp, c in self.terms.items():
            mono = "*".join(f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exp) if e)
            mag = abs(c)
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag}*{mono}"
            if not out:
                out.append(body if c > 0 else "-" + body)
            else:
                out.append((" + " if c > 0 else " - ") + body)
        return "".join(out)

    def to_json(self) -> dict:
        return {"nvars": self.nvars,
                "terms": [{"exp": list(e), "coef": str(c)} for e, c in self.terms.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentPolynomial":
        nvars = int(data["nvars"])
        return cls.from_terms(nvars, {tuple(t["exp"]): parse_rational(t["coef"]) for t in data["terms"]})

    def __repr__(self):
        return f"LaurentPolynomial({self.to_text()!r}, nvars={self.nvars})"

    __str__ = to_text


def laurent_sum(nvars: int, parts: Iterable[LaurentPolynomial]) -> LaurentPolynomial:
    """Sum many Laurent polynomials with one shift alignment."""
    parts = [p for p in parts if p.poly]
    if not parts:
        return LaurentPolynomial(nvars)
    low = tuple(min(col) for col in zip(*(p.shift for p in parts)))
    acc = {}
    zero = QQ.zero
    for p in parts:
        d = tuple(s - l for s, l in zip(p.shift, low))
        lift = any(d)
        for m, c in p.poly.items():
            key = tuple(a + b for a, b in zip(m, d)) if lift else m
            acc[key] = acc.get(key, zero) + c
    ring = poly_ring(nvars)
    return LaurentPolynomial(nvars, ring.from_dict({k: v for k, v in acc.items() if v}), low)


class RationalFunction:
    """num/den with den a primitive integer polynomial, positive leading coefficient,
    and no monomial content. Laurent polynomials have den = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPolynomial, den: Optional[LaurentPolynomial] = None):
        nvars = num.nvars
        if den is None:
            den = LaurentPolynomial.constant(nvars, 1)
        if den.nvars != nvars:
            raise ValueError(f"variable count mismatch: {nvars} vs {den.nvars}")
        if den.is_zero:
            raise DivisionByZeroFunction("denominator is the zero polynomial")
        if num.is_zero:
            den = LaurentPolynomial.constant(nvars, 1)
        else:
            if any(den.shift):
                num = num.mul_monom(tuple(-s for s in den.shift))
                den = den.content_free()
            scale = _integer_normalizer(den.poly)
            if scale != 1:
                num, den = num.scale(scale), den.scale(scale)
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, nvars: int, c: Scalar) -> "RationalFunction":
        return cls(LaurentPolynomial.constant(nvars, c))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_laurent(self) -> bool:
        return self.den.is_constant

    @property
    def is_constant(self) -> bool:
        return self.is_laurent and self.num.is_constant

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, LaurentPolynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise DivisionByZeroFunction("inverse of the zero function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, LaurentPolynomial)):
            other = self._coerce(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def reduced(self) -> "RationalFunction":
        """Cancel the polynomial gcd of num and den."""
        if self.is_laurent or self.is_zero:
            return self
        p, q = self.num.poly.cancel(self.den.poly)
        return RationalFunction(LaurentPolynomial(self.nvars, p, self.num.shift),
                                LaurentPolynomial(self.nvars, q))

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise PoleAtPoint(f"denominator vanishes at {format_point(point)}")
        return self.num.evaluate(point) / d

    def to_text(self) -> str:
        if self.is_laurent:
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "RationalFunction":
        return cls(LaurentPolynomial.from_json(data["num"]), LaurentPolynomial.from_json(data["den"]))

    def __repr__(self):
        return f"RationalFunction({self.to_text()!r}, nvars={self.nvars})"

    __str__ = to_text


def format_point(point: Sequence[Scalar]) -> str:
    return "(" + ",".join(str(Fraction(v)) for v in point) + ")"


# ---- operations ----

_OPS = {"add": operator.add, "sub": operator.sub, "mul": operator.mul, "div": operator.truediv}


def laurent_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    if a.nvars != b.nvars:
        raise ValueError(f"variable count mismatch: {a.nvars} vs {b.nvars}")
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}")
    return fn(a, b)


def ratfunc_eq(a: RationalFunction, b: RationalFunction) -> bool:
    if a.nvars != b.nvars:
        raise ValueError(f"variable count mismatch: {a.nvars} vs {b.nvars}")
    return a.num * b.den == b.num * a.den


def evaluate(f: Union[RationalFunction, LaurentPolynomial], point: Sequence[Scalar]) -> Fraction:
    return f.evaluate(point)


def numerator_normal_form(f: Union[RationalFunction, LaurentPolynomial]) -> LaurentPolynomial:
    """Num(f): clear negative exponents and integer content, positive leading coefficient."""
    num = f.num if isinstance(f, RationalFunction) else f
    if num.is_zero:
        return num
    num = num.mul_monom(tuple(max(-s, 0) for s in num.shift))
    return num.scale(_integer_normalizer(num.poly))


def exact_divide(a: LaurentPolynomial, b: LaurentPolynomial) -> Optional[LaurentPolynomial]:
    """q with a = q*b, or None. Both operands are shifted by their common minimum
    exponent vector and divided as ordinary polynomials under graded-lex."""
    if b.is_zero:
        raise DivisionByZeroFunction("exact division by the zero polynomial")
    if a.nvars != b.nvars:
        raise ValueError(f"variable count mismatch: {a.nvars} vs {b.nvars}")
    if a.is_zero:
        return a
    low = tuple(map(min, a.shift, b.shift))
    q, r = a._lifted(low).div(b._lifted(low))
    if r:
        return None
    return LaurentPolynomial(a.nvars, q)


def same_up_to_scalar(a: LaurentPolynomial, b: LaurentPolynomial) -> bool:
    if a.is_zero or b.is_zero:
        return a.is_zero and b.is_zero
    return a.scale(1 / a.leading_coefficient()) == b.scale(1 / b.leading_coefficient())


# ---- text syntax ----

_TOKEN = re.compile(r"(\d+)|x(\d+)|([-+*/^()])")


class _Parser:
    """Recursive descent over: expr := term (+|- term)*, term := unary (*|/ unary)*,
    unary := (+|-) unary | power, power := atom [^ exponent], atom := INT | VAR | ( expr )."""

    def __init__(self, text: str, nvars: int):
        self.text = text
        self.nvars = nvars
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            if m.group(1) is not None:
                self.tokens.append(("int", m.group(1), pos))
            elif m.group(2) is not None:
                self.tokens.append(("var", m.group(2), pos))
            else:
                self.tokens.append(("op", m.group(3), pos))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}, found {value or 'end of input'!r}", pos)

    def parse(self) -> RationalFunction:
        value = self.expr()
        kind, token, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {token!r}", pos)
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            _, op, _ = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero:
                    raise DivisionByZeroFunction(f"division by the zero polynomial at position {pos}")
                value = value / rhs
        return value

    def unary(self) -> RationalFunction:
        kind, op, _ = self.peek()
        if kind == "op" and op in "+-":
            self.take()
            value = self.unary()
            return -value if op == "-" else value
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            _, _, pos = self.take()
            e = self.exponent()
            if e < 0 and base.is_zero:
                raise DivisionByZeroFunction(f"negative power of zero at position {pos}")
            return base ** e
        return base

    def exponent(self) -> int:
        wrapped = self.peek()[:2] == ("op", "(")
        if wrapped:
            self.take()
        sign = 1
        if self.peek()[0] == "op" and self.peek()[1] in "+-":
            sign = -1 if self.take()[1] == "-" else 1
        kind, value, pos = self.take()
        if kind != "int":
            raise ParseError("integer exponent expected", pos)
        if wrapped:
            self.expect(")")
        return sign * int(value)

    def atom(self) -> RationalFunction:
        kind, value, pos = self.take()
        if kind == "int":
            return RationalFunction.constant(self.nvars, int(value))
        if kind == "var":
            index = int(value)
            if not 1 <= index <= self.nvars:
                raise VariableOutOfRange(index, self.nvars)
            return RationalFunction(LaurentPolynomial.variable(self.nvars, index))
        if (kind, value) == ("op", "("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def parse(text: str, nvars: int) -> RationalFunction:
    if nvars < 1:
        raise ValueError("nvars must be at least 1")
    return _Parser(text, nvars).parse()


def parse_polynomial(text: str, nvars: int) -> LaurentPolynomial:
    f = parse(text, nvars)
    if not f.is_laurent:
        raise ParseError(f"expected a Laurent polynomial, got {f.to_text()!r}", 0)
    return f.num
