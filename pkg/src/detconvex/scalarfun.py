"""Scalar functions f of one positive real with exact first and second
derivatives.

Two input channels: a small expression language over the single variable
``s`` (parsed to an AST and evaluated with truncated second-order Taylor
jets), and closed-form built-in families.  Either kind evaluates through
:func:`eval_jet` to a (value, f', f'') triple exact up to roundoff.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError, NonFiniteError, ParameterError, ParseError, UnknownIdentifierError

BRANCH_TOL = 1e-12  # |a - 1/n| below this selects the logarithmic branch


@dataclass(frozen=True)
class Jet2:
    """Second-order Taylor triple (value, first, second derivative)."""

    v: float
    d1: float
    d2: float

    def __add__(self, o):
        return Jet2(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)

    def __sub__(self, o):
        return Jet2(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)

    def __neg__(self):
        return Jet2(-self.v, -self.d1, -self.d2)

    def __mul__(self, o):
        return Jet2(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        )

    def __truediv__(self, o):
        if o.v == 0.0:
            raise DomainError("division by zero")
        q = self.v / o.v
        q1 = (self.d1 - q * o.d1) / o.v
        q2 = (self.d2 - 2.0 * q1 * o.d1 - q * o.d2) / o.v
        return Jet2(q, q1, q2)


def jet_const(c: float) -> Jet2:
    return Jet2(float(c), 0.0, 0.0)


def jet_var(s: float) -> Jet2:
    return Jet2(float(s), 1.0, 0.0)


def jet_ln(u: Jet2) -> Jet2:
    if u.v <= 0.0:
        raise DomainError(f"ln of non-positive value {u.v}")
    w1 = u.d1 / u.v
    return Jet2(math.log(u.v), w1, u.d2 / u.v - w1 * w1)


def jet_exp(u: Jet2) -> Jet2:
    try:
        w = math.exp(u.v)
    except OverflowError as e:
        raise NonFiniteError(f"exp overflow at {u.v}") from e
    return Jet2(w, w * u.d1, w * (u.d2 + u.d1 * u.d1))


def jet_sqrt(u: Jet2) -> Jet2:
    if u.v <= 0.0:
        raise DomainError(f"sqrt of non-positive value {u.v}")
    w = math.sqrt(u.v)
    w1 = u.d1 / (2.0 * w)
    return Jet2(w, w1, (u.d2 - 2.0 * w1 * w1) / (2.0 * w))


def jet_pow_const(u: Jet2, p: float) -> Jet2:
    """Monomial rule u^p for a constant exponent.

    Valid for u > 0 with any real p, and for u < 0 / u == 0 when p is an
    integer (non-negative in the zero case).
    """
    try:
        if u.v > 0.0:
            w = math.pow(u.v, p)
            wp1 = p * math.pow(u.v, p - 1.0)
            wp2 = p * (p - 1.0) * math.pow(u.v, p - 2.0)
        elif float(p).is_integer():
            k = int(p)
            if u.v == 0.0 and k < 0:
                raise DomainError("0 raised to a negative power")
            w = u.v**k
            wp1 = p * u.v ** (k - 1) if k != 0 else 0.0
            wp2 = p * (p - 1.0) * u.v ** (k - 2) if k not in (0, 1) else 0.0
        else:
            raise DomainError(f"{u.v} raised to non-integer power {p}")
    except OverflowError as e:
        raise NonFiniteError(f"overflow in {u.v} ** {p}") from e
    return Jet2(w, wp1 * u.d1, wp2 * u.d1 * u.d1 + wp1 * u.d2)


def jet_pow(base: Jet2, expo: Jet2) -> Jet2:
    """General power; falls back to exp(expo * ln(base)) when the exponent
    actually varies (requires base > 0)."""
    if expo.d1 == 0.0 and expo.d2 == 0.0:
        return jet_pow_const(base, expo.v)
    return jet_exp(expo * jet_ln(base))


# --------------------------------------------------------------------------
# expression AST


class Expr:
    """Base class for expression nodes over the single variable ``s``."""

    def eval_jet(self, s: float) -> Jet2:
        return eval_jet(self, s)


@dataclass(frozen=True)
class Constant(Expr):
    value: float


@dataclass(frozen=True)
class Variable(Expr):
    pass


@dataclass(frozen=True)
class Negate(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Ln(Expr):
    arg: Expr


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


def _eval_node(node: Expr, s: Jet2) -> Jet2:
    match node:
        case Constant(value=v):
            return jet_const(v)
        case Variable():
            return s
        case Negate(arg=a):
            return -_eval_node(a, s)
        case Add(left=l, right=r):
            return _eval_node(l, s) + _eval_node(r, s)
        case Sub(left=l, right=r):
            return _eval_node(l, s) - _eval_node(r, s)
        case Mul(left=l, right=r):
            return _eval_node(l, s) * _eval_node(r, s)
        case Div(left=l, right=r):
            return _eval_node(l, s) / _eval_node(r, s)
        case Pow(base=b, exponent=e):
            return jet_pow(_eval_node(b, s), _eval_node(e, s))
        case Ln(arg=a):
            return jet_ln(_eval_node(a, s))
        case Exp(arg=a):
            return jet_exp(_eval_node(a, s))
        case Sqrt(arg=a):
            return jet_sqrt(_eval_node(a, s))
    raise TypeError(f"unknown expression node {node!r}")


# --------------------------------------------------------------------------
# parser
#
# precedence, lowest to highest:
#   additive (+ -, left assoc)
#   multiplicative (* /, left assoc)
#   unary minus
#   power (^, right assoc)
#   atoms: number, s, ln(e), exp(e), sqrt(e), ( e )

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_FUNCTIONS = {"ln": Ln, "exp": Exp, "sqrt": Sqrt}


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, text, pos = self.peek()
        if kind != "op" or text != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self) -> Expr:
        e = self.additive()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {text!r}", pos)
        return e

    def additive(self) -> Expr:
        e = self.multiplicative()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.advance()
                rhs = self.multiplicative()
                e = Add(e, rhs) if text == "+" else Sub(e, rhs)
            else:
                return e

    def multiplicative(self) -> Expr:
        e = self.unary()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.advance()
                rhs = self.unary()
                e = Mul(e, rhs) if text == "*" else Div(e, rhs)
            else:
                return e

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            return Negate(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, text, _ = self.peek()
        if kind == "op" and text == "^":
            self.advance()
            # right associative; the exponent may carry a unary minus
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.advance()
        if kind == "num":
            return Constant(float(text))
        if kind == "ident":
            if text == "s":
                return Variable()
            if text in _FUNCTIONS:
                self.expect_op("(")
                arg = self.additive()
                self.expect_op(")")
                return _FUNCTIONS[text](arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            e = self.additive()
            self.expect_op(")")
            return e
        raise ParseError(f"expected a value, got {text!r}" if text else "unexpected end of input", pos)


def parse(text: str) -> Expr:
    """Parse an expression in the variable ``s``.

    Raises ParseError (with byte offset) on malformed input and
    UnknownIdentifierError for identifiers other than s/ln/exp/sqrt.
    """
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# built-in families


def _pow(s: float, p: float) -> float:
    try:
        return math.pow(s, p)
    except OverflowError as e:
        raise NonFiniteError(f"overflow in {s} ** {p}") from e


@dataclass(frozen=True)
class PowerLaw:
    """f(s) = d + c * s^p."""

    c: float
    p: float
    d: float = 0.0

    def eval_jet(self, s: float) -> Jet2:
        _check_point(s)
        return Jet2(
            self.d + self.c * _pow(s, self.p),
            self.c * self.p * _pow(s, self.p - 1.0),
            self.c * self.p * (self.p - 1.0) * _pow(s, self.p - 2.0),
        )


@dataclass(frozen=True)
class LogFamily:
    """f(s) = d + c * ln s."""

    c: float
    d: float = 0.0

    def eval_jet(self, s: float) -> Jet2:
        _check_point(s)
        return Jet2(self.d + self.c * math.log(s), self.c / s, -self.c / (s * s))


@dataclass(frozen=True)
class FamilyA:
    """Three-branch family, convex under composition with det by design.

    With q = 1/n - a:
        a in [0, 1/n)   ->  d + c * s^q
        a == 1/n        ->  d + c * ln s
        a in (1/n, inf) ->  d - c * s^q
    Requires a >= 0 and c <= 0.  The classical statement is n = 3; other n
    generalize the exponent and are flagged by reports.
    """

    a: float
    c: float
    d: float = 0.0
    n: int = 3

    def __post_init__(self):
        if self.a < 0:
            raise ParameterError(f"family parameter a={self.a} must be >= 0")
        if self.c > 0:
            raise ParameterError(f"family parameter c={self.c} must be <= 0")
        if self.n < 1:
            raise ParameterError(f"dimension n={self.n} must be >= 1")

    @property
    def branch(self) -> str:
        inv_n = 1.0 / self.n
        if abs(self.a - inv_n) <= BRANCH_TOL:
            return "log"
        return "power" if self.a < inv_n else "inverted-power"

    def eval_jet(self, s: float) -> Jet2:
        _check_point(s)
        br = self.branch
        if br == "log":
            return Jet2(self.d + self.c * math.log(s), self.c / s, -self.c / (s * s))
        q = 1.0 / self.n - self.a
        coeff = self.c if br == "power" else -self.c
        return Jet2(
            self.d + coeff * _pow(s, q),
            coeff * q * _pow(s, q - 1.0),
            coeff * q * (q - 1.0) * _pow(s, q - 2.0),
        )


@dataclass(frozen=True)
class NeoHookeVolumetric:
    """Determinant-dependent part of the compressible Neo-Hooke energy:
    f(s) = -mu * ln s with shear modulus mu > 0."""

    mu: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ParameterError(f"shear modulus mu={self.mu} must be > 0")

    def eval_jet(self, s: float) -> Jet2:
        _check_point(s)
        return Jet2(-self.mu * math.log(s), -self.mu / s, self.mu / (s * s))


BuiltinFamily = PowerLaw | LogFamily | FamilyA | NeoHookeVolumetric
ScalarFunction = Expr | BuiltinFamily


def family_f_a(a: float, c: float, d: float, n: int = 3) -> FamilyA:
    """Construct the three-branch family member; a >= 0 and c <= 0."""
    return FamilyA(a=a, c=c, d=d, n=n)


def _check_point(s: float):
    if not (s > 0.0) or not math.isfinite(s):
        raise DomainError(f"scalar functions are defined for s > 0, got s={s}")


def eval_jet(f, s: float) -> Jet2:
    """Evaluate f to (f(s), f'(s), f''(s)); s must be positive.

    Works for parsed expressions and built-in families alike; raises
    DomainError outside the domain and NonFiniteError if evaluation
    overflows.
    """
    _check_point(s)
    if isinstance(f, Expr):
        jet = _eval_node(f, jet_var(float(s)))
    else:
        jet = f.eval_jet(float(s))
    if not (math.isfinite(jet.v) and math.isfinite(jet.d1) and math.isfinite(jet.d2)):
        raise NonFiniteError(f"non-finite jet {jet} at s={s}")
    return jet


def eval_value(f, s: float) -> float:
    return eval_jet(f, s).v
