"""Sparse exact-rational polynomials in ``k+1`` vector variables.

Block 0 is the variable ``x`` (written ``x1 .. xm``), blocks ``1..k`` are the
dummy variables ``u_b`` (written ``u<b>_<a>``).  Coefficients are
:class:`gmpy2.mpq`; nothing in this module touches floating point.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from math import factorial

from gmpy2 import mpq

from higherspin import _kernels as K

MAX_EXPONENT = 4096

__all__ = [
    "ContextError",
    "DegreeUndefinedError",
    "InhomogeneousError",
    "ParseError",
    "Poly",
    "VarRef",
    "add",
    "diff",
    "fischer",
    "format_poly",
    "mul",
    "multidegree",
    "parse",
    "scale",
    "to_rational",
]


class ContextError(ValueError):
    """Operands live in different ``(k, m)`` contexts."""


class DegreeUndefinedError(ValueError):
    """The multidegree of the zero polynomial was requested."""


class InhomogeneousError(ValueError):
    def __init__(self, blocks):
        self.blocks = frozenset(blocks)
        super().__init__(f"polynomial is inhomogeneous in blocks {sorted(self.blocks)}")


class ParseError(ValueError):
    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} at position {position}")


def to_rational(c):
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to :class:`mpq`."""
    if isinstance(c, str):
        return mpq(c.strip())
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not accepted")
    if hasattr(c, "numerator") and hasattr(c, "denominator"):
        return mpq(int(c.numerator), int(c.denominator))
    return mpq(c)


@dataclass(frozen=True, order=True)
class VarRef:
    """Variable ``u_{block, component}``; block 0 is ``x``."""

    block: int
    component: int

    def index(self, m: int) -> int:
        return self.block * m + self.component - 1

    def name(self) -> str:
        if self.block == 0:
            return f"x{self.component}"
        return f"u{self.block}_{self.component}"

    def check(self, k: int, m: int) -> None:
        if not (0 <= self.block <= k and 1 <= self.component <= m):
            raise ContextError(f"{self.name()} is outside the context k={k}, m={m}")


def _mono_key(mono):
    # graded lexicographic, block 0 first
    return (-sum(mono), tuple(-e for e in mono))


class Poly:
    """An immutable sparse polynomial with exact rational coefficients.

    ``terms`` maps dense exponent tuples of length ``(k+1)*m`` to nonzero
    coefficients.
    """

    __slots__ = ("k", "m", "terms", "_hash")

    def __init__(self, k: int, m: int, terms=None):
        if k < 0 or m < 1:
            raise ContextError(f"invalid context k={k}, m={m}")
        n = (k + 1) * m
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n or min(mono, default=0) < 0:
                raise ContextError(f"exponent vector {mono} does not fit k={k}, m={m}")
            c = to_rational(c)
            if c:
                clean[mono] = clean.get(mono, 0) + c
        self.k = k
        self.m = m
        self.terms = {mono: c for mono, c in clean.items() if c}
        self._hash = None

    @classmethod
    def _raw(cls, k, m, terms):
        p = cls.__new__(cls)
        p.k = k
        p.m = m
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, k, m):
        return cls._raw(k, m, {})

    @classmethod
    def constant(cls, k, m, c=1):
        c = to_rational(c)
        return cls._raw(k, m, {(0,) * ((k + 1) * m): c} if c else {})

    @classmethod
    def var(cls, k, m, block, component):
        v = VarRef(block, component)
        v.check(k, m)
        mono = [0] * ((k + 1) * m)
        mono[v.index(m)] = 1
        return cls._raw(k, m, {tuple(mono): mpq(1)})

    @classmethod
    def monomial(cls, k, m, mono, c=1):
        return cls(k, m, {tuple(mono): c})

    # -- context ----------------------------------------------------------
    @property
    def context(self):
        return (self.k, self.m)

    def same_context(self, other):
        if not isinstance(other, Poly):
            raise TypeError(f"expected Poly, got {type(other).__name__}")
        if (self.k, self.m) != (other.k, other.m):
            raise ContextError(
                f"context mismatch: (k={self.k}, m={self.m}) vs (k={other.k}, m={other.m})"
            )

    def _new(self, terms):
        return Poly._raw(self.k, self.m, terms)

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.k, self.m, other)
        self.same_context(other)
        return self._new(K.add(self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return self._new({mono: -c for mono, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(self.k, self.m, other)
        self.same_context(other)
        return self._new(K.axpy(mpq(-1), other.terms, self.terms))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            self.same_context(other)
            return self._new(K.mul(self.terms, other.terms))
        return self._new(K.scale(to_rational(other), self.terms))

    def __rmul__(self, other):
        return self._new(K.scale(to_rational(other), self.terms))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(self.k, self.m, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return (self.k, self.m) == (other.k, other.m) and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.k, self.m, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"Poly(k={self.k}, m={self.m}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    # -- calculus ---------------------------------------------------------
    def diff(self, v: VarRef):
        v.check(self.k, self.m)
        return self._new(K.diff(self.terms, v.index(self.m)))

    def mulvar(self, v: VarRef):
        v.check(self.k, self.m)
        return self._new(K.mulvar(self.terms, v.index(self.m)))

    # -- degrees ----------------------------------------------------------
    def block_degrees(self, mono):
        m = self.m
        return tuple(sum(mono[b * m:(b + 1) * m]) for b in range(self.k + 1))

    def multidegree(self):
        """Common per-block degree tuple ``(d_0, ..., d_k)``.

        Raises :class:`DegreeUndefinedError` for the zero polynomial and
        :class:`InhomogeneousError` (listing the blocks) otherwise.
        """
        if not self.terms:
            raise DegreeUndefinedError("degree of the zero polynomial is undefined")
        degs = {self.block_degrees(mono) for mono in self.terms}
        if len(degs) == 1:
            return degs.pop()
        bad = {b for b in range(self.k + 1) if len({d[b] for d in degs}) > 1}
        raise InhomogeneousError(bad)

    def is_homogeneous(self):
        if not self.terms:
            return True
        return len({self.block_degrees(mono) for mono in self.terms}) == 1

    def homogeneous_parts(self):
        parts = {}
        for mono, c in self.terms.items():
            parts.setdefault(self.block_degrees(mono), {})[mono] = c
        return {d: self._new(t) for d, t in sorted(parts.items())}

    # -- serialization ----------------------------------------------------
    def to_json(self):
        return {
            "k": self.k,
            "m": self.m,
            "terms": [
                {"c": _fmt_rational(c), "exp": _exp_list(mono, self.m)}
                for mono, c in sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))
            ],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        k, m = int(obj["k"]), int(obj["m"])
        n = (k + 1) * m
        terms = {}
        for term in obj["terms"]:
            mono = [0] * n
            for name, e in term["exp"]:
                v = _parse_var_name(name)
                v.check(k, m)
                mono[v.index(m)] += int(e)
            key = tuple(mono)
            terms[key] = terms.get(key, 0) + to_rational(term["c"])
        return cls(k, m, terms)


def _fmt_rational(c):
    c = mpq(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _exp_list(mono, m):
    out = []
    for idx, e in enumerate(mono):
        if e:
            out.append([VarRef(idx // m, idx % m + 1).name(), e])
    return out


_VAR_RE = re.compile(r"x(\d+)$|u(\d+)_(\d+)$")


def _parse_var_name(name):
    mt = _VAR_RE.match(name)
    if not mt:
        raise ValueError(f"bad variable name {name!r}")
    if mt.group(1) is not None:
        return VarRef(0, int(mt.group(1)))
    return VarRef(int(mt.group(2)), int(mt.group(3)))


# -- module-level operations ---------------------------------------------------

def add(p: Poly, q: Poly) -> Poly:
    return p + q


def scale(c, p: Poly) -> Poly:
    return to_rational(c) * p


def mul(p: Poly, q: Poly) -> Poly:
    return p * q


def diff(p: Poly, v: VarRef) -> Poly:
    return p.diff(v)


def multidegree(p: Poly):
    return p.multidegree()


def fischer(p: Poly, q: Poly):
    """Fischer pairing ``p(d) q`` at the origin (real coefficients, no conjugation)."""
    p.same_context(q)
    return mpq(K.fischer(p.terms, q.terms))


def fischer_reference(p: Poly, q: Poly):
    """Slow pairing by literally differentiating ``q`` along each monomial of ``p``."""
    p.same_context(q)
    total = mpq(0)
    for mono, c in p.terms.items():
        r = q
        for idx, e in enumerate(mono):
            for _ in range(e):
                r = r.diff(VarRef(idx // p.m, idx % p.m + 1))
        total += c * r.terms.get((0,) * len(mono), 0)
    return total


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    pieces = []
    for mono, c in sorted(p.terms.items(), key=lambda t: _mono_key(t[0])):
        factors = []
        for idx, e in enumerate(mono):
            if e:
                name = VarRef(idx // p.m, idx % p.m + 1).name()
                factors.append(name if e == 1 else f"{name}^{e}")
        neg = c < 0
        a = -c if neg else c
        if not factors:
            body = _fmt_rational(a)
        elif a == 1:
            body = "*".join(factors)
        else:
            body = _fmt_rational(a) + "*" + "*".join(factors)
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(x\d+|u\d+_\d+)|([-+*/^]))")


def _tokenize(text):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        mt = _TOKEN_RE.match(text, pos)
        if not mt:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = mt.start(mt.lastindex)
        if mt.group(1) is not None:
            tokens.append(("int", int(mt.group(1)), start))
        elif mt.group(2) is not None:
            tokens.append(("var", mt.group(2), start))
        else:
            tokens.append((mt.group(3), None, start))
        pos = mt.end()
    tokens.append(("end", None, n))
    return tokens


def parse(text: str, k: int, m: int) -> Poly:
    """Parse the polynomial text grammar in the context ``(k, m)``.

    >>> str(parse("3/2*x1^2*u1_3", 1, 3))
    '3/2*x1^2*u1_3'
    """
    tokens = _tokenize(text)
    pos = 0
    n = (k + 1) * m
    terms = {}

    def peek():
        return tokens[pos]

    def take(kind):
        nonlocal pos
        tok = tokens[pos]
        if tok[0] != kind:
            found = "end of input" if tok[0] == "end" else repr(tok[1] if tok[1] is not None else tok[0])
            raise ParseError(f"expected {kind}, found {found}", tok[2])
        pos += 1
        return tok

    def parse_uint():
        tok = peek()
        if tok[0] != "int":
            raise ParseError("expected a non-negative integer", tok[2])
        return take("int")[1]

    def parse_factor(mono):
        tok = take("var")
        v = _parse_var_name(tok[1])
        try:
            v.check(k, m)
        except ContextError as exc:
            raise ParseError(str(exc), tok[2]) from None
        e = 1
        if peek()[0] == "^":
            take("^")
            etok = peek()
            e = parse_uint()
            if e > MAX_EXPONENT:
                raise ParseError(f"exponent {e} exceeds the limit {MAX_EXPONENT}", etok[2])
        mono[v.index(m)] += e
        if mono[v.index(m)] > MAX_EXPONENT:
            raise ParseError(f"exponent exceeds the limit {MAX_EXPONENT}", tok[2])

    def parse_term(sign):
        mono = [0] * n
        coef = mpq(sign)
        if peek()[0] == "int":
            num = take("int")[1]
            den = 1
            if peek()[0] == "/":
                take("/")
                dtok = peek()
                den = parse_uint()
                if den == 0:
                    raise ParseError("zero denominator", dtok[2])
            coef *= mpq(num, den)
            while peek()[0] == "*":
                take("*")
                parse_factor(mono)
        else:
            parse_factor(mono)
            while peek()[0] == "*":
                take("*")
                parse_factor(mono)
        key = tuple(mono)
        terms[key] = terms.get(key, 0) + coef

    sign = 1
    if peek()[0] in "+-":
        sign = -1 if take(peek()[0])[0] == "-" else 1
    parse_term(sign)
    while peek()[0] in ("+", "-"):
        sign = -1 if take(peek()[0])[0] == "-" else 1
        parse_term(sign)
    tok = peek()
    if tok[0] != "end":
        raise ParseError(f"unexpected token {tok[1] if tok[1] is not None else tok[0]!r}", tok[2])
    return Poly(k, m, terms)


def random_poly(rng, k, m, degree, nterms, coeff_range=5):
    """Random multihomogeneous polynomial with ``degree`` per block.

    ``rng`` is a :class:`random.Random`; coefficients are small nonzero
    rationals.
    """
    n = (k + 1) * m
    terms = {}
    for _ in range(nterms):
        mono = [0] * n
        for b, d in enumerate(degree):
            for _ in range(d):
                mono[b * m + rng.randrange(m)] += 1
        num = rng.choice([i for i in range(-coeff_range, coeff_range + 1) if i])
        den = rng.randint(1, 3)
        key = tuple(mono)
        terms[key] = terms.get(key, 0) + mpq(num, den)
    return Poly(k, m, terms)


def factorial_weight(mono):
    w = 1
    for e in mono:
        w *= factorial(e)
    return w
