"""Invariant operators on polynomials in ``k+1`` vector variables.

The generators are the bilinear operators ``<u_i,u_j>``, ``<d_i,d_j>``,
``<u_i,d_j>``, the Euler operators ``E_i``, and single-coordinate
multiplications/derivatives.  Words are formal sums of compositions of
generators and rational functions of the Euler operators.

Items in a sequence act right to left.  A scalar item is evaluated on the
multidegree of the polynomial it is applied to, i.e. of the intermediate
result sitting immediately to its right.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass

from gmpy2 import mpq

from higherspin import _kernels as K
from higherspin.polyalg import ContextError, Poly, VarRef, _parse_var_name, to_rational


class PoleError(ArithmeticError):
    """A rational Euler coefficient hit a zero denominator."""

    def __init__(self, expr, degree, m, detail=""):
        self.expr = expr
        self.degree = tuple(degree) if degree is not None else None
        self.m = m
        msg = f"pole of {expr} at multidegree {self.degree}, m={m}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class HomogeneityError(ValueError):
    """A degree-dependent scalar met an inhomogeneous polynomial."""


# -- direct generator actions ----------------------------------------------------

def _check_block(p, *blocks):
    for b in blocks:
        if not 0 <= b <= p.k:
            raise ContextError(f"block {b} outside 0..{p.k}")


def inner_ud(p: Poly, i: int, j: int) -> Poly:
    """``<u_i, d_j> p``; block 0 is ``x``."""
    _check_block(p, i, j)
    return p._new(K.apply_ud(p.terms, i, j, p.m))


def inner_dd(p: Poly, i: int, j: int) -> Poly:
    """``<d_i, d_j> p``; ``i == j`` gives the Laplacian in block ``i``."""
    _check_block(p, i, j)
    return p._new(K.apply_dd(p.terms, i, j, p.m))


def inner_uu(p: Poly, i: int, j: int) -> Poly:
    """Multiplication by ``<u_i, u_j>``."""
    _check_block(p, i, j)
    return p._new(K.mul_uu(p.terms, i, j, p.m))


def euler(p: Poly, i: int) -> Poly:
    return inner_ud(p, i, i)


def coord_mul(p: Poly, v: VarRef) -> Poly:
    return p.mulvar(v)


def coord_diff(p: Poly, v: VarRef) -> Poly:
    return p.diff(v)


# -- generators as data ----------------------------------------------------------

_KINDS = ("InnerUU", "InnerDD", "InnerUD", "Euler", "CoordMul", "CoordDiff")


@dataclass(frozen=True)
class Generator:
    kind: str
    i: int = 0
    j: int = 0
    var: VarRef | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind in ("InnerUU", "InnerDD") and self.i > self.j:
            # symmetric: store with i <= j
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    def apply(self, p: Poly) -> Poly:
        kind = self.kind
        if kind == "InnerUD":
            return inner_ud(p, self.i, self.j)
        if kind == "InnerDD":
            return inner_dd(p, self.i, self.j)
        if kind == "InnerUU":
            return inner_uu(p, self.i, self.j)
        if kind == "Euler":
            return euler(p, self.i)
        if kind == "CoordMul":
            return p.mulvar(self.var)
        return p.diff(self.var)

    def shift(self, k):
        """Change of the multidegree (length ``k+1``) caused by this generator."""
        s = [0] * (k + 1)
        if self.kind == "InnerUU":
            s[self.i] += 1
            s[self.j] += 1
        elif self.kind == "InnerDD":
            s[self.i] -= 1
            s[self.j] -= 1
        elif self.kind == "InnerUD":
            s[self.i] += 1
            s[self.j] -= 1
        elif self.kind == "CoordMul":
            s[self.var.block] += 1
        elif self.kind == "CoordDiff":
            s[self.var.block] -= 1
        return tuple(s)

    def to_json(self):
        if self.kind in ("CoordMul", "CoordDiff"):
            return {"gen": self.kind, "var": self.var.name()}
        if self.kind == "Euler":
            return {"gen": "Euler", "i": self.i}
        return {"gen": self.kind, "i": self.i, "j": self.j}

    @classmethod
    def from_json(cls, obj):
        kind = obj["gen"]
        if kind in ("CoordMul", "CoordDiff"):
            return cls(kind, var=_parse_var_name(obj["var"]))
        if kind == "Euler":
            return cls(kind, obj["i"], obj["i"])
        return cls(kind, obj["i"], obj["j"])

    def __str__(self):
        if self.kind == "InnerUU":
            return f"<u{self.i},u{self.j}>"
        if self.kind == "InnerDD":
            return f"<d{self.i},d{self.j}>"
        if self.kind == "InnerUD":
            return f"<u{self.i},d{self.j}>"
        if self.kind == "Euler":
            return f"E{self.i}"
        if self.kind == "CoordMul":
            return self.var.name()
        return f"d/d{self.var.name()}"


def InnerUU(i, j):
    return Generator("InnerUU", i, j)


def InnerDD(i, j):
    return Generator("InnerDD", i, j)


def InnerUD(i, j):
    return Generator("InnerUD", i, j)


def Euler(i):
    return Generator("Euler", i, i)


def CoordMul(v: VarRef):
    return Generator("CoordMul", var=v)


def CoordDiff(v: VarRef):
    return Generator("CoordDiff", var=v)


def apply_generator(g: Generator, p: Poly) -> Poly:
    return g.apply(p)


# -- rational functions of the Euler operators -------------------------------------

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _validate(node, symbols):
    if isinstance(node, ast.Expression):
        _validate(node.body, symbols)
    elif isinstance(node, ast.BinOp):
        if not isinstance(node.op, _ALLOWED_BINOPS):
            raise ValueError(f"operator {type(node.op).__name__} not allowed in a scalar")
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and type(node.right.value) is int
                    and node.right.value >= 0):
                raise ValueError("exponents in scalars must be non-negative integer literals")
        _validate(node.left, symbols)
        _validate(node.right, symbols)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _validate(node.operand, symbols)
    elif isinstance(node, ast.Constant):
        if type(node.value) is not int:
            raise ValueError(f"only integer literals are allowed, got {node.value!r}")
    elif isinstance(node, ast.Name):
        name = node.id
        if name != "m" and not (name[0] == "E" and name[1:].isdigit()):
            raise ValueError(f"unknown symbol {name!r}")
        symbols.add(name)
    else:
        raise ValueError(f"unsupported syntax {type(node).__name__} in scalar")


class _Rationalize(ast.NodeTransformer):
    # integer literals become mpq so that '/' is exact
    def visit_Constant(self, node):
        return ast.Call(func=ast.Name(id="_Q", ctx=ast.Load()), args=[node], keywords=[])

    def visit_BinOp(self, node):
        if isinstance(node.op, ast.Pow):
            node.left = self.visit(node.left)
            return node
        return self.generic_visit(node)


class Scalar:
    """A rational function of ``E0..Ek`` and ``m``, parsed from text.

    >>> Scalar("-4/(2*E1+m-2)").evaluate((0, 2), 6)
    mpq(-1,2)
    """

    __slots__ = ("text", "symbols", "_code", "_cache")

    def __init__(self, text):
        if isinstance(text, Scalar):
            text = text.text
        if not isinstance(text, str):
            text = str(to_rational(text))
        tree = ast.parse(text.strip(), mode="eval")
        symbols = set()
        _validate(tree, symbols)
        # canonical compact spelling, e.g. "-4/(2*E1+m-2)"
        self.text = ast.unparse(tree).replace(" ", "")
        self.symbols = frozenset(symbols)
        code_tree = ast.fix_missing_locations(_Rationalize().visit(tree))
        self._code = compile(code_tree, "<scalar>", "eval")
        self._cache = {}

    @classmethod
    def const(cls, c):
        c = to_rational(c)
        if c.denominator == 1:
            return cls(str(c.numerator))
        return cls(f"{c.numerator}/{c.denominator}")

    @property
    def is_constant(self):
        return not any(s != "m" for s in self.symbols)

    def evaluate(self, degree, m):
        """Exact value with ``E_i -> degree[i]``; raises :class:`PoleError`."""
        key = (tuple(degree) if degree is not None else None, m)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        env = {"_Q": mpq, "m": mpq(m)}
        for name in self.symbols:
            if name != "m":
                idx = int(name[1:])
                if degree is None or idx >= len(degree):
                    raise ValueError(f"scalar {self.text} needs {name} but degree is {degree}")
                env[name] = mpq(degree[idx])
        try:
            val = mpq(eval(self._code, {"__builtins__": {}}, env))
        except ZeroDivisionError:
            raise PoleError(self.text, degree, m) from None
        if len(self._cache) < 4096:
            self._cache[key] = val
        return val

    def __mul__(self, other):
        other = other if isinstance(other, Scalar) else Scalar.const(other)
        return Scalar(f"({self.text})*({other.text})")

    def __truediv__(self, other):
        other = other if isinstance(other, Scalar) else Scalar.const(other)
        return Scalar(f"({self.text})/({other.text})")

    def __add__(self, other):
        other = other if isinstance(other, Scalar) else Scalar.const(other)
        return Scalar(f"({self.text})+({other.text})")

    def __sub__(self, other):
        other = other if isinstance(other, Scalar) else Scalar.const(other)
        return Scalar(f"({self.text})-({other.text})")

    def __eq__(self, other):
        return isinstance(other, Scalar) and self.text == other.text

    def __hash__(self):
        return hash(("Scalar", self.text))

    def __repr__(self):
        return f"Scalar({self.text!r})"

    def __str__(self):
        return self.text

    def to_json(self):
        return {"scalar": self.text}


RationalScalarExpr = Scalar


def eval_scalar(s, degree, m):
    return Scalar(s).evaluate(degree, m)


# -- operator words --------------------------------------------------------------

class OperatorWord:
    """Formal sum of ``coef * item_1 item_2 ... item_n`` (rightmost acts first)."""

    __slots__ = ("seqs",)

    def __init__(self, seqs=()):
        merged = {}
        order = []
        for coef, items in seqs:
            items = tuple(items)
            c = to_rational(coef)
            if items not in merged:
                order.append(items)
                merged[items] = c
            else:
                merged[items] += c
        self.seqs = tuple((merged[it], it) for it in order if merged[it])

    @classmethod
    def identity(cls):
        return cls([(1, ())])

    @classmethod
    def of(cls, *items, coef=1):
        return cls([(coef, items)])

    def __add__(self, other):
        return OperatorWord(self.seqs + other.seqs)

    def __neg__(self):
        return OperatorWord([(-c, it) for c, it in self.seqs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Composition ``self ∘ other`` (or scaling by a rational)."""
        if isinstance(other, OperatorWord):
            return OperatorWord(
                [(c1 * c2, i1 + i2) for c1, i1 in self.seqs for c2, i2 in other.seqs]
            )
        c = to_rational(other)
        return OperatorWord([(c * co, it) for co, it in self.seqs])

    def __rmul__(self, other):
        c = to_rational(other)
        return OperatorWord([(c * co, it) for co, it in self.seqs])

    def __pow__(self, n):
        out = OperatorWord.identity()
        for _ in range(n):
            out = out * self
        return out

    def __len__(self):
        return len(self.seqs)

    def __eq__(self, other):
        return isinstance(other, OperatorWord) and set(self.seqs) == set(other.seqs)

    def __hash__(self):
        return hash(frozenset(self.seqs))

    def __call__(self, p):
        return apply_word(self, p)

    def __repr__(self):
        return f"OperatorWord({self})"

    def __str__(self):
        if not self.seqs:
            return "0"
        parts = []
        for c, items in self.seqs:
            body = " ".join(f"[{it}]" if isinstance(it, Scalar) else str(it) for it in items)
            parts.append(f"{c}" + (f"*{body}" if body else ""))
        return " + ".join(parts)

    def to_json(self):
        return [
            {
                "coef": _fmt(c),
                "items": [it.to_json() for it in items],
            }
            for c, items in self.seqs
        ]

    @classmethod
    def from_json(cls, data):
        seqs = []
        for entry in data:
            items = []
            for it in entry["items"]:
                if "scalar" in it:
                    items.append(Scalar(it["scalar"]))
                else:
                    items.append(Generator.from_json(it))
            seqs.append((to_rational(entry["coef"]), items))
        return cls(seqs)


def _fmt(c):
    c = mpq(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _apply_scalar(s: Scalar, p: Poly) -> Poly:
    if not p:
        return p
    if s.is_constant:
        return p * s.evaluate(None, p.m)
    try:
        d = p.multidegree()
    except ValueError as exc:
        raise HomogeneityError(
            f"scalar {s.text} applied to an inhomogeneous polynomial: {exc}"
        ) from None
    return p * s.evaluate(d, p.m)


def apply_item(item, p: Poly) -> Poly:
    if isinstance(item, Scalar):
        return _apply_scalar(item, p)
    return item.apply(p)


def apply_word(w: OperatorWord, p: Poly) -> Poly:
    """Apply a word; shared right-hand suffixes are evaluated once."""
    memo = {(): p}

    def run(items):
        hit = memo.get(items)
        if hit is not None:
            return hit
        inner = run(items[1:])
        out = apply_item(items[0], inner) if inner else inner
        memo[items] = out
        return out

    total = Poly.zero(p.k, p.m)
    for c, items in w.seqs:
        r = run(items)
        if r:
            total = total + r * c
    return total


def gl_generator(i: int, j: int) -> OperatorWord:
    """``E_ij`` of gl(k+1): ``E_i + m/2`` on the diagonal, ``<u_i, d_j>`` off it."""
    if i == j:
        return OperatorWord([(1, (Euler(i),)), (1, (Scalar("m/2"),))])
    return OperatorWord.of(InnerUD(i, j))


def commutator(a: OperatorWord, b: OperatorWord) -> OperatorWord:
    return a * b - b * a
