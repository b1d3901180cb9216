"""Extremal projection operators built from truncating series.

Three factor families act on the dummy variables:

* ``Minus2Eps(a)``:      sum_s  1/(4^s s!) * G_s(-E_a - m/2 + a) |u_a|^{2s} Delta_a^s
* ``MinusEpsEps(a,b)``:  sum_s  1/s! * G_s(-E_a - E_b - m + a + b) <u_a,u_b>^s <d_a,d_b>^s
* ``EpsMinusEps(i,j)``:  sum_s  (-1)^s/s! * G_s(E_i - E_j + j - i) <u_j,d_i>^s <u_i,d_j>^s

with ``G_s(z) = Gamma(z+1)/Gamma(z+1+s) = 1/((z+1)...(z+s))``.  Each series
term preserves the multidegree, so the Euler operators are read off the
input.  On polynomials the series stop once the derivative part vanishes.

Positions ``a, b, i, j`` are 1-based slots of an ordered tuple of blocks;
by default slot ``a`` is dummy block ``a``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

from gmpy2 import mpq

from higherspin.liealg import (
    InnerDD,
    InnerUD,
    InnerUU,
    OperatorWord,
    PoleError,
    Scalar,
    inner_dd,
    inner_ud,
    inner_uu,
)
from higherspin.polyalg import Poly

__all__ = [
    "ProjectorFactor",
    "Minus2Eps",
    "MinusEpsEps",
    "EpsMinusEps",
    "normal_order",
    "pi_factor",
    "pi_sp2k",
    "factor_word",
    "pi_sp2k_word",
    "harmonic_projection",
    "pi_u_word",
    "pi_harmonic_u",
    "sp4_generator",
]


@dataclass(frozen=True)
class ProjectorFactor:
    kind: str  # "m2e", "mee", "eme"
    a: int
    b: int = 0

    def __str__(self):
        if self.kind == "m2e":
            return f"pi[-2e{self.a}]"
        if self.kind == "mee":
            return f"pi[-e{self.a}-e{self.b}]"
        return f"pi[e{self.a}-e{self.b}]"


def Minus2Eps(a):
    return ProjectorFactor("m2e", a)


def MinusEpsEps(a, b):
    if not a < b:
        raise ValueError("MinusEpsEps needs a < b")
    return ProjectorFactor("mee", a, b)


def EpsMinusEps(i, j):
    if not i < j:
        raise ValueError("EpsMinusEps needs i < j")
    return ProjectorFactor("eme", i, j)


def normal_order(k):
    """Factors of the sp(2k) extremal projector, leftmost first.

    ``e1-e2, ..., e1-ek, e2-e3, ..., e(k-1)-ek`` followed, for ``b = k..1``,
    by ``-2e_b, -e_(b-1)-e_b, ..., -e_1-e_b``.
    """
    out = [EpsMinusEps(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]
    for b in range(k, 0, -1):
        out.append(Minus2Eps(b))
        out.extend(MinusEpsEps(a, b) for a in range(b - 1, 0, -1))
    return out


def _shift_and_sign(f, deg, m, blocks):
    """Return ``(z, sign, base)`` so that coefficient_s = sign^s/(base^s s!) G_s(z)."""
    if f.kind == "m2e":
        z = -mpq(deg[blocks[f.a - 1]]) - mpq(m, 2) + f.a
        return z, 1, 4
    if f.kind == "mee":
        z = -mpq(deg[blocks[f.a - 1]] + deg[blocks[f.b - 1]]) - m + f.a + f.b
        return z, 1, 1
    z = mpq(deg[blocks[f.a - 1]] - deg[blocks[f.b - 1]] + f.b - f.a)
    return z, -1, 1


def _ops(f, blocks):
    """``(lower, raise)`` callables: term s is ``raise^s lower^s``."""
    if f.kind == "m2e":
        ba = blocks[f.a - 1]
        return (lambda p: inner_dd(p, ba, ba)), (lambda p: inner_uu(p, ba, ba))
    ba, bb = blocks[f.a - 1], blocks[f.b - 1]
    if f.kind == "mee":
        return (lambda p: inner_dd(p, ba, bb)), (lambda p: inner_uu(p, ba, bb))
    return (lambda p: inner_ud(p, ba, bb)), (lambda p: inner_ud(p, bb, ba))


def _default_blocks(p, blocks):
    if blocks is None:
        return tuple(range(1, p.k + 1))
    return tuple(blocks)


def pi_factor(f: ProjectorFactor, p: Poly, blocks=None) -> Poly:
    """Apply one projector factor (truncated series) to ``p``.

    Inhomogeneous input is split into multihomogeneous parts.
    """
    blocks = _default_blocks(p, blocks)
    if not p:
        return p
    parts = p.homogeneous_parts()
    if len(parts) > 1:
        out = Poly.zero(p.k, p.m)
        for part in parts.values():
            out = out + pi_factor(f, part, blocks)
        return out
    (deg,) = parts
    lower, lift = _ops(f, blocks)
    derivs = [p]
    while True:
        nxt = lower(derivs[-1])
        if not nxt:
            break
        derivs.append(nxt)
    z, sign, base = _shift_and_sign(f, deg, p.m, blocks)
    coeffs = [mpq(1)]
    for s in range(1, len(derivs)):
        denom = z + s
        if not denom:
            raise PoleError(str(f), deg, p.m, f"series index s={s}")
        coeffs.append(coeffs[-1] * sign / (base * s * denom))
    # Horner: c0 p + R(c1 L p + R(c2 L^2 p + ...))
    acc = derivs[-1] * coeffs[-1]
    for s in range(len(derivs) - 2, -1, -1):
        acc = derivs[s] * coeffs[s] + lift(acc)
    return acc


def pi_sp2k(p: Poly, blocks=None, factors=None) -> Poly:
    """Extremal projector of sp(2K) on the given blocks (default: all dummies).

    ``factors`` overrides the factor list (leftmost first); used by mutation
    tests.
    """
    blocks = _default_blocks(p, blocks)
    if factors is None:
        factors = normal_order(len(blocks))
    out = p
    for f in reversed(factors):
        if not out:
            break
        out = pi_factor(f, out, blocks)
    return out


def _gamma_text(z_text, s):
    return "*".join(f"({z_text}+{t})" for t in range(1, s + 1))


def factor_word(f: ProjectorFactor, max_s: int, blocks=None, k=None) -> OperatorWord:
    """Series of ``f`` truncated after ``max_s`` as a word with Euler scalars."""
    if blocks is None:
        blocks = tuple(range(1, (k or max(f.a, f.b)) + 1))
    if f.kind == "m2e":
        ba = blocks[f.a - 1]
        z = f"(-E{ba}-m/2+{f.a})"
        low, up, sign, base = InnerDD(ba, ba), InnerUU(ba, ba), 1, 4
    elif f.kind == "mee":
        ba, bb = blocks[f.a - 1], blocks[f.b - 1]
        z = f"(-E{ba}-E{bb}-m+{f.a + f.b})"
        low, up, sign, base = InnerDD(ba, bb), InnerUU(ba, bb), 1, 1
    else:
        ba, bb = blocks[f.a - 1], blocks[f.b - 1]
        z = f"(E{ba}-E{bb}+{f.b - f.a})"
        low, up, sign, base = InnerUD(ba, bb), InnerUD(bb, ba), -1, 1
    seqs = [(1, ())]
    for s in range(1, max_s + 1):
        c = mpq(sign ** s, base ** s * factorial(s))
        sc = Scalar(f"1/({_gamma_text(z, s)})")
        seqs.append((c, (sc,) + (up,) * s + (low,) * s))
    return OperatorWord(seqs)


def _series_bound(f, deg, blocks):
    if f.kind == "m2e":
        return deg[blocks[f.a - 1]] // 2
    if f.kind == "mee":
        return min(deg[blocks[f.a - 1]], deg[blocks[f.b - 1]])
    return deg[blocks[f.b - 1]]


def pi_sp2k_word(k: int, degree, blocks=None, factors=None) -> OperatorWord:
    """The projector as a word, truncated for inputs of the given multidegree."""
    if blocks is None:
        blocks = tuple(range(1, k + 1))
    if factors is None:
        factors = normal_order(len(blocks))
    w = OperatorWord.identity()
    for f in factors:
        w = w * factor_word(f, _series_bound(f, degree, blocks), blocks)
    return w


# -- single variable harmonic projection and the sp(4) oracle algebra ----------------

def harmonic_projection(p: Poly, block: int) -> Poly:
    """Projection onto the harmonic part in one block (sl(2) extremal projector)."""
    return pi_factor(Minus2Eps(1), p, blocks=(block,))


def pi_u_word(u: int = 1, x: int = 0) -> OperatorWord:
    """``pi_u[<u,d_x>] = <u,d_x> - |u|^2 <d_u,d_x> / (2E_u + m - 4)``."""
    return OperatorWord(
        [
            (1, (InnerUD(u, x),)),
            (-1, (Scalar(f"1/(2*E{u}+m-4)"), InnerUU(u, u), InnerDD(u, x))),
        ]
    )


def pi_harmonic_u(word_arg: OperatorWord | None, p: Poly, u: int = 1) -> Poly:
    """``pi_u[word_arg] p``: apply ``word_arg`` then project harmonically in ``u``.

    ``word_arg=None`` (or ``<u,d_x>``) uses the closed two-term form.
    """
    if word_arg is None or word_arg == OperatorWord.of(InnerUD(u, 0)):
        return pi_u_word(u, 0)(p)
    return harmonic_projection(word_arg(p), u)


def sp4_generator(g: str, p: Poly, u: int = 1, v: int = 2) -> Poly:
    """The generators ``C, A, S_u, S_v`` acting with blocks ``u`` and ``v``."""
    if g == "C":
        q = inner_uu(p, u, v)
    elif g == "A":
        q = inner_dd(p, u, v)
    elif g == "S_u":
        q = inner_ud(p, u, v)
    elif g == "S_v":
        q = inner_ud(p, v, u)
    else:
        raise ValueError(f"unknown sp(4) generator {g!r}")
    return harmonic_projection(harmonic_projection(q, u), v)
