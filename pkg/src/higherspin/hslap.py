"""The higher spin Laplace operator and its conformal invariance.

For ``f`` valued in ``H_lambda`` (dominant ``lambda`` of length ``k``)::

    D_lambda f = Delta_x f + pi( sum_p c_p <u_p,d_x><d_p,d_x> f )

with ``pi`` the sp(2k) extremal projector on the dummies and::

    c_p = -4/(2E_p + m - 2p) * prod_{j<p} (2E_j + m - 2j + 2)/(2E_j + m - 2j)

evaluated at ``E = lambda``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from higherspin.extremal import normal_order, pi_sp2k, pi_sp2k_word, pi_u_word, sp4_generator
from higherspin.liealg import (
    CoordDiff,
    CoordMul,
    Euler,
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
from higherspin.polyalg import Poly, VarRef, random_poly
from higherspin.spaces import basis_simplicial, check_dominant

__all__ = [
    "HSLaplaceSpec",
    "ValueSpaceError",
    "c_scalar",
    "c_coeff",
    "DLambda",
    "apply_Dlambda",
    "Dlambda_word",
    "apply_D2_reference",
    "check_value_space",
    "ConformalGenerator",
    "conformal_generators",
    "random_field",
    "verify_invariance",
    "CHECKS",
    "gradient",
    "gradient_adjoint",
    "two_var_projections",
    "lift_context",
    "ADJOINT_VARIANTS",
    "VacuousMutation",
]


class ValueSpaceError(ValueError):
    """The input is not valued in ``H_lambda``."""


@dataclass(frozen=True)
class HSLaplaceSpec:
    m: int
    lam: tuple

    def __post_init__(self):
        lam = check_dominant(self.lam, "lambda")
        object.__setattr__(self, "lam", lam)
        if self.m < 3:
            raise ValueError(f"need m >= 3, got m={self.m}")
        if not len(lam) < self.m // 2:
            raise ValueError(f"need k < floor(m/2); got k={len(lam)}, m={self.m}")

    @property
    def k(self):
        return len(self.lam)

    @property
    def degree(self):
        return (0,) + self.lam

    def to_json(self):
        return {"m": self.m, "lambda": list(self.lam)}


def c_scalar(p: int) -> Scalar:
    """``c_p`` as a rational function of the Euler operators."""
    def lin(j, shift):
        return f"(2*E{j}+m-{shift})" if shift else f"(2*E{j}+m)"

    text = f"-4/{lin(p, 2 * p)}"
    for j in range(1, p):
        text += f"*{lin(j, 2 * j - 2)}/{lin(j, 2 * j)}"
    return Scalar(text)


def c_coeff(p: int, spec: HSLaplaceSpec):
    """``(expression, value at lambda)`` of ``c_p``."""
    s = c_scalar(p)
    return s, s.evaluate(spec.degree, spec.m)


def check_value_space(spec: HSLaplaceSpec, f: Poly) -> None:
    """Raise :class:`ValueSpaceError` unless ``f`` is ``H_lambda``-valued."""
    if (f.k, f.m) != (spec.k, spec.m):
        raise ValueSpaceError(f"context (k={f.k}, m={f.m}) does not match {spec}")
    for deg in f.homogeneous_parts():
        if tuple(deg[1:]) != spec.lam:
            raise ValueSpaceError(f"dummy degrees {deg[1:]} differ from lambda={spec.lam}")
    k = spec.k
    for i in range(1, k + 1):
        for j in range(i, k + 1):
            if inner_dd(f, i, j):
                raise ValueSpaceError(f"<d{i},d{j}> f != 0")
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            if inner_ud(f, i, j):
                raise ValueSpaceError(f"<u{i},d{j}> f != 0")


class DLambda:
    """``D_lambda`` with optionally overridden coefficients or projector factors."""

    def __init__(self, spec: HSLaplaceSpec, coeffs=None, factors=None):
        self.spec = spec
        if coeffs is None:
            coeffs = [c_coeff(p, spec)[1] for p in range(1, spec.k + 1)]
        self.coeffs = [mpq(c) for c in coeffs]
        self.factors = list(normal_order(spec.k)) if factors is None else list(factors)

    def __call__(self, f: Poly, check=True) -> Poly:
        spec = self.spec
        if check:
            check_value_space(spec, f)
        out = inner_dd(f, 0, 0)
        inner = Poly.zero(f.k, f.m)
        for p, c in enumerate(self.coeffs, start=1):
            inner = inner + inner_ud(inner_dd(f, p, 0), p, 0) * c
        return out + pi_sp2k(inner, factors=self.factors)

    def word(self) -> OperatorWord:
        """The operator fully expanded, coefficients evaluated at ``lambda``."""
        spec = self.spec
        w = OperatorWord.of(InnerDD(0, 0))
        # inner result has dummy degrees lambda; x degree is irrelevant to pi
        proj = pi_sp2k_word(spec.k, spec.degree, factors=self.factors)
        for p, c in enumerate(self.coeffs, start=1):
            term = OperatorWord.of(InnerUD(p, 0), InnerDD(p, 0), coef=c)
            w = w + _evaluate_word(proj, spec) * term
        return w


def _evaluate_word(w: OperatorWord, spec: HSLaplaceSpec) -> OperatorWord:
    """Replace dummy-Euler scalars by their values on degree ``lambda``.

    Only valid for degree preserving words (such as the projector).
    """
    seqs = []
    for c, items in w.seqs:
        coef = mpq(c)
        rest = []
        for it in items:
            if isinstance(it, Scalar):
                coef *= it.evaluate(spec.degree, spec.m)
            else:
                rest.append(it)
        seqs.append((coef, tuple(rest)))
    return OperatorWord(seqs)


def apply_Dlambda(spec: HSLaplaceSpec, f: Poly, check=True) -> Poly:
    return DLambda(spec)(f, check=check)


def Dlambda_word(spec: HSLaplaceSpec) -> OperatorWord:
    return DLambda(spec).word()


def apply_D2_reference(f: Poly, m: int) -> Poly:
    """The k=1, lambda=(2) operator written out by hand.

    ``Delta_x f - 4/(m+2) (<u,d_x> g - |u|^2 <d_u,d_x> g / m)``, ``g = <d_u,d_x> f``.
    """
    check_value_space(HSLaplaceSpec(m, (2,)), f)
    g = inner_dd(f, 1, 0)
    inner = inner_ud(g, 1, 0) - inner_uu(inner_dd(g, 1, 0), 1, 1) * mpq(1, m)
    return inner_dd(f, 0, 0) - inner * mpq(4, m + 2)


# -- conformal generators -----------------------------------------------------------

def _x(j):
    return VarRef(0, j)


@dataclass(frozen=True)
class ConformalGenerator:
    """``Translation``, ``Rotation``, ``Dilation`` or ``SpecialConformal``."""

    kind: str
    a: int = 0
    b: int = 0

    def word(self, k: int, m: int) -> OperatorWord:
        """Action on fields; the intertwining partner is :meth:`partner_word`."""
        if self.kind == "Translation":
            return OperatorWord.of(CoordDiff(_x(self.a)))
        if self.kind == "Rotation":
            seqs = []
            for blk in range(k + 1):
                va, vb = VarRef(blk, self.a), VarRef(blk, self.b)
                seqs.append((1, (CoordMul(va), CoordDiff(vb))))
                seqs.append((-1, (CoordMul(vb), CoordDiff(va))))
            return OperatorWord(seqs)
        if self.kind == "Dilation":
            return OperatorWord([(1, (Euler(0),)), (mpq(m - 2, 2), ())])
        if self.kind == "SpecialConformal":
            j = self.a
            xj = _x(j)
            seqs = [(1, (InnerUU(0, 0), CoordDiff(xj)))]
            seqs.append((-2, (CoordMul(xj), Euler(0))))
            seqs.append((-(m - 2), (CoordMul(xj),)))
            for p in range(1, k + 1):
                seqs.append((2, (InnerUU(p, 0), CoordDiff(VarRef(p, j)))))
                seqs.append((-2, (CoordMul(VarRef(p, j)), InnerUD(0, p))))
            return OperatorWord(seqs)
        raise ValueError(f"unknown conformal generator {self.kind!r}")

    def partner_word(self, k: int, m: int) -> OperatorWord:
        """The target-side action ``D G = G' D``."""
        if self.kind == "Dilation":
            return OperatorWord([(1, (Euler(0),)), (mpq(m + 2, 2), ())])
        if self.kind == "SpecialConformal":
            return self.word(k, m) - OperatorWord.of(CoordMul(_x(self.a)), coef=4)
        return self.word(k, m)

    def __str__(self):
        if self.kind == "Rotation":
            return f"L{self.a}{self.b}"
        if self.kind == "Dilation":
            return "E"
        return f"{self.kind[0]}{self.a}"


def conformal_generators(check: str, m: int):
    """The generators exercised by one verifier check, in a fixed order."""
    if check == "translation":
        return [ConformalGenerator("Translation", j) for j in range(1, m + 1)]
    if check == "rotation":
        return [ConformalGenerator("Rotation", a, b) for a in range(1, m + 1) for b in range(a + 1, m + 1)]
    if check == "dilation":
        return [ConformalGenerator("Dilation")]
    if check == "sct":
        return [ConformalGenerator("SpecialConformal", j) for j in range(1, m + 1)]
    raise ValueError(f"unknown check {check!r}")


CHECKS = ("translation", "rotation", "dilation", "sct")

_BASES = {}


def _value_basis(spec):
    key = (spec.m, spec.lam)
    if key not in _BASES:
        _BASES[key] = basis_simplicial(spec.lam, spec.m, k=spec.k, first_block=1).basis
    return _BASES[key]


def random_field(spec: HSLaplaceSpec, x_degree: int, rng: random.Random, nparts=3, xterms=3) -> Poly:
    """Random ``H_lambda``-valued field ``sum_t phi_t(x) h_t`` with ``deg phi_t = x_degree``."""
    basis = _value_basis(spec)
    if not basis:
        raise ValueError(f"H_lambda is zero-dimensional for m={spec.m}, lambda={spec.lam}")
    f = Poly.zero(spec.k, spec.m)
    xdeg = (x_degree,) + (0,) * spec.k
    for _ in range(nparts):
        h = basis[rng.randrange(len(basis))]
        phi = random_poly(rng, spec.k, spec.m, xdeg, xterms)
        f = f + phi * h
    if not f:
        return random_field(spec, x_degree, rng, nparts, xterms)
    return f


class VacuousMutation(ValueError):
    """The requested mutation does not change the operator on the trial fields."""


def _mutated(spec, mutate, probes=()):
    if mutate is None:
        return DLambda(spec)
    base = DLambda(spec)
    if mutate == "c1_plus_one":
        if not spec.k:
            raise VacuousMutation("c1_plus_one needs k >= 1")
        return DLambda(spec, coeffs=[base.coeffs[0] + 1] + base.coeffs[1:])
    if mutate == "drop_factor":
        # drop the leftmost factor whose removal changes D on the probes;
        # on a given H_lambda several factors can act trivially
        reference = [base(f, check=False) for f in probes]
        for idx in range(len(base.factors)):
            cand = DLambda(spec, factors=base.factors[:idx] + base.factors[idx + 1:])
            if any(cand(f, check=False) != r for f, r in zip(probes, reference)):
                return cand
        raise VacuousMutation(f"no projector factor acts non-trivially for lambda={spec.lam}, m={spec.m}")
    raise ValueError(f"unknown mutation {mutate!r}")


def verify_invariance(spec: HSLaplaceSpec, checks=CHECKS, trials=3, seed=0, x_degree=2,
                      check_values=True, mutate=None, operator=None):
    """Check the conformal intertwining identities exactly on random fields.

    Returns a JSON-ready report; the order of checks is canonical.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    unknown = set(checks) - set(CHECKS)
    if unknown:
        raise ValueError(f"unknown checks {sorted(unknown)}")
    rng = random.Random(seed)
    fields = [random_field(spec, x_degree, rng) for _ in range(trials)]
    D = operator if operator is not None else _mutated(spec, mutate, fields)
    k, m = spec.k, spec.m
    out = []
    for name in CHECKS:
        if name not in checks:
            continue
        gens = [(g, g.word(k, m), g.partner_word(k, m)) for g in conformal_generators(name, m)]
        entry = {"name": name, "trials": trials, "pass": True, "counterexample": None}
        for f in fields:
            Df = D(f, check=check_values)
            bad = next((g for g, w, pw in gens if D(w(f), check=check_values) != pw(Df)), None)
            if bad is not None:
                entry.update({"pass": False, "counterexample": f.to_json(), "generator": str(bad)})
                break
        out.append(entry)
    return {
        "spec": {"m": m, "k": k, "lambda": list(spec.lam), "x_degree": x_degree},
        "checks": out,
        "seed": seed,
    }


# -- generalized gradients ----------------------------------------------------------

def gradient(spec: HSLaplaceSpec, j: int, f: Poly, check=True) -> Poly:
    """``G_{e_j} f = pi(<u_j,d_x> f)``."""
    if check:
        check_value_space(spec, f)
    return pi_sp2k(inner_ud(f, j, 0))


def _expanded_adjoint_word(j, k):
    """``<d_j,d_x> + sum over chains j < i_1 < ... < i_s <= k``.

    The Euler denominators are evaluated on the input field.
    """
    seqs = [(1, (InnerDD(j, 0),))]
    rest = list(range(j + 1, k + 1))
    for mask in range(1, 1 << len(rest)):
        chain = [i for t, i in enumerate(rest) if mask >> t & 1]
        items = [InnerUD(chain[0], j)]
        items += [InnerUD(chain[t + 1], chain[t]) for t in range(len(chain) - 1)]
        items.append(InnerDD(chain[-1], 0))
        den = "*".join(f"(E{j}-E{i}+{i - j})" for i in chain)
        items.append(Scalar(f"1/({den})"))
        seqs.append((1, tuple(items)))
    return OperatorWord(seqs)


def _product_adjoint_word(j, k):
    w = OperatorWord.identity()
    for p in range(j + 1, k + 1):
        corr = OperatorWord.of(Scalar(f"1/(E{j}-E{p}+{p - j + 1})"), InnerUD(p, j), InnerUD(j, p))
        w = w * (OperatorWord.identity() - corr)
    return w * OperatorWord.of(InnerDD(j, 0))


ADJOINT_VARIANTS = ("projector_form", "product_form", "expanded_form")


def gradient_adjoint(spec: HSLaplaceSpec, j: int, variant: str, f: Poly, check=True) -> Poly:
    """``G*_{e_j} f`` in one of :data:`ADJOINT_VARIANTS`."""
    if check:
        check_value_space(spec, f)
    if variant == "projector_form":
        return pi_sp2k(inner_dd(f, j, 0))
    if variant == "product_form":
        return _product_adjoint_word(j, spec.k)(f)
    if variant == "expanded_form":
        return _expanded_adjoint_word(j, spec.k)(f)
    raise ValueError(f"unknown variant {variant!r}")


# -- the single dummy Stein-Weiss projections -----------------------------------------

def lift_context(p: Poly, k_new: int) -> Poly:
    """Embed ``p`` into a context with more dummy blocks (new blocks unused)."""
    if k_new < p.k:
        raise ValueError("cannot drop blocks")
    pad = (0,) * ((k_new - p.k) * p.m)
    return Poly._raw(k_new, p.m, {mono + pad: c for mono, c in p.terms.items()})


def two_var_projections(kind: str, f: Poly) -> Poly:
    """Projections of ``grad f`` for ``H_k``-valued ``f`` in one dummy ``u``.

    ``k_minus`` and ``k_plus`` return fields in the context of ``f``;
    ``middle`` returns the ``H_{k,1}`` part in a context with a second dummy
    ``v`` (block 2).
    """
    if f.k != 1:
        raise ValueError("two_var_projections expects one dummy variable")
    if not f:
        return f if kind != "middle" else lift_context(f, 2)
    udegs = {d[1] for d in f.homogeneous_parts()}
    if len(udegs) != 1:
        raise ValueError("f must be homogeneous in u")
    k, m = udegs.pop(), f.m
    if inner_dd(f, 1, 1):
        raise ValueError("f must be harmonic in u")
    if kind == "k_minus":
        den = (k + m - 3) * (2 * k + m - 2)
        if not den:
            raise PoleError("(k+m-3)(2k+m-2)", (k,), m)
        return inner_dd(f, 1, 0) * mpq(2 * k + m - 4, den)
    if kind == "k_plus":
        return pi_u_word(1, 0)(f) * mpq(1, k + 1)
    if kind == "middle":
        F = lift_context(f, 2)
        vdx = inner_ud(F, 2, 0)
        plus = lift_context(two_var_projections("k_plus", f), 2)
        out = vdx - sp4_generator("S_v", plus)
        if k >= 1:
            minus = lift_context(two_var_projections("k_minus", f), 2)
            out = out - sp4_generator("C", minus)
        return out
    raise ValueError(f"unknown projection {kind!r}")
