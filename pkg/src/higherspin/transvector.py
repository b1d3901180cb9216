"""Raising and lowering operators of the transvector algebra, and the
decomposition of type A kernels into simplicial harmonic summands.

With ``E_ab = <u_a, d_b>`` (block 0 is ``x``) and ``h_i = E_ii - i``::

    z_i0 = sum_{i > i_1 > ... > i_s >= 1} E_{i i_1} ... E_{i_s 0} prod_{j not in I} (h_i - h_j)
    z_0i = sum_{i < i_1 < ... < i_s <= k} E_{i_1 i} ... E_{0 i_s}   prod_{j not in I} (h_i - h_j)

and the rescaled ``s`` operators carry ``1/prod_{j in I}(h_i - h_j)`` instead.
The ``h`` factors stand to the right, so they are evaluated on the input.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product

from higherspin import _kernels as K
from higherspin.extremal import pi_sp2k
from higherspin.liealg import InnerUD, OperatorWord, PoleError, Scalar, inner_ud
from higherspin.polyalg import Poly
from higherspin.spaces import (
    _int_terms,
    basis_simplicial,
    basis_typeA,
    check_dominant,
    count_monomials,
    monomials_of_degree,
    rank_polys,
    typeA_constraints,
)

__all__ = [
    "z_word",
    "z_raise",
    "z_lower",
    "s_raise",
    "s_lower",
    "h_difference",
    "embedding_rho",
    "admissible_shifts",
    "mu_of_shift",
    "decompose_typeA",
    "DecompositionReport",
    "highest_weight_vectors",
    "weight_space_dim",
    "betweenness",
    "SizeRefusal",
    "max_monomials",
]


class SizeRefusal(RuntimeError):
    """The instance exceeds the desk-scale limit ``HSL_MAX_MONOMIALS``."""


def max_monomials():
    return int(os.environ.get("HSL_MAX_MONOMIALS", "50000"))


def h_difference(i, j):
    """``h_i - h_j = E_i - E_j - i + j`` as scalar text."""
    return f"(E{i}-E{j}-{i}+{j})"


def _chains(i, k, lower):
    pool = list(range(i + 1, k + 1)) if lower else list(range(i - 1, 0, -1))
    for mask in range(1 << len(pool)):
        yield [v for t, v in enumerate(pool) if mask >> t & 1], pool


def z_word(i: int, k: int, lower=False, rescaled=False) -> OperatorWord:
    """``z_i0`` (or ``z_0i`` with ``lower``); ``rescaled`` gives ``s_i0`` / ``s_0i``."""
    if not 1 <= i <= k:
        raise ValueError(f"index {i} outside 1..{k}")
    seqs = []
    for chain, pool in _chains(i, k, lower):
        if lower:
            path = [i] + chain
            items = [InnerUD(path[t + 1], path[t]) for t in range(len(path) - 1)]
            items.append(InnerUD(0, path[-1]))
        else:
            path = [i] + chain
            items = [InnerUD(path[t], path[t + 1]) for t in range(len(path) - 1)]
            items.append(InnerUD(path[-1], 0))
        if rescaled:
            if chain:
                items.append(Scalar("1/(" + "*".join(h_difference(i, j) for j in chain) + ")"))
        else:
            rest = [j for j in pool if j not in chain]
            if rest:
                items.append(Scalar("*".join(h_difference(i, j) for j in rest)))
        seqs.append((1, tuple(items)))
    return OperatorWord(seqs)


_WORDS = {}


def _word(i, k, lower, rescaled):
    key = (i, k, lower, rescaled)
    if key not in _WORDS:
        _WORDS[key] = z_word(i, k, lower, rescaled)
    return _WORDS[key]


def _apply(i, p, lower, rescaled):
    if not p:
        return p
    try:
        return _word(i, p.k, lower, rescaled)(p)
    except PoleError as exc:
        raise PoleError(exc.expr, exc.degree, exc.m, f"vanishing h-difference in s/z index {i}") from None


def z_raise(i: int, p: Poly) -> Poly:
    return _apply(i, p, False, False)


def z_lower(i: int, p: Poly) -> Poly:
    return _apply(i, p, True, False)


def s_raise(i: int, p: Poly) -> Poly:
    return _apply(i, p, False, True)


def s_lower(i: int, p: Poly) -> Poly:
    return _apply(i, p, True, True)


# -- embedding factors and admissible shifts -------------------------------------------

def admissible_shifts(lam0, lam):
    """All ``d`` with ``lam_i - lam_{i+1} >= d_i >= 0`` and ``0 <= d_k <= lam_k``.

    For ``lam0 < lam1`` the shifts giving a non-dominant ``mu`` (those with
    ``lam0 + sum(d) < lam1``) are omitted.
    """
    lam = check_dominant(lam, "lambda")
    if lam0 < 0:
        raise ValueError(f"lambda0 must be non-negative, got {lam0}")
    k = len(lam)
    ranges = [range(lam[i] - lam[i + 1] + 1) for i in range(k - 1)]
    if k:
        ranges.append(range(lam[-1] + 1))
    return [tuple(d) for d in product(*ranges) if not k or lam0 + sum(d) >= lam[0]]


def mu_of_shift(lam0, lam, d):
    return (lam0 + sum(d),) + tuple(l - di for l, di in zip(lam, d))


def embedding_rho(d, p: Poly) -> Poly:
    """``rho_d p = s_10^{d_1} ... s_k0^{d_k} p`` (``s_k0`` acts first)."""
    d = tuple(d)
    if len(d) != p.k or any(v < 0 for v in d):
        raise ValueError(f"shift {d} does not fit k={p.k}")
    out = p
    for i in range(len(d), 0, -1):
        for _ in range(d[i - 1]):
            out = s_raise(i, out)
    return out


@dataclass
class DecompositionReport:
    lambda0: int
    lam: tuple
    m: int
    summands: list = field(default_factory=list)
    total_dim: int = 0
    kernel_dim: int = 0
    consistent: bool = False
    diagnostics: list = field(default_factory=list)
    images: dict = field(default_factory=dict, repr=False)

    @property
    def k(self):
        return len(self.lam)

    def to_json(self):
        return {
            "lambda0": self.lambda0,
            "lambda": list(self.lam),
            "m": self.m,
            "summands": [{"d": list(s["d"]), "mu": list(s["mu"]), "dim": s["dim"]} for s in self.summands],
            "total_dim": self.total_dim,
            "kernel_dim": self.kernel_dim,
            "consistent": self.consistent,
            "diagnostics": list(self.diagnostics),
        }


def _annihilated(p: Poly, constraints) -> bool:
    return all(not g.apply(p) for g in constraints)


def decompose_typeA(lam0, lam, m, kernel=None) -> DecompositionReport:
    """Decompose ``ker^A_{lam0} D_lam`` as ``sum_d rho_d H_{mu(d)}`` and verify it exactly."""
    lam = check_dominant(lam, "lambda")
    k = len(lam)
    if m < 2 * (k + 1):
        raise ValueError(f"decomposition needs m >= 2(k+1) = {2 * (k + 1)}; got m={m}")
    rep = DecompositionReport(lam0, lam, m)
    if kernel is None:
        kernel = basis_typeA(lam0, lam, m)
    rep.kernel_dim = kernel.dim
    cons = typeA_constraints(k)
    everything = []
    ok = True
    for d in admissible_shifts(lam0, lam):
        mu = mu_of_shift(lam0, lam, d)
        entry = {"d": d, "mu": mu, "dim": 0}
        H = basis_simplicial(mu, m)
        entry["dim"] = H.dim
        try:
            imgs = [embedding_rho(d, h) for h in H.basis]
        except PoleError as exc:
            rep.diagnostics.append(f"d={list(d)}: {exc}")
            ok = False
            rep.summands.append(entry)
            continue
        if any(not q for q in imgs):
            rep.diagnostics.append(f"d={list(d)}: embedding sends a basis element to zero")
            ok = False
        if not all(_annihilated(q, cons) for q in imgs):
            rep.diagnostics.append(f"d={list(d)}: image not in the type A kernel")
            ok = False
        r = rank_polys(imgs, symmetric=True)
        if r != H.dim:
            rep.diagnostics.append(f"d={list(d)}: embedding not injective (rank {r} < {H.dim})")
            ok = False
        rep.images[d] = imgs
        everything.extend(imgs)
        rep.summands.append(entry)
    rep.total_dim = sum(s["dim"] for s in rep.summands)
    if rep.total_dim != rep.kernel_dim:
        rep.diagnostics.append(f"sum of dims {rep.total_dim} != kernel dim {rep.kernel_dim}")
        ok = False
    r_all = rank_polys(everything, symmetric=True)
    if r_all != rep.total_dim:
        rep.diagnostics.append(f"summands not independent (rank {r_all} < {rep.total_dim})")
        ok = False
    if rank_polys(everything + list(kernel.basis), symmetric=True) != rep.kernel_dim or r_all != rep.kernel_dim:
        rep.diagnostics.append("span of the summands differs from the type A kernel")
        ok = False
    rep.consistent = ok
    return rep


# -- weight spaces of gl(k)-highest weight vectors ---------------------------------------

def betweenness(mu, nu) -> bool:
    """``mu_0 >= nu_1 >= mu_1 >= ... >= nu_k >= mu_k``."""
    mu, nu = tuple(mu), tuple(nu)
    if len(mu) != len(nu) + 1:
        raise ValueError("need len(mu) == len(nu) + 1")
    return all(mu[i] >= nu[i] >= mu[i + 1] for i in range(len(nu)))


def _highest_vector(mu, m):
    """A nonzero element of ``H_mu`` (blocks ``0..k``), via the extremal projector."""
    k = len(mu) - 1
    blocks = tuple(range(k + 1))
    for mono in monomials_of_degree(k, m, mu):
        h = pi_sp2k(Poly._raw(k, m, {mono: 1}), blocks=blocks)
        if h:
            return h
    raise ValueError(f"H_mu is zero for mu={mu}, m={m}")


def _independent(polys):
    if not polys:
        return []
    k, m = polys[0].k, polys[0].m
    rows = [_int_terms(p) for p in polys if p]
    return [Poly._raw(k, m, {mono: v for mono, v in r.items()}) for _, r in K.echelon(rows, 0)]


def highest_weight_vectors(mu, nu, m):
    """Basis of ``V(mu)^+_nu``: vectors of weight ``nu`` killed by ``E_ab``, ``1 <= a < b <= k``.

    ``V(mu)`` is generated from one nonzero element of ``H_mu`` by the
    lowering operators ``E_ab`` (``a > b``, indices ``0..k``).
    """
    mu = check_dominant(mu, "mu")
    nu = tuple(int(v) for v in nu)
    k = len(nu)
    if len(mu) != k + 1:
        raise ValueError("need len(mu) == len(nu) + 1")
    if count_monomials(m, mu) > max_monomials():
        raise SizeRefusal(
            f"H_mu for mu={mu}, m={m} has {count_monomials(m, mu)} monomials "
            f"(limit HSL_MAX_MONOMIALS={max_monomials()})"
        )
    target = (sum(mu) - sum(nu),) + nu
    if target[0] < 0 or any(v < 0 for v in nu):
        return []
    prefix_mu = [sum(mu[: i + 1]) for i in range(k + 1)]

    def dominated(w):
        return all(sum(w[: i + 1]) <= prefix_mu[i] for i in range(k + 1))

    if not dominated(target):
        return []
    h = _highest_vector(mu, m)
    memo = {tuple(mu): [h]}

    def space(w):
        if w in memo:
            return memo[w]
        gens = []
        for a in range(k + 1):
            for b in range(a):
                # E_ab moves one degree from block b to block a
                if w[a] == 0:
                    continue
                pre = list(w)
                pre[a] -= 1
                pre[b] += 1
                pre = tuple(pre)
                if dominated(pre):
                    gens.extend(inner_ud(v, a, b) for v in space(pre))
        memo[w] = _independent([g for g in gens if g])
        return memo[w]

    W = space(target)
    if not W:
        return []
    row_of = {}
    rows = []
    for col, v in enumerate(W):
        for a in range(1, k + 1):
            for b in range(a + 1, k + 1):
                for mono, c in _int_terms(inner_ud(v, a, b)).items():
                    key = (a, b, mono)
                    ri = row_of.get(key)
                    if ri is None:
                        ri = row_of[key] = len(rows)
                        rows.append({})
                    rows[ri][col] = c
    out = []
    for vec in K.nullspace(rows, len(W)):
        acc = Poly.zero(h.k, m)
        for col, c in vec.items():
            acc = acc + W[col] * c
        out.append(acc)
    return out


def weight_space_dim(mu, nu, m) -> int:
    return len(highest_weight_vectors(mu, nu, m))
