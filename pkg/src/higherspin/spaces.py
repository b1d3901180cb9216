"""Exact bases of kernels of invariant constraint operators.

All constraint operators used here (``<d_i,d_j>``, ``<u_i,d_j>``,
``<u_i,u_j>``) are sums over the coordinate index, so they

* preserve the parity of the total exponent of every coordinate, and
* commute with permutations of the coordinates.

Kernels are therefore computed one parity class at a time, and only for one
class per permutation orbit; the remaining classes are obtained by permuting
coordinates.  Rank and membership checks are split per class the same way
(but computed for every class).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import comb, gcd

from gmpy2 import mpq

from higherspin import _kernels as K
from higherspin.liealg import Generator, InnerDD, InnerUD
from higherspin.polyalg import Poly, _mono_key

__all__ = [
    "ExactMatrix",
    "monomials_of_degree",
    "count_monomials",
    "basis_monomials",
    "kernel_basis",
    "simplicial_constraints",
    "howe_constraints",
    "typeA_constraints",
    "basis_simplicial",
    "basis_howe",
    "basis_typeA",
    "SubspaceBasis",
    "membership",
    "span_equal",
    "rank_polys",
    "check_dominant",
]


# -- dense exact matrices (small sizes; also the elimination oracle) -----------------

class ExactMatrix:
    """Dense rational matrix with fraction-free (Bareiss) elimination."""

    def __init__(self, rows):
        self.rows = [[mpq(v) for v in r] for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0

    def _integer_rows(self):
        out = []
        for r in self.rows:
            den = 1
            for v in r:
                den = den * v.denominator // gcd(den, v.denominator)
            out.append([int(v * den) for v in r])
        return out

    def bareiss(self):
        """Row echelon form by Bareiss' exact-division algorithm.

        Returns ``(matrix, pivot_columns)``; all divisions are exact.
        """
        a = self._integer_rows()
        n, ncols = self.nrows, self.ncols
        pivots = []
        prev = 1
        r = 0
        for c in range(ncols):
            if r >= n:
                break
            piv = next((i for i in range(r, n) if a[i][c]), None)
            if piv is None:
                continue
            a[r], a[piv] = a[piv], a[r]
            for i in range(r + 1, n):
                for j in range(c + 1, ncols):
                    num = a[r][c] * a[i][j] - a[i][c] * a[r][j]
                    q, rem = divmod(num, prev)
                    assert rem == 0, "Bareiss division must be exact"
                    a[i][j] = q
                a[i][c] = 0
            prev = a[r][c]
            pivots.append(c)
            r += 1
        return a, pivots

    def rank(self):
        return len(self.bareiss()[1])

    def nullspace(self):
        """Basis of the right nullspace as lists of rationals."""
        a, pivots = self.bareiss()
        free = [c for c in range(self.ncols) if c not in set(pivots)]
        basis = []
        for f in free:
            x = [mpq(0)] * self.ncols
            x[f] = mpq(1)
            for idx in range(len(pivots) - 1, -1, -1):
                c = pivots[idx]
                row = a[idx]
                s = sum((row[j] * x[j] for j in range(c + 1, self.ncols)), mpq(0))
                x[c] = -s / row[c]
            basis.append(x)
        return basis


# -- monomials --------------------------------------------------------------------

def _block_monomials(d, m):
    for combo in combinations_with_replacement(range(m), d):
        e = [0] * m
        for t in combo:
            e[t] += 1
        yield e


def monomials_of_degree(k, m, degree):
    """All exponent tuples of multidegree ``degree`` (length ``k+1``)."""
    degree = tuple(degree)
    if len(degree) != k + 1:
        raise ValueError(f"degree {degree} must have k+1={k + 1} entries")
    out = [[]]
    for d in degree:
        out = [pre + e for pre in out for e in _block_monomials(d, m)]
    return sorted((tuple(e) for e in out), key=_mono_key)


def count_monomials(m, degree):
    n = 1
    for d in degree:
        n *= comb(d + m - 1, m - 1)
    return n


def basis_monomials(degree, k, m):
    return [Poly._raw(k, m, {mono: mpq(1)}) for mono in monomials_of_degree(k, m, degree)]


def _parity(mono, m):
    return tuple([sum(mono[t::m]) & 1 for t in range(m)])


def _canonical(par):
    w = sum(par)
    return (1,) * w + (0,) * (len(par) - w)


def _perm_to(par):
    """Coordinate map sending the canonical class onto ``par`` (order preserving)."""
    ones = [t for t, v in enumerate(par) if v]
    zeros = [t for t, v in enumerate(par) if not v]
    return ones + zeros


def _permute(mono, sigma, m):
    out = [0] * len(mono)
    for idx, e in enumerate(mono):
        if e:
            b, t = divmod(idx, m)
            out[b * m + sigma[t]] = e
    return tuple(out)


def _classify(terms, m):
    """Split a term map into parity classes."""
    return K.classify(terms, m)


# -- kernels ----------------------------------------------------------------------

def _apply_raw(g: Generator, terms, m):
    if g.kind == "InnerDD":
        return K.apply_dd(terms, g.i, g.j, m)
    if g.kind == "InnerUD":
        return K.apply_ud(terms, g.i, g.j, m)
    if g.kind == "InnerUU":
        return K.mul_uu(terms, g.i, g.j, m)
    raise ValueError(f"{g} is not an O(m)-invariant bilinear constraint")


def _class_kernel(monos, constraints, m):
    row_of = {}
    rows = []
    for col, mono in enumerate(monos):
        for gi, g in enumerate(constraints):
            for tgt, v in _apply_raw(g, {mono: 1}, m).items():
                key = (gi, tgt)
                ri = row_of.get(key)
                if ri is None:
                    ri = row_of[key] = len(rows)
                    rows.append({})
                rows[ri][col] = v
    vecs = K.nullspace(rows, len(monos))
    return [{monos[c]: v for c, v in vec.items()} for vec in vecs]


def kernel_basis(k, m, degree, constraints, use_symmetry=True):
    """Integer basis of the common kernel of ``constraints`` at ``degree``.

    Returns a list of :class:`Poly` with primitive integer coefficients,
    ordered by parity class and then by free monomial.
    """
    constraints = tuple(constraints)
    for g in constraints:
        if g.kind not in ("InnerDD", "InnerUD", "InnerUU"):
            raise ValueError(f"{g} is not an O(m)-invariant bilinear constraint")
    monos = monomials_of_degree(k, m, degree)
    classes = {}
    for mono in monos:
        classes.setdefault(_parity(mono, m), []).append(mono)
    cache = {}
    basis = []
    for par in sorted(classes, reverse=True):
        if use_symmetry:
            can = _canonical(par)
            if can not in cache:
                cache[can] = _class_kernel(classes[can], constraints, m)
            if par == can:
                vecs = cache[can]
            else:
                sigma = _perm_to(par)
                vecs = [K.permute_terms(vec, sigma, m) for vec in cache[can]]
        else:
            vecs = _class_kernel(classes[par], constraints, m)
        basis.extend(Poly._raw(k, m, {mono: mpq(v) for mono, v in vec.items()}) for vec in vecs)
    return basis


def check_dominant(mu, name="weight"):
    mu = tuple(int(v) for v in mu)
    if any(v < 0 for v in mu):
        raise ValueError(f"{name} {mu} has a negative entry")
    if any(mu[i] < mu[i + 1] for i in range(len(mu) - 1)):
        raise ValueError(f"{name} {mu} is not dominant (non-increasing)")
    return mu


def simplicial_constraints(blocks):
    blocks = tuple(blocks)
    out = [InnerDD(a, b) for ia, a in enumerate(blocks) for b in blocks[ia:]]
    out += [InnerUD(blocks[i], blocks[j]) for i in range(len(blocks)) for j in range(i + 1, len(blocks))]
    return out


def howe_constraints(k):
    return [InnerDD(a, b) for a in range(k + 1) for b in range(a, k + 1)]


def typeA_constraints(k):
    return howe_constraints(k) + [InnerUD(i, j) for i in range(1, k + 1) for j in range(i + 1, k + 1)]


@dataclass
class SubspaceBasis:
    """A basis of a subspace of polynomials of fixed multidegree."""

    k: int
    m: int
    degree: tuple
    basis: list
    constraints: tuple = ()
    _echelon: dict | None = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.basis)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)

    def __getitem__(self, i):
        return self.basis[i]

    def echelon(self):
        if self._echelon is None:
            self._echelon = _echelon_by_class(self.basis, self.m)
        return self._echelon

    def contains(self, p: Poly) -> bool:
        return membership(self, p)

    def to_json(self):
        return {
            "dim": self.dim,
            "constraints": [str(g) for g in self.constraints],
            "basis": [b.to_json() for b in self.basis],
        }


def basis_simplicial(mu, m, k=None, first_block=None):
    """Basis of ``H_mu``: simplicial harmonics of weight ``mu``.

    By default the context has ``k = len(mu) - 1`` dummies and ``mu`` sits on
    blocks ``0..len(mu)-1``.  With ``first_block=1`` the weight sits on the
    dummy blocks and the ``x`` degree is zero.
    """
    mu = check_dominant(mu, "mu")
    nonzero = sum(1 for v in mu if v)
    if nonzero > m // 2:
        raise ValueError(f"mu={mu} has more than floor(m/2)={m // 2} nonzero rows")
    if k is None:
        k = len(mu) - 1 if first_block in (None, 0) else len(mu)
    if first_block is None:
        first_block = 0
    blocks = tuple(range(first_block, first_block + len(mu)))
    if blocks and blocks[-1] > k:
        raise ValueError(f"mu={mu} does not fit in k={k} from block {first_block}")
    degree = [0] * (k + 1)
    for b, d in zip(blocks, mu):
        degree[b] = d
    cons = simplicial_constraints(blocks)
    return SubspaceBasis(k, m, tuple(degree), kernel_basis(k, m, degree, cons), tuple(cons))


def basis_howe(d, k, m):
    """Kernel of all ``<d_i,d_j>`` (``0 <= i <= j <= k``) at multidegree ``d``."""
    cons = howe_constraints(k)
    return SubspaceBasis(k, m, tuple(d), kernel_basis(k, m, d, cons), tuple(cons))


def basis_typeA(lam0, lam, m):
    """Basis of the type A kernel ``ker^A_{lam0} D_lam``.

    Polynomials of multidegree ``(lam0, lam)`` killed by ``Delta_x``,
    ``<d_i,d_x>``, ``<d_i,d_j>`` and ``<u_i,d_j>`` (``1 <= i < j <= k``).
    """
    lam = check_dominant(lam, "lambda")
    k = len(lam)
    if not k < m // 2:
        raise ValueError(f"need k < floor(m/2); got k={k}, m={m}")
    if lam0 < 0:
        raise ValueError(f"lambda0 must be non-negative, got {lam0}")
    cons = typeA_constraints(k)
    degree = (int(lam0),) + lam
    return SubspaceBasis(k, m, degree, kernel_basis(k, m, degree, cons), tuple(cons))


# -- rank and membership --------------------------------------------------------------

def _int_terms(p: Poly):
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // gcd(den, c.denominator)
    return {mono: int(c * den) for mono, c in p.terms.items()}


def _group_by_class(polys, m):
    groups = {}
    mixed = []
    for p in polys:
        if not p:
            continue
        cls = _classify(p.terms, m)
        if len(cls) == 1:
            groups.setdefault(next(iter(cls)), []).append(_int_terms(p))
        else:
            mixed.append(_int_terms(p))
    return groups, mixed


def _is_permuted_copy(rows, ref_rows, par, m):
    """Is ``rows`` (as a multiset) the image of ``ref_rows`` under the canonical-to-``par`` map?"""
    if len(rows) != len(ref_rows):
        return False
    sigma = _perm_to(par)
    moved = Counter(frozenset(K.permute_terms(r, sigma, m).items()) for r in ref_rows)
    return moved == Counter(frozenset(r.items()) for r in rows)


def _echelon_by_class(polys, m, symmetric=False):
    """``{parity class: reduced echelon pivots}``, or ``{None: ...}`` if mixed.

    With ``symmetric=True`` a class whose rows are exactly a coordinate
    permutation of its canonical class's rows reuses that class's rank; the
    pivots stored for it are then ``None``.  This is checked, never assumed.
    """
    groups, mixed = _group_by_class(polys, m)
    if mixed:
        rows = mixed + [r for g in groups.values() for r in g]
        return {None: K.echelon(rows, 0)}
    out = {}
    for par in sorted(groups, reverse=True):
        can = _canonical(par)
        if symmetric and par != can and can in groups and out.get(can) is not None:
            if _is_permuted_copy(groups[par], groups[can], par, m):
                out[par] = None
                continue
        out[par] = K.echelon(groups[par], 0)
    return out


def _reduce(vec, pivots):
    for c, r in pivots:
        a = vec.get(c)
        if not a:
            continue
        p = r[c]
        g = gcd(p, a)
        pa, aa = p // g, a // g
        new = {cc: pa * v for cc, v in vec.items()}
        for cc, v in r.items():
            new[cc] = new.get(cc, 0) - aa * v
        vec = {cc: v for cc, v in new.items() if v}
        if not vec:
            break
    return vec


def membership(basis, p: Poly) -> bool:
    """Exact test ``p in span(basis)``."""
    if not p:
        return True
    if not isinstance(basis, SubspaceBasis):
        basis = SubspaceBasis(p.k, p.m, (), list(basis))
    ech = basis.echelon()
    if None in ech:
        return not _reduce(_int_terms(p), ech[None])
    for cls, terms in _classify(_int_terms(p), p.m).items():
        piv = ech.get(cls)
        if piv is None or _reduce(terms, piv):
            return False
    return True


def rank_polys(polys, symmetric=False) -> int:
    """Exact rank.  ``symmetric=True`` enables the checked orbit shortcut."""
    polys = [p for p in polys if p]
    if not polys:
        return 0
    ech = _echelon_by_class(polys, polys[0].m, symmetric)
    return sum(len(piv if piv is not None else ech[_canonical(par)]) for par, piv in ech.items())


def span_equal(b1, b2) -> bool:
    b1 = list(b1)
    b2 = list(b2)
    r1 = rank_polys(b1)
    if r1 != rank_polys(b2):
        return False
    return rank_polys(b1 + b2) == r1
