"""Independent reference implementations used as test oracles.

Everything here works on plain ``{exponent tuple: Fraction}`` maps and uses
``fractions.Fraction`` Gauss-Jordan elimination, sharing no code with the
package's kernels.
"""

from fractions import Fraction
from itertools import product


def to_dict(p):
    return {mono: Fraction(int(c.numerator), int(c.denominator)) for mono, c in p.terms.items()}


def clean(d):
    return {k: v for k, v in d.items() if v}


def nadd(a, b, s=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + s * v
    return clean(out)


def nscale(c, a):
    return clean({k: c * v for k, v in a.items()})


def nmul(a, b):
    out = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            key = tuple(x + y for x, y in zip(ka, kb))
            out[key] = out.get(key, 0) + va * vb
    return clean(out)


def ndiff(a, idx):
    out = {}
    for k, v in a.items():
        if k[idx]:
            key = list(k)
            key[idx] -= 1
            key = tuple(key)
            out[key] = out.get(key, 0) + v * k[idx]
    return clean(out)


def nmulvar(a, idx):
    out = {}
    for k, v in a.items():
        key = list(k)
        key[idx] += 1
        out[tuple(key)] = v
    return out


def ud(a, i, j, m):
    out = {}
    for t in range(m):
        out = nadd(out, nmulvar(ndiff(a, j * m + t), i * m + t))
    return out


def dd(a, i, j, m):
    out = {}
    for t in range(m):
        out = nadd(out, ndiff(ndiff(a, i * m + t), j * m + t))
    return out


def uu(a, i, j, m):
    out = {}
    for t in range(m):
        out = nadd(out, nmulvar(nmulvar(a, i * m + t), j * m + t))
    return out


def rref_rank(rows, ncols):
    """Rank by Gauss-Jordan over Fraction; ``rows`` are dense lists."""
    mat = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][c]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        pv = mat[rank][c]
        mat[rank] = [v / pv for v in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][c]:
                f = mat[r][c]
                mat[r] = [x - f * y for x, y in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def monomials(k, m, degree):
    """All exponent tuples of the given per-block degree (independent enumeration)."""
    blocks = []
    for d in degree:
        blocks.append([e for e in product(range(d + 1), repeat=m) if sum(e) == d])
    return [sum(parts, ()) for parts in product(*blocks)]


def operator_rank(k, m, degree, ops):
    """Rank of the stacked linear map ``p -> (op(p) for op in ops)`` on a degree."""
    src = monomials(k, m, degree)
    images = [[op({mono: Fraction(1)}) for op in ops] for mono in src]
    keys = sorted({(n, key) for img in images for n, part in enumerate(img) for key in part})
    index = {key: i for i, key in enumerate(keys)}
    cols = []
    for img in images:
        col = [Fraction(0)] * len(keys)
        for n, part in enumerate(img):
            for key, v in part.items():
                col[index[(n, key)]] = v
        cols.append(col)
    # rank of the matrix whose columns are the images
    return rref_rank(cols, len(keys)) if keys else 0


def kernel_dim(k, m, degree, ops):
    return len(monomials(k, m, degree)) - operator_rank(k, m, degree, ops)


def span_rank(polys):
    dicts = [to_dict(p) if not isinstance(p, dict) else p for p in polys]
    keys = sorted({key for d in dicts for key in d})
    index = {key: i for i, key in enumerate(keys)}
    rows = []
    for d in dicts:
        r = [Fraction(0)] * len(keys)
        for key, v in d.items():
            r[index[key]] = v
        rows.append(r)
    return rref_rank(rows, len(keys))


def simplicial_ops(k, m, blocks=None):
    blocks = list(range(1, k + 1)) if blocks is None else list(blocks)
    ops = []
    for a in range(len(blocks)):
        for b in range(a, len(blocks)):
            ops.append(lambda p, i=blocks[a], j=blocks[b]: dd(p, i, j, m))
        for b in range(a + 1, len(blocks)):
            ops.append(lambda p, i=blocks[a], j=blocks[b]: ud(p, i, j, m))
    return ops


def harmonic_projection_deg2(a, block, m):
    """``(1 - |u|^2 Delta_u / (2m))`` on inputs of degree 2 in ``block``."""
    return nadd(a, nscale(Fraction(-1, 2 * m), uu(dd(a, block, block, m), block, block, m)))


def orthogonal_dim(mu, m):
    """Dimension of the O(m) irreducible with highest weight ``mu`` via Weyl's formula."""
    n = m // 2
    lam = list(mu) + [0] * (n - len(mu))
    if len(lam) > n:
        raise ValueError("weight longer than the rank")
    if m % 2:
        rho = [Fraction(2 * (n - i) - 1, 2) for i in range(n)]
    else:
        rho = [Fraction(n - i - 1) for i in range(n)]
    l = [a + r for a, r in zip(lam, rho)]
    num = den = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            num *= l[i] ** 2 - l[j] ** 2
            den *= rho[i] ** 2 - rho[j] ** 2
        if m % 2:
            num *= l[i]
            den *= rho[i]
    d = num / den
    if m % 2 == 0 and lam[-1] != 0:
        d *= 2
    return int(d)
