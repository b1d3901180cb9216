"""Pure-Python hot kernels.

Polynomials are handled here as raw term maps ``{exponent tuple: coeff}``
where the exponent tuple is dense of length ``(k+1)*m`` and the variable
``u_{b,a}`` (block ``b``, 1-based component ``a``) sits at ``b*m + a - 1``.

Every function returns a fresh map with zero coefficients removed.  The
compiled module ``_ckernels`` exposes the same names and signatures.
"""

from math import gcd

BACKEND = "python"


def _clean(out):
    return {k: v for k, v in out.items() if v}


def add(a, b):
    out = dict(a)
    for mono, c in b.items():
        out[mono] = out.get(mono, 0) + c
    return _clean(out)


def axpy(alpha, a, b):
    """``alpha*a + b``."""
    out = dict(b)
    for mono, c in a.items():
        out[mono] = out.get(mono, 0) + alpha * c
    return _clean(out)


def scale(c, a):
    if not c:
        return {}
    return {mono: c * v for mono, v in a.items()}


def mul(a, b):
    out = {}
    get = out.get
    for ma, ca in a.items():
        for mb, cb in b.items():
            mono = tuple([x + y for x, y in zip(ma, mb)])
            out[mono] = get(mono, 0) + ca * cb
    return _clean(out)


def diff(a, idx):
    out = {}
    for mono, c in a.items():
        e = mono[idx]
        if e:
            lst = list(mono)
            lst[idx] = e - 1
            out[tuple(lst)] = c * e
    return out


def mulvar(a, idx):
    out = {}
    for mono, c in a.items():
        lst = list(mono)
        lst[idx] += 1
        out[tuple(lst)] = c
    return out


def apply_ud(a, i, j, m):
    """``sum_t u_{i,t} d/du_{j,t}``; for ``i == j`` this is the Euler operator."""
    bi = i * m
    bj = j * m
    out = {}
    get = out.get
    if i == j:
        for mono, c in a.items():
            d = sum(mono[bi:bi + m])
            if d:
                out[mono] = c * d
        return out
    for mono, c in a.items():
        for t in range(m):
            e = mono[bj + t]
            if e:
                lst = list(mono)
                lst[bj + t] = e - 1
                lst[bi + t] += 1
                key = tuple(lst)
                out[key] = get(key, 0) + c * e
    return _clean(out)


def apply_dd(a, i, j, m):
    """``sum_t d/du_{i,t} d/du_{j,t}``; for ``i == j`` the Laplacian of block ``i``."""
    bi = i * m
    bj = j * m
    out = {}
    get = out.get
    for mono, c in a.items():
        for t in range(m):
            if i == j:
                e = mono[bi + t]
                if e >= 2:
                    lst = list(mono)
                    lst[bi + t] = e - 2
                    key = tuple(lst)
                    out[key] = get(key, 0) + c * (e * (e - 1))
            else:
                ei = mono[bi + t]
                ej = mono[bj + t]
                if ei and ej:
                    lst = list(mono)
                    lst[bi + t] = ei - 1
                    lst[bj + t] = ej - 1
                    key = tuple(lst)
                    out[key] = get(key, 0) + c * (ei * ej)
    return _clean(out)


def mul_uu(a, i, j, m):
    """Multiplication by ``<u_i, u_j>``."""
    bi = i * m
    bj = j * m
    out = {}
    get = out.get
    for mono, c in a.items():
        for t in range(m):
            lst = list(mono)
            lst[bi + t] += 1
            lst[bj + t] += 1
            key = tuple(lst)
            out[key] = get(key, 0) + c
    return _clean(out)


def fischer(a, b):
    if len(b) < len(a):
        a, b = b, a
    total = 0
    for mono, c in a.items():
        d = b.get(mono)
        if d is not None:
            w = 1
            for e in mono:
                for f in range(2, e + 1):
                    w *= f
            total += c * d * w
    return total


def _bitlen(v):
    return v.bit_length() if v > 0 else (-v).bit_length()


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


def echelon(rows, ncols):
    """Fraction-free reduced echelon form of a sparse integer matrix.

    ``rows`` is a list of ``{col: int}``.  Columns are pivoted in increasing
    order; among the candidate rows for a column the shortest row with the
    smallest pivot bit-length wins.  Each elimination step is the integer
    combination ``p*r - a*pivot_row`` divided by ``gcd(p, a)`` followed by
    removal of the row content, so no fractions ever appear.

    Returns ``[(col, row), ...]`` sorted by pivot column, fully reduced
    (no pivot column appears in another pivot row).
    """
    work = {}
    col_rows = {}
    for ri, r in enumerate(rows):
        r = {c: int(v) for c, v in r.items() if v}
        if not r:
            continue
        r = _primitive(r)
        work[ri] = r
        for c in r:
            col_rows.setdefault(c, set()).add(ri)
    pivots = []
    for c in sorted(col_rows):
        cand = col_rows.get(c)
        if not cand:
            continue
        best = min(cand, key=lambda ri: (len(work[ri]), _bitlen(work[ri][c]), ri))
        prow = work.pop(best)
        for cc in prow:
            col_rows[cc].discard(best)
        p = prow[c]
        for ri in list(col_rows[c]):
            r = work[ri]
            a = r[c]
            g = gcd(p, a)
            pa = p // g
            aa = a // g
            new = {cc: pa * v for cc, v in r.items()}
            for cc, v in prow.items():
                new[cc] = new.get(cc, 0) - aa * v
            new = {cc: v for cc, v in new.items() if v}
            for cc in r:
                if cc not in new:
                    col_rows[cc].discard(ri)
            if not new:
                del work[ri]
                continue
            for cc in new:
                if cc not in r:
                    col_rows.setdefault(cc, set()).add(ri)
            work[ri] = _primitive(new)
        pivots.append((c, prow))
    # back substitution: clear each pivot column from the earlier pivot rows
    for idx in range(len(pivots) - 1, -1, -1):
        c, prow = pivots[idx]
        p = prow[c]
        for jdx in range(idx):
            c2, r = pivots[jdx]
            a = r.get(c)
            if not a:
                continue
            g = gcd(p, a)
            pa = p // g
            aa = a // g
            new = {cc: pa * v for cc, v in r.items()}
            for cc, v in prow.items():
                new[cc] = new.get(cc, 0) - aa * v
            new = {cc: v for cc, v in new.items() if v}
            pivots[jdx] = (c2, _primitive(new))
    return pivots


def nullspace(rows, ncols):
    """Integer basis of the right nullspace, one primitive vector per free column."""
    pivots = echelon(rows, ncols)
    pivot_cols = {c for c, _ in pivots}
    by_free = {}
    for c, r in pivots:
        p = r[c]
        for f, v in r.items():
            if f != c:
                by_free.setdefault(f, []).append((c, p, v))
    basis = []
    for f in range(ncols):
        if f in pivot_cols:
            continue
        entries = by_free.get(f, [])
        lcm = 1
        for _, p, _ in entries:
            lcm = lcm * p // gcd(lcm, p)
        if lcm < 0:
            lcm = -lcm
        vec = {f: lcm}
        for c, p, v in entries:
            vec[c] = -v * lcm // p
        basis.append(_primitive(vec))
    return basis


def rank(rows, ncols):
    return len(echelon(rows, ncols))


def classify(terms, m):
    """Split a term map by coordinate parity: ``{parity tuple: sub-map}``."""
    out = {}
    for mono, c in terms.items():
        par = tuple([sum(mono[t::m]) & 1 for t in range(m)])
        sub = out.get(par)
        if sub is None:
            out[par] = {mono: c}
        else:
            sub[mono] = c
    return out


def permute_terms(terms, sigma, m):
    """Relabel coordinates ``t -> sigma[t]`` in every block."""
    out = {}
    for mono, c in terms.items():
        lst = [0] * len(mono)
        for idx, e in enumerate(mono):
            if e:
                b, t = divmod(idx, m)
                lst[b * m + sigma[t]] = e
        out[tuple(lst)] = c
    return out
