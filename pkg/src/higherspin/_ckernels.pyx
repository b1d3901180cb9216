# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled hot kernels; same names and contracts as ``_pykernels``.

Exponent tuples are rebuilt through typed C loops; coefficients stay Python
objects (``int`` or ``gmpy2.mpq``) so arithmetic remains exact.
"""

from math import gcd

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM, PyTuple_GET_ITEM
from cpython.ref cimport Py_INCREF

BACKEND = "cython"

cdef object _SMALL = tuple(range(256))


cdef inline object _pyint(long v):
    if 0 <= v < 256:
        return <object>PyTuple_GET_ITEM(_SMALL, v)
    return v


cdef tuple _shifted(tuple mono, Py_ssize_t i1, long d1, Py_ssize_t i2, long d2):
    """Copy of ``mono`` with ``d1`` added at ``i1`` and ``d2`` at ``i2`` (``i2 < 0`` skips)."""
    cdef Py_ssize_t n = len(mono), t
    cdef tuple out = PyTuple_New(n)
    cdef object item
    for t in range(n):
        if t == i1 or t == i2:
            v = <long>(<object>PyTuple_GET_ITEM(mono, t))
            if t == i1:
                v += d1
            if t == i2:
                v += d2
            item = _pyint(v)
        else:
            item = <object>PyTuple_GET_ITEM(mono, t)
        Py_INCREF(item)
        PyTuple_SET_ITEM(out, t, item)
    return out


cdef dict _clean(dict out):
    return {k: v for k, v in out.items() if v}


def add(dict a, dict b):
    cdef dict out = dict(a)
    for mono, c in b.items():
        out[mono] = out.get(mono, 0) + c
    return _clean(out)


def axpy(alpha, dict a, dict b):
    cdef dict out = dict(b)
    for mono, c in a.items():
        out[mono] = out.get(mono, 0) + alpha * c
    return _clean(out)


def scale(c, dict a):
    if not c:
        return {}
    return {mono: c * v for mono, v in a.items()}


def mul(dict a, dict b):
    cdef dict out = {}
    cdef tuple ma, mb, mono
    cdef Py_ssize_t n, t
    cdef object item
    for ma, ca in a.items():
        n = len(ma)
        for mb, cb in b.items():
            mono = PyTuple_New(n)
            for t in range(n):
                item = _pyint(<long>(<object>PyTuple_GET_ITEM(ma, t)) + <long>(<object>PyTuple_GET_ITEM(mb, t)))
                Py_INCREF(item)
                PyTuple_SET_ITEM(mono, t, item)
            out[mono] = out.get(mono, 0) + ca * cb
    return _clean(out)


def diff(dict a, Py_ssize_t idx):
    cdef dict out = {}
    cdef tuple mono
    cdef long e
    for mono, c in a.items():
        e = mono[idx]
        if e:
            out[_shifted(mono, idx, -1, -1, 0)] = c * e
    return out


def mulvar(dict a, Py_ssize_t idx):
    cdef dict out = {}
    cdef tuple mono
    for mono, c in a.items():
        out[_shifted(mono, idx, 1, -1, 0)] = c
    return out


def apply_ud(dict a, Py_ssize_t i, Py_ssize_t j, Py_ssize_t m):
    cdef Py_ssize_t bi = i * m, bj = j * m, t
    cdef dict out = {}
    cdef tuple mono, key
    cdef long d, e
    if i == j:
        for mono, c in a.items():
            d = 0
            for t in range(m):
                d += <long>(<object>PyTuple_GET_ITEM(mono, bi + t))
            if d:
                out[mono] = c * d
        return out
    for mono, c in a.items():
        for t in range(m):
            e = <long>(<object>PyTuple_GET_ITEM(mono, bj + t))
            if e:
                key = _shifted(mono, bj + t, -1, bi + t, 1)
                out[key] = out.get(key, 0) + c * e
    return _clean(out)


def apply_dd(dict a, Py_ssize_t i, Py_ssize_t j, Py_ssize_t m):
    cdef Py_ssize_t bi = i * m, bj = j * m, t
    cdef dict out = {}
    cdef tuple mono, key
    cdef long e, ei, ej
    for mono, c in a.items():
        for t in range(m):
            if i == j:
                e = <long>(<object>PyTuple_GET_ITEM(mono, bi + t))
                if e >= 2:
                    key = _shifted(mono, bi + t, -2, -1, 0)
                    out[key] = out.get(key, 0) + c * (e * (e - 1))
            else:
                ei = <long>(<object>PyTuple_GET_ITEM(mono, bi + t))
                ej = <long>(<object>PyTuple_GET_ITEM(mono, bj + t))
                if ei and ej:
                    key = _shifted(mono, bi + t, -1, bj + t, -1)
                    out[key] = out.get(key, 0) + c * (ei * ej)
    return _clean(out)


def mul_uu(dict a, Py_ssize_t i, Py_ssize_t j, Py_ssize_t m):
    cdef Py_ssize_t bi = i * m, bj = j * m, t
    cdef dict out = {}
    cdef tuple mono, key
    for mono, c in a.items():
        for t in range(m):
            if i == j:
                key = _shifted(mono, bi + t, 2, -1, 0)
            else:
                key = _shifted(mono, bi + t, 1, bj + t, 1)
            out[key] = out.get(key, 0) + c
    return _clean(out)


def fischer(dict a, dict b):
    cdef tuple mono
    cdef long e, f
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


cdef dict _primitive(dict row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {c: v // g for c, v in row.items()}
    return row


cdef dict _combine(dict r, dict prow, p, a):
    """``(p*r - a*prow)/gcd(p, a)`` with zeros dropped."""
    g = gcd(p, a)
    pa = p // g
    aa = a // g
    cdef dict new = {cc: pa * v for cc, v in r.items()}
    for cc, v in prow.items():
        new[cc] = new.get(cc, 0) - aa * v
    return {cc: v for cc, v in new.items() if v}


def echelon(list rows, ncols):
    cdef dict work = {}
    cdef dict col_rows = {}
    cdef dict r, prow, new
    cdef list pivots = []
    cdef Py_ssize_t ri, idx, jdx
    for ri in range(len(rows)):
        r = {c: int(v) for c, v in rows[ri].items() if v}
        if not r:
            continue
        r = _primitive(r)
        work[ri] = r
        for c in r:
            col_rows.setdefault(c, set()).add(ri)
    for c in sorted(col_rows):
        cand = col_rows.get(c)
        if not cand:
            continue
        best = min(cand, key=lambda i: (len(work[i]), abs(work[i][c]).bit_length(), i))
        prow = work.pop(best)
        for cc in prow:
            col_rows[cc].discard(best)
        p = prow[c]
        for ri in list(col_rows[c]):
            r = work[ri]
            new = _combine(r, prow, p, r[c])
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
    for idx in range(len(pivots) - 1, -1, -1):
        c, prow = pivots[idx]
        p = prow[c]
        for jdx in range(idx):
            c2, r = pivots[jdx]
            a = r.get(c)
            if not a:
                continue
            pivots[jdx] = (c2, _primitive(_combine(r, prow, p, a)))
    return pivots


def nullspace(list rows, Py_ssize_t ncols):
    cdef list pivots = echelon(rows, ncols)
    pivot_cols = {c for c, _ in pivots}
    cdef dict by_free = {}
    cdef list basis = []
    cdef Py_ssize_t f
    for c, r in pivots:
        p = r[c]
        for fc, v in r.items():
            if fc != c:
                by_free.setdefault(fc, []).append((c, p, v))
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


def rank(list rows, ncols):
    return len(echelon(rows, ncols))


def classify(dict terms, Py_ssize_t m):
    cdef dict out = {}
    cdef tuple mono, par
    cdef Py_ssize_t n, t, idx
    cdef long bits[64]
    if m > 64:
        from higherspin._pykernels import classify as slow
        return slow(terms, m)
    for mono, c in terms.items():
        n = len(mono)
        for t in range(m):
            bits[t] = 0
        for idx in range(n):
            bits[idx % m] ^= (<long>(<object>PyTuple_GET_ITEM(mono, idx))) & 1
        par = tuple([bits[t] for t in range(m)])
        sub = out.get(par)
        if sub is None:
            out[par] = {mono: c}
        else:
            sub[mono] = c
    return out


def permute_terms(dict terms, sigma, Py_ssize_t m):
    cdef dict out = {}
    cdef tuple mono, new
    cdef Py_ssize_t n, idx, t, b
    cdef Py_ssize_t sig[64]
    cdef object item
    if m > 64:
        from higherspin._pykernels import permute_terms as slow
        return slow(terms, sigma, m)
    for t in range(m):
        sig[t] = sigma[t]
    for mono, c in terms.items():
        n = len(mono)
        new = PyTuple_New(n)
        for idx in range(n):
            b = idx // m
            t = idx - b * m
            item = <object>PyTuple_GET_ITEM(mono, idx)
            Py_INCREF(item)
            PyTuple_SET_ITEM(new, b * m + sig[t], item)
        out[new] = c
    return out
