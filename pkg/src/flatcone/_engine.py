"""Buchberger's algorithm on raw term dictionaries.

Terms are keyed by tuples ``(component, e_1, ..., e_n)``.  Ideals use a single
component 0; submodules of free modules use one component per basis vector.
Coefficients are ``gmpy2.mpq``.  Everything here is internal; the public
surfaces are :mod:`flatcone.groebner` and :mod:`flatcone.modules`.
"""

from __future__ import annotations

from heapq import heapify, heappop, heappush
from operator import add, sub

from gmpy2 import mpq

from . import budget as _budget


class TermOrder:
    """Order on module terms built from a ring-monomial key.

    ``pot`` (position over term) compares components first, component 0
    largest; otherwise the ring monomial is compared first.
    """

    def __init__(self, ring_key, pot=True):
        self.ring_key = ring_key
        self.pot = pot
        self._keys = {}
        self._neg = {}

    def key(self, m):
        k = self._keys.get(m)
        if k is None:
            rk = self.ring_key(m[1:])
            k = ((-m[0],) + tuple(rk)) if self.pot else (tuple(rk) + (-m[0],))
            self._keys[m] = k
        return k

    def neg(self, m):
        k = self._neg.get(m)
        if k is None:
            k = tuple([-x for x in self.key(m)])
            self._neg[m] = k
        return k


def leading(p, order):
    return max(p, key=order.key)


def divides(a, b):
    if a[0] != b[0]:
        return False
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def lcm(a, b):
    return tuple(map(max, a, b))


def monic(p, order):
    lc = p[leading(p, order)]
    if lc == 1:
        return p
    inv = mpq(1) / lc
    return {m: c * inv for m, c in p.items()}


def normal_form(f, reducers, order, full=True):
    """Reduce ``f`` by ``reducers`` (list of ``(lm, monic poly)``).

    With ``full=False`` only the leading term is reduced.
    """
    if not f or not reducers:
        return dict(f)
    bud = _budget.current()
    p = dict(f)
    neg = order.neg
    heap = [(neg(m), m) for m in p]
    heapify(heap)
    r = {}
    steps = 0
    while heap:
        _, m = heappop(heap)
        c = p.pop(m, None)
        if c is None:
            continue
        for lm, g in reducers:
            if divides(lm, m):
                q = tuple(map(sub, m, lm))
                for gm, gc in g.items():
                    if gm == lm:
                        continue
                    mm = tuple(map(add, gm, q))
                    old = p.get(mm)
                    if old is None:
                        p[mm] = -c * gc
                        heappush(heap, (neg(mm), mm))
                    else:
                        v = old - c * gc
                        if v:
                            p[mm] = v
                        else:
                            del p[mm]
                steps += 1
                if steps & 255 == 0:
                    bud.check_poly(len(p), 0)
                    bud.check_time()
                break
        else:
            r[m] = c
            if not full:
                r.update(p)
                break
    bud.counters["reductions"] += steps
    return r


def _spoly(f, lf, g, lg):
    L = lcm(lf, lg)
    qf = tuple(map(sub, L, lf))
    qg = tuple(map(sub, L, lg))
    s = {}
    for m, c in f.items():
        if m != lf:
            s[tuple(map(add, m, qf))] = c
    for m, c in g.items():
        if m != lg:
            mm = tuple(map(add, m, qg))
            v = s.get(mm, 0) - c
            if v:
                s[mm] = v
            else:
                s.pop(mm, None)
    return s


def _degree(p):
    return max(sum(m[1:]) for m in p)


def buchberger(polys, order, module=False):
    """Reduced Groebner basis of the given term dictionaries.

    Gebauer-Moeller pair elimination with the normal selection strategy.
    The product criterion is only used for ideals (``module=False``).
    Returns monic polynomials sorted by increasing leading term.
    """
    bud = _budget.current()
    bud.counters["groebner_calls"] += 1
    key = order.key
    inputs = [monic(p, order) for p in polys if p]
    inputs.sort(key=lambda p: key(leading(p, order)))

    f = []
    lms = []
    G = []
    B = []

    def update(ih):
        nonlocal G, B
        mh = lms[ih]
        comp = mh[0]

        def coprime(a, b):
            if module:
                return False
            for x, y in zip(a[1:], b[1:]):
                if x and y:
                    return False
            return True

        C = [ig for ig in G if lms[ig][0] == comp]
        D = []
        while C:
            ig = C.pop()
            mg = lms[ig]
            L = lcm(mh, mg)
            if coprime(mh, mg):
                D.append(ig)
                continue
            if any(divides(lcm(mh, lms[ix]), L) for ix in C):
                continue
            if any(divides(lcm(mh, lms[ix]), L) for ix in D):
                continue
            D.append(ig)
        E = [(ig, ih) for ig in D if not coprime(mh, lms[ig])]
        newB = []
        for (i1, i2) in B:
            m1, m2 = lms[i1], lms[i2]
            if m1[0] != comp:
                newB.append((i1, i2))
                continue
            L12 = lcm(m1, m2)
            if (not divides(mh, L12) or lcm(m1, mh) == L12 or lcm(m2, mh) == L12):
                newB.append((i1, i2))
        newB.extend(E)
        B = newB
        G = [ig for ig in G if not divides(mh, lms[ig])]
        G.append(ih)

    def add_poly(h):
        bud.check_poly(len(h), _degree(h))
        h = monic(h, order)
        f.append(h)
        lms.append(leading(h, order))
        update(len(f) - 1)

    for p in inputs:
        h = normal_form(p, [(lms[i], f[i]) for i in G], order)
        if h:
            add_poly(h)

    pair_key = {}

    def pkey(pr):
        k = pair_key.get(pr)
        if k is None:
            k = (key(lcm(lms[pr[0]], lms[pr[1]])), pr)
            pair_key[pr] = k
        return k

    while B:
        bud.check_time()
        pr = min(B, key=pkey)
        B.remove(pr)
        bud.counters["spairs"] += 1
        i, j = pr
        s = _spoly(f[i], lms[i], f[j], lms[j])
        if not s:
            continue
        h = normal_form(s, [(lms[g], f[g]) for g in G], order)
        if h:
            add_poly(h)

    basis = [(lms[i], f[i]) for i in G]
    basis.sort(key=lambda t: key(t[0]))
    reduced = []
    for k, (lm, g) in enumerate(basis):
        others = [b for b in basis if b[0] != lm]
        tail = {m: c for m, c in g.items() if m != lm}
        tail = normal_form(tail, others, order)
        tail[lm] = g[lm]
        reduced.append(tail)
    return reduced


def reduce_all(f, basis, order):
    """Normal form against a (reduced) basis given as monic dicts."""
    reducers = [(leading(g, order), g) for g in basis]
    return normal_form(f, reducers, order)
