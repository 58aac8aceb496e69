"""Ideals, reduced Groebner bases and the derived ideal operations."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from itertools import combinations

from . import _engine
from .polycore import ContextMismatch, Polynomial, block_order, grevlex


def to_terms(p, comp=0):
    return {(comp,) + e: c for e, c in p.terms.items()}


def from_terms(d, ctx):
    return Polynomial(ctx, {m[1:]: c for m, c in d.items()})


def term_order(order, pot=True):
    # One TermOrder per MonomialOrder so key caches survive across calls.
    cache = _TERM_ORDERS.get((order, pot))
    if cache is None:
        cache = _engine.TermOrder(order.key, pot=pot)
        _TERM_ORDERS[(order, pot)] = cache
    return cache


_TERM_ORDERS = {}


class Ideal:
    """An ideal given by generators, with reduced bases cached per order."""

    def __init__(self, ctx, gens=()):
        self.ctx = ctx
        out = []
        seen = set()
        for g in gens:
            if not isinstance(g, Polynomial):
                g = ctx.const(g)
            if g.ctx != ctx:
                raise ContextMismatch("generator from a different context")
            if g.is_zero():
                continue
            g = g.content_cleared()
            if g not in seen:
                seen.add(g)
                out.append(g)
        self.gens = tuple(out)
        self._cache = {}
        self._lock = threading.Lock()

    @classmethod
    def unit(cls, ctx):
        return cls(ctx, [ctx.one()])

    def groebner(self, order=None):
        order = order or grevlex(self.ctx)
        with self._lock:
            gb = self._cache.get(order)
            if gb is None:
                tord = term_order(order)
                raw = _engine.buchberger([to_terms(g) for g in self.gens], tord)
                gb = tuple(from_terms(d, self.ctx) for d in raw)
                self._cache[order] = gb
        return gb

    def _raw_basis(self, order):
        gb = self.groebner(order)
        key = ("raw", order)
        raw = self._cache.get(key)
        if raw is None:
            tord = term_order(order)
            raw = [(_engine.leading(d, tord), d) for d in (to_terms(g) for g in gb)]
            self._cache[key] = raw
        return raw

    def reduce(self, p, order=None):
        order = order or grevlex(self.ctx)
        if p.ctx != self.ctx:
            raise ContextMismatch("polynomial from a different context")
        tord = term_order(order)
        r = _engine.normal_form(to_terms(p), self._raw_basis(order), tord)
        return from_terms(r, self.ctx)

    def contains(self, p):
        return self.reduce(p).is_zero()

    __contains__ = contains

    def is_unit(self):
        return any(g.is_constant() for g in self.groebner())

    def is_zero(self):
        return not self.gens

    def issubset(self, other):
        return all(other.contains(g) for g in self.gens)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ctx == other.ctx and self.groebner() == other.groebner()

    def __hash__(self):
        return hash(self.groebner())

    def __add__(self, other):
        return Ideal(self.ctx, self.gens + other.gens)

    def __mul__(self, other):
        if isinstance(other, Ideal):
            return Ideal(self.ctx, [a * b for a in self.gens for b in other.gens])
        return Ideal(self.ctx, [g * other for g in self.gens])

    def __pow__(self, k):
        result = Ideal.unit(self.ctx)
        for _ in range(k):
            result = result * self
            result = Ideal(self.ctx, result.groebner())
        return result

    def leading_monomials(self, order=None):
        order = order or grevlex(self.ctx)
        return tuple(g.leading_monomial(order) for g in self.groebner(order))

    def to_context(self, ctx):
        return Ideal(ctx, [g.to_context(ctx) for g in self.gens])

    def specialize(self, names, value=0):
        return Ideal(self.ctx, [g.specialize(names, value) for g in self.gens])

    def dimension(self):
        return krull_dimension(self)

    def __str__(self):
        if not self.gens:
            return "(0)"
        return "(" + ", ".join(str(g) for g in self.groebner()) + ")"

    def __repr__(self):
        return f"Ideal{str(self)}"


def groebner_basis(I, order=None):
    return I.groebner(order)


def normal_form(p, I, order=None):
    return I.reduce(p, order)


def ideal_membership(p, I):
    return I.contains(p)


def is_groebner(basis, order=None):
    """Buchberger criterion: every S-polynomial reduces to zero."""
    if not basis:
        return True
    ctx = basis[0].ctx
    order = order or grevlex(ctx)
    tord = term_order(order)
    raw = [_engine.monic(to_terms(g), tord) for g in basis]
    red = [(_engine.leading(d, tord), d) for d in raw]
    for (la, a), (lb, b) in combinations(red, 2):
        if la[0] != lb[0]:
            continue
        s = _engine._spoly(a, la, b, lb)
        if s and _engine.normal_form(s, red, tord):
            return False
    return True


# ---------------------------------------------------------------------------
# Elimination and derived operations

def _with_aux(ctx, stem):
    name = ctx.fresh_name(stem)
    return ctx.extend(aux=(name,)), name


def eliminate(I, drop_vars):
    """``I`` intersected with the subring free of ``drop_vars``.

    The result lives in the same context; its generators avoid ``drop_vars``.
    """
    drop = tuple(v for v in I.ctx.variables if v in set(drop_vars))
    unknown = set(drop_vars) - set(I.ctx.variables)
    if unknown:
        raise KeyError(f"unknown variables {sorted(unknown)}")
    if not drop:
        return Ideal(I.ctx, I.gens)
    order = block_order(I.ctx, drop)
    gb = I.groebner(order)
    return Ideal(I.ctx, [g for g in gb if not g.involves(drop)])


def _eliminate_aux(gens, ext, name, ctx):
    J = Ideal(ext, gens)
    E = eliminate(J, [name])
    return Ideal(ctx, [g.to_context(ctx) for g in E.gens])


def intersect(I, J):
    """``I ∩ J`` via ``t·I + (1-t)·J`` and elimination of ``t``."""
    ctx = I.ctx
    if I.is_unit():
        return Ideal(ctx, J.gens)
    if J.is_unit():
        return Ideal(ctx, I.gens)
    if I.is_zero() or J.is_zero():
        return Ideal(ctx)
    ext, t = _with_aux(ctx, "_t")
    tv = ext.var(t)
    gens = [tv * g.to_context(ext) for g in I.gens]
    gens += [(1 - tv) * g.to_context(ext) for g in J.gens]
    return _eliminate_aux(gens, ext, t, ctx)


def intersect_all(ideals, ctx):
    result = Ideal.unit(ctx)
    for J in ideals:
        result = intersect(result, J)
    return result


def exact_divide(p, g):
    """``p / g`` when ``g`` divides ``p``; raises otherwise."""
    order = grevlex(p.ctx)
    tord = term_order(order)
    gd = _engine.monic(to_terms(g), tord)
    scale = g.leading_coefficient(order)
    lg = _engine.leading(gd, tord)
    rem = to_terms(p)
    quot = {}
    while rem:
        m = _engine.leading(rem, tord)
        if not _engine.divides(lg, m):
            raise ArithmeticError("inexact polynomial division")
        q = tuple(a - b for a, b in zip(m, lg))
        c = rem[m]
        quot[q] = c
        for gm, gc in gd.items():
            mm = tuple(a + b for a, b in zip(gm, q))
            v = rem.get(mm, 0) - c * gc
            if v:
                rem[mm] = v
            else:
                rem.pop(mm, None)
    return from_terms(quot, p.ctx).scale(1 / scale)


def quotient_by_element(I, g):
    if g.is_zero():
        return Ideal.unit(I.ctx)
    inter = intersect(I, Ideal(I.ctx, [g]))
    return Ideal(I.ctx, [exact_divide(h, g) for h in inter.gens])


def ideal_quotient(I, J):
    """``(I : J) = {p : p·J ⊆ I}``."""
    if J.is_zero():
        return Ideal.unit(I.ctx)
    parts = [quotient_by_element(I, g) for g in J.gens]
    result = parts[0]
    for P in parts[1:]:
        result = intersect(result, P)
    return result


def saturate(I, g):
    """``(I : g^∞)`` by adjoining ``t`` with ``1 - t·g`` and eliminating ``t``."""
    if g.is_zero():
        raise ValueError("cannot saturate by zero")
    ctx = I.ctx
    ext, t = _with_aux(ctx, "_t")
    gens = [h.to_context(ext) for h in I.gens]
    gens.append(1 - ext.var(t) * g.to_context(ext))
    return _eliminate_aux(gens, ext, t, ctx)


def radical_membership(p, I):
    """True iff some power of ``p`` lies in ``I``."""
    if p.is_zero():
        return True
    ctx = I.ctx
    ext, t = _with_aux(ctx, "_t")
    gens = [h.to_context(ext) for h in I.gens]
    gens.append(1 - ext.var(t) * p.to_context(ext))
    return Ideal(ext, gens).is_unit()


# ---------------------------------------------------------------------------
# Dimension and Hilbert functions

def _independent_dimension(lead_monos, nvars):
    supports = [frozenset(i for i, x in enumerate(m) if x) for m in lead_monos]
    if any(not s for s in supports):
        return -1
    for size in range(nvars, -1, -1):
        for S in combinations(range(nvars), size):
            Sset = set(S)
            if not any(s <= Sset for s in supports):
                return size
    return 0


def krull_dimension(I):
    """Krull dimension of ``R/I`` from independent sets of the leading ideal; -1 for the unit ideal."""
    return _independent_dimension(I.leading_monomials(), I.ctx.nvars)


@dataclass(frozen=True)
class HilbertRecord:
    values: tuple
    dimension: int


def count_standard_monomials(lead_monos, nvars, degree, weights=None):
    """Number of monomials of (weighted) degree ``degree`` outside the monomial ideal."""
    w = weights or (1,) * nvars
    count = 0

    def rec(i, remaining, prefix):
        nonlocal count
        if i == nvars:
            if remaining == 0:
                e = tuple(prefix)
                for m in lead_monos:
                    if all(a <= b for a, b in zip(m, e)):
                        return
                count += 1
            return
        wi = w[i]
        if wi == 0:
            raise ValueError("weights must be positive")
        for x in range(remaining // wi + 1):
            prefix.append(x)
            rec(i + 1, remaining - wi * x, prefix)
            prefix.pop()

    rec(0, degree, [])
    return count


def hilbert(I, degrees, block=None, weights=None):
    """Hilbert function values of ``R/I`` for the given degrees.

    ``block`` names the graded variables (default: all); generators may not
    involve other variables and must be homogeneous for ``weights``.
    """
    ctx = I.ctx
    block = tuple(block or ctx.variables)
    others = [v for v in ctx.variables if v not in block]
    for g in I.gens:
        if others and g.involves(others):
            raise ValueError("generator involves variables outside the graded block")
        if not g.is_homogeneous(block, weights):
            raise ValueError(f"generator {g} is not homogeneous")
    idx = [ctx.index[v] for v in block]
    leads = [tuple(m[i] for i in idx) for m in I.leading_monomials()]
    values = tuple(count_standard_monomials(leads, len(idx), k, weights) for k in degrees)
    return HilbertRecord(values, _independent_dimension(leads, len(idx)))


def hilbert_numerator(lead_monos, nvars):
    """Numerator K(t) of the Hilbert series K(t)/(1-t)^n of a monomial quotient.

    Returned as a coefficient tuple, lowest degree first.
    """
    gens = _minimalize([tuple(m) for m in lead_monos])
    return tuple(_numer(tuple(sorted(gens)), nvars))


def _minimalize(monos):
    out = []
    for m in sorted(set(monos), key=sum):
        if not any(all(a <= b for a, b in zip(g, m)) for g in out):
            out.append(m)
    return out


def _poly_sub(a, b, shift=0):
    n = max(len(a), len(b) + shift)
    out = [0] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i + shift] -= x
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def _numer(gens, nvars, _memo={}):
    key = (gens, nvars)
    if key in _memo:
        return _memo[key]
    if not gens:
        res = [1]
    elif any(not any(m) for m in gens):
        res = [0]
    else:
        m = gens[-1]
        rest = gens[:-1]
        # N(I + (m)) = N(I) - t^deg(m) N(I : m)
        colon = _minimalize([tuple(max(a - b, 0) for a, b in zip(g, m)) for g in rest])
        res = _poly_sub(_numer(tuple(sorted(rest)), nvars), _numer(tuple(sorted(colon)), nvars), sum(m))
    _memo[key] = res
    return res
