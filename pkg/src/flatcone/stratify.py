"""Locally closed strata of a coefficient space with constant normal-cone invariants.

Polynomials live in a context whose fiber block holds the ``x`` variables and
whose parameter block holds the coefficient variables ``c``.  A *cell* is a
pair ``(E, N)`` standing for ``V(E) \\ V(∏N)`` in coefficient space; the
parametric Groebner basis branches on whether a leading coefficient vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb, prod

from gmpy2 import mpq

from . import budget as _budget
from .groebner import (HilbertRecord, Ideal, exact_divide, hilbert_numerator, intersect_all,
                       radical_membership, saturate)
from .polycore import Polynomial, RingContext, block_order, differentiate, grevlex

DEPTH_CAP = 64


class StratificationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Polynomials over the coefficient ring

def coefficient_context(ctx):
    return RingContext(ctx.param_vars)


@lru_cache(maxsize=None)
def _x_key(nx):
    return grevlex(RingContext(tuple(f"x{i}" for i in range(nx)))).key


class Cell:
    """``V(E) \\ V(∏N)`` in coefficient space."""

    def __init__(self, E, N=()):
        self.E = Ideal(E.ctx, E.groebner())
        self.N = tuple(sorted(set(q.content_cleared() for q in N), key=str))
        self.ctx = E.ctx
        self._prodN = prod(self.N, start=self.ctx.one())

    def key(self):
        return (tuple(str(g) for g in self.E.gens), tuple(str(q) for q in self.N))

    def with_zero(self, q):
        for f in self.N:
            while not f.is_constant():
                try:
                    q = exact_divide(q, f)
                except ArithmeticError:
                    break
        return Cell(self.E + Ideal(self.ctx, [q]), self.N)

    def with_nonzero(self, q):
        return Cell(self.E, self.N + (q,))

    def reduce(self, q):
        return self.E.reduce(q)

    def vanishes(self, q):
        """``q`` is zero at every point of the cell."""
        return radical_membership(q * self._prodN, self.E)

    def nowhere_zero(self, q):
        """``q`` is nonzero at every point of the cell."""
        return radical_membership(self._prodN, self.E + Ideal(self.ctx, [q]))

    def is_empty(self):
        return radical_membership(self._prodN, self.E)

    def only_origin(self):
        return all(self.vanishes(c) for c in self.ctx.gens())

    def closure(self):
        """Ideal of the Zariski closure (saturation of ``E`` by ``∏N``)."""
        if not self.N:
            return self.E
        return saturate(self.E, self._prodN)

    def contains(self, point):
        return (all(g.evaluate(point) == 0 for g in self.E.gens)
                and all(q.evaluate(point) != 0 for q in self.N))


def _strip(q, factors):
    """Divide ``q`` by every known-nonzero factor as often as possible."""
    for f in factors:
        while not f.is_constant():
            try:
                q = exact_divide(q, f)
            except ArithmeticError:
                break
    return q.content_cleared()


def _x_lead(g, nx):
    """Leading x-exponent and its coefficient (a polynomial in the coefficients)."""
    key = _x_key(nx)
    m = max((e[:nx] for e in g.terms), key=key)
    return m, {e[nx:]: c for e, c in g.terms.items() if e[:nx] == m}


def _ksw(F, cell, ctx, cctx, depth=0):
    """Leaves ``(cell, G)`` of a comprehensive Groebner system for ``F`` over ``cell``.

    On each leaf, ``G`` specializes to a Groebner basis of ``F`` at every
    point, with leading x-monomials independent of the point.
    """
    if depth > DEPTH_CAP:
        raise _budget.ResourceLimitExceeded("case-split depth cap reached")
    _budget.current().check_time()
    if cell.is_empty():
        return []
    nx = len(ctx.fiber_vars)
    order = block_order(ctx, ctx.fiber_vars)
    gens = list(F) + [e.to_context(ctx) for e in cell.E.gens]
    G = list(Ideal(ctx, gens).groebner(order))
    Gr = [g for g in G if not g.involves(ctx.fiber_vars)]
    Gx = [g for g in G if g.involves(ctx.fiber_vars)]
    base = Cell(Ideal(cctx, [g.to_context(cctx) for g in Gr]), cell.N)
    if base.is_empty():
        return []
    key = order.key
    lead = {}
    for g in Gx:
        m = _x_lead(g, nx)[0]
        lead.setdefault(m, []).append(g)
    Gm = []
    for m in sorted(lead):
        if any(m2 != m and all(a <= b for a, b in zip(m2, m)) for m2 in lead):
            continue
        Gm.append(min(lead[m], key=lambda g: key(g.leading_monomial(order))))
    hs = []
    for g in Gm:
        q = Polynomial(cctx, _x_lead(g, nx)[1])
        q = _strip(base.reduce(q), base.N)
        if q.is_constant() or base.nowhere_zero(q) or q in hs:
            continue
        hs.append(q)
    out = []
    main = Cell(base.E, base.N + tuple(hs))
    if not main.is_empty():
        out.append((main, Gm))
    for i, h in enumerate(hs):
        sub = Cell(base.E + Ideal(cctx, [h]), base.N + tuple(hs[:i]))
        out.extend(_ksw(G, sub, ctx, cctx, depth + 1))
    return out


def _minimal_monomials(monos):
    out = []
    for m in sorted(set(monos), key=lambda e: (sum(e), e)):
        if not any(all(a <= b for a, b in zip(g, m)) for g in out):
            out.append(m)
    return tuple(sorted(out))


def _leading_ideal(G, nx):
    return _minimal_monomials(_x_lead(g, nx)[0] for g in G)


# ---------------------------------------------------------------------------
# Public surface

@dataclass
class Stratum:
    closed_ideal: Ideal
    open_conditions: list
    invariant: list
    depth: int
    excluded: Ideal | None = None
    numerators: tuple = field(default=(), repr=False)

    def contains(self, point):
        """Membership of a coefficient point given as ``name -> value``; the origin is never a member."""
        if all(point[v] == 0 for v in self.closed_ideal.ctx.variables):
            return False
        if any(g.evaluate(point) != 0 for g in self.closed_ideal.gens):
            return False
        if any(q.evaluate(point) == 0 for q in self.open_conditions):
            return False
        if self.excluded is not None and all(g.evaluate(point) == 0 for g in self.excluded.gens):
            return False
        return True


def _as_cctx_ideal(E, cctx):
    if E is None:
        return Ideal(cctx)
    return Ideal(cctx, [g.to_context(cctx) for g in E.gens])


def parametric_split(gens, E=None, N=()):
    """Comprehensive case split of the ideal generated by ``gens``.

    Returns ``(Stratum, leading monomials)`` pairs; on each stratum the
    specialized reduced basis has exactly these leading monomials.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("no generators")
    ctx = gens[0].ctx
    cctx = coefficient_context(ctx)
    nx = len(ctx.fiber_vars)
    for g in gens:
        if not g.is_homogeneous(ctx.fiber_vars):
            raise ValueError(f"generator {g} is not homogeneous in the fiber variables")
    cell = Cell(_as_cctx_ideal(E, cctx), [q.to_context(cctx) for q in N])
    out = []
    for c, G in _ksw(gens, cell, ctx, cctx):
        lead = _leading_ideal(G, nx)
        num = hilbert_numerator(lead, nx) if lead else (1,)
        rec = HilbertRecord(num, _dim_from_numerator(num, nx))
        st = Stratum(c.E, list(c.N), [rec], _depth(c))
        out.append((st, lead))
    out.sort(key=lambda t: (tuple(str(g) for g in t[0].closed_ideal.gens),
                            tuple(str(q) for q in t[0].open_conditions)))
    return out


def _depth(cell):
    return len(cell.E.gens) + len(cell.N)


def _dim_from_numerator(num, nvars):
    """Krull dimension from ``K(t)/(1-t)^n``: ``n`` minus the order of ``K`` at 1."""
    coeffs = list(num)
    if not any(coeffs):
        return -1
    order = 0
    while True:
        if sum(coeffs) != 0:
            break
        # divide by (1 - t)
        q = []
        acc = 0
        for c in coeffs[:-1]:
            acc += c
            q.append(acc)
        coeffs = q
        order += 1
    return nvars - order


def _numerator_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _series_values(num, nvars, degrees):
    """Coefficients of ``num(t)/(1-t)^nvars`` at the given degrees."""
    out = []
    for k in degrees:
        total = 0
        for i, c in enumerate(num):
            if c and k - i >= 0:
                total += c * comb(k - i + nvars - 1, nvars - 1) if nvars else (c if k == i else 0)
        out.append(total)
    return tuple(out)


def universal_form(n, d):
    """The generic degree-``d`` form in ``x0..xn`` with one coefficient variable per monomial."""
    xs = tuple(f"x{i}" for i in range(n + 1))
    monos = []
    for combo in combinations_with_replacement(range(n + 1), d):
        e = [0] * (n + 1)
        for i in combo:
            e[i] += 1
        monos.append(tuple(e))
    monos.sort(reverse=True)
    sep = "" if d < 10 else "_"
    cs = tuple("c" + sep.join(str(a) for a in e) for e in monos)
    ctx = RingContext(xs, cs)
    terms = {}
    for k, e in enumerate(monos):
        ce = [0] * len(cs)
        ce[k] = 1
        terms[e + tuple(ce)] = mpq(1)
    return Polynomial(ctx, terms), monos


def _invariant_leaves(gens, cell, D, ctx, cctx):
    """Split ``cell`` until the leading ideals of ``J^1..J^{D+1}`` are constant."""
    nx = len(ctx.fiber_vars)
    done = []
    for c, G in _ksw(gens, cell, ctx, cctx):
        _extend_powers(c, G, G, 1, D, ctx, cctx, (_leading_ideal(G, nx),), done)
    return done


def _extend_powers(cell, G1, Gk, k, D, ctx, cctx, leads, out):
    if k == D + 1:
        out.append((cell, leads))
        return
    nx = len(ctx.fiber_vars)
    products = [f * g for f in Gk for g in G1]
    if not products:
        out.append((cell, leads + ((),) * (D + 1 - k)))
        return
    for c, G in _ksw(products, cell, ctx, cctx):
        _extend_powers(c, G1, G, k + 1, D, ctx, cctx, leads + (_leading_ideal(G, nx),), out)


def _invariant_record(leads, nx, D):
    """Hilbert data of the pieces ``J^k/J^{k+1}`` for ``k = 0..D``."""
    nums = [(1,)] + [hilbert_numerator(L, nx) if L else (1,) for L in leads]
    # numerators of R/J^k for k = 0..D+1; R/J^0 = 0
    quot = [(0,)] + nums[1:]
    pieces = []
    piece_nums = []
    for k in range(D + 1):
        num = _numerator_sub(quot[k + 1], quot[k])
        piece_nums.append(num)
        vals = _series_values(num, nx, range(0, 2 * (D + 2)))
        pieces.append(HilbertRecord(vals, _dim_from_numerator(num, nx)))
    return pieces, tuple(piece_nums)


def cor62_partition(n, d, D=2):
    """Partition of the nonzero degree-``d`` forms in ``n+1`` variables by normal-cone invariants."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0 and d >= 1")
    F, _ = universal_form(n, d)
    ctx = F.ctx
    cctx = coefficient_context(ctx)
    nx = n + 1
    gens = [differentiate(F, x) for x in ctx.fiber_vars]
    S = Ideal(cctx)
    strata = []
    level = 0
    while True:
        if S.is_unit() or all(radical_membership(c, S) for c in cctx.gens()):
            break
        if level > DEPTH_CAP:
            raise StratificationError("partition loop did not terminate")
        leaves = _invariant_leaves(gens, Cell(S), D, ctx, cctx)
        classes = {}
        records = {}
        for cell, leads in leaves:
            if cell.only_origin():
                continue
            rec, key = _invariant_record(leads, nx, D)
            classes.setdefault(key, []).append(cell)
            records[key] = rec
        keys = sorted(classes)
        closures = {h: intersect_all([c.closure() for c in classes[h]], cctx) for h in keys}
        pairs = [closures[a] + closures[b] for i, a in enumerate(keys) for b in keys[i + 1:]]
        S_next = intersect_all(pairs, cctx) if pairs else Ideal.unit(cctx)
        S_next = Ideal(cctx, S_next.groebner())
        for h in keys:
            A = Ideal(cctx, closures[h].groebner())
            if all(radical_membership(g, A) for g in S_next.gens):
                continue
            strata.append(Stratum(A, [], records[h], level,
                                  None if S_next.is_unit() else S_next, h))
        if not S_next.is_unit():
            witness = [g for g in S_next.gens if not radical_membership(g, S)]
            if not witness:
                raise StratificationError("partition loop failed to shrink")
        S = S_next
        level += 1
    strata.sort(key=lambda s: (s.depth, tuple(str(g) for g in s.closed_ideal.gens)))
    return strata


def point_invariant(n, d, D, point):
    """Piece numerators at one coefficient point, by specializing before any basis computation."""
    F, _ = universal_form(n, d)
    ctx = F.ctx
    xctx = RingContext(ctx.fiber_vars)
    f = F.subs(point).to_context(xctx)
    J = Ideal(xctx, [differentiate(f, x) for x in xctx.variables])
    leads = []
    Jk = Ideal.unit(xctx)
    for _ in range(D + 1):
        Jk = Jk * J
        leads.append(_minimal_monomials(Jk.leading_monomials()) if not Jk.is_zero() else ())
    _, key = _invariant_record(leads, n + 1, D)
    return key
