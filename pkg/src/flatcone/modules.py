"""Finitely presented modules over a polynomial ring.

A :class:`ModulePresentation` is a subquotient ``(im G + im N) / im N`` of a
free module ``R^p``: ``generators`` are the columns of ``G`` (``None`` means
the standard basis, i.e. a plain cokernel) and ``relations`` the columns of
``N``.  Vectors are tuples of :class:`~flatcone.polycore.Polynomial`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from . import _engine
from .groebner import Ideal, count_standard_monomials, intersect_all, term_order
from .polycore import Polynomial, grevlex


def vec_terms(v):
    d = {}
    for i, p in enumerate(v):
        for e, c in p.terms.items():
            d[(i,) + e] = c
    return d


def terms_vec(d, rank, ctx, offset=0):
    parts = [{} for _ in range(rank)]
    for m, c in d.items():
        parts[m[0] - offset][m[1:]] = c
    return tuple(Polynomial(ctx, t) for t in parts)


def is_zero_vector(v):
    return all(p.is_zero() for p in v)


class SubmoduleBasis:
    """Reduced Groebner basis (position over term, grevlex) of a submodule of ``R^p``."""

    def __init__(self, ctx, rank, vectors, order=None):
        self.ctx = ctx
        self.rank = rank
        self.order = order or grevlex(ctx)
        self.tord = term_order(self.order, pot=True)
        raw = _engine.buchberger([vec_terms(v) for v in vectors if not is_zero_vector(v)],
                                 self.tord, module=True)
        self.raw = [(_engine.leading(d, self.tord), d) for d in raw]

    @property
    def vectors(self):
        return [terms_vec(d, self.rank, self.ctx) for _, d in self.raw]

    def leading_terms(self):
        return [lm for lm, _ in self.raw]

    def reduce(self, v):
        return terms_vec(_engine.normal_form(vec_terms(v), self.raw, self.tord), self.rank, self.ctx)

    def contains(self, v):
        return is_zero_vector(self.reduce(v))


def kernel_vectors(columns, p, ctx):
    """Generators of the kernel of ``R^q -> R^p`` with the given columns."""
    q = len(columns)
    if q == 0:
        return []
    tord = term_order(grevlex(ctx), pot=True)
    polys = []
    for j, col in enumerate(columns):
        d = vec_terms(col)
        d[(p + j,) + (0,) * ctx.nvars] = mpq(1)
        polys.append({m: c for m, c in d.items()})
    raw = _engine.buchberger(polys, tord, module=True)
    out = []
    for d in raw:
        if all(m[0] >= p for m in d):
            out.append(terms_vec(d, q, ctx, offset=p))
    return out


@dataclass
class ModulePresentation:
    ctx: object
    rank: int
    relations: tuple = ()
    generators: tuple | None = None
    degrees: tuple | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.relations = tuple(tuple(v) for v in self.relations
                               if not is_zero_vector(v))
        if self.generators is not None:
            self.generators = tuple(tuple(v) for v in self.generators)
        for v in self.relations + (self.generators or ()):
            if len(v) != self.rank:
                raise ValueError("vector length does not match ambient rank")

    @classmethod
    def cyclic(cls, I):
        """``R/I`` as a module."""
        return cls(I.ctx, 1, [(g,) for g in I.gens])

    @classmethod
    def free(cls, ctx, rank):
        return cls(ctx, rank, ())

    def gens(self):
        if self.generators is not None:
            return self.generators
        z = self.ctx.zero()
        one = self.ctx.one()
        return tuple(tuple(one if i == j else z for i in range(self.rank))
                     for j in range(self.rank))

    def relation_basis(self):
        rb = self._cache.get("rb")
        if rb is None:
            rb = SubmoduleBasis(self.ctx, self.rank, self.relations)
            self._cache["rb"] = rb
        return rb

    def is_zero(self):
        """Every generator reduces to zero modulo the relations."""
        rb = self.relation_basis()
        return all(rb.contains(g) for g in self.gens())

    def nonzero_generators(self):
        rb = self.relation_basis()
        return [(g, rb.reduce(g)) for g in self.gens() if not rb.contains(g)]

    def to_cokernel(self):
        """An isomorphic presentation ``R^r / K`` with standard generators."""
        if self.generators is None:
            return self
        G = self.gens()
        r = len(G)
        K = kernel_vectors(list(G) + list(self.relations), self.rank, self.ctx)
        rel = [v[:r] for v in K]
        degs = None
        if self.degrees is not None:
            degs = tuple(vector_degree(g, self.degrees) for g in G)
        return ModulePresentation(self.ctx, r, rel, None, degs)


def vector_degree(v, shifts):
    """Degree of a homogeneous vector in a graded free module with basis shifts."""
    degs = set()
    for p, s in zip(v, shifts):
        for e in p.terms:
            degs.add(sum(e) + s)
    if len(degs) > 1:
        raise ValueError("vector is not homogeneous")
    return degs.pop() if degs else 0


def syzygies(rows):
    """The kernel of ``e_i -> rows[i]`` as a submodule of ``R^m``."""
    rows = list(rows)
    if not rows:
        raise ValueError("syzygies of an empty list")
    ctx = rows[0].ctx
    K = kernel_vectors([(r,) for r in rows], 1, ctx)
    return ModulePresentation(ctx, len(rows), (), K)


def kernel_of_map(src, dst, matrix):
    """Kernel of the map ``src -> dst`` induced by ``matrix`` on ambient free modules.

    ``matrix`` is a list of ``src.rank`` columns, each of length ``dst.rank``.
    """
    if len(matrix) != src.rank or any(len(c) != dst.rank for c in matrix):
        raise ValueError("matrix dimensions do not match the presentations")
    ctx = src.ctx
    G = src.gens()
    images = [apply_matrix(matrix, g, ctx) for g in G]
    K = kernel_vectors(images + list(dst.relations), dst.rank, ctx)
    r = len(G)
    gens = []
    for v in K:
        c = v[:r]
        if is_zero_vector(c):
            continue
        w = tuple(sum((ci * g[i] for ci, g in zip(c, G)), ctx.zero()) for i in range(src.rank))
        if not is_zero_vector(w):
            gens.append(w)
    return ModulePresentation(ctx, src.rank, src.relations, gens, src.degrees)


def apply_matrix(columns, v, ctx):
    out = [ctx.zero() for _ in range(len(columns[0]) if columns else 0)]
    for a, col in zip(v, columns):
        if a.is_zero():
            continue
        for i, entry in enumerate(col):
            if not entry.is_zero():
                out[i] = out[i] + a * entry
    return tuple(out)


def element_quotient(vectors, z, rank, ctx):
    """The ideal ``{a : a·z ∈ span(vectors)}``."""
    K = kernel_vectors([z] + list(vectors), rank, ctx)
    return Ideal(ctx, [v[0] for v in K])


def annihilator(M):
    """``ann(M)``: intersection over generators ``g`` of ``(relations : g)``."""
    ideals = []
    rb = M.relation_basis()
    for g in M.gens():
        if rb.contains(g):
            continue
        ideals.append(element_quotient(M.relations, g, M.rank, M.ctx))
    return intersect_all(ideals, M.ctx)


INFINITE = "infinite"


def finite_dimension(M):
    """Dimension of ``M`` over the rationals, or ``"infinite"``."""
    C = M.to_cokernel()
    rb = SubmoduleBasis(C.ctx, C.rank, C.relations)
    n = C.ctx.nvars
    leads = {i: [] for i in range(C.rank)}
    for lm in rb.leading_terms():
        leads[lm[0]].append(lm[1:])
    total = 0
    for comp in range(C.rank):
        L = leads[comp]
        bounds = []
        for i in range(n):
            pure = [m[i] for m in L if all(x == 0 for j, x in enumerate(m) if j != i)]
            if not pure:
                return INFINITE
            bounds.append(min(pure))
        total += _count_box(L, bounds)
    return total


def _count_box(leads, bounds):
    count = 0

    def rec(i, prefix):
        nonlocal count
        if i == len(bounds):
            e = tuple(prefix)
            if not any(all(a <= b for a, b in zip(m, e)) for m in leads):
                count += 1
            return
        for x in range(bounds[i]):
            prefix.append(x)
            rec(i + 1, prefix)
            prefix.pop()

    rec(0, [])
    return count


def hilbert_values(M, degrees):
    """Graded dimensions of a homogeneous module; needs ``M.degrees`` (basis shifts)."""
    if M.degrees is None:
        raise ValueError("module has no grading")
    C = M.to_cokernel()
    for v in C.relations:
        vector_degree(v, C.degrees)
    rb = SubmoduleBasis(C.ctx, C.rank, C.relations)
    n = C.ctx.nvars
    leads = {i: [] for i in range(C.rank)}
    for lm in rb.leading_terms():
        leads[lm[0]].append(lm[1:])
    out = []
    for k in degrees:
        total = 0
        for comp in range(C.rank):
            e = k - C.degrees[comp]
            if e >= 0:
                total += count_standard_monomials(leads[comp], n, e)
        out.append(total)
    return tuple(out)
