"""Jacobian ideals of families, Rees algebras, normal-cone presentations."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .groebner import Ideal, eliminate, ideal_quotient, krull_dimension
from .modules import ModulePresentation
from .polycore import Polynomial, RingContext, differentiate


class FamilyError(ValueError):
    pass


class FamilyGerm:
    """A polynomial family ``F(x, y)`` viewed as a germ at the origin.

    The fiber block of ``F.ctx`` holds the ``x`` variables and the parameter
    block the ``y`` variables (possibly empty).
    """

    def __init__(self, F):
        ctx = F.ctx
        if not ctx.fiber_vars:
            raise FamilyError("family needs at least one fiber variable")
        if F.constant_term() != 0:
            raise FamilyError("F does not vanish at the origin")
        f = F.specialize(ctx.param_vars) if ctx.param_vars else F
        if f.is_constant():
            raise FamilyError("restriction to the central fiber is constant")
        self.F = F
        self.f = f
        self.ctx = ctx

    @property
    def fiber_vars(self):
        return self.ctx.fiber_vars

    @property
    def param_vars(self):
        return self.ctx.param_vars

    def partials(self):
        return [differentiate(self.F, v) for v in self.fiber_vars]

    def central_partials(self):
        return [differentiate(self.f, v) for v in self.fiber_vars]

    def is_product(self):
        return not self.F.involves(self.param_vars)

    def __repr__(self):
        return f"FamilyGerm({self.F})"


def family_jacobian_ideal(fam):
    """Ideal of fiber partials; the parameter rows of the Jacobian of F×π are the identity."""
    return Ideal(fam.ctx, fam.partials())


def jacobian_ideal(f):
    return Ideal(f.ctx, [differentiate(f, v) for v in f.ctx.fiber_vars or f.ctx.variables])


@dataclass
class GradedAlgebraPresentation:
    base_ideal: Ideal
    ctx: RingContext
    cone_vars: tuple
    presentation_ideal: Ideal
    kind: str
    generators: tuple = field(default=())

    def cone_degree(self, p):
        return p.degree_in(self.cone_vars)


def _cone_context(I):
    ctx = I.ctx
    names = []
    probe = ctx
    for i in range(len(I.gens)):
        name = probe.fresh_name(f"v{i + 1}")
        names.append(name)
        probe = probe.extend(aux=(name,))
    return probe, tuple(names)


def rees_presentation(I):
    """Kernel of ``v_i -> g_i·τ`` by eliminating ``τ``."""
    if I.is_zero():
        raise ValueError("Rees algebra of the zero ideal")
    gens = I.gens
    ext, vs = _cone_context(I)
    tau = ext.fresh_name("tau")
    big = ext.extend(aux=(tau,))
    t = big.var(tau)
    rel = [big.var(v) - g.to_context(big) * t for v, g in zip(vs, gens)]
    K = eliminate(Ideal(big, rel), [tau])
    P = Ideal(ext, [g.to_context(ext) for g in K.gens])
    return GradedAlgebraPresentation(I, ext, vs, P, "rees", gens)


def assoc_graded(I):
    """Presentation of the associated graded algebra: Rees kernel plus ``I``."""
    R = rees_presentation(I)
    ext = R.ctx
    P = Ideal(ext, list(R.presentation_ideal.gens) + [g.to_context(ext) for g in I.gens])
    return GradedAlgebraPresentation(I, ext, R.cone_vars, P, "graded", R.generators)


def cone_monomials(k, cone_vars):
    """Exponent tuples of degree-``k`` monomials in the cone variables, grevlex-descending."""
    n = len(cone_vars)
    out = []
    for combo in combinations_with_replacement(range(n), k):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    key = lambda e: (sum(e),) + tuple(-x for x in reversed(e))
    out.sort(key=key, reverse=True)
    return out


def _cone_homogeneous_parts(p, cone_idx):
    parts = {}
    for e, c in p.terms.items():
        d = sum(e[i] for i in cone_idx)
        parts.setdefault(d, {})[e] = c
    return {d: Polynomial(p.ctx, t) for d, t in sorted(parts.items())}


def graded_piece(G, k):
    """``I^k / I^{k+1}`` as a module over the base ring, from the degree-``k`` slice."""
    if G.kind != "graded":
        raise ValueError("graded_piece needs an associated graded presentation")
    if k < 0:
        raise ValueError("negative degree")
    base = G.base_ideal.ctx
    ext = G.ctx
    nb = base.nvars
    cone_idx = [ext.index[v] for v in G.cone_vars]
    monos = cone_monomials(k, G.cone_vars)
    pos = {m: i for i, m in enumerate(monos)}
    rank = len(monos)
    relations = []
    for g in G.presentation_ideal.gens:
        for e, part in _cone_homogeneous_parts(g, cone_idx).items():
            if e > k:
                continue
            for mult in cone_monomials(k - e, G.cone_vars):
                vec = [dict() for _ in range(rank)]
                for ex, c in part.terms.items():
                    vm = tuple(ex[i] + mult[j] for j, i in enumerate(cone_idx))
                    vec[pos[vm]][ex[:nb]] = c
                relations.append(tuple(Polynomial(base, t) for t in vec))
    return ModulePresentation(base, rank, relations)


def koszul_linear_ideal(G):
    """``I·S`` plus the Koszul relations ``g_j v_i - g_i v_j``."""
    ext = G.ctx
    gens = [g.to_context(ext) for g in G.generators]
    vs = [ext.var(v) for v in G.cone_vars]
    out = list(gens)
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            out.append(gens[j] * vs[i] - gens[i] * vs[j])
    return Ideal(ext, out)


def rees_criterion(gens):
    """Whether the associated graded presentation is exactly ``I`` plus linear Koszul relations."""
    I = Ideal(gens[0].ctx, gens)
    if len(I.gens) != len([g for g in gens if not g.is_zero()]):
        return False
    G = assoc_graded(I)
    return G.presentation_ideal == koszul_linear_ideal(G)


def is_regular_sequence(gens):
    """Iterated quotient test ``((g_1..g_{k-1}) : g_k) = (g_1..g_{k-1})`` on a proper ideal."""
    gens = list(gens)
    if not gens:
        raise ValueError("empty sequence")
    ctx = gens[0].ctx
    if any(g.is_zero() for g in gens):
        return False
    if Ideal(ctx, gens).is_unit():
        return False
    for k in range(1, len(gens)):
        prev = Ideal(ctx, gens[:k])
        if prev.contains(gens[k]):
            return False
        Q = ideal_quotient(prev, Ideal(ctx, [gens[k]]))
        if Q != prev:
            return False
    return True


@dataclass
class CIReport:
    jacobian_contained: bool
    jacobian_remainders: list
    ci_codimension: int
    central_dimension: int
    complete_intersection: bool
    j_value: object
    f_in_I_squared: bool
    f_remainder: Polynomial

    @property
    def all_hold(self):
        return (self.jacobian_contained and self.complete_intersection
                and self.j_value != "infinite" and self.f_in_I_squared)


def check_ci_hypotheses(fam, G):
    """Hypotheses for deforming a function with complete-intersection critical locus."""
    from .flatness import j_invariant

    G = list(G)
    if not G:
        raise ValueError("need at least one generator G_i")
    ctx = fam.ctx
    It = Ideal(ctx, G)
    rems = [It.reduce(p) for p in fam.partials()]
    contained = all(r.is_zero() for r in rems)
    g = [Gi.specialize(fam.param_vars) if fam.param_vars else Gi for Gi in G]
    fiber_ctx = RingContext(fam.fiber_vars)
    I0 = Ideal(fiber_ctx, [gi.to_context(fiber_ctx) for gi in g])
    c = len(G)
    n1 = len(fam.fiber_vars)
    dim = krull_dimension(I0)
    ci = dim == n1 - c and not I0.is_unit()
    f0 = fam.f.to_context(fiber_ctx)
    try:
        jv = j_invariant(f0, I0)
    except ValueError:
        jv = "infinite"
    sq = I0 ** 2
    frem = sq.reduce(f0)
    return CIReport(contained, rems, c, dim, ci, jv, frem.is_zero(), frem)
