"""Koszul Tor over the parameters, flatness verdicts and the supporting ideal tests."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cones import FamilyGerm, assoc_graded, family_jacobian_ideal, graded_piece
from .groebner import (Ideal, ideal_membership, ideal_quotient, intersect_all,
                       radical_membership)
from .modules import (INFINITE, ModulePresentation, SubmoduleBasis, annihilator,
                      finite_dimension, is_zero_vector, kernel_vectors, syzygies)
from .polycore import differentiate

FLAT_EVERYWHERE = "flat-everywhere"
FLAT_OFF_ORIGIN = "flat-off-origin"
FAILS = "fails"


class HypothesisError(ValueError):
    pass


def _zero_vec(ctx, n):
    return [ctx.zero() for _ in range(n)]


def koszul_tor(M, i=1, params=None):
    """``H_i`` of the Koszul complex of ``M`` on the parameter variables.

    Only ``i`` in ``{0, 1}`` is supported.  The result is a subquotient of
    ``M.rank`` copies (one slot per parameter) of the ambient free module.
    """
    ctx = M.ctx
    ys = [ctx.var(v) for v in (ctx.param_vars if params is None else params)]
    p = M.rank
    G = list(M.gens())
    N = list(M.relations)
    if i == 0:
        rel = N + [tuple(y * a for a in g) for y in ys for g in G]
        return ModulePresentation(ctx, p, rel, M.generators, M.degrees)
    if i != 1:
        raise ValueError("only Tor_0 and Tor_1 are available")
    u = len(ys)
    if u == 0:
        return ModulePresentation(ctx, 0, (), ())
    r = len(G)
    cols = [tuple(y * a for a in g) for y in ys for g in G] + N
    cycles = []
    for k in kernel_vectors(cols, p, ctx):
        coeffs = k[:u * r]
        if is_zero_vector(coeffs):
            continue
        z = []
        for j in range(u):
            slot = _zero_vec(ctx, p)
            for a, g in zip(coeffs[j * r:(j + 1) * r], G):
                if a.is_zero():
                    continue
                for s in range(p):
                    if not g[s].is_zero():
                        slot[s] = slot[s] + a * g[s]
            z.extend(slot)
        if not is_zero_vector(z):
            cycles.append(tuple(z))
    bounds = []
    for j in range(u):
        for k in range(j + 1, u):
            for g in G:
                v = _zero_vec(ctx, p * u)
                for s in range(p):
                    v[k * p + s] = ys[j] * g[s]
                    v[j * p + s] = -(ys[k] * g[s])
                bounds.append(tuple(v))
    for j in range(u):
        for n in N:
            v = _zero_vec(ctx, p * u)
            v[j * p:(j + 1) * p] = n
            bounds.append(tuple(v))
    return ModulePresentation(ctx, p * u, bounds, cycles)


def obstruction_support(M, params=None):
    """Annihilator of ``Tor_1`` restricted to the central fiber; ``(1)`` when it vanishes."""
    ctx = M.ctx
    params = ctx.param_vars if params is None else tuple(params)
    H = koszul_tor(M, 1, params)
    if H.is_zero():
        return Ideal.unit(ctx), H
    A = annihilator(H)
    return Ideal(ctx, [g.specialize(params) for g in A.gens] + [ctx.var(y) for y in params]), H


def classify_support(support, fiber_vars):
    if support.is_unit():
        return FLAT_EVERYWHERE
    ctx = support.ctx
    if all(radical_membership(ctx.var(x), support) for x in fiber_vars):
        return FLAT_OFF_ORIGIN
    return FAILS


def _central(support):
    """Drop the parameter generators for display."""
    if support.is_unit():
        return support
    ps = {support.ctx.var(y) for y in support.ctx.param_vars}
    return Ideal(support.ctx, [g for g in support.gens if g not in ps])


@dataclass
class PieceResult:
    degree: int
    tor_vanishes: bool
    support: Ideal
    tor: ModulePresentation = field(default=None, repr=False)


@dataclass
class FlatnessVerdict:
    subject: str
    outcome: str
    obstruction_support: Ideal
    degrees_checked: list = field(default_factory=list)
    pieces: list = field(default_factory=list)
    degree_bound: int | None = None
    evidence: list = field(default_factory=list)

    @property
    def support_display(self):
        return _central(self.obstruction_support)


def check_theorem12(fam, condition="i", max_degree=None, primes=()):
    """Tor-vanishing verdict for the critical locus (``"i"``) or its normal cone (``"ii"``).

    For condition ``"i"``, ``primes`` is an optional list of ``(g, I, P)``
    triples whose local membership is attached as evidence.
    """
    if not isinstance(fam, FamilyGerm):
        fam = FamilyGerm(fam)
    J = family_jacobian_ideal(fam)
    if condition == "i":
        support, H = obstruction_support(ModulePresentation.cyclic(J))
        outcome = classify_support(support, fam.fiber_vars)
        evidence = [(g, I, P, local_membership(g, I, P)) for g, I, P in primes]
        piece = PieceResult(0, support.is_unit(), support, H)
        return FlatnessVerdict("critical-locus", outcome, support, [0], [piece], evidence=evidence)
    if condition != "ii":
        raise ValueError(f"unknown condition {condition!r}")
    return graded_flatness(J, max_degree)


def default_degree_bound(G):
    top = max((G.cone_degree(g) for g in G.presentation_ideal.gens), default=0)
    return max(4, top + 1)


def graded_flatness(I, max_degree=None):
    """Verdict for the pieces ``I^k/I^{k+1}``, ``k <= max_degree``, over the parameters."""
    ctx = I.ctx
    G = assoc_graded(I)
    if max_degree is None:
        max_degree = default_degree_bound(G)
    pieces = []
    for k in range(max_degree + 1):
        s, H = obstruction_support(graded_piece(G, k))
        pieces.append(PieceResult(k, s.is_unit(), s, H))
    support = intersect_all([p.support for p in pieces if not p.tor_vanishes], ctx)
    outcome = classify_support(support, ctx.fiber_vars)
    return FlatnessVerdict("normal-cone", outcome, support, list(range(max_degree + 1)),
                           pieces, max_degree)


# ---------------------------------------------------------------------------
# Relations and membership


@dataclass
class LiftResult:
    success: bool
    lift: tuple | None
    certificate: tuple | None


def lift_relation(fam, rel):
    """Lift a relation among the central partials to one among the family partials.

    ``rel`` lies in ``syz(∂f/∂x_i)`` over ``R``.  On success ``lift`` is a
    syzygy ``C`` of ``(∂F/∂x_i)`` with ``C(x, 0) = rel``; on failure the
    certificate is the nonzero normal form of ``rel`` modulo the specialized
    family syzygies.
    """
    if not isinstance(fam, FamilyGerm):
        fam = FamilyGerm(fam)
    ctx = fam.ctx
    n = len(fam.fiber_vars)
    rel = tuple(rel)
    if len(rel) != n:
        raise ValueError("relation has the wrong length")
    partials0 = fam.central_partials()
    total = sum((a * d for a, d in zip(rel, partials0)), ctx.zero())
    if not total.is_zero():
        raise ValueError("not a relation among the central partials")
    if any(a.involves(fam.param_vars) for a in rel):
        raise ValueError("relation must not involve the parameters")
    S = syzygies(fam.partials()).generators
    params = fam.param_vars
    spec = [tuple(a.specialize(params) for a in s) for s in S]
    # rel sits in the largest kernel slot, so a unit there shows up in the basis.
    K = kernel_vectors([rel] + spec, n, ctx)
    m = len(spec)
    for k in K:
        c = k[0]
        if c.is_constant() and not c.is_zero():
            inv = 1 / c.constant_term()
            coeffs = [-(a.scale(inv)) for a in k[1:]]
            lift = tuple(sum((coeffs[j] * S[j][i] for j in range(m)), ctx.zero())
                         for i in range(n))
            return LiftResult(True, lift, None)
    rb = SubmoduleBasis(ctx, n, spec)
    return LiftResult(False, None, rb.reduce(rel))


def local_membership(g, I, P):
    """Whether ``g`` lies in ``I`` after localizing at the prime ``P``.

    Equivalent to ``(I : g)`` not being contained in ``P``.
    """
    if I.contains(g):
        return True
    Q = ideal_quotient(I, Ideal(I.ctx, [g]))
    return not Q.issubset(P)


def local_membership_witness(g, I, P):
    """An element ``s ∉ P`` with ``s·g ∈ I``, or ``None``."""
    if I.contains(g):
        return I.ctx.one()
    Q = ideal_quotient(I, Ideal(I.ctx, [g]))
    for s in Q.gens:
        if not P.contains(s):
            return s
    return None


def j_invariant(f, I):
    """``dim_Q(I / J_f)`` where ``J_f`` is the Jacobian ideal of ``f``.

    Raises :class:`HypothesisError` unless ``J_f ⊆ I``; returns
    ``"infinite"`` when the quotient is not finite dimensional.
    """
    ctx = I.ctx
    fiber = ctx.fiber_vars or ctx.variables
    jac = [differentiate(f, v) for v in fiber]
    jac = [p for p in jac if not p.is_zero()]
    bad = [p for p in jac if not I.contains(p)]
    if bad:
        raise HypothesisError(f"Jacobian ideal is not contained in I: {bad[0]}")
    gens = list(I.gens)
    c = len(gens)
    S = syzygies(gens + jac).generators if jac else syzygies(gens).generators
    rel = [s[:c] for s in S]
    M = ModulePresentation(ctx, c, rel)
    return finite_dimension(M)


def is_associated_prime(J, P):
    """Whether the prime ``P`` is associated to ``R/J``.

    ``P`` is associated iff ``J ≠ (J : P)`` and ``(J : (J : P)) ⊆ P``.
    """
    Q = ideal_quotient(J, P)
    if Q == J:
        return False
    return ideal_quotient(J, Q).issubset(P)


__all__ = [
    "FAILS", "FLAT_EVERYWHERE", "FLAT_OFF_ORIGIN", "FlatnessVerdict", "HypothesisError",
    "INFINITE", "LiftResult", "check_theorem12", "classify_support", "is_associated_prime",
    "graded_flatness", "j_invariant", "koszul_tor", "lift_relation", "local_membership",
    "local_membership_witness", "obstruction_support", "ideal_membership",
]
