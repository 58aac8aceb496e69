"""Structured reports and their certificates.

Every certificate is a plain dict carrying its own ring description, so
:func:`verify_certificate` can re-check it from the JSON alone using normal
forms and ideal membership.
"""

from __future__ import annotations

import json

from .groebner import Ideal, is_groebner, radical_membership
from .modules import SubmoduleBasis, is_zero_vector
from .polycore import RingContext, parse_poly

SCHEMA = "flatcone-report/1"
FIELDS = ("schema", "command", "verdict", "obstruction_support", "degrees_checked",
          "certificates", "strata", "counters", "timing_ms")


def make_report(command, verdict=None, obstruction_support=None, degrees_checked=None,
                certificates=(), strata=None, counters=None, timing_ms=None):
    return {
        "schema": SCHEMA,
        "command": command,
        "verdict": verdict,
        "obstruction_support": obstruction_support,
        "degrees_checked": degrees_checked,
        "certificates": list(certificates),
        "strata": strata,
        "counters": dict(counters or {}),
        "timing_ms": timing_ms,
    }


def dumps(report):
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# Encoding

def ring_json(ctx):
    return {"fiber": list(ctx.fiber_vars), "params": list(ctx.param_vars),
            "aux": list(ctx.aux_vars)}


def ring_from_json(d):
    return RingContext(tuple(d["fiber"]), tuple(d.get("params", ())), tuple(d.get("aux", ())))


def polys_json(ps):
    return [str(p) for p in ps]


def basis_json(I):
    """An ideal printed as its reduced Groebner basis."""
    return [str(g) for g in I.groebner()]


def _parse(ctx, s):
    return parse_poly(s, ctx)


def _parse_all(ctx, ss):
    return [parse_poly(s, ctx) for s in ss]


def _vec(ctx, ss):
    return tuple(parse_poly(s, ctx) for s in ss)


# ---------------------------------------------------------------------------
# Certificate constructors

def cert_groebner(label, I):
    return {"kind": "groebner-basis", "label": label, "ring": ring_json(I.ctx),
            "generators": polys_json(I.gens), "basis": basis_json(I)}


def cert_equality(label, I, J):
    return {"kind": "ideal-equality", "label": label, "ring": ring_json(I.ctx),
            "left": basis_json(I), "right": basis_json(J), "equal": I == J}


def cert_membership(label, p, I):
    r = I.reduce(p)
    return {"kind": "membership", "label": label, "ring": ring_json(I.ctx), "poly": str(p),
            "ideal": basis_json(I), "member": r.is_zero(), "remainder": str(r)}


def cert_tor(label, M, H, params, vanishes, annihilator=None):
    """Koszul ``H_1`` data: cycles reduce into the boundaries iff it vanishes."""
    d = {"kind": "tor1", "label": label, "ring": ring_json(M.ctx), "params": list(params),
         "rank": M.rank,
         "module_generators": [polys_json(g) for g in M.gens()],
         "module_relations": [polys_json(v) for v in M.relations],
         "cycles": [polys_json(z) for z in H.gens()],
         "boundaries": [polys_json(b) for b in H.relations],
         "vanishes": vanishes}
    if not vanishes:
        rb = H.relation_basis()
        witness = next(z for z in H.gens() if not rb.contains(z))
        d["witness"] = polys_json(witness)
        d["witness_normal_form"] = polys_json(rb.reduce(witness))
        d["annihilator"] = basis_json(annihilator) if annihilator is not None else None
    return d


def cert_local_membership(g, I, P, Q, member, witness):
    return {"kind": "local-membership", "ring": ring_json(I.ctx), "poly": str(g),
            "ideal": polys_json(I.gens), "prime": polys_json(P.gens),
            "quotient": basis_json(Q), "member": member,
            "witness": None if witness is None else str(witness)}


def cert_lift(F, partials, rel, result, spec):
    ctx = F.ctx
    d = {"kind": "lift", "ring": ring_json(ctx), "family": str(F),
         "partials": polys_json(partials), "relation": polys_json(rel),
         "success": result.success}
    if result.success:
        d["lift"] = polys_json(result.lift)
    else:
        d["certificate"] = polys_json(result.certificate)
        d["specialized_syzygies"] = [polys_json(s) for s in spec]
    return d


def cert_assoc(J, P, Q, colon, associated):
    witness = None
    for q in Q.gens:
        if not J.contains(q):
            witness = str(q)
            break
    return {"kind": "associated-prime", "ring": ring_json(J.ctx), "ideal": basis_json(J),
            "prime": basis_json(P), "quotient": basis_json(Q),
            "colon": basis_json(colon) if colon is not None else None,
            "witness": witness, "associated": associated}


def cert_stratum(label, closed, excluded, open_conditions):
    return {"kind": "stratum", "label": label, "ring": ring_json(closed.ctx),
            "closed": basis_json(closed),
            "excluded": None if excluded is None else basis_json(excluded),
            "open_conditions": polys_json(open_conditions)}


# ---------------------------------------------------------------------------
# Verification

class CertificateError(AssertionError):
    pass


def _check(cond, msg):
    if not cond:
        raise CertificateError(msg)


def _ideal(ctx, ss):
    return Ideal(ctx, _parse_all(ctx, ss))


def _verify_groebner(c, ctx):
    gens = _parse_all(ctx, c["generators"])
    basis = _parse_all(ctx, c["basis"])
    _check(is_groebner(basis), "basis fails the Buchberger criterion")
    B = Ideal(ctx, basis)
    _check(all(B.contains(g) for g in gens), "generator outside the basis ideal")
    G = Ideal(ctx, gens)
    _check(all(G.contains(b) for b in basis), "basis element outside the generated ideal")


def _verify_equality(c, ctx):
    L, R = _ideal(ctx, c["left"]), _ideal(ctx, c["right"])
    eq = L.issubset(R) and R.issubset(L)
    _check(eq == c["equal"], "equality claim does not hold")


def _verify_membership(c, ctx):
    I = _ideal(ctx, c["ideal"])
    _check(is_groebner(list(I.gens)), "ideal not given by a Groebner basis")
    r = I.reduce(_parse(ctx, c["poly"]))
    _check(str(r) == c["remainder"], "remainder mismatch")
    _check(r.is_zero() == c["member"], "membership claim mismatch")


def _verify_tor(c, ctx):
    params = [ctx.var(y) for y in c["params"]]
    p = c["rank"]
    rels = [_vec(ctx, v) for v in c["module_relations"]]
    gens = [_vec(ctx, v) for v in c["module_generators"]]
    cycles = [_vec(ctx, v) for v in c["cycles"]]
    bounds = [_vec(ctx, v) for v in c["boundaries"]]
    u = len(params)
    # a cycle is a u-tuple of elements of the submodule, killed by the Koszul differential
    span = SubmoduleBasis(ctx, p, gens + rels)
    relb = SubmoduleBasis(ctx, p, rels)
    for z in cycles:
        _check(len(z) == p * u, "cycle has the wrong length")
        image = [ctx.zero() for _ in range(p)]
        for j in range(u):
            slot = z[j * p:(j + 1) * p]
            _check(span.contains(slot), "cycle slot outside the module")
            for s in range(p):
                image[s] = image[s] + params[j] * slot[s]
        _check(relb.contains(tuple(image)), "cycle is not killed by the differential")
    bb = SubmoduleBasis(ctx, p * u, bounds)
    if c["vanishes"]:
        _check(all(bb.contains(z) for z in cycles), "a cycle is not a boundary")
    else:
        w = _vec(ctx, c["witness"])
        nf = bb.reduce(w)
        _check(not is_zero_vector(nf), "witness cycle is a boundary")
        _check(polys_json(nf) == c["witness_normal_form"], "witness normal form mismatch")
        if c.get("annihilator"):
            for a in _parse_all(ctx, c["annihilator"]):
                for z in cycles:
                    _check(bb.contains(tuple(a * x for x in z)), "annihilator fails on a cycle")


def _verify_local(c, ctx):
    g = _parse(ctx, c["poly"])
    I = _ideal(ctx, c["ideal"])
    P = _ideal(ctx, c["prime"])
    Q = _parse_all(ctx, c["quotient"])
    _check(all(I.contains(q * g) for q in Q), "quotient element does not multiply g into I")
    if c["member"]:
        w = _parse(ctx, c["witness"])
        _check(I.contains(w * g), "witness does not multiply g into I")
        _check(not P.contains(w), "witness lies in the prime")
    else:
        _check(all(P.contains(q) for q in Q), "quotient generator outside the prime")


def _verify_lift(c, ctx):
    partials = _parse_all(ctx, c["partials"])
    F = _parse(ctx, c["family"])
    from .polycore import differentiate
    _check([str(differentiate(F, x)) for x in ctx.fiber_vars] == c["partials"],
           "partials do not match the family")
    rel = _vec(ctx, c["relation"])
    if c["success"]:
        C = _vec(ctx, c["lift"])
        total = sum((a * b for a, b in zip(C, partials)), ctx.zero())
        _check(total.is_zero(), "lift is not a relation")
        spec = tuple(a.specialize(ctx.param_vars) for a in C)
        _check(spec == rel, "lift does not restrict to the relation")
    else:
        cert = _vec(ctx, c["certificate"])
        _check(not is_zero_vector(cert), "failure certificate is zero")
        spec = [_vec(ctx, s) for s in c["specialized_syzygies"]]
        sb = SubmoduleBasis(ctx, len(rel), spec)
        diff = tuple(a - b for a, b in zip(rel, cert))
        _check(sb.contains(diff), "certificate is not congruent to the relation")
        _check(sb.reduce(cert) == cert, "certificate is not a normal form")


def _verify_assoc(c, ctx):
    J = _ideal(ctx, c["ideal"])
    P = _ideal(ctx, c["prime"])
    Q = _parse_all(ctx, c["quotient"])
    _check(all(J.contains(q * p) for q in Q for p in P.gens), "quotient does not multiply P into J")
    if c["associated"]:
        w = _parse(ctx, c["witness"])
        _check(not J.contains(w), "witness lies in J")
        _check(Ideal(ctx, Q).contains(w), "witness is outside (J : P)")
        colon = _parse_all(ctx, c["colon"])
        _check(all(P.contains(a) for a in colon), "(J : Q) is not inside P")
        _check(all(J.contains(a * q) for a in colon for q in Q), "colon element fails")
    else:
        if c["witness"] is not None and c["colon"] is not None:
            colon = _parse_all(ctx, c["colon"])
            _check(any(not P.contains(a) for a in colon), "colon lies inside P")
        else:
            _check(all(J.contains(q) for q in Q), "quotient is larger than J")


def _verify_stratum(c, ctx):
    closed = _ideal(ctx, c["closed"])
    opens = _parse_all(ctx, c["open_conditions"])
    witnesses = [ctx.one()]
    if c["excluded"] is not None:
        witnesses = _parse_all(ctx, c["excluded"])
    guard = ctx.one()
    for q in opens:
        guard = guard * q
    # some point of V(closed) avoids V(excluded), every open condition and the origin
    nonempty = any(not radical_membership(w * guard * v, closed)
                   for w in witnesses for v in ctx.gens())
    _check(nonempty, "stratum is empty")


_VERIFIERS = {
    "groebner-basis": _verify_groebner,
    "ideal-equality": _verify_equality,
    "membership": _verify_membership,
    "tor1": _verify_tor,
    "local-membership": _verify_local,
    "lift": _verify_lift,
    "associated-prime": _verify_assoc,
    "stratum": _verify_stratum,
}


def verify_certificate(c):
    """Raise :class:`CertificateError` unless the certificate checks out."""
    kind = c.get("kind")
    if kind not in _VERIFIERS:
        raise CertificateError(f"unknown certificate kind {kind!r}")
    ctx = ring_from_json(c["ring"])
    _VERIFIERS[kind](c, ctx)


def verify_report(report):
    """``[(index, kind, error or None)]`` for every certificate in the report."""
    if report.get("schema") != SCHEMA:
        raise ValueError("not a flatcone report")
    out = []
    for i, c in enumerate(report.get("certificates", [])):
        try:
            verify_certificate(c)
            out.append((i, c.get("kind"), None))
        except CertificateError as e:
            out.append((i, c.get("kind"), str(e)))
    return out
