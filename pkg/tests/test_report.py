import copy

import pytest

from flatcone.cones import FamilyGerm
from flatcone.flatness import lift_relation, local_membership_witness, obstruction_support
from flatcone.groebner import Ideal, ideal_quotient
from flatcone.modules import ModulePresentation, annihilator, syzygies
from flatcone.polycore import RingContext, parse_poly
from flatcone.report import (FIELDS, SCHEMA, CertificateError, cert_assoc, cert_equality,
                             cert_groebner, cert_lift, cert_local_membership,
                             cert_membership, cert_stratum, cert_tor, make_report,
                             verify_certificate, verify_report)

R = RingContext(("x", "y", "z"))


def P(s, ctx=R):
    return parse_poly(s, ctx)


def I(*gens, ctx=R):
    return Ideal(ctx, [P(g, ctx) for g in gens])


def test_report_field_order():
    rep = make_report({"name": "x"})
    assert tuple(rep) == FIELDS
    assert rep["schema"] == SCHEMA
    with pytest.raises(ValueError):
        verify_report({"schema": "other"})


def _tor_cert(vanishing):
    ctx = RingContext(("x",), ("t",))
    gens = ["x*t", "x^2"] if not vanishing else ["x^2 - t"]
    M = ModulePresentation.cyclic(Ideal(ctx, [P(g, ctx) for g in gens]))
    _, H = obstruction_support(M)
    ann = None if H.is_zero() else annihilator(H)
    return cert_tor("piece", M, H, ctx.param_vars, H.is_zero(), ann)


def _lift_cert(success):
    ctx = RingContext(("x", "y", "z"), ("t",))
    if success:
        F = FamilyGerm(P("(x^2 + y^2*z - t)*(x - t)", ctx))
        rel = (ctx.zero(), P("y", ctx), P("-2*z", ctx))
    else:
        F = FamilyGerm(P("y^2 + x^2*(t*z - x)", ctx))
        rel = (ctx.zero(), ctx.zero(), ctx.one())
    res = lift_relation(F, rel)
    spec = [tuple(a.specialize(F.param_vars) for a in s) for s in syzygies(F.partials()).generators]
    return cert_lift(F.F, F.partials(), rel, res, spec)


def _local_cert():
    g = P("2*x^2*y^2*z")
    J = I("6*x^5 + 2*x*y^2*z^2", "6*y^5 + 2*x^2*y*z^2")
    Pr = I("x", "y")
    Q = ideal_quotient(J, Ideal(R, [g]))
    return cert_local_membership(g, J, Pr, Q, False, local_membership_witness(g, J, Pr))


def _assoc_cert(prime):
    J = I("3*x^2 + y^2*z", "2*x*y*z", "x*y^2")
    Pr = I(*prime)
    Q = ideal_quotient(J, Pr)
    colon = None if Q == J else ideal_quotient(J, Q)
    from flatcone.flatness import is_associated_prime
    return cert_assoc(J, Pr, Q, colon, is_associated_prime(J, Pr))


CERTS = {
    "groebner": lambda: cert_groebner("J", I("x^2 + y", "x*y")),
    "equality": lambda: cert_equality("eq", I("x + y", "x - y"), I("x", "y")),
    "membership": lambda: cert_membership("m", P("x*y + y^2"), I("x + y")),
    "tor-zero": lambda: _tor_cert(True),
    "tor-nonzero": lambda: _tor_cert(False),
    "lift-ok": lambda: _lift_cert(True),
    "lift-fails": lambda: _lift_cert(False),
    "local": _local_cert,
    "assoc-yes": lambda: _assoc_cert(("x", "y")),
    "assoc-no": lambda: _assoc_cert(("y", "z")),
    "stratum": lambda: cert_stratum("s", Ideal(RingContext(("a", "b")), [P("a*b", RingContext(("a", "b")))]),
                                    None, []),
}


@pytest.mark.parametrize("name", sorted(CERTS))
def test_certificates_verify(name):
    verify_certificate(CERTS[name]())


# each tampering flips a claim or corrupts the witness
TAMPER = {
    "equality": lambda c: c.update(equal=not c["equal"]),
    "membership": lambda c: c.update(member=not c["member"]),
    "tor-zero": lambda c: c.update(vanishes=False, witness=c["cycles"][0],
                                   witness_normal_form=c["cycles"][0]),
    "tor-nonzero": lambda c: c.update(vanishes=True),
    "lift-ok": lambda c: c["lift"].__setitem__(2, "z"),
    "local": lambda c: c.update(member=True, witness="x"),
    "assoc-yes": lambda c: c.update(witness="x*y^2"),
    "assoc-yes-outside": lambda c: c.update(witness="z^5"),
    "assoc-no": lambda c: c.update(associated=True, witness="1", colon=["1"]),
    "groebner": lambda c: c["basis"].pop(),
}


@pytest.mark.parametrize("name", sorted(TAMPER))
def test_tampered_certificates_fail(name):
    c = copy.deepcopy(CERTS[name.replace("-outside", "")]())
    TAMPER[name](c)
    with pytest.raises(CertificateError):
        verify_certificate(c)


def test_empty_stratum_is_rejected():
    ctx = RingContext(("a", "b"))
    c = cert_stratum("s", Ideal(ctx, [P("a", ctx)]), None, [P("a + b", ctx) - P("b", ctx)])
    with pytest.raises(CertificateError):
        verify_certificate(c)


def test_unknown_kind():
    with pytest.raises(CertificateError):
        verify_certificate({"kind": "mystery", "ring": {"fiber": ["x"]}})
    rep = make_report({}, certificates=[{"kind": "mystery", "ring": {"fiber": ["x"]}}])
    assert verify_report(rep)[0][2] is not None
