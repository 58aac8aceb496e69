"""Command-line front end: ``flatcone <subcommand> ...``.

Exit codes: 0 computed and the hypothesis holds, 1 computed and it fails,
2 parse or usage error, 3 resource bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import budget as _budget
from .cones import (FamilyError, FamilyGerm, assoc_graded, check_ci_hypotheses,
                    family_jacobian_ideal, graded_piece)
from .flatness import (FAILS, HypothesisError, check_theorem12, default_degree_bound,
                       graded_flatness, is_associated_prime, j_invariant, lift_relation,
                       local_membership_witness)
from .groebner import Ideal, ideal_quotient
from .jobfile import JobSyntaxError, load_job
from .modules import INFINITE, annihilator, syzygies
from .polycore import RingContext, differentiate
from .report import (cert_assoc, cert_equality, cert_groebner, cert_lift,
                     cert_local_membership, cert_membership, cert_stratum, cert_tor,
                     dumps, make_report, polys_json, verify_report)
from .stratify import cor62_partition

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# Job helpers

def _family(job, name):
    if name is None:
        for cand in ("F", "f"):
            if cand in job.polys:
                name = cand
                break
        else:
            if len(job.polys) != 1:
                raise UsageError("no family named F or f; pass --family")
            name = next(iter(job.polys))
    if name not in job.polys:
        raise UsageError(f"unknown polynomial {name!r}")
    try:
        return name, FamilyGerm(job.polys[name])
    except FamilyError as e:
        raise UsageError(str(e)) from None


def _poly(job, name):
    if name not in job.polys:
        raise UsageError(f"unknown polynomial {name!r}")
    return job.polys[name]


def _ideal(job, name):
    if name in job.ideals:
        return Ideal(job.ctx, job.ideals[name])
    if name in job.vectors:
        return Ideal(job.ctx, job.vectors[name])
    raise UsageError(f"unknown ideal {name!r}")


def _vector(job, name):
    if name not in job.vectors:
        raise UsageError(f"unknown vector {name!r}")
    return job.vectors[name]


def _fiber_ring(ctx):
    return RingContext(ctx.fiber_vars)


def _support_json(I):
    from .flatness import _central
    return [str(g) for g in _central(I).groebner()] if not I.is_unit() else ["1"]


# ---------------------------------------------------------------------------
# Subcommands. Each returns (report fields, text lines, exit code).

def cmd_jacobian(job, args):
    fname, fam = _family(job, args.family)
    fctx = _fiber_ring(fam.ctx)
    Jf = Ideal(fctx, [p.to_context(fctx) for p in fam.central_partials()])
    JF = family_jacobian_ideal(fam)
    certs = [cert_groebner("J_f", Jf), cert_groebner("J_F", JF)]
    lines = [f"family {fname} = {fam.F}",
             "J_f = (" + ", ".join(str(p) for p in fam.central_partials()) + ")",
             "J_F = (" + ", ".join(str(p) for p in fam.partials()) + ")",
             f"reduced basis of J_f: ({', '.join(str(g) for g in Jf.groebner())})",
             f"reduced basis of J_F: ({', '.join(str(g) for g in JF.groebner())})"]
    code = EXIT_OK
    verdict = {"J_f": polys_json(fam.central_partials()), "J_F": polys_json(fam.partials())}
    for label, name, I in (("J_f", args.expect_central, Jf), ("J_F", args.expect, JF)):
        if name is None:
            continue
        E = _ideal(job, name)
        E = Ideal(I.ctx, [g.to_context(I.ctx) for g in E.gens])
        c = cert_equality(f"{label} = {name}", I, E)
        certs.append(c)
        verdict[f"{label}_equals_{name}"] = c["equal"]
        lines.append(f"{label} == {name}: {c['equal']}")
        if not c["equal"]:
            code = EXIT_FAIL
    return {"verdict": verdict, "certificates": certs}, lines, code


def _tor_certs(verdict, label):
    certs = []
    for piece in verdict.pieces:
        H = piece.tor
        if H is None:
            continue
        ann = None if piece.tor_vanishes else annihilator(H)
        M = piece.module
        certs.append(cert_tor(f"{label} piece {piece.degree}", M, H, M.ctx.param_vars,
                              piece.tor_vanishes, ann))
    return certs


def _verdict_json(v):
    return {
        "subject": v.subject,
        "outcome": v.outcome,
        "degree_bound": v.degree_bound,
        "pieces": [{"degree": p.degree, "tor1_vanishes": p.tor_vanishes,
                    "support": _support_json(p.support)} for p in v.pieces],
    }


def _verdict_lines(v):
    lines = [f"subject: {v.subject}", f"outcome: {v.outcome}",
             "obstruction support: (" + ", ".join(_support_json(v.obstruction_support)) + ")"]
    for p in v.pieces:
        state = "0" if p.tor_vanishes else "nonzero"
        lines.append(f"  piece {p.degree}: Tor_1 {state}")
    return lines


def cmd_flatness(job, args):
    fname, fam = _family(job, args.family)
    if not fam.param_vars:
        raise UsageError("flatness needs a 'params' declaration")
    primes = []
    for spec in args.evidence or ():
        parts = spec.split(",")
        if len(parts) != 3:
            raise UsageError("--evidence expects g,I,P")
        primes.append((_poly(job, parts[0]), _ideal(job, parts[1]), _ideal(job, parts[2])))
    v = check_theorem12(fam, args.condition, args.degree_bound, primes)
    for p in v.pieces:
        p.module = _piece_module(fam, args.condition, p.degree)
    certs = _tor_certs(v, f"condition {args.condition}")
    lines = [f"family {fname} = {fam.F}"] + _verdict_lines(v)
    evidence = []
    for (g, I, P, member), spec in zip(v.evidence, args.evidence or ()):
        Q = ideal_quotient(I, Ideal(I.ctx, [g]))
        w = local_membership_witness(g, I, P)
        certs.append(cert_local_membership(g, I, P, Q, member, w))
        evidence.append({"evidence": spec, "local_member": member})
        lines.append(f"evidence {spec}: local membership {member}")
    verdict = _verdict_json(v)
    if evidence:
        verdict["evidence"] = evidence
    fields = {"verdict": verdict, "obstruction_support": _support_json(v.obstruction_support),
              "degrees_checked": v.degrees_checked, "certificates": certs}
    return fields, lines, EXIT_FAIL if v.outcome == FAILS else EXIT_OK


def _piece_module(fam, condition, k):
    from .modules import ModulePresentation
    J = family_jacobian_ideal(fam)
    if condition == "i":
        return ModulePresentation.cyclic(J)
    return graded_piece(assoc_graded(J), k)


def cmd_normal_cone(job, args):
    if args.ideal:
        I = _ideal(job, args.ideal)
        label = args.ideal
    else:
        fname, fam = _family(job, args.family)
        I = family_jacobian_ideal(fam)
        label = f"J_{fname}"
    G = assoc_graded(I)
    D = args.degree_bound if args.degree_bound is not None else default_degree_bound(G)
    lines = [f"ideal {label} = (" + ", ".join(str(g) for g in I.gens) + ")",
             "cone variables: " + ", ".join(f"{v} -> {g}" for v, g in zip(G.cone_vars, G.generators)),
             "presentation ideal of gr: (" + ", ".join(str(g) for g in G.presentation_ideal.gens) + ")"]
    certs = [cert_groebner("presentation ideal", G.presentation_ideal)]
    verdict = {"ideal": polys_json(I.gens), "cone_variables": list(G.cone_vars),
               "presentation": polys_json(G.presentation_ideal.gens)}
    code = EXIT_OK
    if I.ctx.param_vars:
        v = graded_flatness(I, D)
        for p in v.pieces:
            p.module = graded_piece(G, p.degree)
        certs += _tor_certs(v, "graded")
        verdict["flatness"] = _verdict_json(v)
        lines += _verdict_lines(v)
        code = EXIT_FAIL if v.outcome == FAILS else EXIT_OK
        return {"verdict": verdict, "obstruction_support": _support_json(v.obstruction_support),
                "degrees_checked": v.degrees_checked, "certificates": certs}, lines, code
    ranks = []
    for k in range(D + 1):
        P = graded_piece(G, k)
        ranks.append(P.rank)
    verdict["piece_generators"] = ranks
    lines.append("generators per piece: " + ", ".join(map(str, ranks)))
    return {"verdict": verdict, "degrees_checked": list(range(D + 1)),
            "certificates": certs}, lines, code


def cmd_lift(job, args):
    fname, fam = _family(job, args.family)
    rel = _vector(job, args.relation)
    try:
        res = lift_relation(fam, rel)
    except ValueError as e:
        raise UsageError(str(e)) from None
    S = syzygies(fam.partials()).generators
    spec = [tuple(a.specialize(fam.param_vars) for a in s) for s in S]
    cert = cert_lift(fam.F, fam.partials(), rel, res, spec)
    if res.success:
        lines = ["lift found: (" + ", ".join(str(a) for a in res.lift) + ")"]
        verdict = {"success": True, "lift": polys_json(res.lift)}
    else:
        lines = ["no lift; normal form certificate: (" + ", ".join(str(a) for a in res.certificate) + ")"]
        verdict = {"success": False, "certificate": polys_json(res.certificate)}
    return {"verdict": verdict, "certificates": [cert]}, lines, EXIT_OK if res.success else EXIT_FAIL


def cmd_local_membership(job, args):
    g = _poly(job, args.poly)
    I = _ideal(job, args.ideal)
    P = _ideal(job, args.prime)
    if P.is_unit():
        raise UsageError("the prime must be proper")
    Q = ideal_quotient(I, Ideal(I.ctx, [g]))
    w = local_membership_witness(g, I, P)
    member = w is not None
    lines = [f"(I : g) = ({', '.join(str(q) for q in Q.groebner())})",
             f"{args.poly} in {args.ideal} localized at {args.prime}: {member}"]
    if member:
        lines.append(f"witness outside the prime: {w}")
    cert = cert_local_membership(g, I, P, Q, member, w)
    return {"verdict": {"member": member}, "certificates": [cert]}, lines, EXIT_OK if member else EXIT_FAIL


def cmd_j_invariant(job, args):
    f = _poly(job, args.poly) if args.poly else _family(job, args.family)[1].f
    I = _ideal(job, args.ideal)
    fctx = _fiber_ring(I.ctx) if I.ctx.param_vars else I.ctx
    f0 = f.to_context(fctx)
    I0 = Ideal(fctx, [g.to_context(fctx) for g in I.gens])
    jac = [differentiate(f0, v) for v in fctx.variables]
    certs = [cert_membership(f"d{v} in I", p, I0) for v, p in zip(fctx.variables, jac)]
    try:
        value = j_invariant(f0, I0)
    except HypothesisError as e:
        return ({"verdict": {"j": None, "error": str(e)}, "certificates": certs},
                [f"hypothesis fails: {e}"], EXIT_FAIL)
    lines = [f"j = dim I/J_f = {value}"]
    return {"verdict": {"j": value}, "certificates": certs}, lines, EXIT_FAIL if value == INFINITE else EXIT_OK


def cmd_assoc_prime(job, args):
    J = _ideal(job, args.ideal)
    results = []
    certs = []
    lines = []
    for name in args.prime:
        P = _ideal(job, name)
        ok = is_associated_prime(J, P)
        Q = ideal_quotient(J, P)
        colon = None if Q == J else ideal_quotient(J, Q)
        certs.append(cert_assoc(J, P, Q, colon, ok))
        results.append({"prime": name, "associated": ok})
        lines.append(f"{name} associated to {args.ideal}: {ok}")
    code = EXIT_OK if all(r["associated"] for r in results) else EXIT_FAIL
    return {"verdict": {"primes": results}, "certificates": certs}, lines, code


def cmd_ci_check(job, args):
    _, fam = _family(job, args.family)
    gens = list(job.vectors.get(args.generators) or job.ideals.get(args.generators) or ())
    if not gens:
        raise UsageError(f"unknown generator list {args.generators!r}")
    rep = check_ci_hypotheses(fam, gens)
    It = Ideal(fam.ctx, gens)
    certs = [cert_membership(f"dF/d{v} in I", p, It) for v, p in zip(fam.fiber_vars, fam.partials())]
    fctx = _fiber_ring(fam.ctx)
    I0 = Ideal(fctx, [g.specialize(fam.param_vars).to_context(fctx) for g in gens])
    certs.append(cert_membership("f in I^2", fam.f.to_context(fctx), I0 ** 2))
    verdict = {"jacobian_contained": rep.jacobian_contained,
               "complete_intersection": rep.complete_intersection,
               "central_dimension": rep.central_dimension,
               "j": rep.j_value, "f_in_I_squared": rep.f_in_I_squared,
               "all_hold": rep.all_hold}
    lines = [f"{k}: {v}" for k, v in verdict.items()]
    return {"verdict": verdict, "certificates": certs}, lines, EXIT_OK if rep.all_hold else EXIT_FAIL


def cmd_stratify(args):
    strata = cor62_partition(args.n, args.d, args.degree_bound)
    out = []
    certs = []
    lines = [f"{len(strata)} strata for degree {args.d} forms in {args.n + 1} variables"]
    for i, s in enumerate(strata):
        out.append({
            "closed": [str(g) for g in s.closed_ideal.groebner()],
            "open_conditions": polys_json(s.open_conditions),
            "excluded": None if s.excluded is None else [str(g) for g in s.excluded.groebner()],
            "depth": s.depth,
            "invariant": [{"values": list(r.values), "dimension": r.dimension} for r in s.invariant],
        })
        certs.append(cert_stratum(f"stratum {i}", s.closed_ideal, s.excluded, s.open_conditions))
        dims = [r.dimension for r in s.invariant]
        lines.append(f"  stratum {i}: V({', '.join(out[-1]['closed']) or '0'})"
                     + (f" minus V({', '.join(out[-1]['excluded'])})" if s.excluded is not None else "")
                     + f"; piece dimensions {dims}")
    verdict = {"count": len(strata), "invariant": "hilbert functions of J^k/J^(k+1)"}
    return {"verdict": verdict, "degrees_checked": list(range(args.degree_bound + 1)),
            "strata": out, "certificates": certs}, lines, EXIT_OK


def cmd_verify(args):
    try:
        with open(args.report_file, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"cannot read report: {e}") from None
    reports = data if isinstance(data, list) else [data]
    lines = []
    ok = True
    for rep in reports:
        try:
            results = verify_report(rep)
        except ValueError as e:
            raise UsageError(str(e)) from None
        for i, kind, err in results:
            lines.append(f"certificate {i} ({kind}): " + ("ok" if err is None else f"FAILED: {err}"))
            ok = ok and err is None
    lines.append("all certificates verified" if ok else "verification failed")
    return lines, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# Argument parsing

_JOB_COMMANDS = {
    "jacobian": cmd_jacobian,
    "normal-cone": cmd_normal_cone,
    "flatness": cmd_flatness,
    "lift-relation": cmd_lift,
    "local-membership": cmd_local_membership,
    "j-invariant": cmd_j_invariant,
    "assoc-prime": cmd_assoc_prime,
    "ci-check": cmd_ci_check,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--report", metavar="PATH", help="write the structured report here ('-' for stdout)")
    p.add_argument("--timing", action="store_true", help="record wall-clock time in the report")
    p.add_argument("--max-degree", type=int, default=80)
    p.add_argument("--max-terms", type=int, default=200_000)
    p.add_argument("--max-seconds", type=float, default=1800.0)


def build_parser():
    parser = _Parser(prog="flatcone", description="Flatness checks for critical loci and normal cones.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def job_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("job", help="job file")
        p.add_argument("--family", help="name of the family polynomial (default F or f)")
        _common(p)
        return p

    p = job_cmd("jacobian", "Jacobian ideals of f and of the family")
    p.add_argument("--expect", help="ideal name to compare with the family ideal")
    p.add_argument("--expect-central", help="ideal name to compare with J_f")
    p = job_cmd("normal-cone", "associated graded presentation of an ideal")
    p.add_argument("--ideal", help="ideal name (default: the family Jacobian ideal)")
    p.add_argument("--degree-bound", type=int)
    p = job_cmd("flatness", "Tor_1 vanishing for the critical locus or its normal cone")
    p.add_argument("--condition", choices=("i", "ii"), default="i")
    p.add_argument("--degree-bound", type=int)
    p.add_argument("--evidence", action="append", metavar="g,I,P",
                   help="attach the local membership of g in I at the prime P")
    p = job_cmd("lift-relation", "extend a relation among partials of f to the family")
    p.add_argument("--relation", required=True)
    p = job_cmd("local-membership", "membership of g in I localized at a prime")
    p.add_argument("--poly", required=True)
    p.add_argument("--ideal", required=True)
    p.add_argument("--prime", required=True)
    p = job_cmd("j-invariant", "dim I/J_f")
    p.add_argument("--poly")
    p.add_argument("--ideal", required=True)
    p = job_cmd("assoc-prime", "test primes for being associated")
    p.add_argument("--ideal", required=True)
    p.add_argument("--prime", action="append", required=True)
    p = job_cmd("ci-check", "hypotheses for a complete-intersection critical locus")
    p.add_argument("--generators", required=True)
    p = job_cmd("run", "execute the job file's check lines")

    p = sub.add_parser("stratify-homogeneous", help="partition degree-d forms by normal-cone invariants")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-d", type=int, required=True)
    p.add_argument("--degree-bound", type=int, default=2)
    _common(p)

    p = sub.add_parser("verify", help="re-check every certificate in a report")
    p.add_argument("report_file")
    return parser


def _emit(report, lines, args, out):
    dest = getattr(args, "report", None)
    text = "\n".join(lines) + "\n"
    if dest == "-":
        sys.stderr.write(text)
        out.write(dumps(report))
    else:
        out.write(text)
        if dest:
            with open(dest, "w", encoding="utf-8") as fh:
                fh.write(dumps(report))


def _command_echo(args, job):
    skip = {"report", "timing", "job"}
    opts = {k: v for k, v in sorted(vars(args).items()) if k not in skip and k != "command"}
    return {"name": args.command, "options": opts,
            "job": job.to_text() if job is not None else None}


def _run_one(args, job):
    if args.command == "stratify-homogeneous":
        if args.n < 0 or args.d < 1 or args.degree_bound < 0:
            raise UsageError("need n >= 0, d >= 1 and a nonnegative degree bound")
        return cmd_stratify(args)
    return _JOB_COMMANDS[args.command](job, args)


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        if args.command == "verify":
            lines, code = cmd_verify(args)
            out.write("\n".join(lines) + "\n")
            return code
        job = None
        if hasattr(args, "job"):
            job = load_job(args.job)
        limits = dict(max_degree=args.max_degree, max_terms=args.max_terms,
                      max_seconds=args.max_seconds)
        if args.command == "run":
            return _run_checks(parser, args, job, limits, out)
        with _budget.limits(**limits) as bud:
            t0 = time.perf_counter()
            fields, lines, code = _run_one(args, job)
            elapsed = round((time.perf_counter() - t0) * 1000, 3)
            report = make_report(_command_echo(args, job), counters=bud.counters,
                                 timing_ms=elapsed if args.timing else None, **fields)
        _emit(report, lines, args, out)
        return code
    except (UsageError, JobSyntaxError) as e:
        sys.stderr.write(f"flatcone: error: {e}\n")
        return EXIT_USAGE
    except OSError as e:
        sys.stderr.write(f"flatcone: error: {e}\n")
        return EXIT_USAGE
    except _budget.ResourceLimitExceeded as e:
        sys.stderr.write(f"flatcone: resource bound exceeded: {e}\n")
        return EXIT_RESOURCE


def _run_checks(parser, args, job, limits, out):
    if not job.checks:
        raise UsageError("job file has no check lines")
    reports = []
    worst = EXIT_OK
    for check in job.checks:
        sub = parser.parse_args(check[:1] + [args.job] + check[1:])
        if sub.command in ("run", "verify", "stratify-homogeneous"):
            raise UsageError(f"check line cannot run {sub.command!r}")
        with _budget.limits(**limits) as bud:
            t0 = time.perf_counter()
            fields, lines, code = _run_one(sub, job)
            elapsed = round((time.perf_counter() - t0) * 1000, 3)
            reports.append(make_report(_command_echo(sub, job), counters=bud.counters,
                                       timing_ms=elapsed if args.timing else None, **fields))
        out.write(f"== {' '.join(check)}\n" + "\n".join(lines) + "\n")
        worst = max(worst, code)
    if args.report:
        text = json.dumps(reports, indent=2, ensure_ascii=False) + "\n"
        if args.report == "-":
            out.write(text)
        else:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write(text)
    return worst


def run_cli(argv=None):
    return main(argv)


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
