"""Command-line entry point: field, gauss, dh, lift, quadform, scheme, catalog.

Exit codes: 0 all verifications passed, 1 a verification failed, 2 usage error,
3 size cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

from .characters import (
    ConnectionSet,
    MultChar,
    davenport_hasse_check,
    gauss_property_check,
    gauss_sum,
)
from .finite_field import CAP_ENV, CapExceededError, build_field, prime_power
from .quadratic_forms import (
    canonical_form,
    fiber_partition,
    fiber_union_connection_set,
    fiber_variant_connection_sets,
    latin_params,
    quadratic_form_fields,
    type_epsilon,
)
from .singer_lift import hadamard_check, lift_connection_set
from .verify import (
    amorphic_check,
    cross_validate_scheme,
    verify_srg,
    verify_scheme_brute,
    verify_translation_scheme_dual,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


def _field_info(F) -> dict:
    return {"p": F.p, "f": F.f, "modulus": list(F.modulus)}


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


# -- pipelines (also used by the catalog) -------------------------------------------

def run_field(p: int, f: int) -> dict:
    F = build_field(p, f)
    return {
        "field": _field_info(F),
        "q": F.q,
        "gamma": int(F.exp[1 % (F.q - 1)]) if F.q > 2 else 1,
        "subfields": [{"degree": d, "order": p**d, "cofactor": (F.q - 1) // (p**d - 1)}
                      for d in _divisors(f)],
        "passed": True,
    }


def run_gauss(p: int, f: int, e: int) -> dict:
    F = build_field(p, f)
    if (F.q - 1) % e:
        raise ValueError(f"e={e} does not divide q-1={F.q - 1}")
    sums = []
    for j in range(e):
        G = gauss_sum(F, MultChar(F, e, j))
        norm = (G * G.conjugate()).as_rational_integer()
        sums.append({"j": j, "value": G.reduce_canonical().to_dict(),
                     "rational_value": G.as_rational_integer(), "norm": norm})
    props = gauss_property_check(F, e)
    return {"field": _field_info(F), "e": e, "gauss_sums": sums,
            "properties": props.to_dict(), "passed": props.passed}


def run_dh(p: int, f: int, e: int, s: int) -> dict:
    return davenport_hasse_check(p, f, e, s).to_dict()


def lift_prediction(q: int, m: int, e: int, size_I: int) -> tuple:
    """Negative Latin square parameters with n = q^m and r = |I|(q^m-1)/e."""
    return latin_params(q**m, size_I * (q**m - 1) // e, -1)


def run_lift(q: int, m: int, e: int, method: str = "auto", reference: str = "majority") -> dict:
    lift = lift_connection_set(q, m, e, reference=reference)
    rep = verify_srg(lift.D, method)
    out = lift.to_dict()
    out["singer"] = lift.subdiff.singer.to_dict()
    out["predicted_params"] = list(lift_prediction(q, m, e, len(lift.I)))
    out["srg"] = rep.to_dict()
    passed = rep.passed and tuple(rep.params.as_tuple()) == lift_prediction(q, m, e, len(lift.I))
    if q == 2 and e == 2**m - 1:
        had = hadamard_check(lift)
        out["hadamard"] = had.to_dict()
        passed = passed and had.passed
    out["passed"] = passed
    return out


def _parse_classes(text: str | None, e: int) -> list[int]:
    if text is None or text == "":
        return [0]
    return sorted({int(x) % e for x in text.split(",")})


def run_quadform(q: int, n: int, kind: str, e: int, classes: list[int],
                 method: str = "auto") -> dict:
    F, big = quadratic_form_fields(q)
    Q = canonical_form(F, n, kind)
    eps = type_epsilon(Q)
    res = fiber_union_connection_set(Q, e, classes, verify=method)
    out = {"form": Q.to_dict(), "field": _field_info(F), "ambient_field": _field_info(big),
           "epsilon": eps}
    out.update(res.to_dict())
    passed = res.report.passed and tuple(res.report.params.as_tuple()) == res.predicted_params
    variants = {}
    try:
        sets = fiber_variant_connection_sets(Q, e, classes)
    except ValueError as exc:
        variants["skipped"] = str(exc)
    else:
        for name in ("D0", "D_E_plus_D0"):
            r = verify_srg(sets[name], method)
            variants[name] = {"size": len(sets[name]), "srg": r.to_dict()}
            passed = passed and r.passed
    out["variants"] = variants
    out["passed"] = passed
    return out


def _parse_fusion(text: str, e: int) -> list[list[int]]:
    blocks = [sorted(int(x) for x in part.split(",") if x.strip()) for part in text.split("|")]
    if sorted(i for b in blocks for i in b) != list(range(e)):
        raise ValueError(f"fusion {text!r} must partition 0..{e - 1}")
    return blocks


def run_scheme(q: int, n: int, kind: str, e: int, fuse: str | None = None,
               amorphic_triple: bool = False, classes: list[int] | None = None, method: str = "auto") -> dict:
    F, big = quadratic_form_fields(q)
    Q = canonical_form(F, n, kind)
    out = {"form": Q.to_dict(), "field": _field_info(F), "epsilon": type_epsilon(Q), "e": e}
    if amorphic_triple:
        E = classes or [0]
        rest = sorted(set(range(e)) - set(E))
        fiber_union_connection_set(Q, e, E)  # precondition check on F_{q^2}
        parts = fiber_partition(Q, e, [E, rest])
        parts = [parts[1], parts[2], parts[0]]
        rep = amorphic_check(parts)
        out.update({"kind": "amorphic triple", "E": E, "scheme": rep.to_dict()})
        out["passed"] = rep.passed and rep.d == 3
        return out
    blocks = None
    if fuse:
        blocks = _parse_fusion(fuse, e)
        # the matching fusion of the cyclotomic scheme on F_{q^2} must itself be a scheme
        cyc = [ConnectionSet.union_of_classes(big, e, b, check=False) for b in blocks]
        pre = verify_translation_scheme_dual(cyc)
        out["precondition"] = pre.to_dict()
        if not pre.passed:
            out["passed"] = False
            return out
        out["fusion"] = blocks
    # D_0 minus 0 is empty for anisotropic forms (elliptic, n = 2)
    parts = [P for P in fiber_partition(Q, e, blocks) if len(P)]
    d = len(parts)
    size = Q.size
    if method == "auto":
        method = "both" if size <= 1024 else "dual"
    if method == "both":
        res = cross_validate_scheme(parts)
        out["brute"] = res["brute"].to_dict()
        out["dual"] = res["dual"].to_dict()
        out["methods_agree"] = res["agree"]
        out["passed"] = res["agree"] and res["dual"].passed and res["dual"].d == d
    elif method == "dual":
        rep = verify_translation_scheme_dual(parts)
        out["dual"] = rep.to_dict()
        out["passed"] = rep.passed
    elif method == "brute":
        rep = verify_scheme_brute(parts)
        out["brute"] = rep.to_dict()
        out["passed"] = rep.passed
    else:
        raise ValueError(f"unknown scheme method {method!r}")
    out["classes"] = d
    return out


# -- catalog ------------------------------------------------------------------------

def _srg_row(rid, family, instance, predicted, rep, field, extra=None) -> dict:
    verified = list(rep.params.as_tuple()) if rep.params else None
    row = {"id": rid, "family": family, "instance": instance, "field": field,
           "predicted": list(predicted), "verified": verified, "method": rep.method,
           "type": rep.classification["type"] if rep.classification else None,
           "passed": bool(rep.passed and verified == list(predicted))}
    if extra:
        row.update(extra)
        row["passed"] = row["passed"] and all(v for k, v in extra.items() if k.endswith("_ok"))
    return row


def _paley(q):
    p, f = prime_power(q)
    F = build_field(p, f)
    t = (q - 1) // 4
    rep = verify_srg(ConnectionSet.union_of_classes(F, 2, [0]))
    return _srg_row(f"paley-{q}", "Paley", {"q": q}, (4 * t + 1, 2 * t, t - 1, t), rep,
                    _field_info(F))


def _lift(q, m, e, family, r_formula, hadamard=False):
    lift = lift_connection_set(q, m, e)
    rep = verify_srg(lift.D)
    extra = {"S_prime": lift.subdiff.S_prime, "delta": lift.subdiff.delta, "I": lift.I}
    if hadamard:
        h = hadamard_check(lift)
        extra["hadamard"] = list(h.params) if h.params else None
        extra["hadamard_ok"] = h.passed
    return _srg_row(f"lift-{q}-{m}-{e}", family, {"q": q, "m": m, "e": e},
                    latin_params(q**m, r_formula, -1), rep, _field_info(lift.field), extra)


def _fiber(q, n, kind, e, classes, family, r_formula, variant=None):
    F, big = quadratic_form_fields(q)
    Q = canonical_form(F, n, kind)
    eps = type_epsilon(Q)
    res = fiber_union_connection_set(Q, e, classes)
    D = res.D
    if variant is not None:
        D = fiber_variant_connection_sets(Q, e, classes)[variant]
    rep = verify_srg(D)
    inst = {"q": q, "n": n, "type": kind, "e": e, "classes": list(classes)}
    if variant:
        inst["set"] = variant
    return _srg_row(f"fiber-{q}-{n}-{kind}-{e}" + (f"-{variant}" if variant else ""), family,
                    inst, latin_params(q ** (n // 2), r_formula(eps), eps), rep, _field_info(F))


def _scheme_row(rid, family, q, n, kind, e, expected_d, **kw):
    res = run_scheme(q, n, kind, e, **kw)
    P = (res.get("dual") or res.get("scheme") or {}).get("P")
    d = (res.get("dual") or res.get("scheme") or {}).get("d")
    return {"id": rid, "family": family,
            "instance": {"q": q, "n": n, "type": kind, "e": e,
                         **({"fuse": kw["fuse"]} if kw.get("fuse") else {})},
            "field": res["field"], "predicted": {"classes": expected_d},
            "verified": {"classes": d, "P": P},
            "method": "amorphic" if kw.get("amorphic_triple") else "brute+dual",
            "type": "scheme", "passed": bool(res["passed"] and d == expected_d)}


def catalog_rows() -> list:
    """Desk-scale instances of every construction, as (id, thunk) pairs."""
    rows = [(f"paley-{q}", lambda q=q: _paley(q)) for q in (5, 9, 13, 17)]
    rows += [
        ("lift-2-3-7", lambda: _lift(2, 3, 7, "subfield lift a=1", 2**2 - 1, hadamard=True)),
        ("lift-2-4-15", lambda: _lift(2, 4, 15, "subfield lift a=1", 2**3 - 1, hadamard=True)),
        ("lift-2-4-5", lambda: _lift(2, 4, 5, "subfield lift a=2", 2**2 - 1)),
        ("lift-3-3-13", lambda: _lift(3, 3, 13, "subfield lift a=1", 3**2 - 1)),
        ("lift-2-4-3", lambda: _lift(2, 4, 3, "semi-primitive lift", (2**4 - 1) // 3)),
        ("lift-3-5-11", lambda: _lift(3, 5, 11, "sporadic lift (3^5, 11, 5)", 5 * (3**5 - 1) // 11)),
    ]
    for kind in ("hyperbolic", "elliptic"):
        rows.append((f"fiber-3-4-{kind}", lambda kind=kind: _fiber(
            3, 4, kind, 2, [0], "fiber union", lambda eps: 3 * 1 * 2 // 2)))
    for variant, rf in (("D0", lambda eps: 3 + eps), ("D_E_plus_D0", lambda eps: 3 + 3 + eps)):
        for kind in ("hyperbolic", "elliptic"):
            rows.append((f"fiber-3-4-{kind}-{variant}", lambda kind=kind, variant=variant, rf=rf: _fiber(
                3, 4, kind, 2, [0], "fiber variant", rf, variant=variant)))
    for kind in ("hyperbolic", "elliptic"):
        rows.append((f"fiber-4-4-{kind}", lambda kind=kind: _fiber(
            4, 4, kind, 3, [0], "semi-primitive fiber union", lambda eps: 4 * 3 // 3)))
    lift_I = None

    def _subfield_fiber(kind):
        nonlocal lift_I
        if lift_I is None:
            lift_I = lift_connection_set(2, 3, 7).I
        return _fiber(8, 2, kind, 7, lift_I, "subfield fiber union", lambda eps: 1 * (2**2 - 1))

    for kind in ("hyperbolic", "elliptic"):
        rows.append((f"fiber-8-2-{kind}", lambda kind=kind: _subfield_fiber(kind)))
    sporadic_I = None

    def _sporadic_fiber(kind):
        nonlocal sporadic_I
        if sporadic_I is None:
            sporadic_I = lift_connection_set(3, 5, 11).I
        return _fiber(243, 2, kind, 11, sporadic_I, "sporadic fiber union",
                      lambda eps: len(sporadic_I) * (243 - 1) // 11)

    for kind in ("hyperbolic", "elliptic"):
        rows.append((f"fiber-243-2-{kind}", lambda kind=kind: _sporadic_fiber(kind)))
    rows += [
        ("scheme-3-4-hyperbolic-2", lambda: _scheme_row(
            "scheme-3-4-hyperbolic-2", "fiber scheme", 3, 4, "hyperbolic", 2, expected_d=3)),
        ("scheme-4-2-hyperbolic-3", lambda: _scheme_row(
            "scheme-4-2-hyperbolic-3", "fiber scheme", 4, 2, "hyperbolic", 3, expected_d=4)),
        ("fusion-4-2-hyperbolic-3", lambda: _scheme_row(
            "fusion-4-2-hyperbolic-3", "fused fiber scheme", 4, 2, "hyperbolic", 3,
            fuse="0|1,2", expected_d=3)),
    ]
    for kind in ("hyperbolic", "elliptic"):
        rows.append((f"amorphic-3-4-{kind}", lambda kind=kind: _scheme_row(
            f"amorphic-3-4-{kind}", "amorphic triple", 3, 4, kind, 2, amorphic_triple=True, expected_d=3)))
    return rows


def run_catalog(timings: bool = False) -> list[dict]:
    out = []
    for rid, thunk in catalog_rows():
        t0 = time.perf_counter()
        try:
            row = thunk()
        except (ValueError, AssertionError) as exc:
            row = {"id": rid, "passed": False, "error": str(exc)}
        if timings:
            row["seconds"] = round(time.perf_counter() - t0, 4)
        out.append(row)
    return out


def catalog_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["instance", "v", "k", "lambda", "mu", "type", "pass"])
    for row in rows:
        ver = row.get("verified")
        if isinstance(ver, list):
            v, k, lam, mu = ver
        else:
            v = k = lam = mu = ""
        w.writerow([row["id"], v, k, lam, mu, row.get("type") or "", int(bool(row["passed"]))])
    return buf.getvalue()


# -- argument parsing -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cycloforge", description=__doc__.splitlines()[0])
    ap.add_argument("--cap", type=int, help=f"field/enumeration size cap (env {CAP_ENV})")
    ap.add_argument("--output", "-o", help="write the report here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    f = sub.add_parser("field", help="build F_{p^f} and list its subfields")
    f.add_argument("p", type=int)
    f.add_argument("f", type=int)

    for name, helptext in (("gauss", "exact Gauss sums and their identities"),
                           ("dh", "Davenport-Hasse lifting check")):
        g = sub.add_parser(name, help=helptext)
        g.add_argument("--p", type=int, required=True)
        g.add_argument("--f", type=int, default=1)
        g.add_argument("--e", type=int, required=True)
        if name == "dh":
            g.add_argument("--s", type=int, required=True)

    lf = sub.add_parser("lift", help="subdifference-set lift of a cyclotomic SRG")
    lf.add_argument("--q", type=int, required=True)
    lf.add_argument("--m", type=int, required=True)
    lf.add_argument("--e", type=int, required=True)
    lf.add_argument("--method", default="auto", choices=["auto", "spectral", "combinatorial", "both"])
    lf.add_argument("--reference", default="majority", choices=["majority", "identity"],
                    help="count that S' is measured against")

    for name in ("quadform", "scheme"):
        qf = sub.add_parser(name, help="fiber-union SRG" if name == "quadform" else "fiber scheme")
        qf.add_argument("--q", type=int, required=True)
        qf.add_argument("--n", type=int, required=True)
        qf.add_argument("--type", dest="kind", default="hyperbolic", choices=["hyperbolic", "elliptic"])
        qf.add_argument("--e", type=int, required=True)
        qf.add_argument("--classes", default=None, help="comma-separated class indices (default 0)")
        if name == "quadform":
            qf.add_argument("--method", default="auto",
                            choices=["auto", "spectral", "combinatorial", "both"])
        else:
            qf.add_argument("--fuse", default=None, help='fusion of class indices, e.g. "0|1,2"')
            qf.add_argument("--amorphic-triple", "--cor54", dest="amorphic_triple", action="store_true",
                            help="amorphic triple D_E, D_(F_q^* minus E), D_0 minus 0")
            qf.add_argument("--method", default="auto", choices=["auto", "both", "dual", "brute"])

    c = sub.add_parser("catalog", help="run every desk-scale instance")
    c.add_argument("--format", default="json", choices=["json", "csv-summary"])
    c.add_argument("--timings", action="store_true", help="include wall time per row")
    return ap


def _dispatch(args) -> tuple[object, bool]:
    cmd = args.command
    if cmd == "field":
        rep = run_field(args.p, args.f)
    elif cmd == "gauss":
        rep = run_gauss(args.p, args.f, args.e)
    elif cmd == "dh":
        rep = run_dh(args.p, args.f, args.e, args.s)
    elif cmd == "lift":
        rep = run_lift(args.q, args.m, args.e, args.method, args.reference)
    elif cmd == "quadform":
        rep = run_quadform(args.q, args.n, args.kind, args.e,
                           _parse_classes(args.classes, args.e), args.method)
    elif cmd == "scheme":
        classes = _parse_classes(args.classes, args.e) if args.classes else None
        rep = run_scheme(args.q, args.n, args.kind, args.e, fuse=args.fuse,
                         amorphic_triple=args.amorphic_triple, classes=classes, method=args.method)
    elif cmd == "catalog":
        rows = run_catalog(args.timings)
        ok = all(r["passed"] for r in rows)
        if args.format == "csv-summary":
            return catalog_csv(rows), ok
        return {"rows": rows, "count": len(rows), "passed": ok}, ok
    else:  # pragma: no cover - argparse rejects unknown commands
        raise ValueError(cmd)
    return rep, bool(rep.get("passed", False))


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.cap is not None:
        os.environ[CAP_ENV] = str(args.cap)
    try:
        report, ok = _dispatch(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report if isinstance(report, str) else json.dumps(report, indent=2) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
