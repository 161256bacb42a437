"""Acceptance criteria 1-14, each with its runtime budget.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""
import time
from contextlib import contextmanager

import pytest
from sympy import divisors, factorint

from cycloforge.characters import ConnectionSet, davenport_hasse_check, gauss_property_check
from cycloforge.cli import run_lift, run_scheme
from cycloforge.finite_field import build_field
from cycloforge.quadratic_forms import (
    canonical_form,
    closed_vs_brute,
    fiber_partition,
    fiber_union_connection_set,
    fiber_variant_connection_sets,
    form_charsum,
    latin_params,
    quadratic_form_fields,
)
from cycloforge.singer_lift import (
    hadamard_check,
    lift_connection_set,
    singer_difference_set,
    subdifference_set,
)
from cycloforge.verify import (
    amorphic_check,
    cross_validate_scheme,
    eigenmatrices_equal,
    verify_srg,
    verify_srg_combinatorial,
    verify_srg_spectral,
)

from conftest import ACCEPTANCE_LINES
from oracles import difference_set_params, srg_params_bruteforce


@contextmanager
def criterion(num: int, title: str, limit: float | None):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        in_time = limit is None or dt < limit
        status = "PASS" if ok and in_time else "FAIL"
        budget = f" (limit {limit:g} s)" if limit else ""
        ACCEPTANCE_LINES.append(f"criterion {num}: {status}  {title}  {dt:.2f} s{budget}")
        print(ACCEPTANCE_LINES[-1])
    assert in_time, f"criterion {num} took {dt:.2f} s, limit {limit} s"


def both_agree(D):
    rep = verify_srg(D, "both")
    assert rep.agreement, "spectral and combinatorial reports differ"
    return rep


def prime_powers(limit):
    out = []
    for q in range(2, limit + 1):
        fac = factorint(q)
        if len(fac) == 1:
            (p, f), = fac.items()
            out.append((q, p, f))
    return out


def test_criterion_01_paley():
    with criterion(1, "Paley graphs q in {5,9,13,17}", 1.0):
        for q in (5, 9, 13, 17):
            p, f = next((p, f) for qq, p, f in prime_powers(17) if qq == q)
            D = ConnectionSet.union_of_classes(build_field(p, f), 2, [0])
            t = (q - 1) // 4
            want = (4 * t + 1, 2 * t, t - 1, t)
            spec, comb = verify_srg_spectral(D), verify_srg_combinatorial(D)
            assert spec.passed and comb.passed
            assert spec.params.as_tuple() == comb.params.as_tuple() == want
            assert spec.summary() == comb.summary()


def test_criterion_02_gauss_properties():
    with criterion(2, "Gauss sum properties (i)-(v), all q <= 512, e | q-1", 30.0):
        count = 0
        for q, p, f in prime_powers(512):
            F = build_field(p, f)
            for e in divisors(q - 1):
                rep = gauss_property_check(F, e)
                assert rep.passed, (q, e, rep.failures)
                count += 1
        assert count > 1000


def test_criterion_03_davenport_hasse():
    with criterion(3, "Davenport-Hasse p in {2,3,5}, f=1, s in {2,3}", 10.0):
        for p in (2, 3, 5):
            for s in (2, 3):
                for e in divisors(p - 1):
                    rep = davenport_hasse_check(p, 1, e, s)
                    assert rep.passed, (p, e, s)
                    assert len(rep.rows) == e


def test_criterion_04_singer_sets():
    with criterion(4, "Singer difference sets", 5.0):
        for q, m in ((2, 3), (2, 4), (3, 3), (4, 3)):
            S = singer_difference_set(q, m)
            want = ((q**m - 1) // (q - 1), (q ** (m - 1) - 1) // (q - 1), (q ** (m - 2) - 1) // (q - 1))
            assert difference_set_params(S.H0.tolist(), S.n) == want


def test_criterion_05_subfield_lift():
    with criterion(5, "subfield-case lift q=2, m=3 -> SRG(64,27,10,12)", 5.0):
        lift = lift_connection_set(2, 3, 7)
        rep = both_agree(lift.D)
        assert rep.passed and rep.params.as_tuple() == (64, 27, 10, 12)
        assert rep.classification["type"] == "NegativeLatin"
        assert (rep.classification["n"], rep.classification["r"]) == (8, 3)
        assert srg_params_bruteforce(lift.D.elements(), 2, 6) == (64, 27, 10, 12)
        had = hadamard_check(lift)
        assert had.passed and had.params == (64, 28, 12)


def test_criterion_06_semiprimitive_lift():
    with criterion(6, "semiprimitive lift F_16 -> F_256, SRG(256,85,24,30)", 10.0):
        lift = lift_connection_set(2, 4, 3)
        rep = both_agree(lift.D)
        assert rep.passed and rep.params.as_tuple() == (256, 85, 24, 30)
        assert rep.classification["type"] == "NegativeLatin"
        assert (rep.classification["n"], rep.classification["r"]) == (16, 5)


def test_criterion_07_sporadic_lift():
    with criterion(7, "sporadic lift q=3^5, e=11 on 59049 vertices", 60.0):
        sub = subdifference_set(3, 5, 11)
        assert sub.base_report.passed and sub.base_report.method == "spectral"
        assert len(sub.S_prime) == 5
        lift = lift_connection_set(3, 5, 11)
        rep = verify_srg(lift.D)
        assert rep.method == "spectral" and rep.passed
        assert rep.classification["type"] == "NegativeLatin"
        assert rep.classification["r"] == 110
        assert rep.params.as_tuple() == latin_params(243, 110, -1)


def test_criterion_08_form_charsums():
    with criterion(8, "exact form character sums for canonical forms", 10.0):
        for q, n in ((2, 2), (2, 4), (3, 2), (3, 4), (4, 2), (4, 4), (5, 2), (5, 4)):
            F, _ = quadratic_form_fields(q)
            for kind, eps in (("hyperbolic", 1), ("elliptic", -1)):
                assert form_charsum(canonical_form(F, n, kind)) == eps * q ** (n // 2)


def test_criterion_09_fiber_closed_forms():
    with criterion(9, "fiber character sum closed form vs brute force", 30.0):
        for q, n, e in ((3, 4, 2), (4, 4, 3), (5, 2, 2), (5, 2, 4)):
            F, big = quadratic_form_fields(q)
            for kind in ("hyperbolic", "elliptic"):
                res = closed_vs_brute(canonical_form(F, n, kind), e, big)
                assert res["passed"], (q, n, e, kind, res["mismatches"][:3])
                assert res["checked"] == (q**n - 1) * (e + 1)


def test_criterion_10_fiber_unions_q3():
    with criterion(10, "fiber unions q=3, n=4, e=2 and variants", 5.0):
        F, _ = quadratic_form_fields(3)
        hyp = fiber_union_connection_set(canonical_form(F, 4, "hyperbolic"), 2, [0], verify="both")
        assert hyp.report.passed and hyp.report.agreement
        assert hyp.report.params.as_tuple() == (81, 24, 9, 6)
        assert hyp.report.classification["type"] == "LatinSquare"
        ell = fiber_union_connection_set(canonical_form(F, 4, "elliptic"), 2, [0], verify="both")
        assert ell.report.passed and ell.report.agreement
        assert ell.report.classification["type"] == "NegativeLatin"
        for kind in ("hyperbolic", "elliptic"):
            for name, D in fiber_variant_connection_sets(canonical_form(F, 4, kind), 2, [0]).items():
                rep = both_agree(D)
                assert rep.passed, (kind, name)


def test_criterion_11_fiber_unions_q4():
    with criterion(11, "fiber unions q=4, n=4, e=3, both types, r=4", 10.0):
        F, _ = quadratic_form_fields(4)
        for kind, eps in (("hyperbolic", 1), ("elliptic", -1)):
            res = fiber_union_connection_set(canonical_form(F, 4, kind), 3, [0], verify="both")
            assert res.report.passed and res.report.agreement
            assert res.report.classification["r"] == 4
            assert res.report.params.as_tuple() == latin_params(16, 4, eps)
            assert res.predicted_params == res.report.params.as_tuple()


def test_criterion_12_fiber_schemes():
    with criterion(12, "fiber partition schemes (d=3 and d=4), brute vs dual", 20.0):
        F3, _ = quadratic_form_fields(3)
        res = cross_validate_scheme(fiber_partition(canonical_form(F3, 4, "hyperbolic"), 2))
        assert res["brute"].passed and res["dual"].passed and res["agree"]
        assert res["brute"].d == 3
        assert eigenmatrices_equal(res["brute"].P, res["dual"].P)
        F4, _ = quadratic_form_fields(4)
        res = cross_validate_scheme(fiber_partition(canonical_form(F4, 2, "hyperbolic"), 3))
        assert res["brute"].passed and res["dual"].passed and res["agree"]
        assert res["dual"].d == 4


def test_criterion_13_amorphic():
    with criterion(13, "amorphic triple q=3, n=4, e=2, both types", 20.0):
        F, _ = quadratic_form_fields(3)
        for kind in ("hyperbolic", "elliptic"):
            Q = canonical_form(F, 4, kind)
            D0, DE, Drest = fiber_partition(Q, 2, [[0], [1]])
            rep = amorphic_check([DE, Drest, D0])
            assert rep.passed and rep.amorphic and rep.d == 3
            # all set partitions of 3 classes into at least 2 blocks
            assert len(rep.extra["fusions_checked"]) == 4
            assert all(x["scheme"] for x in rep.extra["fusions_checked"])


SRG_CROSS_INSTANCES = [
    ("paley-13", lambda: ConnectionSet.union_of_classes(build_field(13, 1), 2, [0])),
    ("F16-cubic", lambda: ConnectionSet.union_of_classes(build_field(2, 4), 3, [0])),
    ("F81-quartic-pair", lambda: ConnectionSet.union_of_classes(build_field(3, 4), 4, [0, 2])),
    ("lift-2-3-7", lambda: lift_connection_set(2, 3, 7).D),
    ("lift-2-4-15", lambda: lift_connection_set(2, 4, 15).D),
    ("lift-3-3-13", lambda: lift_connection_set(3, 3, 13).D),
]


def test_criterion_14_cross_validation():
    with criterion(14, "spectral/combinatorial and brute/dual agreement", None):
        for name, build in SRG_CROSS_INSTANCES:
            rep = verify_srg(build(), "both")
            assert rep.agreement, name
            assert rep.passed, name
        # F_{3^8} has 6561 elements, beyond the both-methods range
        assert verify_srg(lift_connection_set(3, 4, 5, check_base=False).D).method == "spectral"
        for q, n, e in ((3, 4, 2), (4, 2, 3), (5, 2, 2), (5, 2, 4), (4, 4, 3), (7, 2, 3)):
            for kind in ("hyperbolic", "elliptic"):
                if q**n > 1024:
                    continue
                for fuse in (None,) if e == 2 else (None, "0|" + ",".join(map(str, range(1, e)))):
                    out = run_scheme(q, n, kind, e, fuse=fuse, method="both")
                    if "methods_agree" in out:
                        assert out["methods_agree"], (q, n, e, kind, fuse)
        for args in ((2, 3, 7), (2, 4, 3), (3, 3, 13)):
            assert run_lift(*args, method="both")["srg"]["methods_agree"]
