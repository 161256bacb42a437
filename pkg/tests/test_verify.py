import numpy as np
import pytest

from cycloforge.characters import ConnectionSet, VectorSpace
from cycloforge.finite_field import CapExceededError, build_field
from cycloforge.quadratic_forms import (
    canonical_elliptic,
    canonical_hyperbolic,
    fiber_partition,
    quadratic_form_fields,
)
from cycloforge.singer_lift import lift_connection_set
from cycloforge.verify import (
    SrgParams,
    amorphic_check,
    classify_latin_type,
    cross_validate_scheme,
    eigenmatrices_equal,
    fuse_classes,
    latin_signs,
    set_partitions,
    srg_multiplicities,
    verify_scheme_brute,
    verify_srg,
    verify_srg_combinatorial,
    verify_srg_spectral,
    verify_translation_scheme_dual,
)

from oracles import scheme_intersections_bruteforce, srg_params_bruteforce


def _paley(q, f=1):
    return ConnectionSet.union_of_classes(build_field(q, f), 2, [0])


def test_paley9_spectral():
    rep = verify_srg_spectral(_paley(3, 2))
    assert rep.passed and rep.params.as_tuple() == (9, 4, 1, 2)
    assert rep.eigenvalues == {"r": 1, "s": -2}


def test_f16_cubic_spectral():
    D = ConnectionSet.union_of_classes(build_field(2, 4), 3, [0])
    rep = verify_srg_spectral(D)
    assert rep.params.as_tuple() == (16, 5, 0, 2)
    assert rep.classification == {"type": "NegativeLatin", "n": 4, "r": 1, "epsilon": -1}


def test_lift_spectral_and_combinatorial():
    D = lift_connection_set(2, 3, 7).D
    assert verify_srg_spectral(D).params.as_tuple() == (64, 27, 10, 12)
    assert verify_srg_combinatorial(D).params.as_tuple() == (64, 27, 10, 12)


def test_combinatorial_examples():
    assert verify_srg_combinatorial(_paley(13)).params.as_tuple() == (13, 6, 2, 3)
    F3, _ = quadratic_form_fields(3)
    parts = fiber_partition(canonical_hyperbolic(F3, 4), 2)
    assert verify_srg_combinatorial(parts[2]).params.as_tuple() == (81, 24, 9, 6)


def test_conference_graphs_have_surd_eigenvalues():
    rep = verify_srg(_paley(13))
    assert rep.passed and rep.agreement and not rep.integral
    assert rep.eigenvalues == {"r": "(-1 + sqrt(13))/2", "s": "(-1 - sqrt(13))/2"}
    assert rep.classification == {"type": "Conference", "t": 3}


def test_classification():
    assert classify_latin_type((256, 85, 24, 30)) == {"type": "NegativeLatin", "n": 16, "r": 5, "epsilon": -1}
    assert classify_latin_type((81, 24, 9, 6)) == {"type": "LatinSquare", "n": 9, "r": 3, "epsilon": 1}
    assert classify_latin_type((13, 6, 2, 3))["type"] == "Conference"
    both = classify_latin_type((9, 4, 1, 2))
    assert both["type"] == "LatinSquare" and latin_signs(both) == {1, -1}
    assert classify_latin_type((10, 3, 0, 1))["type"] == "Other"


def test_multiplicities():
    assert srg_multiplicities(64, 27, 10, 12) == (36, 27)
    assert srg_multiplicities(13, 6, 2, 3) == (6, 6)
    assert srg_multiplicities(10, 3, 0, 1) == (5, 4)


def test_failure_reports_witness():
    D = ConnectionSet.union_of_classes(build_field(13, 1), 3, [0])
    comb = verify_srg_combinatorial(D)
    spec = verify_srg_spectral(D)
    assert not comb.passed and comb.witness is not None
    assert not spec.passed
    assert srg_params_bruteforce(D.elements(), 13, 1) is None


def test_degenerate_flag():
    rep = verify_srg(ConnectionSet.union_of_classes(build_field(2, 3), 7, [0]))
    assert rep.passed and rep.degenerate
    assert rep.params.as_tuple() == (8, 1, 0, 0)


@pytest.mark.parametrize("q,f,e,I", [(5, 1, 2, [0]), (3, 2, 2, [0]), (2, 4, 3, [0]), (2, 4, 5, [0]),
                                     (2, 6, 7, [1, 2, 4]), (3, 3, 13, [0, 1, 3, 9]), (3, 4, 4, [0, 2])])
def test_methods_agree_with_adjacency_oracle(q, f, e, I):
    F = build_field(q, f)
    D = ConnectionSet.union_of_classes(F, e, I)
    rep = verify_srg(D, "both")
    truth = srg_params_bruteforce(D.elements(), q, f)
    assert rep.passed == (truth is not None)
    if truth is not None:
        assert rep.agreement and rep.params.as_tuple() == truth


def test_auto_method_switches_to_spectral_above_4096():
    D = lift_connection_set(2, 4, 3).D
    assert verify_srg(D).method == "both"
    big = ConnectionSet.union_of_classes(build_field(2, 14), 3, [0])
    assert verify_srg(big).method == "spectral"
    with pytest.raises(CapExceededError):
        verify_srg_combinatorial(big)


def test_feasibility_identity():
    assert SrgParams(64, 27, 10, 12).feasible
    assert not SrgParams(64, 27, 10, 11).feasible


def test_two_class_scheme_from_paley():
    F = build_field(3, 2)
    classes = [ConnectionSet.union_of_classes(F, 2, [i]) for i in range(2)]
    res = cross_validate_scheme(classes)
    assert res["agree"] and res["brute"].d == 2


def _fiber_classes(q, n, kind, e):
    F, _ = quadratic_form_fields(q)
    Q = (canonical_hyperbolic if kind == "hyperbolic" else canonical_elliptic)(F, n)
    return [P for P in fiber_partition(Q, e) if len(P)]


def test_fiber_scheme_brute_matches_oracle():
    classes = _fiber_classes(3, 4, "hyperbolic", 2)
    rep = verify_scheme_brute(classes)
    assert rep.passed and rep.d == 3
    oracle = scheme_intersections_bruteforce([C.elements() for C in classes], 3, 4)
    assert oracle is not None
    assert np.array_equal(np.array(rep.pijk), oracle)


def test_dual_criterion_examples():
    rep = verify_translation_scheme_dual(_fiber_classes(4, 2, "hyperbolic", 3))
    assert rep.passed and rep.d == 4
    classes = _fiber_classes(4, 2, "hyperbolic", 3)
    fused = [classes[0]] + fuse_classes(classes[1:], [[0], [1, 2]])
    assert verify_translation_scheme_dual(fused).passed


def test_random_partition_is_rejected():
    F3, _ = quadratic_form_fields(3)
    V = canonical_hyperbolic(F3, 4).space
    rng = np.random.default_rng(1)
    reps = [x for x in range(1, 81) if x < int(V.negate(x))]
    labels = rng.integers(0, 3, len(reps))
    classes = []
    for c in range(3):
        pts = [x for x, l in zip(reps, labels) if l == c]
        classes.append(ConnectionSet(V, pts + [int(V.negate(x)) for x in pts]))
    assert not verify_scheme_brute(classes).passed
    assert not verify_translation_scheme_dual(classes).passed
    assert scheme_intersections_bruteforce([C.elements() for C in classes], 3, 4) is None


@pytest.mark.parametrize("q,n,kind,e", [(3, 4, "hyperbolic", 2), (3, 4, "elliptic", 2),
                                        (4, 2, "hyperbolic", 3), (4, 2, "elliptic", 3),
                                        (5, 2, "hyperbolic", 2), (5, 2, "elliptic", 4)])
def test_brute_and_dual_agree(q, n, kind, e):
    res = cross_validate_scheme(_fiber_classes(q, n, kind, e))
    assert res["agree"] and res["brute"].passed and res["dual"].passed


def test_amorphic_triple():
    for kind, sign in (("hyperbolic", 1), ("elliptic", -1)):
        D0, C0, C1 = _fiber_classes(3, 4, kind, 2)
        rep = amorphic_check([C0, C1, D0])
        assert rep.passed and rep.amorphic and rep.extra["latin_sign"] == sign
        assert len(rep.extra["fusions_checked"]) == 4


def test_amorphic_trivial_for_two_classes():
    F = build_field(3, 2)
    rep = amorphic_check([ConnectionSet.union_of_classes(F, 2, [i]) for i in range(2)])
    assert rep.amorphic


def test_partition_validation():
    F = build_field(3, 2)
    with pytest.raises(ValueError):
        verify_scheme_brute([ConnectionSet.union_of_classes(F, 2, [0])])
    F3, _ = quadratic_form_fields(3)
    with pytest.raises(ValueError, match="empty"):
        verify_translation_scheme_dual(fiber_partition(canonical_elliptic(F3, 2), 2))


def test_set_partitions_count():
    assert len(set_partitions([0, 1, 2])) == 5
    assert len(set_partitions([0, 1, 2, 3])) == 15


def test_eigenmatrix_comparison_ignores_row_order():
    assert eigenmatrices_equal([[1, 2], [1, -1]], [[1, 2], [1, -1]])
    assert eigenmatrices_equal([[1, 2, 2], [1, -1, 0], [1, 0, -1]], [[1, 2, 2], [1, 0, -1], [1, -1, 0]])
    assert not eigenmatrices_equal([[1, 2], [1, -1]], [[1, 2], [1, -2]])


def test_canonical_rows_put_principal_row_first_for_irrational_schemes():
    from cycloforge.quadratic_forms import canonical_form, fiber_partition, quadratic_form_fields
    from cycloforge.verify import cross_validate_scheme

    F, _ = quadratic_form_fields(5)
    res = cross_validate_scheme(fiber_partition(canonical_form(F, 2, "hyperbolic"), 4))
    assert res["agree"]
    assert [str(x) for x in res["brute"].P[0]] == ["1", "8", "4", "4", "4", "4"]


def test_cubic_irrational_eigenmatrix_is_certified_numerically():
    from cycloforge.quadratic_forms import canonical_form, fiber_partition, quadratic_form_fields
    from cycloforge.verify import cross_validate_scheme

    F, _ = quadratic_form_fields(7)
    res = cross_validate_scheme(fiber_partition(canonical_form(F, 2, "hyperbolic"), 3))
    assert res["agree"] and res["brute"].passed
    assert isinstance(res["brute"].P[1][1], float)


def test_complete_graph_is_rejected_by_both_methods():
    from cycloforge.verify import verify_srg

    D = ConnectionSet(build_field(2, 4), np.arange(1, 16))
    rep = verify_srg(D, "both")
    assert not rep.passed and rep.agreement
