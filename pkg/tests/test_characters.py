import math

import numpy as np
import pytest

from cycloforge.characters import (
    ClassSystem,
    ConnectionSet,
    MultChar,
    VectorSpace,
    additive_charsum,
    canonical_counts,
    charsum_counts,
    davenport_hasse_check,
    eigenvalue_from_gauss_sums,
    eigenvalue_table,
    gauss_property_check,
    gauss_sum,
    lift_character,
    restricted_eigenvalues,
    symmetric_check,
)
from cycloforge.cyclotomic_integers import CycInt
from cycloforge.finite_field import build_field

from oracles import gauss_sum_float, psi_float, zeta


def test_classes():
    F5 = build_field(5, 1)
    assert ClassSystem(F5, 2).class_encodings(0).tolist() == [1, 4]
    F4 = build_field(2, 2)
    assert all(len(c) == 1 for c in ClassSystem(F4, 3).classes())
    F64 = build_field(2, 6)
    assert {len(c) for c in ClassSystem(F64, 7).classes()} == {9}
    with pytest.raises(ValueError):
        ClassSystem(F5, 3)


def test_symmetry():
    assert symmetric_check(ConnectionSet.union_of_classes(build_field(3, 2), 2, [0]))
    assert symmetric_check(ConnectionSet.union_of_classes(build_field(7, 1), 3, [0]))
    assert symmetric_check(ConnectionSet.union_of_classes(build_field(2, 4), 5, [1], check=False))
    with pytest.raises(ValueError):
        ConnectionSet.union_of_classes(build_field(7, 1), 2, [0])  # squares mod 7 are not symmetric
    with pytest.raises(ValueError):
        ConnectionSet(build_field(5, 1), [0, 1, 4])


def test_additive_charsums():
    F = build_field(5, 1)
    assert additive_charsum(F, np.arange(1, 5), F.one) == -1
    D = ConnectionSet.union_of_classes(F, 2, [0])
    assert additive_charsum(F, D, F.zero) == 2
    assert additive_charsum(F, D, F.one) == CycInt.zeta(5, 1) + CycInt.zeta(5, 4)


@pytest.mark.parametrize("p,f,e", [(5, 1, 2), (7, 1, 3), (2, 4, 5), (3, 2, 4), (13, 1, 6)])
def test_gauss_sums_match_float_oracle(p, f, e):
    F = build_field(p, f)
    for j in range(e):
        G = gauss_sum(F, MultChar(F, e, j))
        assert abs(G.to_complex() - gauss_sum_float(list(F.modulus), p, e, j)) < 1e-9


def test_gauss_sum_examples():
    F = build_field(5, 1)
    assert gauss_sum(F, MultChar(F, 2, 0)) == -1
    G = gauss_sum(F, MultChar(F, 2, 1))
    assert G * G.conjugate() == 5
    z5 = CycInt.zeta
    assert G == z5(5, 1) - z5(5, 2) - z5(5, 3) + z5(5, 4)


@pytest.mark.parametrize("p,f,e", [(7, 1, 3), (2, 2, 3), (3, 2, 2), (3, 4, 16), (2, 6, 63)])
def test_gauss_properties(p, f, e):
    rep = gauss_property_check(build_field(p, f), e)
    assert rep.passed, rep.failures
    assert set(rep.properties) == {"i", "ii", "iii", "iv", "v"}


def test_gauss_properties_reduced_mode_agrees_with_exhaustive():
    F = build_field(2, 6)
    a = gauss_property_check(F, 21, exhaustive=True)
    b = gauss_property_check(F, 21, exhaustive=False, budget=0)
    assert a.passed and b.passed
    assert a.modes["v"] == "all pairs" and b.modes["v"].startswith("generators")


def test_davenport_hasse_examples():
    rep = davenport_hasse_check(5, 1, 2, 2)
    assert rep.passed
    assert rep.rows[1]["lhs"] == rep.rows[1]["rhs"]
    big = build_field(5, 2)
    small = big.subfield(1)
    chi = MultChar(small, 2, 1)
    assert gauss_sum(big, lift_character(chi, big)) == -5
    assert davenport_hasse_check(2, 1, 1, 3).passed
    assert davenport_hasse_check(3, 1, 2, 2).passed


def test_davenport_hasse_against_float_sum_over_f25():
    big = build_field(5, 2)
    g = list(big.modulus)
    # the lifted quadratic character of F_5 is chi(N(gamma^k)) = (-1)^k
    direct = gauss_sum_float(g, 5, 2, 1)
    assert abs(direct - (-5)) < 1e-9


def test_paley5_eigenvalues_are_irrational():
    D = ConnectionSet.union_of_classes(build_field(5, 1), 2, [0])
    vals = restricted_eigenvalues(D)
    assert all(v.as_rational_integer() is None for v in vals)
    got = sorted(v.to_complex().real for v in vals)
    assert np.allclose(got, [(-1 - math.sqrt(5)) / 2, (-1 + math.sqrt(5)) / 2])


def test_f16_cubic_classes_eigenvalues():
    D = ConnectionSet.union_of_classes(build_field(2, 4), 3, [0])
    vals = sorted(v.as_rational_integer() for v in restricted_eigenvalues(D))
    assert vals == [-3, 1, 1]


@pytest.mark.parametrize("p,f,e,I", [(2, 4, 3, [0]), (3, 3, 13, [0, 1, 3, 9]), (5, 2, 4, [1, 3])])
def test_eigenvalues_weighted_sum_is_minus_size(p, f, e, I):
    F = build_field(p, f)
    D = ConnectionSet.union_of_classes(F, e, I, check=False)
    table = eigenvalue_table(D)
    total = sum((v * int(w) for v, w in zip(table.values(), table.weights)), CycInt(p))
    assert total == -len(D)


@pytest.mark.parametrize("p,f,e,I", [(2, 4, 3, [0]), (3, 2, 4, [0, 2]), (2, 6, 7, [1, 2, 4])])
def test_symbolic_and_explicit_sweeps_agree(p, f, e, I):
    F = build_field(p, f)
    sym = ConnectionSet.union_of_classes(F, e, I, check=False)
    exp = ConnectionSet(F, sym.elements(), check=False)
    ts, te = eigenvalue_table(sym), eigenvalue_table(exp)
    keys = lambda t: sorted(map(tuple, np.repeat(canonical_counts(t.counts), t.weights, axis=0).tolist()))
    assert keys(ts) == keys(te)


def test_explicit_sweep_against_float_oracle():
    F = build_field(3, 2)
    g = list(F.modulus)
    D = ConnectionSet.union_of_classes(F, 4, [0, 2])
    els = D.elements()
    for b in range(1, F.q):
        want = sum(psi_float(int(F.mul_enc(b, x)), g, 3) for x in els)
        got = CycInt(3, charsum_counts(F, els, [b])[0]).to_complex()
        assert abs(got - want) < 1e-9


@pytest.mark.parametrize("p,f,e,I", [(2, 4, 3, [0]), (3, 3, 13, [2]), (5, 2, 3, [0, 1]), (2, 6, 9, [0, 3])])
def test_gauss_sum_reconstruction_of_eigenvalues(p, f, e, I):
    F = build_field(p, f)
    D = ConnectionSet.union_of_classes(F, e, I, check=False)
    table = eigenvalue_table(D)
    for a in range(e):
        assert eigenvalue_from_gauss_sums(D, a) == table.values()[a] * e


def test_vector_space_characters_use_the_gram_matrix():
    F = build_field(3, 1)
    V = VectorSpace(F, 2, np.array([[0, 1], [1, 0]]))
    D = np.array([1, 2])  # (1,0) and (2,0)
    counts = charsum_counts(V, D, [int(V.encode([0, 1]))])[0]
    # B((0,1),(x,0)) = x, so the sum is zeta_3 + zeta_3^2 = -1
    assert CycInt(3, counts) == -1
    assert abs(CycInt(3, counts).to_complex() - (zeta(3) + zeta(3, 2))) < 1e-12


@pytest.mark.parametrize("p,f", [(2, 6), (3, 4), (5, 2), (13, 1), (7, 2)])
def test_fourier_sweep_matches_direct_counts(p, f):
    from cycloforge.characters import fourier_counts, pairing_matrix

    F = build_field(p, f)
    rng = np.random.default_rng(p * f)
    D = rng.choice(np.arange(1, F.q), F.q // 3, replace=False)
    table = fourier_counts(p, f, D)
    b = np.arange(F.q)

    def digits(xs):
        return np.asarray([[(int(x) // p**i) % p for i in range(f)] for x in xs])

    lin = np.mod(digits(b) @ pairing_matrix(F), p)
    direct = np.zeros((F.q, p), dtype=np.int64)
    Dd = digits(D)
    for i in range(F.q):
        direct[i] = np.bincount((Dd @ lin[i]) % p, minlength=p)
    assert (table[lin @ p ** np.arange(f)] == direct).all()
    assert (charsum_counts(F, D, b) == direct).all()
