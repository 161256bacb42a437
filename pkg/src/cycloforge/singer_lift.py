"""Singer difference sets, subdifference sets and the lift to F_{q^{2m}}.

The quotient F_{q^m}^* / F_q^* is identified with Z_{n'} (n' = (q^m-1)/(q-1))
through the dlog of the base field's generator omega.  With the base field
realized inside F_{q^{2m}}, omega = gamma^(q^m+1), so class labels agree in
both fields.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .characters import ConnectionSet, MultChar, gauss_sum
from .cyclotomic_integers import CycInt
from .finite_field import FiniteField, build_field, check_cap, prime_power
from .verify import SrgReport, difference_counts, verify_srg


@dataclass
class SingerSet:
    q: int
    m: int
    n: int
    H0: np.ndarray
    field: FiniteField

    @property
    def expected(self) -> tuple[int, int, int]:
        q, m = self.q, self.m
        return ((q**m - 1) // (q - 1), (q ** (m - 1) - 1) // (q - 1), (q ** (m - 2) - 1) // (q - 1))

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "n": self.n, "H0": self.H0.tolist()}


def verify_difference_set(B, n: int) -> tuple[int, int, int] | None:
    """(n, k, lambda) if every nonzero residue mod n is a difference of B exactly lambda times."""
    B = np.unique(np.asarray(list(B), dtype=np.int64) % n)
    diffs = (B[:, None] - B[None, :]) % n
    counts = np.bincount(diffs.ravel(), minlength=n)[1:]
    if n == 1:
        return (1, len(B), len(B))
    if (counts == counts[0]).all():
        return (n, len(B), int(counts[0]))
    return None


def _base_field(q: int, m: int, field: FiniteField | None, cap: int | None) -> FiniteField:
    p, f = prime_power(q)
    if field is None:
        return build_field(p, f * m, cap=cap)
    if (field.p, field.f) != (p, f * m):
        raise ValueError(f"field has order {field.q}, expected {q}^{m}")
    return field


def singer_difference_set(q: int, m: int, *, field: FiniteField | None = None,
                          cap: int | None = None) -> SingerSet:
    """H0 = {k mod n' : Tr_{q^m/q}(omega^k) = 0}."""
    if m < 3:
        raise ValueError("m must be >= 3")
    p, f = prime_power(q)
    check_cap(q**m, f"F_{q}^{m}", cap)
    F = _base_field(q, m, field, cap)
    n = (q**m - 1) // (q - 1)
    k = np.arange(n, dtype=np.int64)
    H0 = k[F.rel_trace_logs(k, f) == 0]
    S = SingerSet(q, m, n, H0, F)
    if verify_difference_set(H0, n) != S.expected:
        raise AssertionError(f"trace-zero set for q={q}, m={m} is not a Singer difference set")
    return S


@dataclass
class SubdiffData:
    q: int
    m: int
    e: int
    counts: list
    base: int
    delta: int
    S_prime: list
    lam_prime: int
    singer: SingerSet
    base_report: SrgReport | None = None
    reference: str = "majority"
    identity_checked: bool = False

    def to_dict(self) -> dict:
        out = {"q": self.q, "m": self.m, "e": self.e, "intersection_counts": self.counts,
               "reference": self.reference, "reference_count": self.base, "delta": self.delta, "delta_sign": 1 if self.delta > 0 else -1,
               "S_prime": self.S_prime, "lambda_prime": self.lam_prime,
               "character_identity_checked": self.identity_checked}
        if self.base_report is not None:
            out["base_srg"] = self.base_report.to_dict()
        return out


def _is_power(x: int, p: int) -> bool:
    while x > 1 and x % p == 0:
        x //= p
    return x == 1


def subdifference_set(q: int, m: int, e: int, *, field: FiniteField | None = None,
                      cap: int | None = None, check_base: bool = True,
                      check_identity: bool = True, reference: str = "majority") -> SubdiffData:
    """Intersection counts c_s = |H0 cap s C0bar|, delta and S' for C0 = C_0^{(e, q^m)}.

    S' = {s : c_s - ref = delta} where delta is the nonzero value of c_s - ref.
    ``reference="identity"`` takes ref = c_0; the default takes ref to be the more
    frequent count, so S' is the rarer level set.  The two readings give
    complementary (S', delta) pairs, both satisfying delta * chi(S') = chi(H0).
    """
    p, _ = prime_power(q)
    n = (q**m - 1) // (q - 1)
    if n % e:
        raise ValueError(f"e={e} must divide (q^m-1)/(q-1)={n}")
    S = singer_difference_set(q, m, field=field, cap=cap)
    F = S.field
    base_report = None
    if check_base:
        C0 = ConnectionSet.union_of_classes(F, e, [0], check=False)
        base_report = verify_srg(C0, "spectral")
        if not base_report.passed:
            raise ValueError(f"Cay(F_{q}^{m}, C_0) is not strongly regular: {base_report.failure}")
    counts = np.bincount(S.H0 % e, minlength=e)
    levels, freq = np.unique(counts, return_counts=True)
    if len(levels) != 2:
        raise ValueError(f"intersection counts {counts.tolist()} are not two-valued")
    if reference == "identity":
        ref = int(counts[0])
    elif reference == "majority":
        # ties fall back to the identity coset
        ref = int(levels[np.argmax(freq)]) if freq[0] != freq[1] else int(counts[0])
    else:
        raise ValueError(f"unknown reference {reference!r}")
    diffs = counts - ref
    delta = int(diffs[diffs != 0][0])
    if not _is_power(abs(delta), p):
        raise AssertionError(f"delta={delta} is not a power of p={p}")
    S_prime = [int(s) for s in np.flatnonzero(diffs == delta)]
    dset = verify_difference_set(S_prime, e)
    if dset is None:
        raise AssertionError(f"S'={S_prime} is not a difference set in Z_{e}")
    data = SubdiffData(q, m, e, counts.tolist(), ref, delta, S_prime, dset[2], S,
                       base_report, reference=reference)
    if check_identity:
        subdifference_identity_check(data)
        data.identity_checked = True
    return data


def subdifference_identity_check(data: SubdiffData) -> None:
    """For every nontrivial chi of order dividing e on F_{q^m}:
    q * delta * sum_{s in S'} chi(s) = q * chi(H0) = G(chi), exactly."""
    F, e, q = data.singer.field, data.e, data.q
    for j in range(1, e):
        chi_H0 = CycInt(e, np.bincount((j * data.singer.H0) % e, minlength=e))
        chi_S = CycInt(e, np.bincount([(j * s) % e for s in data.S_prime], minlength=e))
        G = gauss_sum(F, MultChar(F, e, j))
        if chi_S * data.delta != chi_H0:
            raise AssertionError(f"delta * chi(S') != chi(H0) for j={j}")
        if chi_H0 * q != G:
            raise AssertionError(f"q * chi(H0) != G(chi) for j={j}")


@dataclass
class LiftSpec:
    q: int
    m: int
    e: int
    I: list
    field: FiniteField
    D: ConnectionSet
    subdiff: SubdiffData

    @property
    def expected_size(self) -> int:
        q, m = self.q, self.m
        return (q**m - 1) * len(self.I) * (q**m + 1) // self.e

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "e": self.e, "I": list(self.I),
                "size": len(self.D), "field": {"p": self.field.p, "f": self.field.f,
                                               "modulus": list(self.field.modulus)},
                "subdifference_set": self.subdiff.to_dict()}


def lift_connection_set(q: int, m: int, e: int, *, cap: int | None = None,
                        check_base: bool = True, check_identity: bool = True,
                        reference: str = "majority") -> LiftSpec:
    """D = union of C_i^{(e, q^{2m})} over i in I = S'."""
    p, f = prime_power(q)
    check_cap(q ** (2 * m), f"F_{q}^{2 * m}", cap)
    big = build_field(p, 2 * f * m, cap=cap)
    base = big.subfield(f * m)
    if p != 2 and ((q**m - 1) // e) % 2:
        raise ValueError("-C_0 != C_0 in the base field")
    sub = subdifference_set(q, m, e, field=base, cap=cap, check_base=check_base,
                            check_identity=check_identity, reference=reference)
    # omega^i lies in the coset i mod n' and in the class i mod e, so I = S'
    I = list(sub.S_prime)
    D = ConnectionSet.union_of_classes(big, e, I)
    lift = LiftSpec(q, m, e, I, big, D, sub)
    if len(D) != lift.expected_size:
        raise AssertionError("lifted connection set has the wrong size")
    return lift


@dataclass
class HadamardReport:
    passed: bool
    params: tuple | None
    expected: tuple

    def to_dict(self) -> dict:
        return {"passed": self.passed, "params": list(self.params) if self.params else None,
                "expected": list(self.expected)}


def group_difference_set(amb, elements) -> tuple[int, int, int] | None:
    """(v, k, lambda) if the subset is a difference set in the additive group."""
    els = np.unique(np.asarray(elements, dtype=np.int64))
    counts = difference_counts(amb, els)[1:]
    if len(counts) and (counts == counts[0]).all():
        return (len(counts) + 1, len(els), int(counts[0]))
    return None


def hadamard_check(lift: LiftSpec) -> HadamardReport:
    """D cup {0} should be a (2^{2m}, 2^{m-1}(2^m-1), 2^{m-1}(2^{m-1}-1)) difference set."""
    m = lift.m
    if lift.q != 2 or lift.e != 2**m - 1:
        raise ValueError("Hadamard check applies to q = 2 lifts from C_0 = F_2^*")
    expected = (2 ** (2 * m), 2 ** (m - 1) * (2**m - 1), 2 ** (m - 1) * (2 ** (m - 1) - 1))
    got = group_difference_set(lift.field, np.append(lift.D.elements(), 0))
    return HadamardReport(got == expected, got, expected)
