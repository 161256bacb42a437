"""Quadratic forms on F_q^n (n even), their fibers, and fiber-union connection sets.

Forms live over F_q realized as the degree-f subfield of F_{q^2}, so that the
cyclotomic classes of F_q (powers of omega = gamma^(q+1)) and of F_{q^2}
(powers of gamma) carry compatible labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .characters import (
    ConnectionSet,
    VectorSpace,
    additive_charsum,
    charsum_counts,
    counts_to_cycint,
)
from .cyclotomic_integers import CycInt
from .finite_field import FiniteField, build_field, check_cap, prime_power
from .verify import SrgReport, latin_signs, verify_srg

ENUMERATION_CAP = 2**20


def quadratic_form_fields(q: int, *, cap: int | None = None) -> tuple[FiniteField, FiniteField]:
    """(F_q, F_{q^2}) with F_q built as the subfield of F_{q^2}."""
    p, f = prime_power(q)
    big = build_field(p, 2 * f, cap=cap)
    return big.subfield(f), big


def _dlog_order(F: FiniteField) -> list[int]:
    """Encodings ordered ZERO first, then gamma^0, gamma^1, ..."""
    return [0] + [int(x) for x in F.exp]


class QuadForm:
    """Q(x) = sum_{i <= j} a_ij x_i x_j with coefficients stored as encodings."""

    def __init__(self, field: FiniteField, n: int, coeffs: dict[tuple[int, int], int]):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.field, self.n = field, n
        self.coeffs = {}
        for (i, j), a in coeffs.items():
            i, j = min(i, j), max(i, j)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"index ({i}, {j}) out of range")
            a = int(a)
            if a:
                self.coeffs[(i, j)] = int(field.add_enc(self.coeffs.get((i, j), 0), a))
        self.coeffs = {k: v for k, v in sorted(self.coeffs.items()) if v}
        self._eps = None

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def m(self) -> int:
        return self.n // 2

    @cached_property
    def space(self) -> VectorSpace:
        """V with characters phi_b(x) = psi(B(b, x))."""
        return VectorSpace(self.field, self.n, self.gram_matrix())

    @property
    def size(self) -> int:
        return self.q ** self.n

    def evaluate(self, coords) -> np.ndarray:
        """Q on an array of coordinate vectors (encodings, shape (..., n))."""
        F = self.field
        X = np.asarray(coords, dtype=np.int64)
        acc = np.zeros(X.shape[:-1], dtype=np.int64)
        for (i, j), a in self.coeffs.items():
            term = F.mul_enc(X[..., i], X[..., j])
            acc = F.add_enc(acc, F.scale_enc(a, term))
        return acc

    def evaluate_enc(self, enc) -> np.ndarray:
        return self.evaluate(self.space.coords(enc))

    @cached_property
    def values(self) -> np.ndarray:
        """Q(x) for every vector, indexed by vector encoding."""
        check_cap(self.size, "enumeration of V", ENUMERATION_CAP)
        return self.evaluate_enc(np.arange(self.size, dtype=np.int64))

    def polar(self, x, y) -> np.ndarray:
        """B(x, y) = Q(x + y) - Q(x) - Q(y) on coordinate arrays."""
        F = self.field
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        s = F.add_enc(x, y)
        return F.sub_enc(F.sub_enc(self.evaluate(s), self.evaluate(x)), self.evaluate(y))

    def gram_matrix(self) -> np.ndarray:
        eye = np.eye(self.n, dtype=np.int64)
        return np.array([[int(self.polar(eye[i], eye[j])) for j in range(self.n)]
                         for i in range(self.n)], dtype=np.int64)

    def to_dict(self) -> dict:
        F = self.field
        return {"q": self.q, "n": self.n,
                "coefficients": [[i, j, int(F.log[a])] for (i, j), a in self.coeffs.items()],
                "coefficient_encoding": "dlog"}


def polar_form(Q: QuadForm, x, y) -> int:
    return int(Q.polar(x, y))


def find_irreducible_quadratic(field: FiniteField) -> tuple[int, int, int]:
    """First (a, b, c) in dlog order with ax^2 + bxy + cy^2 anisotropic."""
    order = _dlog_order(field)
    xs = np.repeat(np.arange(field.q), field.q)
    ys = np.tile(np.arange(field.q), field.q)
    nz = (xs != 0) | (ys != 0)
    xs, ys = xs[nz], ys[nz]
    xx, xy, yy = field.mul_enc(xs, xs), field.mul_enc(xs, ys), field.mul_enc(ys, ys)
    for a in order[1:]:
        ta = field.scale_enc(a, xx)
        for b in order:
            tab = field.add_enc(ta, field.scale_enc(b, xy))
            for c in order[1:]:
                val = field.add_enc(tab, field.scale_enc(c, yy))
                if (val != 0).all():
                    return (a, b, c)
    raise AssertionError("no anisotropic binary form found")


def canonical_hyperbolic(field: FiniteField, n: int) -> QuadForm:
    """x1 x2 + x3 x4 + ... + x_{n-1} x_n."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    return QuadForm(field, n, {(2 * i, 2 * i + 1): 1 for i in range(n // 2)})


def canonical_elliptic(field: FiniteField, n: int) -> QuadForm:
    """Hyperbolic head on the first n-2 variables plus an anisotropic binary tail."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    a, b, c = find_irreducible_quadratic(field)
    coeffs = {(2 * i, 2 * i + 1): 1 for i in range(n // 2 - 1)}
    coeffs.update({(n - 2, n - 2): a, (n - 2, n - 1): b, (n - 1, n - 1): c})
    return QuadForm(field, n, coeffs)


def canonical_form(field: FiniteField, n: int, kind: str) -> QuadForm:
    if kind in ("hyperbolic", "+", "+1"):
        return canonical_hyperbolic(field, n)
    if kind in ("elliptic", "-", "-1"):
        return canonical_elliptic(field, n)
    raise ValueError(f"unknown form type {kind!r}")


def matrix_rank(field: FiniteField, M) -> int:
    """Rank over F_q by Gaussian elimination on encodings."""
    A = [list(map(int, row)) for row in np.asarray(M, dtype=np.int64)]
    rows, cols = len(A), len(A[0]) if A else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = field.encode(field.inv(field.from_int(A[rank][c])))
        A[rank] = [int(v) for v in field.scale_enc(inv, A[rank])]
        for r in range(rows):
            if r != rank and A[r][c]:
                factor = A[r][c]
                A[r] = [int(v) for v in field.sub_enc(A[r], field.scale_enc(factor, A[rank]))]
        rank += 1
    return rank


def is_nonsingular(Q: QuadForm) -> bool:
    """Polar form nondegenerate (the right notion for even n)."""
    if Q.n % 2:
        raise ValueError("nonsingularity test implemented for even n only")
    return matrix_rank(Q.field, Q.gram_matrix()) == Q.n


def form_charsum(Q: QuadForm) -> CycInt:
    """sum over x in V of psi(Q(x))."""
    F = Q.field
    return CycInt(F.p, np.bincount(F.trace_enc[Q.values], minlength=F.p))


def type_epsilon(Q: QuadForm) -> int:
    if Q._eps is not None:
        return Q._eps
    if not is_nonsingular(Q):
        raise ValueError("form is singular")
    total = form_charsum(Q)
    qm = Q.q ** Q.m
    if total == qm:
        Q._eps = 1
    elif total == -qm:
        Q._eps = -1
    else:
        raise AssertionError(f"character sum {total} is neither +q^m nor -q^m")
    return Q._eps


# -- fibers -----------------------------------------------------------------------

@dataclass
class FiberSet:
    form: QuadForm
    label: object
    elements: np.ndarray

    def __len__(self) -> int:
        return len(self.elements)

    def connection_set(self, *, drop_zero: bool = True, check: bool = True) -> ConnectionSet:
        els = self.elements[self.elements != 0] if drop_zero else self.elements
        return ConnectionSet(self.form.space, els, check=check)


def fiber(Q: QuadForm, u: int) -> FiberSet:
    """D_u = {x : Q(x) = u}; u is a field encoding."""
    return FiberSet(Q, int(u), np.flatnonzero(Q.values == int(u)).astype(np.int64))


def fiber_union(Q: QuadForm, X: Iterable[int]) -> FiberSet:
    X = sorted({int(u) for u in X})
    return FiberSet(Q, tuple(X), np.flatnonzero(np.isin(Q.values, X)).astype(np.int64))


def class_encodings(F: FiniteField, e: int, classes: Iterable[int]) -> list[int]:
    """Encodings of the union of the cyclotomic classes C_i^{(e, q)}, i in classes."""
    logs = np.arange(F.q - 1)
    return sorted(int(x) for x in F.exp[np.isin(logs % e, [i % e for i in classes])])


def fiber_charsum_brute(Q: QuadForm, b, D: FiberSet | np.ndarray) -> CycInt:
    """phi_b(D) = sum over x in D of psi(B(b, x))."""
    els = D.elements if isinstance(D, FiberSet) else np.asarray(D, dtype=np.int64)
    b_enc = int(Q.space.encode(b)) if np.ndim(b) else int(b)
    return counts_to_cycint(charsum_counts(Q.space, els, [b_enc])[0])


def fiber_charsum_table(Q: QuadForm, D: FiberSet) -> np.ndarray:
    """Count rows of phi_b(D) for every b in V, indexed by encoding."""
    return charsum_counts(Q.space, D.elements, np.arange(Q.size, dtype=np.int64))


def fiber_charsum_closed(eps: int, q: int, m: int, e: int, i: int, s: int | None,
                         big: FiniteField | None = None) -> CycInt:
    """Closed form of phi_b(D_{C_i^{(e,q)}}) for b != 0, where Q(b) lies in C_s (s=None: Q(b)=0).

    Equal to -eps q^{m-1} (q-1)/e when Q(b) = 0, else
    -eps q^{m-1} psi'(gamma^{i+s} C_0^{(e, q^2)}) with psi' the canonical character of F_{q^2}.
    """
    if (q - 1) % e:
        raise ValueError(f"e={e} must divide q-1")
    scale = -eps * q ** (m - 1)
    if s is None:
        return CycInt.integer(scale * (q - 1) // e)
    if big is None:
        _, big = quadratic_form_fields(q)
    if big.q != q * q:
        raise ValueError("auxiliary field must have order q^2")
    C0 = big.exp[np.arange(0, big.q - 1, e)]
    return additive_charsum(big, C0, big.element(i + s)) * scale


def zero_fiber_charsum_closed(eps: int, q: int, m: int, qb_is_zero: bool) -> CycInt:
    """phi_b(D_0) for b != 0."""
    return CycInt.integer(eps * q ** (m - 1) * (q - 1) if qb_is_zero else -eps * q ** (m - 1))


def closed_vs_brute(Q: QuadForm, e: int, big: FiniteField | None = None) -> dict:
    """Compare the closed forms with phi_b(D_{C_i}) and phi_b(D_0) for every b != 0 and every i."""
    F = Q.field
    if big is None:
        big = F.parent
    eps, m, q = type_epsilon(Q), Q.m, Q.q
    qb = Q.values
    s_of = np.where(qb == 0, -1, F.log[qb] % e)
    mismatches, checked = [], 0
    fibers = [fiber_union(Q, class_encodings(F, e, [i])) for i in range(e)]
    fibers.append(fiber(Q, 0))
    tables = [fiber_charsum_table(Q, D) for D in fibers]
    closed_cache: dict = {}
    for b in range(1, Q.size):
        s = None if s_of[b] < 0 else int(s_of[b])
        for i in range(e + 1):
            if i < e:
                key = (i, s)
                if key not in closed_cache:
                    closed_cache[key] = fiber_charsum_closed(eps, q, m, e, i, s, big)
                want = closed_cache[key]
            else:
                want = zero_fiber_charsum_closed(eps, q, m, s is None)
            got = counts_to_cycint(tables[i][b])
            checked += 1
            if got != want:
                mismatches.append({"b": b, "class": i if i < e else "D0"})
    return {"checked": checked, "mismatches": mismatches[:10], "passed": not mismatches}


# -- fiber-union connection sets ---------------------------------------------------

@dataclass
class FiberUnionResult:
    D: ConnectionSet
    classes: list
    epsilon: int
    precondition: SrgReport
    predicted_eigenvalues: tuple[int, int]
    predicted_params: tuple
    report: SrgReport | None = None

    def to_dict(self) -> dict:
        out = {"classes": self.classes, "epsilon": self.epsilon, "size": len(self.D),
               "precondition": self.precondition.to_dict(),
               "predicted_eigenvalues": list(self.predicted_eigenvalues),
               "predicted_params": list(self.predicted_params)}
        if self.report is not None:
            out["srg"] = self.report.to_dict()
        return out


def _require_negative_latin(big: FiniteField, e: int, classes) -> SrgReport:
    rep = verify_srg(ConnectionSet.union_of_classes(big, e, classes), "spectral")
    if not rep.passed or -1 not in latin_signs(rep.classification):
        raise ValueError(f"classes {list(classes)} of order {e} in F_{big.q} do not give a "
                         f"negative Latin square type SRG")
    return rep


def fiber_union_connection_set(Q: QuadForm, e: int, classes: Iterable[int], *,
                               verify: str | None = None) -> FiberUnionResult:
    """D_E for E = union of C_i^{(e,q)}, i in classes, after checking that the
    matching classes of F_{q^2} form a negative Latin square type SRG."""
    F = Q.field
    big = F.parent
    if big is None or big.q != F.q ** 2:
        raise ValueError("form must be defined over the subfield F_q of F_{q^2}")
    if e <= 1 or (F.q - 1) % e:
        raise ValueError(f"e={e} must be > 1 and divide q-1")
    classes = sorted({int(i) % e for i in classes})
    pre = _require_negative_latin(big, e, classes)
    if not is_nonsingular(Q):
        raise ValueError("form is singular")
    eps, q, m = type_epsilon(Q), Q.q, Q.m
    D = fiber_union(Q, class_encodings(F, e, classes)).connection_set()
    r = len(classes) * (q - 1) // e
    lead = -eps * q ** (m - 1)
    predicted = (lead * r, lead * (r - q))
    params = latin_params(q**m, q ** (m - 1) * r, eps)
    result = FiberUnionResult(D, classes, eps, pre, predicted, params)
    if verify:
        result.report = verify_srg(D, verify)
    return result


def latin_params(n: int, r: int, eps: int) -> tuple[int, int, int, int]:
    """(n^2, r(n - eps), eps n + r^2 - 3 eps r, r^2 - eps r)."""
    return (n * n, r * (n - eps), eps * n + r * r - 3 * eps * r, r * r - eps * r)


def fiber_variant_connection_sets(Q: QuadForm, e: int, classes: Iterable[int]) -> dict:
    """D_E with D_0 minus 0 added, and D_0 minus 0 alone."""
    base = fiber_union_connection_set(Q, e, classes)
    complement = sorted(set(range(e)) - set(base.classes))
    if complement:
        _require_negative_latin(Q.field.parent, e, complement)
    zero = fiber(Q, 0).connection_set()
    with_zero = ConnectionSet(Q.space, np.concatenate([base.D.elements(), zero.elements()]))
    return {"D_E": base.D, "D_E_plus_D0": with_zero, "D0": zero}


def fiber_partition(Q: QuadForm, e: int, blocks: Iterable[Iterable[int]] | None = None) -> list[ConnectionSet]:
    """D_0 minus 0 followed by D_{union of C_l, l in block} for each block (default: singletons)."""
    F = Q.field
    if (F.q - 1) % e:
        raise ValueError(f"e={e} must divide q-1")
    blocks = [[i] for i in range(e)] if blocks is None else [sorted(b) for b in blocks]
    parts = [fiber(Q, 0).connection_set()]
    parts += [fiber_union(Q, class_encodings(F, e, b)).connection_set() for b in blocks]
    return parts
