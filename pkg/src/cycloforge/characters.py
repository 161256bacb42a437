"""Cyclotomic classes, characters, Gauss sums and exact character sums.

Every character value here is assembled from counts: elements are bucketed by
the trace value they feed into zeta_p (and, for multiplicative characters, by
their dlog residue), and the buckets become the coefficients of a CycInt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from itertools import product
from typing import Iterable, Union

import numpy as np

from .cyclotomic_integers import CycInt
from .finite_field import FieldElement, FiniteField, build_field, check_cap

EXPLICIT_SWEEP_CAP = 2**16
_CHUNK = 2**22


# -- ambient groups -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class VectorSpace:
    """(F_q^n, +) with characters x -> psi(B(b, x)) for a fixed bilinear form B.

    ``gram`` holds encodings of B(e_i, e_j); None means the dot product.
    A vector x is encoded as sum(enc(x_j) * q**j).
    """

    field: FiniteField
    n: int
    gram: np.ndarray | None = None

    @property
    def size(self) -> int:
        return self.field.q ** self.n

    @property
    def p(self) -> int:
        return self.field.p

    def coords(self, enc) -> np.ndarray:
        """Field encodings of the coordinates, shape (..., n)."""
        enc = np.asarray(enc, dtype=np.int64)
        return (enc[..., None] // self.field.q ** np.arange(self.n, dtype=np.int64)) % self.field.q

    def encode(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=np.int64)
        return coords @ (self.field.q ** np.arange(self.n, dtype=np.int64))

    def negate(self, enc) -> np.ndarray:
        return self.encode(self.field.neg_enc(self.coords(enc)))

    def gram_matrix(self) -> np.ndarray:
        if self.gram is None:
            return np.eye(self.n, dtype=np.int64)
        return np.asarray(self.gram, dtype=np.int64)


Ambient = Union[FiniteField, VectorSpace]


def ambient_size(amb: Ambient) -> int:
    return amb.q if isinstance(amb, FiniteField) else amb.size


def ambient_negate(amb: Ambient, enc) -> np.ndarray:
    if isinstance(amb, FiniteField):
        return amb.neg_enc(enc)
    return amb.negate(enc)


def ambient_digits(amb: Ambient, enc) -> np.ndarray:
    """Coordinates over F_p (base-p digits of the encoding)."""
    p = amb.p
    width = amb.f if isinstance(amb, FiniteField) else amb.n * amb.field.f
    enc = np.asarray(enc, dtype=np.int64)
    return (enc[..., None] // p ** np.arange(width, dtype=np.int64)) % p


def ambient_sub(amb: Ambient, a, b) -> np.ndarray:
    p = amb.p
    da, db = ambient_digits(amb, a), ambient_digits(amb, b)
    return ((da - db) % p) @ (p ** np.arange(da.shape[-1], dtype=np.int64))


def pairing_matrix(amb: Ambient) -> np.ndarray:
    """Matrix K over F_p with Tr(B(b, x)) = digits(b) K digits(x)^T mod p."""
    if isinstance(amb, FiniteField):
        return amb.trace_form
    F, n, f = amb.field, amb.n, amb.field.f
    gram = amb.gram_matrix()
    K = np.zeros((n * f, n * f), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            c = int(gram[i, j])
            if c == 0:
                continue
            for s in range(f):
                for t in range(f):
                    bst = F.exp[(s + t) % (F.q - 1)]
                    K[i * f + s, j * f + t] = F.trace_enc[int(F.mul_enc(c, bst))]
    return K


def fourier_counts(p: int, width: int, D_enc) -> np.ndarray:
    """counts[y, t] = #{x in D : sum_i y_i x_i = t} for every y in F_p^width.

    Exact p-ary Fourier transform: one butterfly per coordinate, with Z[zeta_p]
    values kept as length-p exponent counts (multiplying by zeta^s is a roll).
    """
    shape = (p,) * width
    A = np.zeros(shape + (p,), dtype=np.int64)
    A[..., 0] = np.bincount(np.asarray(D_enc, dtype=np.int64), minlength=p**width).reshape(shape)
    for ax in range(width):
        A = np.moveaxis(A, ax, 0)
        out = np.zeros_like(A)
        for j in range(p):
            for k in range(p):
                out[j] += np.roll(A[k], (j * k) % p, axis=-1)
        A = np.moveaxis(out, 0, ax)
    return A.reshape(p**width, p)


def charsum_counts(amb: Ambient, D_enc, b_enc) -> np.ndarray:
    """counts[i, t] = #{x in D : Tr(B(b_i, x)) = t}."""
    p = amb.p
    D_enc = np.asarray(D_enc, dtype=np.int64)
    b_enc = np.asarray(b_enc, dtype=np.int64)
    width = amb.f if isinstance(amb, FiniteField) else amb.n * amb.field.f
    if len(b_enc) * len(D_enc) > 8 * width * p ** (width + 2):
        # dense sweep: transform once, then read off y = b K
        table = fourier_counts(p, width, D_enc)
        lin = np.mod(ambient_digits(amb, b_enc) @ pairing_matrix(amb), p)
        return table[lin @ (p ** np.arange(width, dtype=np.int64))]
    K = pairing_matrix(amb).astype(np.float64)
    Dd = ambient_digits(amb, D_enc).astype(np.float64)
    out = np.zeros((len(b_enc), p), dtype=np.int64)
    rows = max(1, _CHUNK // max(1, len(D_enc)))
    for start in range(0, len(b_enc), rows):
        bd = ambient_digits(amb, b_enc[start:start + rows]).astype(np.float64)
        lin = np.mod(bd @ K, p)
        vals = np.mod(lin @ Dd.T, p).astype(np.int64)
        flat = vals + p * np.arange(len(vals), dtype=np.int64)[:, None]
        out[start:start + rows] = np.bincount(flat.ravel(), minlength=p * len(vals)).reshape(-1, p)
    return out


def counts_to_cycint(counts) -> CycInt:
    counts = np.asarray(counts, dtype=np.int64)
    return CycInt(len(counts), counts)


def canonical_counts(counts: np.ndarray) -> np.ndarray:
    """Normal form of rows of Z[zeta_p] coefficient vectors (subtract last column)."""
    counts = np.asarray(counts, dtype=np.int64)
    return counts - counts[..., -1:]


# -- cyclotomic classes and characters ----------------------------------------

class ClassSystem:
    """Cyclotomic classes C_i = gamma^i <gamma^e> of a field."""

    def __init__(self, field: FiniteField, e: int):
        if e <= 1 or (field.q - 1) % e:
            raise ValueError(f"e={e} must be > 1 and divide q-1={field.q - 1}")
        self.field, self.e = field, e
        self.class_size = (field.q - 1) // e

    def class_of(self, x: FieldElement) -> int:
        if x.log is None:
            raise ValueError("ZERO lies in no cyclotomic class")
        return x.log % self.e

    def class_logs(self, i: int) -> np.ndarray:
        return np.arange(i % self.e, self.field.q - 1, self.e, dtype=np.int64)

    def class_encodings(self, i: int) -> np.ndarray:
        return np.sort(self.field.exp[self.class_logs(i)])

    def classes(self) -> list[np.ndarray]:
        return [self.class_encodings(i) for i in range(self.e)]


def make_class_system(field: FiniteField, e: int) -> ClassSystem:
    return ClassSystem(field, e)


@dataclass(frozen=True, eq=False)
class MultChar:
    """chi(gamma^k) = zeta_e^(j*k)."""

    field: FiniteField
    e: int
    j: int

    def __post_init__(self):
        if self.e < 1 or (self.field.q - 1) % self.e:
            raise ValueError(f"order {self.e} does not divide q-1")
        object.__setattr__(self, "j", self.j % self.e)

    @property
    def is_trivial(self) -> bool:
        return self.j == 0

    @property
    def order(self) -> int:
        return self.e // math.gcd(self.e, self.j)

    def exponent(self, x: FieldElement) -> int:
        """chi(x) = zeta_e^exponent."""
        if x.log is None:
            raise ValueError("multiplicative character at ZERO")
        return (self.j * x.log) % self.e

    def __call__(self, x: FieldElement) -> CycInt:
        return CycInt.zeta(self.e, self.exponent(x))

    def power(self, a: int) -> "MultChar":
        return MultChar(self.field, self.e, self.j * a)


def lift_character(chi: MultChar, ambient: FiniteField) -> MultChar:
    """The lift alpha -> chi(Norm(alpha)) to a field containing chi.field as a subfield."""
    sub = chi.field
    if sub.parent is not ambient:
        raise ValueError("character field is not a subfield of the ambient field")
    # Norm(gamma^k) = gamma^(k * cofactor) = omega^k, so the lift has the same index j
    return MultChar(ambient, chi.e, chi.j)


# -- connection sets ------------------------------------------------------------

class ConnectionSet:
    """A subset D of an elementary abelian group, explicit or a union of classes.

    Symbolic sets live on a field and stand for the union of C_i^{(e,q)}, i in I.
    """

    def __init__(self, ambient: Ambient, elements=None, *, e: int | None = None,
                 classes: Iterable[int] | None = None, check: bool = True):
        self.ambient = ambient
        if elements is None:
            if not isinstance(ambient, FiniteField) or e is None or classes is None:
                raise ValueError("symbolic connection sets need a field, e and classes")
            ClassSystem(ambient, e)
            self.e = e
            self.classes = tuple(sorted({int(i) % e for i in classes}))
            self._elements = None
            self._expanded = None
        else:
            self.e = None
            self.classes = None
            self._expanded = None
            self._elements = np.unique(np.asarray(list(elements) if not isinstance(
                elements, np.ndarray) else elements, dtype=np.int64))
        if check and not symmetric_check(self):
            raise ValueError("connection set must satisfy 0 not in D and -D = D")

    @classmethod
    def union_of_classes(cls, field: FiniteField, e: int, classes, **kw) -> "ConnectionSet":
        return cls(field, e=e, classes=classes, **kw)

    @property
    def is_symbolic(self) -> bool:
        return self._elements is None

    def __len__(self) -> int:
        if self.is_symbolic:
            return len(self.classes) * (self.ambient.q - 1) // self.e
        return len(self._elements)

    def elements(self) -> np.ndarray:
        """Sorted encodings of the members."""
        if self._elements is not None:
            return self._elements
        if self._expanded is None:
            F = self.ambient
            logs = np.arange(F.q - 1, dtype=np.int64)
            mask = np.isin(logs % self.e, self.classes)
            self._expanded = np.sort(F.exp[logs[mask]])
        return self._expanded

    def describe(self) -> dict:
        amb = self.ambient
        if isinstance(amb, FiniteField):
            out = {"group": {"field": field_info(amb)}}
        else:
            out = {"group": {"field": field_info(amb.field), "n": amb.n}}
        out["size"] = len(self)
        if self.is_symbolic:
            out["e"], out["classes"] = self.e, list(self.classes)
        return out


def field_info(F: FiniteField) -> dict:
    return {"p": F.p, "f": F.f, "modulus": list(F.modulus)}


def symmetric_check(D: ConnectionSet) -> bool:
    amb = D.ambient
    if D.is_symbolic:
        F = amb
        if F.p == 2:
            return True
        half = (F.q - 1) // 2
        return {(i + half) % D.e for i in D.classes} == set(D.classes)
    els = D.elements()
    if len(els) and els[0] == 0:
        return False
    neg = np.sort(ambient_negate(amb, els))
    return np.array_equal(neg, els)


# -- character sums -----------------------------------------------------------

def _as_encodings(field: FiniteField, D) -> np.ndarray:
    if isinstance(D, ConnectionSet):
        return D.elements()
    if isinstance(D, np.ndarray):
        return D.astype(np.int64)
    return np.array([field.encode(x) if isinstance(x, FieldElement) else int(x) for x in D],
                    dtype=np.int64)


def additive_charsum(field: FiniteField, D, a: FieldElement) -> CycInt:
    """psi(aD) = sum over x in D of zeta_p^Tr(a x)."""
    enc = _as_encodings(field, D)
    prod = field.scale_enc(field.encode(a), enc)
    return CycInt(field.p, np.bincount(field.trace_enc[prod], minlength=field.p))


def gauss_exponents(field: FiniteField, e: int, j) -> np.ndarray:
    """Exponents in Z[zeta_{e p}] of the q-1 terms chi_j(x) psi(x), x != 0.

    ``j`` may be an array of character indices; the result then has one row per index.
    """
    p, N = field.p, e * field.p
    k = np.arange(field.q - 1, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    return (p * ((j[..., None] * k) % e) + e * field.trace_log) % N


def gauss_sum(field: FiniteField, chi: MultChar) -> CycInt:
    """G(chi) = sum_{x != 0} chi(x) psi(x) in Z[zeta_{e p}]."""
    if chi.field is not field:
        raise ValueError("character belongs to another field")
    N = chi.e * field.p
    return CycInt.from_exponents(N, gauss_exponents(field, chi.e, chi.j))


def _group_generators(n: int) -> list[int]:
    """A generating set of (Z/nZ)^*."""
    units = [u for u in range(1, n + 1) if math.gcd(u, n) == 1]
    units = [u % n if n > 1 else 0 for u in units]
    gens: list[int] = []
    span = {1 % n} if n > 1 else {0}
    for u in units:
        if u in span:
            continue
        gens.append(u)
        frontier = list(span)
        while frontier:
            nxt = []
            for s in frontier:
                for g in gens:
                    t = (s * g) % n
                    if t not in span:
                        span.add(t)
                        nxt.append(t)
            frontier = nxt
    return gens


@dataclass
class GaussReport:
    q: int
    e: int
    properties: dict = dc_field(default_factory=dict)
    modes: dict = dc_field(default_factory=dict)
    failures: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.properties.values())

    def to_dict(self) -> dict:
        return {"q": self.q, "e": self.e, "passed": self.passed,
                "properties": dict(self.properties), "modes": dict(self.modes),
                "failures": list(self.failures)}


def _rows_equal_as_values(N: int, lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Row-wise equality of sums of zeta_N^exponent, exact.

    Identical sorted exponent lists are equal in the group ring already; other
    rows are compared after reduction in Z[zeta_N].
    """
    same = (np.sort(lhs, axis=1) == np.sort(rhs, axis=1)).all(axis=1)
    for r in np.flatnonzero(~same):
        same[r] = CycInt.from_exponents(N, lhs[r]) == CycInt.from_exponents(N, rhs[r])
    return same


def gauss_property_check(field: FiniteField, e: int, *, exhaustive: bool | None = None,
                         budget: int = 1_000_000) -> GaussReport:
    """Check the five standard Gauss sum identities for every chi of order dividing e.

    (i)   G(chi) conj(G(chi)) = q for chi nontrivial
    (ii)  G(chi^p) = G(chi)
    (iii) G(chi^-1) = chi(-1) conj(G(chi))
    (iv)  G(trivial) = -1
    (v)   sigma_{a,b}(G(chi)) = chi^-a(b) G(chi^a), gcd(a,e) = gcd(b,p) = 1

    When the search space exceeds ``budget`` and ``exhaustive`` is not forced,
    (v) is checked on a generating set of (Z/e)^* x (Z/p)^* (the set of pairs
    for which (v) holds for all chi is closed under composition), and (i) on
    one character per order, conjugates following from (v) with b = 1.
    """
    p, q = field.p, field.q
    if e < 1 or (q - 1) % e:
        raise ValueError(f"e={e} does not divide q-1={q - 1}")
    N = e * p
    J = np.arange(e, dtype=np.int64)
    E = gauss_exponents(field, e, J)
    report = GaussReport(q, e)
    log_minus_one = 0 if p == 2 else (q - 1) // 2

    trivial = CycInt.from_exponents(N, E[0])
    report.properties["iv"] = trivial.as_rational_integer() == -1

    ok = _rows_equal_as_values(N, E[(J * p) % e], E)
    report.properties["ii"] = bool(ok.all())
    report.failures += [f"ii: j={j}" for j in np.flatnonzero(~ok)]

    rhs = (-E + (p * ((J * log_minus_one) % e))[:, None]) % N
    ok = _rows_equal_as_values(N, E[(-J) % e], rhs)
    report.properties["iii"] = bool(ok.all())
    report.failures += [f"iii: j={j}" for j in np.flatnonzero(~ok)]

    units_e = [a for a in range(1, e + 1) if math.gcd(a, e) == 1]
    if exhaustive is None:
        exhaustive = e * len(units_e) * (p - 1) * (q - 1) <= budget
    if exhaustive:
        pairs = list(product(units_e, range(1, p)))
        report.modes["v"] = "all pairs"
    else:
        pairs = [(a, 1) for a in _group_generators(e)] + [(1, b) for b in _group_generators(p)]
        report.modes["v"] = "generators of (Z/e)^* x (Z/p)^*"
    v_ok = True
    # unit t mod N with t = a mod e, t = b mod p (gcd(e, p) = 1 since e | q - 1)
    u_e = pow(p, -1, e) * p if e > 1 else 0
    u_p = pow(e, -1, p) * e
    for a, b in pairs:
        t = (a * u_e + b * u_p) % N
        lhs = (t * E) % N
        shift = (p * ((-a * J * int(field.log[b % p])) % e)) % N
        rhs = (E[(a * J) % e] + shift[:, None]) % N
        ok = _rows_equal_as_values(N, lhs, rhs)
        if not ok.all():
            v_ok = False
            report.failures += [f"v: a={a} b={b} j={j}" for j in np.flatnonzero(~ok)]
    report.properties["v"] = v_ok

    nontrivial = [int(j) for j in J[1:]]
    if exhaustive or len(nontrivial) * (q - 1) ** 2 <= budget:
        checked = nontrivial
        report.modes["i"] = "all characters"
    else:
        checked = sorted({e // (e // math.gcd(e, j)) for j in nontrivial})
        report.modes["i"] = "one character per order; conjugates via (v)"
    i_ok = True
    for j in checked:
        G = CycInt.from_exponents(N, E[j])
        if (G * G.conjugate()).as_rational_integer() != q:
            i_ok = False
            report.failures.append(f"i: j={j}")
    report.properties["i"] = i_ok and (exhaustive or v_ok or checked == nontrivial)
    return report


@dataclass
class DHReport:
    p: int
    f: int
    e: int
    s: int
    rows: list = dc_field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["pass"] for r in self.rows)

    def to_dict(self) -> dict:
        return {"p": self.p, "f": self.f, "e": self.e, "s": self.s,
                "passed": self.passed, "characters": self.rows}


def davenport_hasse_check(p: int, f: int, e: int, s: int, *, cap: int | None = None) -> DHReport:
    """Compare G_{fs}(chi') with (-1)^(s-1) G_f(chi)^s for every chi of order dividing e."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if (p**f - 1) % e:
        raise ValueError(f"e={e} does not divide p^f-1")
    check_cap(p ** (f * s), f"F_{p}^{f * s}", cap)
    big = build_field(p, f * s, cap=cap)
    small = big.subfield(f) if s > 1 else big
    report = DHReport(p, f, e, s)
    for j in range(e):
        chi = MultChar(small, e, j)
        lhs = gauss_sum(big, lift_character(chi, big) if s > 1 else chi)
        rhs = gauss_sum(small, chi) ** s * (-1) ** (s - 1)
        report.rows.append({"j": j, "lhs": lhs.to_dict(), "rhs": rhs.to_dict(),
                            "pass": lhs == rhs})
    return report


# -- eigenvalues of Cayley graphs ---------------------------------------------

@dataclass
class EigenvalueTable:
    """Restricted eigenvalues as Z[zeta_p] count vectors, one row per character class.

    ``weights[i]`` is the number of nontrivial characters the row stands for.
    """

    p: int
    counts: np.ndarray
    weights: np.ndarray

    def values(self) -> list[CycInt]:
        return [counts_to_cycint(c) for c in self.counts]


def class_trace_counts(field: FiniteField, e: int) -> np.ndarray:
    """M[i, t] = #{k : k = i mod e, Tr(gamma^k) = t}."""
    k = np.arange(field.q - 1, dtype=np.int64)
    flat = (k % e) * field.p + field.trace_log
    return np.bincount(flat, minlength=e * field.p).reshape(e, field.p)


def eigenvalue_table(D: ConnectionSet) -> EigenvalueTable:
    if not symmetric_check(D):
        raise ValueError("asymmetric connection set")
    amb = D.ambient
    if D.is_symbolic:
        M = class_trace_counts(amb, D.e)
        rows = np.array([M[[(i + a) % D.e for i in D.classes]].sum(axis=0)
                         for a in range(D.e)], dtype=np.int64).reshape(D.e, amb.p)
        weights = np.full(D.e, (amb.q - 1) // D.e, dtype=np.int64)
        return EigenvalueTable(amb.p, rows, weights)
    size = ambient_size(amb)
    check_cap(size, "explicit character sweep", EXPLICIT_SWEEP_CAP)
    b = np.arange(1, size, dtype=np.int64)
    return EigenvalueTable(amb.p, charsum_counts(amb, D.elements(), b),
                           np.ones(size - 1, dtype=np.int64))


def restricted_eigenvalues(D: ConnectionSet) -> list[CycInt]:
    """psi(gamma^a D), a < e, for symbolic D; psi_b(D) for every b != 0 otherwise."""
    return eigenvalue_table(D).values()


def eigenvalue_from_gauss_sums(D: ConnectionSet, a: int) -> CycInt:
    """e * psi(gamma^a D) rebuilt as sum_chi G(chi^-1) sum_{i in I} chi(gamma^(a+i))."""
    F, e = D.ambient, D.e
    if not D.is_symbolic:
        raise ValueError("needs a union of cyclotomic classes")
    total = CycInt(e * F.p)
    for j in range(e):
        g = gauss_sum(F, MultChar(F, e, -j))
        coeff = CycInt(e, np.bincount([(j * (a + i)) % e for i in D.classes], minlength=e))
        total = total + g * coeff
    return total
