"""Strong regularity and association-scheme verification.

Two independent routes to SRG parameters: exact character sums (spectral) and
difference counting (combinatorial).  Schemes are checked by brute-force
intersection numbers and, for translation schemes, by the dual criterion on
character row vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from .characters import (
    ConnectionSet,
    EXPLICIT_SWEEP_CAP,
    ambient_size,
    ambient_sub,
    canonical_counts,
    charsum_counts,
    counts_to_cycint,
    eigenvalue_table,
    symmetric_check,
)
from .cyclotomic_integers import CycInt
from .finite_field import check_cap

COMBINATORIAL_CAP = 4096
BRUTE_SCHEME_CAP = 1024


# -- parameters -----------------------------------------------------------------

@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    @property
    def feasible(self) -> bool:
        """k(k - lambda - 1) = (v - k - 1) mu."""
        return self.k * (self.k - self.lam - 1) == (self.v - self.k - 1) * self.mu

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.v, self.k, self.lam, self.mu)


def latin_labelings(params: SrgParams | Sequence[int]) -> list[dict]:
    """Every (n, r, epsilon) with params = (n^2, r(n-eps), eps n + r^2 - 3 eps r, r^2 - eps r)."""
    v, k, lam, mu = params.as_tuple() if isinstance(params, SrgParams) else params
    n = math.isqrt(v)
    out = []
    if n * n == v:
        for eps, name in ((1, "LatinSquare"), (-1, "NegativeLatin")):
            if n - eps == 0 or k % (n - eps):
                continue
            r = k // (n - eps)
            if lam == eps * n + r * r - 3 * eps * r and mu == r * r - eps * r:
                out.append({"type": name, "n": n, "r": r, "epsilon": eps})
    return out


def classify_latin_type(params: SrgParams | Sequence[int]) -> dict:
    """LatinSquare / NegativeLatin / Conference / Other labeling of SRG parameters.

    Latin square type wins when both signs fit (e.g. (9, 4, 1, 2)); every
    fitting labeling is listed under ``labelings``.
    """
    v, k, lam, mu = params.as_tuple() if isinstance(params, SrgParams) else params
    labelings = latin_labelings((v, k, lam, mu))
    if labelings:
        out = dict(labelings[0])
        if len(labelings) > 1:
            out["labelings"] = labelings
        return out
    if (v - 1) % 4 == 0:
        t = (v - 1) // 4
        if (k, lam, mu) == (2 * t, t - 1, t):
            return {"type": "Conference", "t": t}
    return {"type": "Other"}


def latin_signs(classification: dict | None) -> set[int]:
    if not classification:
        return set()
    labs = classification.get("labelings") or (
        [classification] if "epsilon" in classification else [])
    return {lab["epsilon"] for lab in labs}


def srg_multiplicities(v: int, k: int, lam: int, mu: int) -> tuple[int, int] | None:
    """Multiplicities (m_r, m_s) of the restricted eigenvalues r > s, or None."""
    disc = (lam - mu) ** 2 + 4 * (k - mu)
    num = 2 * k + (v - 1) * (lam - mu)
    if num == 0:
        if (v - 1) % 2:
            return None
        return ((v - 1) // 2, (v - 1) // 2)
    root = math.isqrt(disc)
    if root * root != disc or root == 0 or num % root:
        return None
    twice_r = (v - 1) * root - num
    twice_s = (v - 1) * root + num
    if twice_r % (2 * root) or twice_s % (2 * root):
        return None
    m_r, m_s = twice_r // (2 * root), twice_s // (2 * root)
    return (m_r, m_s) if m_r >= 0 and m_s >= 0 else None


def _surd(total: int, disc: int) -> dict:
    """Eigenvalues (total +- sqrt(disc)) / 2 in a stable layout."""
    root = math.isqrt(disc)
    if root * root == disc:
        return {"r": (total + root) // 2, "s": (total - root) // 2}
    return {"r": f"({total} + sqrt({disc}))/2", "s": f"({total} - sqrt({disc}))/2"}


def _eigen_json(x: CycInt):
    n = x.as_rational_integer()
    return n if n is not None else x.to_dict()


# -- SRG reports ----------------------------------------------------------------

@dataclass
class SrgReport:
    passed: bool
    method: str
    v: int
    k: int
    params: SrgParams | None = None
    eigenvalues: dict | None = None
    multiplicities: tuple[int, int] | None = None
    classification: dict | None = None
    degenerate: bool = False
    integral: bool = True
    exact_values: list = dc_field(default_factory=list)
    failure: str | None = None
    witness: dict | None = None
    agreement: bool | None = None

    def summary(self) -> dict:
        """The method-independent part of the report."""
        return {
            "passed": self.passed,
            "params": list(self.params.as_tuple()) if self.params else None,
            "eigenvalues": self.eigenvalues,
            "multiplicities": list(self.multiplicities) if self.multiplicities else None,
            "classification": self.classification,
            "degenerate": self.degenerate,
        }

    def to_dict(self) -> dict:
        out = self.summary()
        out.update({"method": self.method, "v": self.v, "k": self.k,
                    "integral_eigenvalues": self.integral})
        if self.exact_values:
            out["exact_eigenvalues"] = self.exact_values
        if self.failure:
            out["failure"] = self.failure
        if self.witness:
            out["witness"] = self.witness
        if self.agreement is not None:
            out["methods_agree"] = self.agreement
        return out


def _finish(report: SrgReport, lam: int, mu: int) -> SrgReport:
    v, k = report.v, report.k
    params = SrgParams(v, k, lam, mu)
    report.params = params
    report.classification = classify_latin_type(params)
    report.degenerate = mu == 0 or mu == k
    if lam < 0 or mu < 0 or not params.feasible:
        report.passed = False
        report.failure = report.failure or "parameters violate k(k-lambda-1) = (v-k-1)mu"
    return report


def verify_srg_spectral(D: ConnectionSet) -> SrgReport:
    """SRG test from the exact restricted eigenvalues of Cay(G, D)."""
    v, k = ambient_size(D.ambient), len(D)
    report = SrgReport(False, "spectral", v, k)
    if not symmetric_check(D):
        report.failure = "asymmetric connection set"
        return report
    table = eigenvalue_table(D)
    keys = canonical_counts(table.counts)
    uniq, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    counted = np.bincount(inverse.ravel(), weights=table.weights, minlength=len(uniq)).astype(np.int64)
    values = [counts_to_cycint(table.counts[i]) for i in first]
    report.exact_values = [{"value": _eigen_json(x), "count": int(c)} for x, c in zip(values, counted)]
    if len(values) != 2:
        report.failure = f"{len(values)} distinct restricted eigenvalues"
        return report
    (a, ma), (b, mb) = sorted(zip(values, counted), key=lambda t: -t[0].to_complex().real)
    total = (a + b).as_rational_integer()
    prod = (a * b).as_rational_integer()
    if total is None or prod is None:
        report.failure = "restricted eigenvalues are not algebraic conjugates"
        return report
    lam, mu = k + total + prod, k + prod
    report.integral = a.as_rational_integer() is not None
    report.eigenvalues = _surd(total, total * total - 4 * prod)
    report.passed = True
    _finish(report, lam, mu)
    mult = srg_multiplicities(v, k, lam, mu)
    report.multiplicities = mult
    if mult is None or mult != (int(ma), int(mb)):
        report.passed = False
        report.failure = report.failure or f"multiplicities {mult} do not match counts {(int(ma), int(mb))}"
    elif not (k + a * mult[0] + b * mult[1]).is_zero():
        report.passed = False
        report.failure = "trace condition k + m_r r + m_s s = 0 fails"
    return report


def difference_counts(amb, elements: np.ndarray) -> np.ndarray:
    """counts[g] = #{(d1, d2) in D x D : d1 - d2 = g}, indexed by encoding."""
    size = ambient_size(amb)
    elements = np.asarray(elements, dtype=np.int64)
    out = np.zeros(size, dtype=np.int64)
    rows = max(1, 2**21 // max(1, len(elements)))
    for start in range(0, len(elements), rows):
        block = elements[start:start + rows]
        diff = ambient_sub(amb, block[:, None], elements[None, :])
        out += np.bincount(diff.ravel(), minlength=size)
    return out


def verify_srg_combinatorial(D: ConnectionSet) -> SrgReport:
    """SRG test by counting, for every g != 0, the pairs in D x D with difference g."""
    v, k = ambient_size(D.ambient), len(D)
    report = SrgReport(False, "combinatorial", v, k)
    check_cap(v, "combinatorial SRG check", COMBINATORIAL_CAP)
    if not symmetric_check(D):
        report.failure = "asymmetric connection set"
        return report
    if k == v - 1:
        # mu is undefined; spectrally there is a single restricted eigenvalue
        report.failure = "complete graph"
        return report
    els = D.elements()
    counts = difference_counts(D.ambient, els)
    inside = np.zeros(v, dtype=bool)
    inside[els] = True
    outside = ~inside
    outside[0] = False
    lam_vals, mu_vals = np.unique(counts[inside]), np.unique(counts[outside])
    for name, vals, mask in (("lambda", lam_vals, inside), ("mu", mu_vals, outside)):
        if len(vals) > 1:
            idx = np.flatnonzero(mask)
            g1 = int(idx[np.argmax(counts[idx] == vals[0])])
            g2 = int(idx[np.argmax(counts[idx] == vals[1])])
            report.failure = f"{name} not constant"
            report.witness = {"differences": [g1, g2], "counts": [int(vals[0]), int(vals[1])]}
            return report
    lam = int(lam_vals[0]) if len(lam_vals) else 0
    mu = int(mu_vals[0]) if len(mu_vals) else 0
    report.passed = True
    _finish(report, lam, mu)
    report.eigenvalues = _surd(lam - mu, (lam - mu) ** 2 + 4 * (k - mu))
    report.multiplicities = srg_multiplicities(v, k, lam, mu)
    report.integral = isinstance(report.eigenvalues["r"], int)
    if report.multiplicities is None:
        report.passed = False
        report.failure = report.failure or "no integral eigenvalue multiplicities"
    return report


def verify_srg(D: ConnectionSet, method: str = "auto") -> SrgReport:
    """Dispatch: ``auto`` runs both methods up to 4096 vertices, spectral above."""
    v = ambient_size(D.ambient)
    if method == "auto":
        method = "spectral" if v > COMBINATORIAL_CAP else "both"
    if method == "spectral":
        return verify_srg_spectral(D)
    if method == "combinatorial":
        return verify_srg_combinatorial(D)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    spec = verify_srg_spectral(D)
    comb = verify_srg_combinatorial(D)
    spec.method = "both"
    spec.agreement = spec.summary() == comb.summary()
    if not spec.agreement:
        spec.passed = False
        spec.failure = spec.failure or "spectral and combinatorial reports disagree"
    return spec


# -- association schemes --------------------------------------------------------

@dataclass
class SchemeReport:
    passed: bool
    method: str
    d: int
    class_sizes: list
    P: list | None = None
    multiplicities: list | None = None
    pijk: list | None = None
    amorphic: bool | None = None
    failures: list = dc_field(default_factory=list)
    extra: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"passed": self.passed, "method": self.method, "d": self.d,
               "class_sizes": list(self.class_sizes),
               "P": _p_json(self.P) if self.P is not None else None}
        if self.multiplicities is not None:
            out["multiplicities"] = list(self.multiplicities)
        if self.pijk is not None:
            out["pijk"] = self.pijk
        if self.amorphic is not None:
            out["amorphic"] = self.amorphic
        if self.failures:
            out["failures"] = list(self.failures)
        out.update(self.extra)
        return out


def _p_json(P):
    def cell(x):
        if isinstance(x, CycInt):
            return _eigen_json(x)
        if isinstance(x, (int, np.integer)):
            return int(x)
        if isinstance(x, float):
            return x
        return str(x)
    return [[cell(x) for x in row] for row in P]


def _check_partition(classes: Sequence[ConnectionSet]) -> tuple[object, np.ndarray]:
    if not classes:
        raise ValueError("empty partition")
    amb = classes[0].ambient
    size = ambient_size(amb)
    labels = np.full(size, -1, dtype=np.int64)
    labels[0] = 0
    for i, E in enumerate(classes, start=1):
        if E.ambient is not amb:
            raise ValueError("classes live in different groups")
        if not symmetric_check(E):
            raise ValueError(f"class {i} is not symmetric or contains 0")
        els = E.elements()
        if len(els) == 0:
            raise ValueError(f"class {i} is empty")
        if (labels[els] != -1).any():
            raise ValueError(f"class {i} overlaps an earlier class")
        labels[els] = i
    if (labels < 0).any():
        raise ValueError("classes do not cover the nonzero group elements")
    return amb, labels


def _eigenmatrix_from_intersections(p: np.ndarray) -> list | None:
    """Rows of P as common left eigenvectors of the intersection matrices.

    M_i[k, j] = p_ij^k; a row u of P with u_0 = 1 satisfies u M_i = u_i u.
    """
    d1 = p.shape[0]
    mats = [p[i].T for i in range(d1)]  # mats[i][k, j] = p[i, j, k]
    weights = [1.0 / math.sqrt(i + 2) for i in range(d1)]
    M = sum(w * m for w, m in zip(weights, mats))
    _, vecs = np.linalg.eig(M.T.astype(float))
    rows = []
    for c in range(vecs.shape[1]):
        u = vecs[:, c]
        if abs(u[0]) < 1e-12:
            return None
        rows.append(u / u[0])
    rounded = [np.rint(r.real).astype(np.int64) for r in rows]
    if all(np.allclose(r, ri, atol=1e-6) for r, ri in zip(rows, rounded)):
        exact = all(
            int(sum(int(u[k]) * int(p[i, j, k]) for k in range(d1))) == int(u[i]) * int(u[j])
            for u in rounded for i in range(d1) for j in range(d1))
        if exact:
            return [list(map(int, u)) for u in rounded]
    if _max_irrational_degree(p) <= 2:
        return _eigenmatrix_symbolic(p)
    # higher-degree irrationalities: sympy radicals are slow and unwieldy, keep
    # floating rows certified against u M_i = u_i u
    out = []
    for u in rows:
        u = np.real_if_close(u, tol=1e6)
        if np.iscomplexobj(u):
            return None
        for i in range(d1):
            if not np.allclose(u @ mats[i], u[i] * u, atol=1e-8 * (1 + np.abs(u).max())):
                return None
        out.append([float(round(x, 12)) for x in u])
    return out


def _max_irrational_degree(p: np.ndarray) -> int:
    """Largest degree of an irreducible factor of the eigenvalue polynomial of sum_i M_i/(i+2)."""
    import sympy

    d1 = p.shape[0]
    M = sympy.zeros(d1, d1)
    for i in range(d1):
        M += sympy.Rational(1, i + 2) * sympy.Matrix(p[i].T.tolist())
    x = sympy.Symbol("x")
    _, factors = sympy.factor_list(M.charpoly(x).as_expr(), x)
    return max(sympy.degree(f, x) for f, _ in factors)


def _eigenmatrix_symbolic(p: np.ndarray) -> list | None:
    import sympy

    d1 = p.shape[0]
    M = sympy.zeros(d1, d1)
    for i in range(d1):
        M += sympy.Rational(1, i + 2) * sympy.Matrix(p[i].T.tolist())
    rows = []
    for _, _, vecs in M.T.eigenvects():
        for u in vecs:
            if u[0] == 0:
                return None
            u = [sympy.nsimplify(sympy.simplify(x / u[0])) for x in u]
            for i in range(d1):
                for j in range(d1):
                    lhs = sum(u[k] * int(p[i, j, k]) for k in range(d1))
                    if sympy.simplify(lhs - u[i] * u[j]) != 0:
                        return None
            rows.append(u)
    return rows if len(rows) == d1 else None


def _canonical_rows(P) -> list:
    """Principal row first, remaining rows sorted by their numeric values."""
    def num(x):
        if isinstance(x, CycInt):
            return x.to_complex().real
        return complex(x).real
    # the principal row sums to |G|, every other row sums to 0
    h = max(range(len(P)), key=lambda i: sum(num(x) for x in P[i]))
    rest = [row for i, row in enumerate(P) if i != h]
    return [P[h]] + sorted(rest, key=lambda row: [round(num(x), 9) for x in row])


def eigenmatrices_equal(P1, P2, tol: float = 1e-9) -> bool:
    """Compare two eigenmatrices up to row order; exact when both are integral."""
    if P1 is None or P2 is None or len(P1) != len(P2):
        return False

    def num(x):
        if isinstance(x, CycInt):
            v = x.as_rational_integer()
            return v if v is not None else complex(x.to_complex())
        if isinstance(x, (int, np.integer)):
            return int(x)
        return complex(x)

    A = [[num(x) for x in row] for row in _canonical_rows(P1)]
    B = [[num(x) for x in row] for row in _canonical_rows(P2)]
    for ra, rb in zip(A, B):
        for x, y in zip(ra, rb):
            if isinstance(x, int) and isinstance(y, int):
                if x != y:
                    return False
            elif abs(complex(x) - complex(y)) > tol:
                return False
    return True


def verify_scheme_brute(classes: Sequence[ConnectionSet]) -> SchemeReport:
    """Translation-invariant count of p_ij^k, with y = 0 and every x."""
    amb, labels = _check_partition(classes)
    size = ambient_size(amb)
    check_cap(size, "brute-force scheme check", BRUTE_SCHEME_CAP)
    d = len(classes)
    d1 = d + 1
    sizes = [len(E) for E in classes]
    report = SchemeReport(False, "brute", d, sizes)
    g = np.arange(size, dtype=np.int64)
    xz = ambient_sub(amb, g[:, None], g[None, :])  # x - z
    idx = labels[xz] * d1 + labels[None, :]
    flat = idx + (g * d1 * d1)[:, None]
    T = np.bincount(flat.ravel(), minlength=size * d1 * d1).reshape(size, d1, d1)
    p = np.zeros((d1, d1, d1), dtype=np.int64)
    for k in range(d1):
        members = np.flatnonzero(labels == k)
        ref = T[members[0]]
        bad = np.flatnonzero((T[members] != ref).any(axis=(1, 2)))
        if len(bad):
            report.failures.append(
                f"class {k}: intersection counts differ between x={int(members[0])} "
                f"and x={int(members[bad[0]])}")
            return report
        p[:, :, k] = ref
    if not (p == p.transpose(1, 0, 2)).all():
        report.failures.append("intersection numbers are not commutative")
    k_sizes = np.array([1] + sizes)
    if not (p.sum(axis=1) == k_sizes[:, None]).all():
        report.failures.append("row sums of p_ij^k do not match class sizes")
    report.pijk = p.tolist()
    P = _eigenmatrix_from_intersections(p)
    if P is None:
        report.failures.append("could not diagonalize the intersection matrices")
    else:
        report.P = _canonical_rows(P)
    report.passed = not report.failures
    return report


def character_tables(classes: Sequence[ConnectionSet]) -> tuple[object, list[np.ndarray]]:
    """Z[zeta_p] count rows of phi_b(E_i) for every b != 0, one table per class."""
    amb = classes[0].ambient
    size = ambient_size(amb)
    check_cap(size, "explicit character sweep", EXPLICIT_SWEEP_CAP)
    b = np.arange(1, size, dtype=np.int64)
    return amb, [charsum_counts(amb, E.elements(), b) for E in classes]


def _dual_from_tables(amb, tables: list[np.ndarray], sizes: list[int],
                      method: str = "dual") -> SchemeReport:
    d = len(tables)
    size = ambient_size(amb)
    report = SchemeReport(False, method, d, list(sizes))
    keys = np.concatenate([canonical_counts(t) for t in tables], axis=1)
    uniq, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    if len(uniq) != d:
        report.failures.append(f"{len(uniq)} distinct character row vectors, expected {d}")
        report.extra["row_vectors"] = [[_eigen_json(counts_to_cycint(t[i])) for t in tables]
                                       for i in first[:16]]
        return report
    counts = np.bincount(inverse.ravel(), minlength=d)
    P = [[CycInt.integer(1)] + [CycInt.integer(s) for s in sizes]]
    mults = [1]
    for i, c in zip(first, counts):
        P.append([CycInt.integer(1)] + [counts_to_cycint(t[i]) for t in tables])
        mults.append(int(c))
    # orthogonality: sum_l m_l P_li conj(P_lj) = |G| k_i delta_ij
    k_all = [1] + list(sizes)
    for i in range(d + 1):
        for j in range(i, d + 1):
            total = sum((P[l][i] * P[l][j].conjugate()).scale(mults[l]) for l in range(d + 1))
            want = size * k_all[i] if i == j else 0
            if total != want:
                report.failures.append(f"orthogonality fails for columns {i}, {j}")
    order = sorted(range(1, d + 1), key=lambda l: [round(x.to_complex().real, 9) for x in P[l]])
    report.P = [P[0]] + [P[l] for l in order]
    report.multiplicities = [1] + [mults[l] for l in order]
    report.passed = not report.failures
    return report


def verify_translation_scheme_dual(classes: Sequence[ConnectionSet]) -> SchemeReport:
    """A partition of an elementary abelian group is a translation scheme iff the
    nonprincipal characters produce exactly d distinct vectors (phi_b(E_1..E_d))."""
    amb, _ = _check_partition(classes)
    amb, tables = character_tables(classes)
    return _dual_from_tables(amb, tables, [len(E) for E in classes])


def fuse_classes(classes: Sequence[ConnectionSet], blocks: Sequence[Sequence[int]]) -> list[ConnectionSet]:
    """Merge classes (0-based indices into ``classes``) block by block."""
    amb = classes[0].ambient
    seen = sorted(i for b in blocks for i in b)
    if seen != list(range(len(classes))):
        raise ValueError("blocks must partition the class indices")
    return [ConnectionSet(amb, np.concatenate([classes[i].elements() for i in b]))
            for b in blocks]


def set_partitions(items: list) -> list[list[list]]:
    if not items:
        return [[]]
    head, rest = items[0], items[1:]
    out = []
    for part in set_partitions(rest):
        out.append([[head]] + part)
        for i in range(len(part)):
            out.append(part[:i] + [[head] + part[i]] + part[i + 1:])
    return out


def amorphic_check(classes: Sequence[ConnectionSet], *, method: str = "auto",
                   fusion_limit: int = 4) -> SchemeReport:
    """Every class SRG with a common Latin-type sign; fusions verified when d <= fusion_limit."""
    amb, _ = _check_partition(classes)
    d = len(classes)
    amb, tables = character_tables(classes)
    sizes = [len(E) for E in classes]
    base = _dual_from_tables(amb, tables, sizes)
    report = SchemeReport(base.passed, "amorphic", d, sizes, P=base.P,
                          multiplicities=base.multiplicities, failures=list(base.failures))
    srgs = [verify_srg(E, method) for E in classes]
    report.extra["class_reports"] = [r.to_dict() for r in srgs]
    if d >= 3:
        if not all(r.passed for r in srgs):
            report.failures.append("some class is not strongly regular")
        else:
            common = set.intersection(*(latin_signs(r.classification) for r in srgs))
            if not common:
                report.failures.append("classes do not share a Latin square type sign")
            else:
                report.extra["latin_sign"] = max(common)
    fusions = []
    if d <= fusion_limit:
        for blocks in set_partitions(list(range(d))):
            if len(blocks) < 2:
                continue
            merged = [sum(tables[i] for i in b) for b in blocks]
            rep = _dual_from_tables(amb, merged, [sum(sizes[i] for i in b) for b in blocks])
            fusions.append({"blocks": [sorted(b) for b in blocks], "scheme": rep.passed})
            if not rep.passed:
                report.failures.append(f"fusion {blocks} is not a scheme")
        report.extra["fusions_checked"] = fusions
    report.amorphic = not report.failures
    report.passed = report.amorphic
    return report


def cross_validate_scheme(classes: Sequence[ConnectionSet]) -> dict:
    """Run both scheme verifiers and compare their first eigenmatrices."""
    brute = verify_scheme_brute(classes)
    dual = verify_translation_scheme_dual(classes)
    agree = brute.passed == dual.passed and (
        not brute.passed or eigenmatrices_equal(brute.P, dual.P))
    return {"brute": brute, "dual": dual, "agree": agree}
