"""Finite fields F_{p^f} with discrete-log representation.

Elements are stored two ways.  The scalar API works with :class:`FieldElement`
objects (ZERO or gamma^k).  Bulk routines work on numpy arrays of *encodings*:
the integer sum(c_i * p**i) of the coordinate vector of an element in the
polynomial basis 1, gamma, ..., gamma^(f-1).  ``field.exp`` maps dlog -> encoding
and ``field.log`` maps encoding -> dlog (with -1 for zero).
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from sympy import factorint, isprime

DEFAULT_CAP = 2**20
CAP_ENV = "CYCLOFORGE_CAP"


class CapExceededError(ValueError):
    """Raised when a construction would exceed the configured size cap."""


def size_cap() -> int:
    value = os.environ.get(CAP_ENV)
    return int(value) if value else DEFAULT_CAP


def check_cap(size: int, what: str, cap: int | None = None) -> None:
    cap = size_cap() if cap is None else cap
    if size > cap:
        raise CapExceededError(f"{what} has size {size}, above the cap {cap}")


def prime_power(q: int) -> tuple[int, int]:
    """Split a prime power q into (p, f)."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    fac = factorint(q)
    if len(fac) != 1:
        raise ValueError(f"{q} is not a prime power")
    ((p, f),) = fac.items()
    return int(p), int(f)


# -- polynomial helpers over F_p (coefficient lists, low degree first) -------

def _poly_mulmod(a: list[int], b: list[int], g: list[int], p: int) -> list[int]:
    f = len(g) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for k in range(len(prod) - 1, f - 1, -1):
        c = prod[k]
        if c:
            for i in range(f + 1):
                prod[k - f + i] = (prod[k - f + i] - c * g[i]) % p
    out = prod[:f]
    return out + [0] * (f - len(out))


def _x_power_mod(e: int, g: list[int], p: int) -> list[int]:
    f = len(g) - 1
    result = [1] + [0] * (f - 1)
    base = [0, 1] + [0] * (f - 2) if f >= 2 else [(-g[0]) % p]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, g, p)
        base = _poly_mulmod(base, base, g, p)
        e >>= 1
    return result


def is_primitive_polynomial(g: list[int], p: int) -> bool:
    """True iff the monic polynomial g (low degree first) has a root of order p^f - 1."""
    f = len(g) - 1
    if g[-1] != 1 or g[0] % p == 0:
        return False
    order = p**f - 1
    one = [1] + [0] * (f - 1)
    if _x_power_mod(order, g, p) != one:
        return False
    return all(_x_power_mod(order // r, g, p) != one for r in factorint(order))


def _primitive_roots(p: int) -> set[int]:
    if p == 2:
        return {1}
    factors = list(factorint(p - 1))
    return {g for g in range(2, p) if all(pow(g, (p - 1) // r, p) != 1 for r in factors)}


def smallest_primitive_root(p: int) -> int:
    return min(_primitive_roots(p))


def default_modulus(p: int, f: int) -> tuple[int, ...]:
    """Lexicographically smallest monic primitive polynomial of degree f over F_p.

    Coefficients (c_0, ..., c_{f-1}) are compared low degree first.  For f = 1
    the modulus is x - g with g the smallest primitive root mod p.
    """
    if f == 1:
        return ((-smallest_primitive_root(p)) % p, 1)
    # (-1)^f c_0 is the norm of the root, so it must generate F_p^*
    roots = _primitive_roots(p)
    for low in itertools.product(range(p), repeat=f):
        if ((-1) ** f * low[0]) % p not in roots:
            continue
        g = list(low) + [1]
        if is_primitive_polynomial(g, p):
            return tuple(g)
    raise AssertionError("no primitive polynomial found")


# -- field elements -----------------------------------------------------------

class FieldElement:
    """Either ZERO (``log is None``) or gamma**log."""

    __slots__ = ("field", "log")

    def __init__(self, field: "FiniteField", log: int | None):
        self.field = field
        self.log = None if log is None else int(log) % (field.q - 1)

    @property
    def is_zero(self) -> bool:
        return self.log is None

    def __int__(self) -> int:
        return self.field.encode(self)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.field is other.field and self.log == other.log

    def __hash__(self):
        return hash((id(self.field), self.log))

    def __repr__(self):
        return "ZERO" if self.log is None else f"g^{self.log}"

    def __add__(self, other):
        return self.field.add(self, other)

    def __sub__(self, other):
        return self.field.sub(self, other)

    def __neg__(self):
        return self.field.neg(self)

    def __mul__(self, other):
        return self.field.mul(self, other)

    def __truediv__(self, other):
        return self.field.mul(self, self.field.inv(other))

    def __pow__(self, n: int):
        return self.field.pow(self, n)


@dataclass(frozen=True)
class SubfieldHandle:
    d: int
    cofactor: int


class FiniteField:
    """The field F_{p^f} built from a monic primitive modulus.

    ``parent`` and ``cofactor`` are set when the field was realized as a subfield
    of a larger field: its generator is then parent.gen ** cofactor.
    """

    def __init__(self, p: int, f: int, modulus=None, *, cap: int | None = None,
                 parent: "FiniteField | None" = None, cofactor: int = 1):
        if not isprime(p):
            raise ValueError(f"{p} is not prime")
        if f < 1:
            raise ValueError("extension degree must be >= 1")
        check_cap(p**f, f"F_{p}^{f}", cap)
        self.p, self.f, self.q = p, f, p**f
        if modulus is None:
            modulus = default_modulus(p, f)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != f + 1 or not is_primitive_polynomial(list(modulus), p):
            raise ValueError(f"{modulus} is not a monic primitive polynomial of degree {f}")
        self.modulus = modulus
        self.parent = parent
        self.cofactor = cofactor
        self._pow_p = p ** np.arange(f, dtype=np.int64)
        self._build_tables()

    def _build_tables(self) -> None:
        p, f, q = self.p, self.f, self.q
        comp = np.zeros((f, f), dtype=np.int64)
        for i in range(f - 1):
            comp[i + 1, i] = 1
        comp[:, f - 1] = [(-c) % p for c in self.modulus[:f]]
        # rows of `vecs` are coordinate vectors of gamma^0, gamma^1, ...
        vecs = np.zeros((q - 1, f), dtype=np.int64)
        vecs[0, 0] = 1
        filled, step = 1, comp.copy()
        while filled < q - 1:
            take = min(filled, q - 1 - filled)
            vecs[filled:filled + take] = (vecs[:take] @ step.T) % p
            filled += take
            step = (step @ step) % p
        self.exp = vecs @ self._pow_p
        log = np.full(q, -1, dtype=np.int64)
        log[self.exp] = np.arange(q - 1, dtype=np.int64)
        if (log[1:] < 0).any() or log[0] != -1:
            raise AssertionError("antilog table is not a bijection onto F_q^*")
        self.log = log
        one_plus = vecs.copy()
        one_plus[:, 0] = (one_plus[:, 0] + 1) % p
        self.zech = log[one_plus @ self._pow_p]

    def __repr__(self):
        return f"FiniteField(p={self.p}, f={self.f}, modulus={self.modulus})"

    # -- scalar API -----------------------------------------------------------

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, None)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def gen(self) -> FieldElement:
        return FieldElement(self, 1 % (self.q - 1))

    def element(self, k: int | None) -> FieldElement:
        return FieldElement(self, k)

    def from_int(self, enc: int) -> FieldElement:
        k = int(self.log[enc])
        return FieldElement(self, None if k < 0 else k)

    def encode(self, x: FieldElement) -> int:
        return 0 if x.log is None else int(self.exp[x.log])

    def elements(self) -> list[FieldElement]:
        return [self.zero] + [FieldElement(self, k) for k in range(self.q - 1)]

    def _check(self, *xs: FieldElement) -> None:
        for x in xs:
            if x.field is not self:
                raise ValueError("element belongs to a different field")

    def add(self, x: FieldElement, y: FieldElement) -> FieldElement:
        self._check(x, y)
        if x.log is None:
            return y
        if y.log is None:
            return x
        z = int(self.zech[(y.log - x.log) % (self.q - 1)])
        return FieldElement(self, None if z < 0 else x.log + z)

    def neg(self, x: FieldElement) -> FieldElement:
        self._check(x)
        if x.log is None or self.p == 2:
            return x
        return FieldElement(self, x.log + (self.q - 1) // 2)

    def sub(self, x: FieldElement, y: FieldElement) -> FieldElement:
        return self.add(x, self.neg(y))

    def mul(self, x: FieldElement, y: FieldElement) -> FieldElement:
        self._check(x, y)
        if x.log is None or y.log is None:
            return self.zero
        return FieldElement(self, x.log + y.log)

    def inv(self, x: FieldElement) -> FieldElement:
        self._check(x)
        if x.log is None:
            raise ZeroDivisionError("inverse of ZERO")
        return FieldElement(self, -x.log)

    def pow(self, x: FieldElement, n: int) -> FieldElement:
        self._check(x)
        if x.log is None:
            if n < 0:
                raise ZeroDivisionError("negative power of ZERO")
            return self.one if n == 0 else x
        return FieldElement(self, x.log * n)

    def frobenius(self, x: FieldElement, i: int = 1) -> FieldElement:
        return self.pow(x, self.p**i)

    def _check_divisor(self, d: int, within: int | None = None) -> int:
        top = self.f if within is None else within
        if top < 1 or self.f % top:
            raise ValueError(f"{top} does not divide {self.f}")
        if d < 1 or top % d:
            raise ValueError(f"{d} does not divide {top}")
        return top

    def rel_trace(self, x: FieldElement, d: int, within: int | None = None) -> FieldElement:
        """Trace from the subfield of degree ``within`` (default f) down to degree d."""
        top = self._check_divisor(d, within)
        total = self.zero
        for i in range(top // d):
            total = self.add(total, self.pow(x, self.p ** (d * i)))
        return total

    def rel_norm(self, x: FieldElement, d: int) -> FieldElement:
        self._check_divisor(d)
        if x.log is None:
            return x
        return self.pow(x, (self.q - 1) // (self.p**d - 1))

    def subfield_handle(self, d: int) -> SubfieldHandle:
        self._check_divisor(d)
        return SubfieldHandle(d, (self.q - 1) // (self.p**d - 1))

    def subfield_elements(self, d: int) -> set[FieldElement]:
        c = self.subfield_handle(d).cofactor
        return {self.zero} | {FieldElement(self, k * c) for k in range(self.p**d - 1)}

    def minimal_polynomial(self, x: FieldElement) -> tuple[int, ...]:
        """Minimal polynomial of x over F_p, low degree first."""
        conj = []
        y = x
        while y not in conj:
            conj.append(y)
            y = self.frobenius(y)
        poly = [self.one]
        for r in conj:
            nr = self.neg(r)
            shifted = [self.zero] + poly
            scaled = [self.mul(c, nr) for c in poly] + [self.zero]
            poly = [self.add(a, b) for a, b in zip(shifted, scaled)]
        coeffs = [self.encode(c) for c in poly]
        if any(c >= self.p for c in coeffs):
            raise AssertionError("minimal polynomial not over the prime field")
        return tuple(coeffs)

    def subfield(self, d: int) -> "FiniteField":
        """F_{p^d} realized inside this field with generator gen ** cofactor."""
        handle = self.subfield_handle(d)
        omega = FieldElement(self, handle.cofactor)
        return FiniteField(self.p, d, self.minimal_polynomial(omega), parent=self,
                           cofactor=handle.cofactor)

    def embed(self, x: FieldElement) -> FieldElement:
        """Image of a subfield element in the parent field."""
        if self.parent is None:
            raise ValueError("field was not built as a subfield")
        self._check(x)
        return FieldElement(self.parent, None if x.log is None else x.log * self.cofactor)

    # -- vectorized API on encodings -------------------------------------------

    def digits(self, enc) -> np.ndarray:
        enc = np.asarray(enc, dtype=np.int64)
        return (enc[..., None] // self._pow_p) % self.p

    def from_digits(self, digs) -> np.ndarray:
        return (np.asarray(digs, dtype=np.int64) % self.p) @ self._pow_p

    def add_enc(self, a, b) -> np.ndarray:
        if self.p == 2:
            return np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return self.from_digits(self.digits(a) + self.digits(b))

    def neg_enc(self, a) -> np.ndarray:
        if self.p == 2:
            return np.asarray(a, dtype=np.int64)
        return self.from_digits(-self.digits(a))

    def sub_enc(self, a, b) -> np.ndarray:
        return self.add_enc(a, self.neg_enc(b))

    def mul_enc(self, a, b) -> np.ndarray:
        la = self.log[np.asarray(a, dtype=np.int64)]
        lb = self.log[np.asarray(b, dtype=np.int64)]
        out = self.exp[(la + lb) % (self.q - 1)]
        return np.where((la < 0) | (lb < 0), 0, out)

    def scale_enc(self, c: int, a) -> np.ndarray:
        """Multiply an array of encodings by the fixed element with encoding c."""
        return self.mul_enc(np.full(np.shape(a), c, dtype=np.int64), a)

    @cached_property
    def basis_traces(self) -> np.ndarray:
        """Tr_{q/p}(gamma^i) for i < f, as integers mod p."""
        return np.array([self.encode(self.rel_trace(FieldElement(self, i), 1))
                         for i in range(self.f)], dtype=np.int64)

    @cached_property
    def trace_enc(self) -> np.ndarray:
        """Absolute trace of every element, indexed by encoding."""
        return (self.digits(np.arange(self.q)) @ self.basis_traces) % self.p

    @cached_property
    def trace_log(self) -> np.ndarray:
        """Absolute trace of gamma^k for k = 0 .. q-2."""
        return self.trace_enc[self.exp]

    @cached_property
    def trace_form(self) -> np.ndarray:
        """Gram matrix (Tr(b_s b_t)) of the trace pairing on the polynomial basis."""
        f = self.f
        return np.array([[self.encode(self.rel_trace(FieldElement(self, s + t), 1))
                          for t in range(f)] for s in range(f)], dtype=np.int64)

    def rel_trace_logs(self, logs, d: int, within: int | None = None) -> np.ndarray:
        """Vectorized rel_trace on an array of dlogs; returns encodings."""
        top = self._check_divisor(d, within)
        logs = np.asarray(logs, dtype=np.int64)
        acc = np.zeros(logs.shape + (self.f,), dtype=np.int64)
        for i in range(top // d):
            acc += self.digits(self.exp[(logs * self.p ** (d * i)) % (self.q - 1)])
        return self.from_digits(acc)


def build_field(p: int, f: int = 1, *, cap: int | None = None) -> FiniteField:
    """Build F_{p^f} with the default (lexicographically smallest) primitive modulus."""
    return FiniteField(p, f, cap=cap)
