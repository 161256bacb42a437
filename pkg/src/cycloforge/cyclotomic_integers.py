"""Exact arithmetic in Z[zeta_N].

A :class:`CycInt` is a group-ring element: a length-N integer vector whose k-th
entry is the coefficient of zeta_N^k.  Arithmetic happens in the group ring and
is only reduced when values are compared or extracted.

Two reductions are provided.  ``reduce_canonical`` is the remainder modulo the
cyclotomic polynomial Phi_N (coefficients on exponents < phi(N)); it is the
serialization format.  Equality and hashing use a faster normal form on the
Zumbroich basis, obtained by eliminating one slot in every fibre of the
relations sum_t zeta^(k + t*N/r) = 0, one prime r | N at a time.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from sympy import factorint, totient

_FFT_SAFE = 2**36
_DENSE_MUL_LIMIT = 256
_INT64_SAFE = 2**62


@lru_cache(maxsize=None)
def cyclotomic_polynomial(N: int) -> tuple[int, ...]:
    """Phi_N as integer coefficients, low degree first.

    Computed by exact division of x^N - 1 by Phi_d for every proper divisor d.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    num = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            num = _poly_divexact(num, cyclotomic_polynomial(d))
    return tuple(num)


def _poly_divexact(a: list[int], b: tuple[int, ...]) -> list[int]:
    a = list(a)
    db = len(b) - 1
    out = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i] // b[-1]
        if c * b[-1] != a[i]:
            raise ArithmeticError("inexact polynomial division")
        out[i - db] = c
        if c:
            for j, bj in enumerate(b):
                a[i - db + j] -= c * bj
    if any(a[:db]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def _crt_layout(N: int):
    """Prime-power factors of N and the index permutation into CRT coordinates."""
    parts = sorted(factorint(N).items())
    sizes = [r**a for r, a in parts]
    perm = np.zeros(sizes, dtype=np.int64) if parts else np.zeros(1, dtype=np.int64)
    for axis, size in enumerate(sizes):
        idem = (N // size) * pow(N // size, -1, size) % N
        shape = [1] * len(sizes)
        shape[axis] = size
        perm = perm + (np.arange(size, dtype=np.int64) * idem).reshape(shape)
    return parts, sizes, (perm % N).ravel()


def _zumbroich(coeffs: np.ndarray, N: int) -> np.ndarray:
    parts, sizes, perm = _crt_layout(N)
    if not parts:
        return coeffs.copy()
    x = coeffs[perm].reshape(sizes)
    for axis, (r, a) in enumerate(parts):
        x = np.moveaxis(x, axis, -1)
        block = r ** (a - 1)
        y = x.reshape(x.shape[:-1] + (r, block)).copy()
        if r == 2:
            y[..., 0, :] -= y[..., 1, :]
            y[..., 1, :] = 0
        else:
            y[..., 1:, :] -= y[..., 0:1, :]
            y[..., 0, :] = 0
        x = np.moveaxis(y.reshape(x.shape), -1, axis)
    return x.ravel()


@lru_cache(maxsize=None)
def _one_normal_form(N: int) -> tuple[np.ndarray, int]:
    c = np.zeros(N, dtype=np.int64)
    c[0] = 1
    one = _zumbroich(c, N)
    return one, int(np.flatnonzero(one)[0])


def _abs_sum(c: np.ndarray) -> int:
    return int(np.abs(c).sum()) if c.dtype != object else sum(abs(int(v)) for v in c)


class CycInt:
    """An element of Z[zeta_N] held as exponent-indexed integer coefficients."""

    __slots__ = ("N", "coeffs", "_key")

    def __init__(self, N: int, coeffs=None):
        if N < 1:
            raise ValueError("N must be >= 1")
        self.N = int(N)
        if coeffs is None:
            arr = np.zeros(self.N, dtype=np.int64)
        else:
            arr = np.asarray(coeffs)
            if arr.dtype != object:
                arr = arr.astype(np.int64)
            if arr.shape != (self.N,):
                raise ValueError(f"expected {self.N} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr
        self._key = None

    # -- constructors ---------------------------------------------------------

    @classmethod
    def integer(cls, n: int, N: int = 1) -> "CycInt":
        c = np.zeros(N, dtype=np.int64)
        c[0] = n
        return cls(N, c)

    @classmethod
    def zeta(cls, N: int, k: int = 1) -> "CycInt":
        c = np.zeros(N, dtype=np.int64)
        c[k % N] = 1
        return cls(N, c)

    @classmethod
    def from_exponents(cls, N: int, exponents, weights=None) -> "CycInt":
        """Sum of zeta_N^e over the given exponents (optionally weighted)."""
        exponents = np.asarray(exponents, dtype=np.int64) % N
        if weights is None:
            return cls(N, np.bincount(exponents, minlength=N))
        c = np.zeros(N, dtype=np.int64)
        np.add.at(c, exponents, np.asarray(weights, dtype=np.int64))
        return cls(N, c)

    # -- lifting --------------------------------------------------------------

    def lift(self, M: int) -> "CycInt":
        """Same value viewed in Z[zeta_M] for a multiple M of N."""
        if M % self.N:
            raise ValueError(f"{M} is not a multiple of {self.N}")
        if M == self.N:
            return self
        c = np.zeros(M, dtype=self.coeffs.dtype)
        c[np.arange(self.N) * (M // self.N)] = self.coeffs
        return CycInt(M, c)

    def _common(self, other) -> tuple["CycInt", "CycInt"]:
        if isinstance(other, (int, np.integer)):
            return self, CycInt.integer(int(other), self.N)
        if not isinstance(other, CycInt):
            raise TypeError(f"cannot combine CycInt with {type(other).__name__}")
        M = math.lcm(self.N, other.N)
        return self.lift(M), other.lift(M)

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        if a.coeffs.dtype != object and b.coeffs.dtype != object and \
                _abs_sum(a.coeffs) + _abs_sum(b.coeffs) >= _INT64_SAFE:
            return CycInt(a.N, a.coeffs.astype(object) + b.coeffs.astype(object))
        return CycInt(a.N, a.coeffs + b.coeffs)

    __radd__ = __add__

    def __neg__(self):
        return CycInt(self.N, -self.coeffs)

    def __sub__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, n: int) -> "CycInt":
        n = int(n)
        if self.coeffs.dtype != object and _abs_sum(self.coeffs) * abs(n) >= _INT64_SAFE:
            return CycInt(self.N, self.coeffs.astype(object) * n)
        return CycInt(self.N, self.coeffs * n)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale(other)
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        return CycInt(a.N, _cyclic_convolve(a.coeffs, b.coeffs, a.N))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "CycInt":
        if n < 0:
            raise ValueError("negative powers are not supported")
        result, base = CycInt.integer(1, self.N), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate(self) -> "CycInt":
        return self.galois(-1)

    def galois(self, t: int) -> "CycInt":
        """Apply the automorphism zeta_N -> zeta_N^t."""
        if math.gcd(t, self.N) != 1:
            raise ValueError(f"{t} is not a unit modulo {self.N}")
        c = np.zeros(self.N, dtype=self.coeffs.dtype)
        c[(np.arange(self.N) * t) % self.N] = self.coeffs
        return CycInt(self.N, c)

    # -- comparison and extraction --------------------------------------------

    def canonical_key(self) -> tuple[int, bytes]:
        if self._key is None:
            z = _zumbroich(self.coeffs, self.N)
            data = z.tobytes() if z.dtype != object else repr([int(v) for v in z]).encode()
            self._key = (self.N, data)
        return self._key

    def zumbroich(self) -> np.ndarray:
        return _zumbroich(self.coeffs, self.N)

    def is_zero(self) -> bool:
        z = _zumbroich(self.coeffs, self.N)
        return not any(z) if z.dtype == object else not z.any()

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = CycInt.integer(int(other))
        if not isinstance(other, CycInt):
            return NotImplemented
        if self.N == other.N:
            return self.canonical_key() == other.canonical_key()
        return (self - other).is_zero()

    def __hash__(self):
        # hash the value in the smallest ring it is known to live in
        return hash(self._min_key())

    def _min_key(self):
        q = self.as_rational_integer()
        if q is not None:
            return ("int", q)
        return self.canonical_key()

    def as_rational_integer(self) -> int | None:
        """n if the value is the rational integer n, else None."""
        z = _zumbroich(self.coeffs, self.N)
        one, i0 = _one_normal_form(self.N)
        n = int(z[i0]) * int(one[i0])
        if all(int(a) == n * int(b) for a, b in zip(z, one)) if z.dtype == object \
                else np.array_equal(z, n * one):
            return n
        return None

    def reduce_canonical(self) -> "CycInt":
        """Remainder modulo Phi_N: coefficients only on exponents < phi(N)."""
        phi = cyclotomic_polynomial(self.N)
        rem = _poly_rem(self.coeffs, phi, self.N, exact=False)
        if not np.isclose(_embed(rem, self.N), self.to_complex(), atol=1e-6, rtol=1e-9):
            rem = _poly_rem(self.coeffs, phi, self.N, exact=True)
        return CycInt(self.N, rem)

    def to_complex(self) -> complex:
        return _embed(self.coeffs, self.N)

    def to_dict(self) -> dict:
        red = self.reduce_canonical()
        deg = int(totient(self.N))
        return {"N": self.N, "coefficients": [int(v) for v in red.coeffs[:deg]]}

    def __repr__(self):
        terms = [f"{int(c)}*z{self.N}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "CycInt(" + (" + ".join(terms) if terms else "0") + ")"


def _embed(coeffs: np.ndarray, N: int) -> complex:
    c = np.asarray(coeffs, dtype=float)
    return complex(np.dot(c, np.exp(2j * np.pi * np.arange(N) / N)))


def _poly_rem(coeffs: np.ndarray, phi: tuple[int, ...], N: int, exact: bool) -> np.ndarray:
    deg = len(phi) - 1
    if exact:
        rem = [int(v) for v in coeffs]
        for i in range(N - 1, deg - 1, -1):
            c = rem[i]
            if c:
                for j, pj in enumerate(phi):
                    rem[i - deg + j] -= c * pj
        out = np.zeros(N, dtype=object)
        out[:] = rem
        out[deg:] = 0
        return out
    rem = np.array(coeffs, dtype=np.int64)
    ph = np.array(phi, dtype=np.int64)
    for i in range(N - 1, deg - 1, -1):
        c = rem[i]
        if c:
            rem[i - deg:i + 1] -= c * ph
    return rem


def _cyclic_convolve(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    if a.dtype == object or b.dtype == object or _abs_sum(a) * _abs_sum(b) >= _INT64_SAFE:
        a, b = a.astype(object), b.astype(object)
        ia, ib = np.flatnonzero(a), np.flatnonzero(b)
        out = np.zeros(N, dtype=object)
        for i in ia:
            out += np.roll(b, int(i)) * a[i]
        return out
    bound = _abs_sum(a) * _abs_sum(b)
    ia, ib = np.flatnonzero(a), np.flatnonzero(b)
    if bound < _FFT_SAFE and N > 256 and len(ia) * len(ib) > 16 * N:
        # every output coefficient is at most `bound`, far below the rounding limit
        # linear convolution at a power-of-two length, then fold mod N
        L = 1 << (2 * N - 1).bit_length()
        full = np.fft.irfft(np.fft.rfft(a.astype(float), L) * np.fft.rfft(b.astype(float), L), L)
        full = np.rint(full[:2 * N - 1]).astype(np.int64)
        out = full[:N].copy()
        out[:N - 1] += full[N:]
        return out
    if N <= _DENSE_MUL_LIMIT:
        full = np.convolve(a, b)
        out = full[:N].copy()
        out[:len(full) - N] += full[N:]
        return out
    idx = (ia[:, None] + ib[None, :]).ravel() % N
    w = (a[ia][:, None] * b[ib][None, :]).ravel()
    if bound < 2**53:
        return np.rint(np.bincount(idx, weights=w, minlength=N)).astype(np.int64)
    out = np.zeros(N, dtype=np.int64)
    np.add.at(out, idx, w)
    return out


# -- functional aliases -------------------------------------------------------

def cyc_add(a: CycInt, b: CycInt) -> CycInt:
    return a + b


def cyc_mul(a: CycInt, b: CycInt) -> CycInt:
    return a * b


def cyc_neg(a: CycInt) -> CycInt:
    return -a


def cyc_scalar(a: CycInt, n: int) -> CycInt:
    return a.scale(n)


def conjugate(a: CycInt) -> CycInt:
    return a.conjugate()


def galois_apply(a: CycInt, t: int) -> CycInt:
    return a.galois(t)


def reduce_canonical(a: CycInt) -> CycInt:
    return a.reduce_canonical()


def as_rational_integer(a: CycInt) -> int | None:
    return a.as_rational_integer()
