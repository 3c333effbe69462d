"""Batched GF(2^128) kernels over numpy arrays.

A field vector is a uint64 array whose last axis has length 2: (low word,
high word).  The kernels are numba-compiled and cover the bulk work of the
protocol (commitment keys, polynomial evaluation, constraint aggregation).
`field` holds the scalar reference implementation these are tested against.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

M64 = (1 << 64) - 1
_ONE = uint64(1)
_FOUR = uint64(4)
_F = uint64(15)


# -- conversions -----------------------------------------------------------

def to_vec(values) -> np.ndarray:
    """Python ints (any nesting numpy can shape) -> (..., 2) uint64."""
    arr = np.asarray(values, dtype=object)
    flat = arr.reshape(-1)
    out = np.empty((flat.size, 2), dtype=np.uint64)
    if flat.size:
        buf = b"".join(int(v).to_bytes(16, "little") for v in flat)
        out[:] = np.frombuffer(buf, dtype="<u8").reshape(-1, 2)
    return out.reshape(arr.shape + (2,))


def to_ints(vec: np.ndarray):
    """Inverse of to_vec; returns a nested list (or an int for shape (2,))."""
    vec = np.ascontiguousarray(vec, dtype="<u8")
    shape = vec.shape[:-1]
    raw = vec.tobytes()
    vals = [int.from_bytes(raw[i:i + 16], "little") for i in range(0, len(raw), 16)]
    if not shape:
        return vals[0]
    return np.array(vals, dtype=object).reshape(shape).tolist()


def scalar(value: int) -> np.ndarray:
    return np.array([value & M64, value >> 64], dtype=np.uint64)


def zeros(*shape) -> np.ndarray:
    return np.zeros(shape + (2,), dtype=np.uint64)


def ones(*shape) -> np.ndarray:
    out = np.zeros(shape + (2,), dtype=np.uint64)
    out[..., 0] = 1
    return out


def from_small(values) -> np.ndarray:
    """Non-negative ints below 2^64 -> field vector, without the object detour."""
    arr = np.asarray(values, dtype=np.uint64)
    out = np.zeros(arr.shape + (2,), dtype=np.uint64)
    out[..., 0] = arr
    return out


# -- core kernels ------------------------------------------------------------

@njit(cache=True, inline="always")
def _clmul64(a, b, tlo, thi):
    # 4-bit window: table of a * k for k < 16, spread over two words
    tlo[0] = 0
    thi[0] = 0
    tlo[1] = a
    thi[1] = 0
    for k in range(2, 16, 2):
        h = k >> 1
        tlo[k] = tlo[h] << _ONE
        thi[k] = (thi[h] << _ONE) | (tlo[h] >> uint64(63))
        tlo[k + 1] = tlo[k] ^ a
        thi[k + 1] = thi[k]
    lo = uint64(0)
    hi = uint64(0)
    for i in range(15, -1, -1):
        hi = (hi << _FOUR) | (lo >> uint64(60))
        lo = lo << _FOUR
        n = (b >> uint64(4 * i)) & _F
        lo ^= tlo[n]
        hi ^= thi[n]
    return lo, hi


@njit(cache=True, inline="always")
def _mul(alo, ahi, blo, bhi, tlo, thi):
    l0, h0 = _clmul64(alo, blo, tlo, thi)
    l1, h1 = _clmul64(ahi, bhi, tlo, thi)
    m0, m1 = _clmul64(alo ^ ahi, blo ^ bhi, tlo, thi)
    m0 ^= l0 ^ l1
    m1 ^= h0 ^ h1
    w0 = l0
    w1 = h0 ^ m0
    w2 = l1 ^ m1
    w3 = h1
    # x^128 = x^7 + x^2 + x + 1: fold w3 then w2
    w1 ^= w3 ^ (w3 << _ONE) ^ (w3 << uint64(2)) ^ (w3 << uint64(7))
    w2 ^= (w3 >> uint64(63)) ^ (w3 >> uint64(62)) ^ (w3 >> uint64(57))
    w0 ^= w2 ^ (w2 << _ONE) ^ (w2 << uint64(2)) ^ (w2 << uint64(7))
    w1 ^= (w2 >> uint64(63)) ^ (w2 >> uint64(62)) ^ (w2 >> uint64(57))
    return w0, w1


@njit(cache=True)
def _vmul(a, b, out):
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    for i in range(a.shape[0]):
        out[i, 0], out[i, 1] = _mul(a[i, 0], a[i, 1], b[i, 0], b[i, 1], tlo, thi)


@njit(cache=True)
def _vscale(a, s0, s1, out):
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    for i in range(a.shape[0]):
        out[i, 0], out[i, 1] = _mul(a[i, 0], a[i, 1], s0, s1, tlo, thi)


@njit(cache=True)
def _wdot(w, a, b):
    # sum_i w_i * a_i * b_i
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    r0 = uint64(0)
    r1 = uint64(0)
    for i in range(a.shape[0]):
        p0, p1 = _mul(a[i, 0], a[i, 1], b[i, 0], b[i, 1], tlo, thi)
        q0, q1 = _mul(p0, p1, w[i, 0], w[i, 1], tlo, thi)
        r0 ^= q0
        r1 ^= q1
    return r0, r1


@njit(cache=True)
def _dot(a, b):
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    r0 = uint64(0)
    r1 = uint64(0)
    for i in range(a.shape[0]):
        p0, p1 = _mul(a[i, 0], a[i, 1], b[i, 0], b[i, 1], tlo, thi)
        r0 ^= p0
        r1 ^= p1
    return r0, r1


@njit(cache=True)
def _horner(coeffs, xs, out):
    # coeffs (n, d, 2), xs (n, 2) -> out (n, 2)
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    n, d = coeffs.shape[0], coeffs.shape[1]
    for i in range(n):
        a0 = uint64(0)
        a1 = uint64(0)
        for k in range(d - 1, -1, -1):
            a0, a1 = _mul(a0, a1, xs[i, 0], xs[i, 1], tlo, thi)
            a0 ^= coeffs[i, k, 0]
            a1 ^= coeffs[i, k, 1]
        out[i, 0] = a0
        out[i, 1] = a1


@njit(cache=True)
def _horner_grid(coeffs, pts, out):
    # coeffs (n, d, 2), pts (m, 2) -> out (n, m, 2)
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    n, d = coeffs.shape[0], coeffs.shape[1]
    for i in range(n):
        for j in range(pts.shape[0]):
            a0 = uint64(0)
            a1 = uint64(0)
            for k in range(d - 1, -1, -1):
                a0, a1 = _mul(a0, a1, pts[j, 0], pts[j, 1], tlo, thi)
                a0 ^= coeffs[i, k, 0]
                a1 ^= coeffs[i, k, 1]
            out[i, j, 0] = a0
            out[i, j, 1] = a1


@njit(cache=True)
def _from_roots(roots, counts, out):
    # roots (n, k, 2), counts (n,), out (n, w+1, 2) zero-initialised
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    for i in range(roots.shape[0]):
        out[i, 0, 0] = 1
        deg = 0
        for j in range(counts[i]):
            r0 = roots[i, j, 0]
            r1 = roots[i, j, 1]
            for k in range(deg + 1, 0, -1):
                p0, p1 = _mul(out[i, k, 0], out[i, k, 1], r0, r1, tlo, thi)
                out[i, k, 0] = out[i, k - 1, 0] ^ p0
                out[i, k, 1] = out[i, k - 1, 1] ^ p1
            out[i, 0, 0], out[i, 0, 1] = _mul(out[i, 0, 0], out[i, 0, 1], r0, r1, tlo, thi)
            deg += 1


@njit(cache=True)
def _vinv(a, out):
    # a^(2^128 - 2); zero maps to zero
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    for i in range(a.shape[0]):
        x0 = a[i, 0]
        x1 = a[i, 1]
        t0 = x0
        t1 = x1
        for _ in range(126):
            t0, t1 = _mul(t0, t1, t0, t1, tlo, thi)
            t0, t1 = _mul(t0, t1, x0, x1, tlo, thi)
        out[i, 0], out[i, 1] = _mul(t0, t1, t0, t1, tlo, thi)


@njit(cache=True)
def _batch_inv(a, out):
    # Montgomery's trick: one inversion plus three products per element.
    # Every entry must be nonzero.
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    n = a.shape[0]
    if n == 0:
        return
    p0 = uint64(1)
    p1 = uint64(0)
    for i in range(n):
        out[i, 0] = p0
        out[i, 1] = p1
        p0, p1 = _mul(p0, p1, a[i, 0], a[i, 1], tlo, thi)
    t0 = p0
    t1 = p1
    for _ in range(126):
        t0, t1 = _mul(t0, t1, t0, t1, tlo, thi)
        t0, t1 = _mul(t0, t1, p0, p1, tlo, thi)
    q0, q1 = _mul(t0, t1, t0, t1, tlo, thi)
    for i in range(n - 1, -1, -1):
        r0, r1 = _mul(q0, q1, out[i, 0], out[i, 1], tlo, thi)
        q0, q1 = _mul(q0, q1, a[i, 0], a[i, 1], tlo, thi)
        out[i, 0] = r0
        out[i, 1] = r1


@njit(cache=True)
def _prefix_prod(a, out):
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    p0 = uint64(1)
    p1 = uint64(0)
    for i in range(a.shape[0]):
        p0, p1 = _mul(p0, p1, a[i, 0], a[i, 1], tlo, thi)
        out[i, 0] = p0
        out[i, 1] = p1


@njit(cache=True)
def _row_prefix_prod(a, out):
    # a (n, m, 2): running product along axis 1
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    for i in range(a.shape[0]):
        p0 = uint64(1)
        p1 = uint64(0)
        for j in range(a.shape[1]):
            p0, p1 = _mul(p0, p1, a[i, j, 0], a[i, j, 1], tlo, thi)
            out[i, j, 0] = p0
            out[i, j, 1] = p1


@njit(cache=True)
def _powers(x0, x1, n, out):
    tlo = np.empty(16, np.uint64)
    thi = np.empty(16, np.uint64)
    p0 = uint64(1)
    p1 = uint64(0)
    for i in range(n):
        out[i, 0] = p0
        out[i, 1] = p1
        p0, p1 = _mul(p0, p1, x0, x1, tlo, thi)


# -- public wrappers ---------------------------------------------------------

def _flat(a):
    return np.ascontiguousarray(a, dtype=np.uint64).reshape(-1, 2)


def vmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise product with numpy broadcasting over the leading axes."""
    a, b = np.broadcast_arrays(a, b)
    shape = a.shape
    out = np.empty((int(np.prod(shape[:-1], dtype=np.int64)), 2), dtype=np.uint64)
    _vmul(_flat(a), _flat(b), out)
    return out.reshape(shape)


def vscale(a: np.ndarray, s) -> np.ndarray:
    """Multiply every element of `a` by one field element (int or (2,) array)."""
    s = scalar(s) if isinstance(s, int) else s
    out = np.empty((int(np.prod(a.shape[:-1], dtype=np.int64)), 2), dtype=np.uint64)
    _vscale(_flat(a), s[0], s[1], out)
    return out.reshape(a.shape)


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    r0, r1 = _dot(_flat(a), _flat(b))
    return np.array([r0, r1], dtype=np.uint64)


def wdot(w: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    r0, r1 = _wdot(_flat(w), _flat(a), _flat(b))
    return np.array([r0, r1], dtype=np.uint64)


def xor_sum(a: np.ndarray) -> np.ndarray:
    flat = _flat(a)
    return np.bitwise_xor.reduce(flat, axis=0) if flat.shape[0] else np.zeros(2, np.uint64)


def horner(coeffs: np.ndarray, xs) -> np.ndarray:
    """Evaluate polynomials (n, d, 2) at one point each ((n, 2)) or a shared point."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.uint64)
    n = coeffs.shape[0]
    xs = np.asarray(xs, dtype=np.uint64) if not isinstance(xs, int) else scalar(xs)
    if xs.ndim == 1:
        xs = np.broadcast_to(xs, (n, 2))
    out = np.empty((n, 2), dtype=np.uint64)
    _horner(coeffs, np.ascontiguousarray(xs), out)
    return out


def horner_grid(coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Evaluate every polynomial at every point: (n, d, 2) x (m, 2) -> (n, m, 2)."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.uint64)
    out = np.empty((coeffs.shape[0], pts.shape[0], 2), dtype=np.uint64)
    _horner_grid(coeffs, np.ascontiguousarray(pts, dtype=np.uint64), out)
    return out


def from_roots(roots: np.ndarray, counts: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros((roots.shape[0], width + 1, 2), dtype=np.uint64)
    if roots.shape[0]:
        _from_roots(np.ascontiguousarray(roots, dtype=np.uint64),
                    np.ascontiguousarray(counts, dtype=np.int64), out)
    return out


def vinv(a: np.ndarray) -> np.ndarray:
    out = np.empty((int(np.prod(a.shape[:-1], dtype=np.int64)), 2), dtype=np.uint64)
    _vinv(_flat(a), out)
    return out.reshape(a.shape)


def batch_inv(a: np.ndarray) -> np.ndarray:
    """Inverse of every element; raises if any element is zero."""
    flat = _flat(a)
    if not np.all(np.any(flat, axis=1)):
        from .errors import DomainError
        raise DomainError("zero has no inverse in GF(2^128)")
    out = np.empty_like(flat)
    _batch_inv(flat, out)
    return out.reshape(a.shape)


def prefix_prod(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(_flat(a))
    _prefix_prod(_flat(a), out)
    return out


def row_prefix_prod(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.uint64)
    out = np.empty_like(a)
    _row_prefix_prod(a, out)
    return out


def powers(x: int, n: int) -> np.ndarray:
    out = np.empty((n, 2), dtype=np.uint64)
    s = scalar(x)
    _powers(s[0], s[1], n, out)
    return out


def is_zero(a: np.ndarray) -> bool:
    return not np.any(a)
