"""Scalar arithmetic in GF(2^128) and dense polynomials over it.

Field elements are plain Python ints in [0, 2^128).  Bit i of the int is the
coefficient of x^i, reduced modulo x^128 + x^7 + x^2 + x + 1.

Polynomials are lists of field elements, index i holding the coefficient of
x^i.  Lengths are never trimmed: a zero-padded clause polynomial must keep its
declared width.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DomainError, WidthError

BITS = 128
MASK = (1 << BITS) - 1
# x^128 + x^7 + x^2 + x + 1, top bit implicit in the reduction below
MODULUS = (1 << 128) | 0x87
MODULUS_ID = "gf2^128/x^128+x^7+x^2+x+1"

Poly = list


def gf_add(a: int, b: int) -> int:
    return a ^ b


def _reduce(p: int) -> int:
    # p has at most 255 bits; fold the high half twice
    hi = p >> 128
    while hi:
        p = (p & MASK) ^ hi ^ (hi << 1) ^ (hi << 2) ^ (hi << 7)
        hi = p >> 128
    return p


def clmul(a: int, b: int) -> int:
    """Carry-less product of two ints, no reduction."""
    if a < 2 or b < 2:
        return a * b
    if b.bit_length() > a.bit_length():
        a, b = b, a
    # 4-bit window over b
    table = [0] * 16
    table[1] = a
    for i in range(2, 16, 2):
        table[i] = table[i >> 1] << 1
        table[i + 1] = table[i] ^ a
    p = 0
    for shift in range((b.bit_length() + 3) & ~3, -1, -4):
        p = (p << 4) ^ table[(b >> shift) & 15]
    return p


def gf_mul(a: int, b: int) -> int:
    return _reduce(clmul(a, b))


def gf_sqr(a: int) -> int:
    return gf_mul(a, a)


def gf_pow(a: int, e: int) -> int:
    result = 1
    while e:
        if e & 1:
            result = gf_mul(result, a)
        a = gf_mul(a, a)
        e >>= 1
    return result


def gf_inv(a: int) -> int:
    """Multiplicative inverse via a^(2^128 - 2)."""
    if a == 0:
        raise DomainError("zero has no inverse in GF(2^128)")
    # Itoh-Tsujii style addition chain would be faster; the plain ladder is
    # only used on the scalar path
    return gf_pow(a, (1 << 128) - 2)


def as_field(value: int) -> int:
    if not 0 <= value <= MASK:
        raise DomainError(f"{value} is not a GF(2^128) element")
    return value


# -- polynomials -----------------------------------------------------------

def poly_from_roots(roots: Sequence[int], width: int) -> Poly:
    """prod (x + r) over `roots`, padded to width + 1 coefficients."""
    if len(roots) > width:
        raise WidthError(f"{len(roots)} roots exceed width {width}")
    coeffs = [0] * (width + 1)
    coeffs[0] = 1
    deg = 0
    for r in roots:
        # multiply in place by (x + r), high to low
        for i in range(deg + 1, 0, -1):
            coeffs[i] = coeffs[i - 1] ^ gf_mul(coeffs[i], r)
        coeffs[0] = gf_mul(coeffs[0], r)
        deg += 1
    return coeffs


def poly_eval(p: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(p):
        acc = gf_mul(acc, x) ^ c
    return acc


def poly_mul(p: Sequence[int], q: Sequence[int]) -> Poly:
    """Convolution; output has len(p) + len(q) - 1 coefficients."""
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] ^= gf_mul(a, b)
    return out


def poly_add(p: Sequence[int], q: Sequence[int]) -> Poly:
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) ^ (q[i] if i < len(q) else 0)
            for i in range(n)]


def poly_pad(p: Iterable[int], width: int) -> Poly:
    p = list(p)
    if len(p) > width + 1:
        if any(p[width + 1:]):
            raise WidthError(f"degree exceeds width {width}")
        return p[: width + 1]
    return p + [0] * (width + 1 - len(p))
