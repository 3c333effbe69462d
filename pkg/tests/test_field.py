import json
import random
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st

from zkcec import fieldvec as fv
from zkcec.errors import DomainError, WidthError
from zkcec.field import (MODULUS, gf_add, gf_inv, gf_mul, gf_pow, poly_eval, poly_from_roots,
                         poly_mul, poly_pad)

from oracles import naive_eval, ref_mul

VEC = json.loads((Path(__file__).parent / "fixtures" / "field_vectors.json").read_text())
felem = st.integers(0, (1 << 128) - 1)
nonzero = st.integers(1, (1 << 128) - 1)


def test_frozen_products():
    for a, b, c in VEC["mul"]:
        assert gf_mul(int(a, 16), int(b, 16)) == int(c, 16)


def test_frozen_inverses():
    for a, b in VEC["inv"]:
        assert gf_inv(int(a, 16)) == int(b, 16)


def test_frozen_evaluations():
    for cs, x, y in VEC["eval"]:
        assert poly_eval([int(c, 16) for c in cs], int(x, 16)) == int(y, 16)


def test_top_bit_times_x_is_the_reduction_tail():
    assert gf_mul(1 << 127, 2) == VEC["x127_times_x"] == MODULUS ^ (1 << 128)


def test_add_identities():
    a = 0xDEADBEEF << 70
    assert gf_add(a, 0) == a
    assert gf_add(a, a) == 0
    assert gf_add(5, 1 << 64) == 5 ^ (1 << 64)


def test_mul_identities():
    a = random.Random(1).getrandbits(128)
    assert gf_mul(a, 1) == a
    assert gf_mul(a, 0) == 0


def test_inverse_edges():
    assert gf_inv(1) == 1
    with pytest.raises(DomainError):
        gf_inv(0)


def test_random_inverses():
    rng = random.Random(7)
    for _ in range(1000):
        a = rng.getrandbits(128) or 1
        assert gf_mul(a, gf_inv(a)) == 1


@given(felem, felem, felem)
def test_field_axioms(a, b, c):
    assert gf_mul(a, b) == gf_mul(b, a)
    assert gf_mul(gf_mul(a, b), c) == gf_mul(a, gf_mul(b, c))
    assert gf_mul(a, b ^ c) == gf_mul(a, b) ^ gf_mul(a, c)


@given(felem, felem)
def test_mul_matches_schoolbook(a, b):
    assert gf_mul(a, b) == ref_mul(a, b)


@given(nonzero, felem, felem)
def test_mul_by_nonzero_is_bijective(a, b, c):
    assert gf_mul(gf_mul(b, a), gf_inv(a)) == b
    if b != c:
        assert gf_mul(a, b) != gf_mul(a, c)


def test_pow_small():
    assert gf_pow(2, 128) == 0x87
    assert gf_pow(7, 0) == 1


# -- polynomials -------------------------------------------------------------

def test_roots_empty_is_constant_one():
    assert poly_from_roots([], 4) == [1, 0, 0, 0, 0]


def test_roots_single_literal():
    assert poly_from_roots([3], 3) == [3, 1, 0, 0]


def test_roots_too_many():
    with pytest.raises(WidthError):
        poly_from_roots([1, 2, 3], 2)


@given(st.lists(felem, max_size=6), st.integers(0, 3))
def test_roots_vanish(roots, extra):
    p = poly_from_roots(roots, len(roots) + extra)
    assert len(p) == len(roots) + extra + 1
    for r in roots:
        assert poly_eval(p, r) == 0


def test_roots_nonzero_at_fresh_points():
    rng = random.Random(11)
    roots = [rng.getrandbits(128) for _ in range(5)]
    p = poly_from_roots(roots, 8)
    for _ in range(10_000):
        assert poly_eval(p, rng.getrandbits(128)) != 0


def test_eval_constant():
    assert poly_eval([42], 99) == 42
    assert poly_eval([42, 0, 0], 99) == 42


@given(st.lists(felem, min_size=1, max_size=6), felem)
def test_horner_matches_naive(p, x):
    assert poly_eval(p, x) == naive_eval(p, x)


@given(st.lists(felem, min_size=1, max_size=5), felem, st.integers(0, 4))
def test_padding_invariance(p, x, pad):
    assert poly_eval(poly_pad(p, len(p) + pad), x) == poly_eval(p, x)


def test_mul_identity_and_root():
    p = [5, 6, 7]
    assert poly_mul(p, [1]) == p
    a, b = 123, 456
    assert poly_eval(poly_mul([a, 1], [b, 1]), a) == 0


@given(st.lists(felem, min_size=1, max_size=5), st.lists(felem, min_size=1, max_size=5), felem)
def test_mul_is_evaluation_homomorphic(p, q, x):
    pq = poly_mul(p, q)
    assert len(pq) == len(p) + len(q) - 1
    assert poly_eval(pq, x) == gf_mul(poly_eval(p, x), poly_eval(q, x))


# -- vectorized kernels agree with the scalar code ---------------------------

@given(st.lists(st.tuples(felem, felem), min_size=1, max_size=20))
def test_vmul_matches_scalar(pairs):
    a = fv.to_vec([x for x, _ in pairs])
    b = fv.to_vec([y for _, y in pairs])
    assert fv.to_ints(fv.vmul(a, b)) == [gf_mul(x, y) for x, y in pairs]


@given(st.lists(nonzero, min_size=1, max_size=20))
def test_batch_inverse_matches_scalar(xs):
    assert fv.to_ints(fv.batch_inv(fv.to_vec(xs))) == [gf_inv(x) for x in xs]


def test_horner_and_roots_kernels():
    rng = random.Random(3)
    W = 6
    rows, counts = [], []
    for _ in range(30):
        k = rng.randint(0, W)
        rows.append([rng.getrandbits(128) for _ in range(k)])
        counts.append(k)
    roots = np.zeros((30, W, 2), np.uint64)
    for i, r in enumerate(rows):
        if r:
            roots[i, :len(r)] = fv.to_vec(r)
    polys = fv.from_roots(roots, np.array(counts), W)
    for i, r in enumerate(rows):
        assert fv.to_ints(polys[i]) == poly_from_roots(r, W)
    x = rng.getrandbits(128)
    got = fv.to_ints(fv.horner(polys, x))
    assert got == [poly_eval(poly_from_roots(r, W), x) for r in rows]


def test_wdot_is_weighted_sum():
    rng = random.Random(5)
    w, a, b = ([rng.getrandbits(128) for _ in range(17)] for _ in range(3))
    expect = 0
    for x, y, z in zip(w, a, b):
        expect ^= gf_mul(x, gf_mul(y, z))
    assert fv.to_ints(fv.wdot(fv.to_vec(w), fv.to_vec(a), fv.to_vec(b))) == expect
