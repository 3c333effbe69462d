"""Seeded soundness sweeps shared by the backend, soundness and acceptance tests."""

import numpy as np

from zkcec import fieldvec as fv
from zkcec.backend.rom import OneHotRom
from zkcec.backend.zk import expand_challenge, mul_check, pop_idt
from zkcec.errors import ProtocolAbort
from zkcec.field import gf_mul, poly_from_roots

from conftest import two_party

V = fv.to_vec


def aborted(res):
    return isinstance(res, ProtocolAbort)


def mul_run(x, y, z, seed=0):
    def pf(p):
        cx, cy, cz = p.commit(V([x])), p.commit(V([y])), p.commit(V([z]))
        mul_check(p, cx, cy, cz)
        p.flush()

    def vf(v):
        cx, cy, cz = v.commit(1), v.commit(1), v.commit(1)
        mul_check(v, cx, cy, cz)
        v.flush()
        return "ok"

    return two_party(pf, vf, seed=seed)[1]


def pop_run(lhs, rhs, seed=0):
    W = len(lhs[0])

    def pf(p):
        L = [p.commit(V(q)) for q in lhs]
        R = [p.commit(V(q)) for q in rhs]
        pop_idt(p, L, R)

    def vf(v):
        L = [v.commit(W) for _ in lhs]
        R = [v.commit(W) for _ in rhs]
        pop_idt(v, L, R)
        return "ok"

    return two_party(pf, vf, seed=seed, count=W * (len(lhs) + len(rhs)) + 8)[1]


def rom_run(cells, reads, bounds, values=None, seed=0):
    """cells: list of polys; reads: hidden indices; values default to the true cells."""
    W = len(cells[0])
    values = values if values is not None else [cells[i] for i in reads]

    def pf(p):
        rom = OneHotRom(p)
        rom.init(p.commit(np.stack([V(c) for c in cells])))
        rom.read(bounds, p.commit(np.stack([V(c) for c in values])), reads)
        g = fv.to_ints(expand_challenge(p.challenge(), 1)[0])
        rom.check(g)
        p.flush()

    def vf(v):
        rom = OneHotRom(v)
        rom.init(v.commit((len(cells), W)))
        rom.read(bounds, v.commit((len(values), W)))
        g = fv.to_ints(expand_challenge(v.challenge(), 1)[0])
        rom.check(g)
        v.flush()
        return "ok"

    return two_party(pf, vf, seed=seed, count=4096)[1]


def flip_low(m):
    m = np.array(m, copy=True)
    m.reshape(-1, 2)[0, 0] ^= np.uint64(1)
    return m


def escapes(trial, n):
    """Seeds in range(n) for which the cheating trial was not caught."""
    return [k for k in range(n) if not aborted(trial(k))]


def tag_trial(k):
    return two_party(lambda p: p.open(p.commit(V([k + 5]))), lambda v: v.open(v.commit(1)),
                     seed=k, hooks={"tag": flip_low})[1]


def mul_trial(k):
    x, y = k + 3, 2 * k + 5
    return mul_run(x, y, gf_mul(x, y) ^ 1, seed=k)


_P = poly_from_roots([5, 6], 3)
_Q = [_P[0] ^ 1] + list(_P[1:])


def pop_trial(k):
    return pop_run([_P], [_Q], seed=k)


def rom_trial(k):
    return rom_run([[1, 2], [3, 4], [5, 6]], [1], [3], values=[[3, 5]], seed=k)


PRIMITIVE_TRIALS = {"tampered-tag": tag_trial, "wrong-product": mul_trial,
                    "unequal-products": pop_trial, "wrong-rom-value": rom_trial}
