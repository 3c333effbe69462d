import random
import socket
import threading

import numpy as np
import pytest

from zkcec import fieldvec as fv
from zkcec.backend.channel import Tag, TamperChannel, connect, listen, local_pair
from zkcec.backend.dealer import dealer_gen, read_tape, seeded_tape, write_tape
from zkcec.backend.rom import OneHotRom
from zkcec.backend.zk import AuthVec, mul_check, poly_eval, pop_idt
from zkcec.encoding import CONST_LIT
from zkcec.errors import ProtocolAbort, TapeExhausted, TraceError
from zkcec.field import gf_mul, poly_eval as plain_eval, poly_from_roots

from conftest import two_party
from sweeps import aborted, flip_low, mul_run, pop_run, rom_run

V = fv.to_vec


# -- dealer ------------------------------------------------------------------

def test_dealer_relation():
    pt, vt = dealer_gen("s", 500)
    r, m = pt.take(500)
    k = vt.take(500)
    for ri, mi, ki in zip(fv.to_ints(r), fv.to_ints(m), fv.to_ints(k)):
        assert mi == ki ^ gf_mul(ri, vt.delta)
    assert vt.delta != 0


def test_dealer_seeds_and_prefixes():
    assert dealer_gen("a", 4)[1].delta != dealer_gen("b", 4)[1].delta
    short, long_ = dealer_gen("a", 4)[0], dealer_gen("a", 9)[0]
    assert np.array_equal(short.r, long_.r[:4])
    assert seeded_tape("a", 0)(4).r.tolist() == short.r.tolist()


def test_tape_exhaustion_and_files(tmp_path):
    pt, vt = dealer_gen("x", 3)
    for t, name in ((pt, "p"), (vt, "v")):
        write_tape(tmp_path / name, t)
    p2, v2 = read_tape(tmp_path / "p"), read_tape(tmp_path / "v")
    assert np.array_equal(p2.m, pt.m) and v2.delta == vt.delta
    p2.take(2)
    with pytest.raises(TapeExhausted):
        p2.take(2)
    (tmp_path / "bad").write_bytes(b"nope" + bytes(20))
    with pytest.raises(TraceError):
        read_tape(tmp_path / "bad")


# -- commit / open / linear maps ---------------------------------------------

def test_commit_open():
    pr, vr = two_party(lambda p: p.open(p.commit(V([5]))), lambda v: v.open(v.commit(1)))
    assert fv.to_ints(vr) == [5]


def test_open_against_wrong_claim():
    pr, vr = two_party(lambda p: p.check_equal_public(p.commit(V([5])), V([6])),
                       lambda v: v.check_equal_public(v.commit(1), V([6])))
    assert aborted(vr)


def test_tampered_tag_caught():
    for seed in range(20):
        pr, vr = two_party(lambda p: p.open(p.commit(V([5]))), lambda v: v.open(v.commit(1)),
                           seed=seed, hooks={"tag": flip_low})
        assert aborted(vr)


def test_linear_combinations():
    a, b2, c = 0x1234, 0xBEEF << 80, 77

    def lin(party, av):
        x, y = av[0:1], av[1:2]
        sx = x.map(lambda t: fv.vscale(t, a))
        sy = y.map(lambda t: fv.vscale(t, b2))
        return party.add_const(sx ^ sy, c)

    def pf(p):
        av = p.commit(V([3, 9, 42]))
        p.open(lin(p, av))
        p.open(av[0:1] ^ av[0:1])
        p.open(p.add_const(av[2:3], CONST_LIT))
        p.open(av[0:1])

    def vf(v):
        av = v.commit(3)
        return [fv.to_ints(v.open(lin(v, av))), fv.to_ints(v.open(av[0:1] ^ av[0:1])),
                fv.to_ints(v.open(v.add_const(av[2:3], CONST_LIT))), fv.to_ints(v.open(av[0:1]))]

    _, vr = two_party(pf, vf)
    assert vr == [[gf_mul(a, 3) ^ gf_mul(b2, 9) ^ c], [0], [42 ^ CONST_LIT], [3]]


def test_views_of_commitments_are_uniform():
    """Correction values for a fixed secret look like uniform bits."""
    n = 100_000
    ca, cb = local_pair()
    pt, _ = dealer_gen("hiding", n)
    from zkcec.backend.zk import make_party, PROVER
    make_party(PROVER, ca, pt).commit(np.tile(V([0xC0FFEE]), (n, 1)))
    raw = cb.recv(Tag.COMMIT_DELTA)
    ones = np.unpackbits(np.frombuffer(raw, np.uint8).reshape(n, 16), axis=1).sum(axis=0)
    z = np.abs(2 * ones.astype(np.int64) - n) / np.sqrt(n)
    assert len(z) == 128 and z.max() < 5.0


# -- products ----------------------------------------------------------------

def test_mul_check_honest():
    assert mul_run(3, 0, 0) == "ok"
    assert mul_run(3, 1, 3) == "ok"
    assert mul_run(1 << 127, 2, 0x87) == "ok"


def test_mul_check_wrong_product():
    for seed in range(20):
        assert aborted(mul_run(3, 5, gf_mul(3, 5) ^ 1, seed))


def test_batched_products_one_mask():
    rng = random.Random(0)
    xs = [rng.getrandbits(128) for _ in range(50)]
    ys = [rng.getrandbits(128) for _ in range(50)]
    zs = [gf_mul(a, b) for a, b in zip(xs, ys)]

    def pf(p):
        a, b, c = p.commit(V(xs)), p.commit(V(ys)), p.commit(V(zs))
        mul_check(p, a, b, c)
        p.flush()
        return p.used

    def vf(v):
        a, b, c = v.commit(50), v.commit(50), v.commit(50)
        mul_check(v, a, b, c)
        v.flush()
        return v.used

    assert two_party(pf, vf) == (151, 151)


def test_empty_flush_still_costs_one_mask():
    pr, vr = two_party(lambda p: (p.flush(), p.used)[1], lambda v: (v.flush(), v.used)[1])
    assert pr == vr == 1


def test_echo_mismatch():
    _, vr = two_party(lambda p: p.challenge(), lambda v: v.challenge(),
                      hooks={"echo": lambda s: s[::-1]})
    assert aborted(vr)


def test_tampered_mulproof():
    hooks = {"mulproof": lambda u, v: (u ^ np.array([1, 0], np.uint64), v)}

    def pf(p):
        a = p.commit(V([2]))
        mul_check(p, a, a, p.commit(V([4])))
        p.flush()

    def vf(v):
        a = v.commit(1)
        mul_check(v, a, a, v.commit(1))
        v.flush()

    assert aborted(two_party(pf, vf, hooks=hooks)[1])


# -- committed polynomials ---------------------------------------------------

def eval_run(coeffs, point):
    W = len(coeffs)

    def pf(p):
        p.open(poly_eval(p.commit(V(coeffs)), point))

    def vf(v):
        return fv.to_ints(v.open(poly_eval(v.commit(W), point)))

    return two_party(pf, vf, count=W + 4)[1]


def test_committed_evaluation():
    assert eval_run([99, 0, 0], 12345) == 99
    rng = random.Random(1)
    for _ in range(20):
        cs = [rng.getrandbits(128) for _ in range(rng.randint(1, 7))]
        x = rng.getrandbits(128)
        assert eval_run(cs, x) == plain_eval(cs, x)


def test_committed_worked_clause_vanishes_at_three():
    h2 = random.Random(2).getrandbits(120)
    p = poly_from_roots([1 ^ CONST_LIT, h2 ^ CONST_LIT, 3], 3)
    assert eval_run(p, 3) == 0


def test_pop_idt_honest():
    p = poly_from_roots([5, 6], 3)
    assert pop_run([p], [p]) == "ok"
    a, b = poly_from_roots([5], 3), poly_from_roots([6], 3)
    assert pop_run([a, b], [b, a]) == "ok"


def test_pop_idt_mismatch():
    p = poly_from_roots([5, 6], 3)
    q = list(p)
    q[0] ^= 1
    for seed in range(20):
        assert aborted(pop_run([p], [q], seed))


# -- clause operations composed from the primitives --------------------------

def res_run(c0, c1, cr, w0, w1, piv, W=4, seed=0):
    """Resolution by clause weakening: w0 c0 = cr (x+p), w1 c1 = cr (x+p+const)."""
    polys = [poly_from_roots(c, W - 1) for c in (c0, c1, cr, w0, w1)]

    def pivot_poly(party, cp):
        # (x + p): committed constant term, public leading 1
        one = party.const(V([0, 1] + [0] * (W - 2)))
        pad = cp.map(lambda a: np.concatenate([a, np.zeros((W - 1, 2), np.uint64)]))
        return pad ^ one

    def run(party, commit, prover):
        C = [commit(q) for q in polys]
        P = commit([piv]) if prover else commit(1)
        xp = pivot_poly(party, P)
        xnp = party.add_const(xp, V([CONST_LIT] + [0] * (W - 1)))
        pop_idt(party, [C[3], C[0]], [C[2], xp], "Res")
        pop_idt(party, [C[4], C[1]], [C[2], xnp], "Res")
        return "ok"

    pf = lambda p: run(p, lambda q: p.commit(V(q)), True)
    vf = lambda v: run(v, lambda q: v.commit(W if isinstance(q, list) and len(q) == W else 1),
                       False)
    return two_party(pf, vf, seed=seed, count=64)[1]


def test_res_honest_and_forged():
    a, b, x = 11, 22, 33
    nx = x ^ CONST_LIT
    # {(x, a), (-x, b)} derives (a, b)
    assert res_run([x, a], [nx, b], [a, b], [b], [a], x) == "ok"
    # {(x), (-x)} derives the empty clause with empty witnesses
    assert res_run([x], [nx], [], [], [], x) == "ok"
    # claimed (a, b, c) is not the resolvent
    c = 44
    for seed in range(50):
        assert aborted(res_run([x, a], [nx, b], [a, b, c], [b], [a], x, seed=seed))


def isfalse_run(clause, W=3):
    target = V([1] + [0] * W)
    p = poly_from_roots(clause, W)
    pf = lambda pp: pp.check_equal_public(pp.commit(V(p)), target)
    vf = lambda v: (v.check_equal_public(v.commit(W + 1), target), "ok")[1]
    return two_party(pf, vf)[1]


def test_isfalse():
    assert isfalse_run([]) == "ok"
    assert aborted(isfalse_run([5]))


# -- read-only memory --------------------------------------------------------

def test_rom_single_cell():
    assert rom_run([[7, 1]], [0], [1]) == "ok"


def test_rom_hidden_reads():
    rng = random.Random(3)
    cells = [[rng.getrandbits(128) for _ in range(3)] for _ in range(9)]
    assert rom_run(cells, [4, 0, 8, 4], [9, 5, 9, 6]) == "ok"


def test_rom_wrong_value():
    cells = [[1, 2], [3, 4], [5, 6]]
    for seed in range(20):
        assert aborted(rom_run(cells, [1], [3], values=[[3, 5]], seed=seed))


def test_rom_index_outside_window():
    # cell 2 holds the value, but the window only admits cells 0 and 1
    cells = [[1, 2], [3, 4], [5, 6]]
    assert aborted(rom_run(cells, [2], [2]))


def test_rom_second_init_ignored():
    rom = OneHotRom(object())
    a, b = AuthVec(k=fv.zeros(1, 2)), AuthVec(k=fv.ones(1, 2))
    rom.init(a)
    rom.init(b)
    assert rom.cells is a


# -- channels ----------------------------------------------------------------

def test_framing_and_transcripts():
    a, b = local_pair()
    a.send(Tag.HELLO, b"hi")
    assert b.recv(Tag.HELLO) == b"hi"
    assert a.digest() == b.digest()
    a.send(Tag.OPEN, b"x")
    with pytest.raises(ProtocolAbort):
        b.recv(Tag.CHAL)


def test_abort_frame_raises():
    a, b = local_pair()
    a.abort("P2", "nope")
    with pytest.raises(ProtocolAbort) as e:
        b.recv()
    assert e.value.phase == "P2"


def test_tamper_channel_flips_one_byte():
    a, b = local_pair()
    t = TamperChannel(a, frame_no=1, byte_no=0, mask=0xFF)
    t.send(Tag.OPEN, b"\x00\x00")
    t.send(Tag.OPEN, b"\x00\x00")
    assert b.recv() == b"\x00\x00"
    assert b.recv() == b"\xff\x00"


def test_socket_round_trip():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        port = s.getsockname()[1]
    out = {}

    def server():
        ch = listen(f"127.0.0.1:{port}", timeout=10)
        out["got"] = ch.recv(Tag.HELLO)
        ch.send(Tag.VERDICT, b"accept")
        out["digest"] = ch.digest()
        ch.close()

    th = threading.Thread(target=server)
    th.start()
    ch = connect(f"127.0.0.1:{port}", timeout=10)
    ch.send(Tag.HELLO, b"x" * 100_000)
    assert ch.recv(Tag.VERDICT) == b"accept"
    th.join()
    assert out["got"] == b"x" * 100_000 and out["digest"] == ch.digest()
    ch.close()
