"""IT-MAC commitments over GF(2^128) and the checks built on them.

Both roles run the same protocol code.  A Prover holds, for every committed
value x, a tag m; the Verifier holds a key k and the global delta, with
m = k + x * delta.  An AuthVec carries a whole array of such values: (x, m) on
the prover side, k on the verifier side, each a (..., 2) uint64 field vector.

Linear maps with public coefficients act on x, m and k alike, so they cost no
interaction.  Adding a public constant c shifts x by c on the prover side and
k by c * delta on the verifier side.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .. import fieldvec as fv
from ..errors import ProtocolAbort
from .channel import Channel, Tag

PROVER, VERIFIER = "prover", "verifier"


def _bytes(a: np.ndarray) -> bytes:
    return np.ascontiguousarray(a, dtype="<u8").tobytes()


def _arr(b: bytes, shape) -> np.ndarray:
    need = int(np.prod(shape, dtype=np.int64)) * 16
    if len(b) != need:
        raise ProtocolAbort("framing", f"payload has {len(b)} bytes, expected {need}")
    return np.frombuffer(b, dtype="<u8").astype(np.uint64).reshape(tuple(shape) + (2,))


def expand_challenge(seed: bytes, count: int, label: bytes = b"") -> np.ndarray:
    """Deterministic field elements from a verifier seed."""
    if count == 0:
        return np.zeros((0, 2), np.uint64)
    raw = hashlib.shake_256(b"zkcec-chal|" + label + b"|" + seed).digest(16 * count)
    return np.frombuffer(raw, dtype="<u8").astype(np.uint64).reshape(count, 2)


@dataclass
class AuthVec:
    x: Optional[np.ndarray] = None
    m: Optional[np.ndarray] = None
    k: Optional[np.ndarray] = None

    @property
    def shape(self):
        a = self.k if self.k is not None else self.x
        return a.shape[:-1]

    def __len__(self):
        return self.shape[0]

    def map(self, fn: Callable) -> "AuthVec":
        """Apply a public linear map (one that sends 0 to 0) to every component."""
        if self.k is not None:
            return AuthVec(k=fn(self.k))
        return AuthVec(x=fn(self.x), m=fn(self.m))

    def __getitem__(self, item) -> "AuthVec":
        return self.map(lambda a: a[item])

    def __xor__(self, other: "AuthVec") -> "AuthVec":
        if self.k is not None:
            return AuthVec(k=self.k ^ other.k)
        return AuthVec(x=self.x ^ other.x, m=self.m ^ other.m)

    def reshape(self, *shape) -> "AuthVec":
        return self.map(lambda a: a.reshape(shape + (2,)))

    def copy(self) -> "AuthVec":
        return self.map(np.copy)

    @staticmethod
    def concat(parts) -> "AuthVec":
        parts = list(parts)
        if parts[0].k is not None:
            return AuthVec(k=np.concatenate([p.k for p in parts]))
        return AuthVec(x=np.concatenate([p.x for p in parts]),
                       m=np.concatenate([p.m for p in parts]))


class Party:
    """Shared machinery; Prover and Verifier fill in the role-specific halves."""

    role = None

    def __init__(self, chan: Channel, tape, rng=None, hooks=None):
        self.chan = chan
        self.tape = tape
        self.rng = rng or secrets.SystemRandom()
        self.hooks = hooks or {}
        self.phase = "setup"
        self.quad = QuadCheck(self)
        self.used = 0        # tape entries consumed

    @property
    def is_prover(self):
        return self.role == PROVER

    # -- challenges --------------------------------------------------------

    def challenge(self, nbytes: int = 32) -> bytes:
        """Verifier samples a seed, prover echoes it back; both return it."""
        if self.is_prover:
            seed = self.chan.recv(Tag.CHAL)
            echo = self.hooks.get("echo", lambda s: s)(seed)
            self.chan.send(Tag.ECHO, echo)
            return seed
        seed = self.rng.getrandbits(8 * nbytes).to_bytes(nbytes, "little")
        self.chan.send(Tag.CHAL, seed)
        if self.chan.recv(Tag.ECHO) != seed:
            self.fail("challenge echo mismatch")
        return seed

    def fail(self, reason: str):
        """Verifier-side abort: notify the peer and raise."""
        self.chan.abort(self.phase, reason)
        raise ProtocolAbort(self.phase, reason)

    def checkpoint(self):
        if self.is_prover:
            self.chan.send(Tag.CHECKPOINT, self.chan.digest())
            return
        mine = self.chan.digest()
        theirs = self.chan.recv(Tag.CHECKPOINT)
        if theirs != mine:
            self.fail("transcript mismatch")

    def flush(self):
        self.quad.flush()


class Prover(Party):
    role = PROVER

    def commit(self, values: np.ndarray) -> AuthVec:
        values = np.ascontiguousarray(values, dtype=np.uint64)
        shape = values.shape[:-1]
        n = int(np.prod(shape, dtype=np.int64))
        r, m = self.tape.take(n)
        self.used += n
        delta = values.reshape(-1, 2) ^ r
        self.chan.send(Tag.COMMIT_DELTA, _bytes(delta))
        return AuthVec(x=values, m=m.reshape(shape + (2,)).copy())

    def const(self, values: np.ndarray) -> AuthVec:
        values = np.asarray(values, dtype=np.uint64)
        return AuthVec(x=values.copy(), m=np.zeros_like(values))

    def add_const(self, av: AuthVec, c) -> AuthVec:
        c = fv.scalar(c) if isinstance(c, int) else c
        return AuthVec(x=av.x ^ c, m=av.m)

    def open(self, av: AuthVec) -> np.ndarray:
        m = self.hooks.get("tag", lambda t: t)(av.m)
        self.chan.send(Tag.OPEN, _bytes(av.x) + _bytes(m))
        return av.x

    def check_zero(self, av: AuthVec, label: str = ""):
        """Claim every entry is zero: send a digest of the tags."""
        m = self.hooks.get("tag", lambda t: t)(av.m)
        self.chan.send(Tag.ZERO, hashlib.blake2b(_bytes(m), digest_size=32).digest())

    def check_equal_public(self, av: AuthVec, values, label: str = ""):
        self.check_zero(self.add_const(av, values), label)

    def random_mask(self):
        r, m = self.tape.take(1)
        self.used += 1
        return r[0], m[0]


class Verifier(Party):
    role = VERIFIER

    def __init__(self, chan, tape, rng=None, hooks=None):
        super().__init__(chan, tape, rng, hooks)
        self.delta = tape.delta
        self.delta_v = fv.scalar(tape.delta)

    def commit(self, shape) -> AuthVec:
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        n = int(np.prod(shape, dtype=np.int64))
        k = self.tape.take(n)
        self.used += n
        delta = _arr(self.chan.recv(Tag.COMMIT_DELTA), (n,))
        return AuthVec(k=(k ^ fv.vscale(delta, self.delta_v)).reshape(shape + (2,)))

    def const(self, values: np.ndarray) -> AuthVec:
        values = np.asarray(values, dtype=np.uint64)
        return AuthVec(k=fv.vscale(values.reshape(-1, 2), self.delta_v).reshape(values.shape))

    def add_const(self, av: AuthVec, c) -> AuthVec:
        c = fv.scalar(c) if isinstance(c, int) else np.asarray(c, dtype=np.uint64)
        shift = fv.vscale(c.reshape(-1, 2), self.delta_v).reshape(c.shape)
        return AuthVec(k=av.k ^ shift)

    def open(self, av: AuthVec) -> np.ndarray:
        shape = av.shape
        payload = self.chan.recv(Tag.OPEN)
        n = int(np.prod(shape, dtype=np.int64)) * 16
        if len(payload) != 2 * n:
            self.fail("malformed opening")
        x = _arr(payload[:n], shape)
        m = _arr(payload[n:], shape)
        expect = av.k ^ fv.vscale(x.reshape(-1, 2), self.delta_v).reshape(x.shape)
        if not np.array_equal(expect, m):
            self.fail("MAC check failed on opening")
        return x

    def check_zero(self, av: AuthVec, label: str = ""):
        got = self.chan.recv(Tag.ZERO)
        if hashlib.blake2b(_bytes(av.k), digest_size=32).digest() != got:
            self.fail(f"zero check failed{': ' + label if label else ''}")

    def check_equal_public(self, av: AuthVec, values, label: str = ""):
        self.check_zero(self.add_const(av, values), label)

    def random_mask(self):
        k = self.tape.take(1)
        self.used += 1
        return k[0]


class QuadCheck:
    """Batched degree-2 constraints  sum_t a_t * b_t + l = 0.

    Constraints are registered as arrays; at flush the verifier sends a seed,
    every constraint gets a weight chi, and one masked pair (U, V) settles
    them all: the verifier checks  sum chi * B + k_r == U + V * delta.
    """

    def __init__(self, party: Party):
        self.party = party
        self.entries = []
        self.count = 0
        self.flushes = 0

    def add(self, terms, l: AuthVec = None, seg: np.ndarray = None, n: int = None):
        """Register constraints.

        terms: list of (a, b) AuthVec pairs.  Without `seg`, each pair has one
        entry per constraint.  With `seg`, pair entries map to constraint
        seg[j] in 0..n-1 (used for long sums).  l: one entry per constraint.
        """
        if n is None:
            n = len(l) if l is not None else len(terms[0][0])
        self.entries.append((terms, l, seg, n))
        self.count += n

    def add_custom(self, block, n: int):
        """Register n constraints whose weighted sums `block` computes itself.

        block.prover_sums(chi) -> (A0, A1) and block.verifier_sums(chi) ->
        (B, L) where L still needs multiplying by delta.
        """
        self.entries.append((block, None, None, n))
        self.count += n

    def flush(self):
        p = self.party
        # runs even when empty, so each flush costs exactly one mask
        seed = p.challenge()
        chi = expand_challenge(seed, self.count, b"quad")
        off = 0
        if p.is_prover:
            a0 = np.zeros(2, np.uint64)
            a1 = np.zeros(2, np.uint64)
            for terms, l, seg, n in self.entries:
                w = chi[off:off + n]
                off += n
                if not isinstance(terms, list):
                    s0, s1 = terms.prover_sums(w)
                    a0 ^= s0
                    a1 ^= s1
                    continue
                for a, b in terms:
                    wa = w if seg is None else w[seg]
                    a0 ^= fv.wdot(wa, a.m, b.m)
                    a1 ^= fv.wdot(wa, a.x, b.m) ^ fv.wdot(wa, a.m, b.x)
                if l is not None:
                    a1 ^= fv.dot(w, l.m)
            r, mr = p.random_mask()
            u = a0 ^ mr
            v = a1 ^ r
            u, v = p.hooks.get("mulproof", lambda u, v: (u, v))(u, v)
            p.chan.send(Tag.MULPROOF, _bytes(u) + _bytes(v))
        else:
            b = np.zeros(2, np.uint64)
            lk = np.zeros(2, np.uint64)
            for terms, l, seg, n in self.entries:
                w = chi[off:off + n]
                off += n
                if not isinstance(terms, list):
                    s0, s1 = terms.verifier_sums(w)
                    b ^= s0
                    lk ^= s1
                    continue
                for a, bb in terms:
                    wa = w if seg is None else w[seg]
                    b ^= fv.wdot(wa, a.k, bb.k)
                if l is not None:
                    lk ^= fv.dot(w, l.k)
            kr = p.random_mask()
            b ^= fv.vmul(lk, p.delta_v) ^ kr
            payload = p.chan.recv(Tag.MULPROOF)
            if len(payload) != 32:
                p.fail("malformed product proof")
            u = _arr(payload[:16], ())
            v = _arr(payload[16:], ())
            if not np.array_equal(b, u ^ fv.vmul(v, p.delta_v)):
                p.fail("batched product check failed")
        self.entries = []
        self.count = 0
        self.flushes += 1


def make_party(role, chan, tape, rng=None, hooks=None) -> Party:
    return (Prover if role == PROVER else Verifier)(chan, tape, rng, hooks)


def mul_check(party: Party, x: AuthVec, y: AuthVec, z: AuthVec):
    """Register z = x * y (elementwise) on the phase's batched check."""
    party.quad.add([(x, y)], l=z)


def poly_eval(av: AuthVec, point) -> AuthVec:
    """Evaluate committed polynomials (..., W) at a public point: linear."""
    return av.map(lambda a: fv.horner(a.reshape(-1, a.shape[-2], 2), point)
                  .reshape(a.shape[:-2] + (2,)))


def poly_eval_grid(av: AuthVec, points: np.ndarray) -> AuthVec:
    """Every committed polynomial (n, W) at every public point (m,): (n, m)."""
    return av.map(lambda a: fv.horner_grid(a, points))


def pop_idt(party: Party, lhs, rhs, label: str = "PoPIdt"):
    """Product of committed polynomials on each side agree (one random point).

    lhs, rhs: lists of committed polynomials (AuthVec of shape (W,)).  The
    products are built with committed intermediates and batched checks.
    """
    seed = party.challenge()
    z = fv.to_ints(expand_challenge(seed, 1, b"popidt")[0])
    sides = []
    for polys in (lhs, rhs):
        evals = [poly_eval(p.reshape(1, p.shape[-1]), z) for p in polys]
        acc = evals[0]
        for e in evals[1:]:
            nxt = party.commit(fv.vmul(acc.x, e.x)) if party.is_prover else party.commit(1)
            mul_check(party, acc, e, nxt)
            acc = nxt
        sides.append(acc)
    party.check_zero(sides[0] ^ sides[1], label)
    party.flush()
