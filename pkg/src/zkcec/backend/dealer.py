"""Trusted-dealer VOLE correlations.

The prover's tape holds pairs (r, m_r); the verifier's holds a global key
delta and k_r, with m_r = k_r + r * delta for every entry.  Entries are used
strictly in order, each at most once.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import fieldvec as fv
from ..errors import TapeExhausted, TraceError

MAGIC = b"ZKTP"
VERSION = 1
ROLE_PROVER, ROLE_VERIFIER = 0, 1
_HEADER = struct.Struct("<4sBBQ")


def _stream(seed: bytes, label: bytes, count: int) -> np.ndarray:
    raw = hashlib.shake_256(b"zkcec-dealer|" + label + b"|" + seed).digest(16 * count)
    return np.frombuffer(raw, dtype="<u8").reshape(count, 2).astype(np.uint64)


def _seed_bytes(seed) -> bytes:
    if isinstance(seed, bytes):
        return seed
    return str(seed).encode()


def draw_delta(seed) -> int:
    s = _seed_bytes(seed)
    ctr = 0
    while True:
        d = int.from_bytes(hashlib.shake_256(b"zkcec-delta|%d|" % ctr + s).digest(16), "little")
        if d:
            return d
        ctr += 1


class _Cursor:
    count: int
    pos: int = 0

    def remaining(self) -> int:
        return self.count - self.pos

    def _advance(self, n: int) -> slice:
        if self.pos + n > self.count:
            raise TapeExhausted(f"need {n} entries at {self.pos}, tape holds {self.count}")
        sl = slice(self.pos, self.pos + n)
        self.pos += n
        return sl


class ProverTape(_Cursor):
    def __init__(self, r: np.ndarray, m: np.ndarray):
        self.r, self.m = r, m
        self.count = len(r)
        self.pos = 0

    def take(self, n: int):
        sl = self._advance(n)
        return self.r[sl], self.m[sl]


class VerifierTape(_Cursor):
    def __init__(self, delta: int, k: np.ndarray):
        self.delta = delta
        self.k = k
        self.count = len(k)
        self.pos = 0

    def take(self, n: int):
        return self.k[self._advance(n)]


def dealer_gen(seed, count: int):
    """Deterministic (prover tape, verifier tape) with `count` entries."""
    if count <= 0:
        raise ValueError("tape needs at least one entry")
    s = _seed_bytes(seed)
    delta = draw_delta(s)
    r = _stream(s, b"r", count)
    k = _stream(s, b"k", count)
    m = fv.vscale(r, delta) ^ k
    return ProverTape(r, m), VerifierTape(delta, k)


def write_tape(path, tape) -> None:
    if isinstance(tape, ProverTape):
        body = [tape.r, tape.m]
        role = ROLE_PROVER
    else:
        body = [fv.scalar(tape.delta).reshape(1, 2), tape.k]
        role = ROLE_VERIFIER
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, role, tape.count))
        for arr in body:
            fh.write(np.ascontiguousarray(arr, dtype="<u8").tobytes())


def read_tape(path):
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise TraceError("tape file too short")
    magic, version, role, count = _HEADER.unpack_from(data)
    if magic != MAGIC or version != VERSION:
        raise TraceError("not a dealer tape (bad magic or version)")
    body = np.frombuffer(data, dtype="<u8", offset=_HEADER.size).astype(np.uint64)
    if role == ROLE_PROVER:
        if body.size != 4 * count:
            raise TraceError("tape file length does not match its header")
        r = body[: 2 * count].reshape(count, 2)
        m = body[2 * count:].reshape(count, 2)
        return ProverTape(r, m)
    if body.size != 2 * count + 2:
        raise TraceError("tape file length does not match its header")
    delta = fv.to_ints(body[:2])
    return VerifierTape(delta, body[2:].reshape(count, 2))


def seeded_tape(seed, role: int):
    """count -> this role's tape, drawn from the seeded dealer (an in-process dealer)."""
    def make(count):
        pt, vt = dealer_gen(seed, max(count, 1))
        return pt if role == ROLE_PROVER else vt
    return make
