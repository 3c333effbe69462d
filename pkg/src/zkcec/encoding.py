"""Literal codes and clause polynomials.

A public literal's code is its index; a secret literal's code is a keyed
hash of its index, truncated to 120 bits.  Negation XORs the code with
const_lit = 2^64 in both cases.  A clause encodes as prod (x + code(l)),
zero-padded to a fixed width.
"""

from __future__ import annotations

import hashlib
import secrets
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import fieldvec as fv
from .cnf import var
from .errors import CollisionError, ScaleError, WidthError
from .field import poly_from_roots

W_LIT = 64
CONST_LIT = 1 << W_LIT
HASH_BITS = 120
HASH_ID = "blake2b-keyed/120"
MAX_RESAMPLE = 16

PUBLIC, IO, SECRET = "public", "io", "secret"


def blake2_prf(key: bytes, index: int) -> int:
    h = hashlib.blake2b(index.to_bytes(16, "little"), key=key, digest_size=16)
    return int.from_bytes(h.digest(), "little") & ((1 << HASH_BITS) - 1)


@dataclass
class EncodingContext:
    idx: dict                       # var -> index (1-based)
    cls: dict                       # var -> PUBLIC / IO / SECRET
    key: Optional[bytes] = None
    hash_fn: Callable = blake2_prf
    w_lit: int = W_LIT
    attempts: int = 0
    codes: dict = field(default_factory=dict, repr=False)   # var -> positive code

    @property
    def const_lit(self) -> int:
        return 1 << self.w_lit

    def secret_vars(self):
        return [v for v, c in self.cls.items() if c == SECRET]

    def public_vars(self):
        return [v for v, c in self.cls.items() if c != SECRET]


def assign_indices(bundle) -> dict:
    """name -> index, in the canonical variable order (index = variable id)."""
    names = bundle.names
    if len(names) - 1 >= 1 << W_LIT:
        raise ScaleError("too many variables for 64-bit indices")
    return {names[v]: v for v in range(1, len(names))}


def context_for(bundle, key=None) -> EncodingContext:
    cls = {}
    for v in range(1, len(bundle.names)):
        if v in bundle.vars_sec:
            cls[v] = SECRET
        elif v in bundle.vars_io:
            cls[v] = IO
        else:
            cls[v] = PUBLIC
    ctx = EncodingContext(idx={v: v for v in cls}, cls=cls, key=key)
    if key is not None:
        _fill_codes(ctx)
    return ctx


def public_context(idx: dict, cls: dict) -> EncodingContext:
    """Verifier-side context: public indices only, no key."""
    ctx = EncodingContext(idx=dict(idx), cls=dict(cls))
    for v, i in ctx.idx.items():
        if not 0 < i < 1 << ctx.w_lit:
            raise ScaleError(f"index {i} out of range")
        ctx.codes[v] = i
    return ctx


def _fill_codes(ctx):
    ctx.codes = {}
    for v, i in ctx.idx.items():
        if ctx.cls[v] == SECRET:
            ctx.codes[v] = ctx.hash_fn(ctx.key, i)
        else:
            if not 0 < i < 1 << ctx.w_lit:
                raise ScaleError(f"public index {i} not below 2^{ctx.w_lit}")
            ctx.codes[v] = i


def encode_literal(ctx: EncodingContext, lit: int) -> int:
    v = var(lit)
    code = ctx.codes.get(v)
    if code is None:
        i = ctx.idx[v]
        code = ctx.hash_fn(ctx.key, i) if ctx.cls[v] == SECRET else i
    return code ^ ctx.const_lit if lit < 0 else code


def _collision_free(ctx) -> bool:
    seen = set()
    for code in ctx.codes.values():
        for c in (code, code ^ ctx.const_lit):
            if c in seen:
                return False
            seen.add(c)
    return True


def setup_key(ctx: EncodingContext, rng=None, max_tries: int = MAX_RESAMPLE) -> EncodingContext:
    """Sample a hash key, resampling until every literal code is distinct."""
    draw = (lambda: rng.randbytes(32)) if rng is not None else (lambda: secrets.token_bytes(32))
    for attempt in range(1, max_tries + 1):
        out = replace(ctx, key=draw(), attempts=attempt, codes={})
        _fill_codes(out)
        if _collision_free(out):
            return out
    raise CollisionError(f"literal codes collided {max_tries} times in a row")


def encode_clause(ctx: EncodingContext, clause, w: int) -> list:
    if len(clause) > w:
        raise WidthError(f"clause of {len(clause)} literals exceeds width {w}")
    return poly_from_roots([encode_literal(ctx, l) for l in clause], w)


def encode_clauses(ctx: EncodingContext, clauses, w: int) -> np.ndarray:
    """Vectorized encode_clause: (len(clauses), w+1, 2) uint64."""
    n = len(clauses)
    roots = np.zeros((n, max(w, 1), 2), dtype=np.uint64)
    counts = np.zeros(n, dtype=np.int64)
    M = (1 << 64) - 1
    for i, c in enumerate(clauses):
        if len(c) > w:
            raise WidthError(f"clause {i} has {len(c)} literals, width is {w}")
        counts[i] = len(c)
        for j, l in enumerate(c):
            code = encode_literal(ctx, l)
            roots[i, j, 0] = code & M
            roots[i, j, 1] = code >> 64
    return fv.from_roots(roots, counts, w)


def literal_codes(ctx: EncodingContext, lits) -> np.ndarray:
    return fv.to_vec([encode_literal(ctx, l) for l in lits])
