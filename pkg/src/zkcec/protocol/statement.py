"""What the verifier learns up front, and the dealer-tape budget it implies."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

PROTOCOL_VERSION = 1
CEC, BLUEPRINT = "cec", "blueprint"


@dataclass
class PublicStatement:
    mode: str
    n_sec: int                 # secret clause count
    n_pub: int                 # public clause count
    w: int                     # max clause width over inputs and resolvents
    R: int                     # resolution steps
    m: int                     # variables of the secret clauses (assignment size)
    compress: bool = False
    chains: list = None        # per-chain step counts, compressed mode only
    interface: list = None     # blueprint mode: interface variable names
    config_digest: str = ""
    version: int = PROTOCOL_VERSION

    @property
    def W(self) -> int:
        return self.w + 1

    @property
    def N(self) -> int:
        return self.n_sec + self.n_pub

    @property
    def chain_sizes(self) -> list:
        return list(self.chains) if self.compress else [1] * self.R

    @property
    def R_prime(self) -> int:
        return len(self.chain_sizes)

    def leakage(self) -> dict:
        out = {"n_sec": self.n_sec, "n_pub": self.n_pub, "w": self.w, "R": self.R,
               "m": self.m}
        if self.compress:
            out["R_prime"] = self.R_prime
            out["chains"] = list(self.chains)
        return out

    def to_json(self) -> bytes:
        return json.dumps(asdict(self), sort_keys=True).encode()

    @classmethod
    def from_json(cls, data: bytes) -> "PublicStatement":
        d = json.loads(data.decode())
        st = cls(**d)
        st.validate()
        return st

    def validate(self):
        ints = (self.n_sec, self.n_pub, self.w, self.R, self.m)
        if not all(isinstance(v, int) and v >= 0 for v in ints):
            raise ValueError("statement counts must be non-negative integers")
        if self.R < 1 or self.w < 0:
            raise ValueError("a refutation has at least one step")
        if self.compress:
            if not self.chains or any(not isinstance(c, int) or c < 1 for c in self.chains):
                raise ValueError("compressed statement needs positive chain sizes")
            if sum(self.chains) != self.R:
                raise ValueError("chain sizes do not add up to R")


def selector_count(st: PublicStatement) -> int:
    """One-hot selector entries: chain j reads n_j + 1 clauses over N + j cells."""
    N = st.N
    return sum((n + 1) * (N + j) for j, n in enumerate(st.chain_sizes))


def tape_breakdown(st: PublicStatement, n_p4_codes: int) -> dict:
    W, R = st.W, st.R
    T = R + st.R_prime
    return {
        "commit": st.N * W,
        "P2": R * W + T * W + 2 * R * W + R + selector_count(st) + 1,
        "P3": st.n_sec * max(st.m - 2, 0) + 1,
        "P4": st.n_sec * n_p4_codes + 1,
    }


def tape_size(st: PublicStatement, n_p4_codes: int) -> int:
    """Exact number of dealer entries an honest run consumes.

    commit   (n_sec + n_pub) W              clause coefficients
    P2       R W                            resolvents
             (R + R') W                     ROM read values
             2 R W + R                      witness clauses and pivots
             sum_j (n_j + 1)(N + j)         one-hot selectors
             1                              batch-check mask
    P3       n_sec max(m - 2, 0) + 1        product-chain intermediates
    P4       n_sec L4 + 1                   inverses, L4 = 2 |public non-interface vars|
    """
    return sum(tape_breakdown(st, n_p4_codes).values())
