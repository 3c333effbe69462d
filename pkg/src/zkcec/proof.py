"""Resolution refutations: validation, trace import, compression, counting.

Clause indices: 0..n-1 are the input clauses, n+i is the resolvent of step i.
In each step (kl, kr, res) the pivot literal p sits in clause kl and -p in kr.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

from .cnf import CnfFormula, find_pivot, make_clause, resolve, var
from .errors import DomainError, ScaleError, StructureError, TraceError

MAX_RESOLUTIONS = 1 << 23
MAX_INDEX = (1 << 24) - 1


@dataclass
class RefutationProof:
    num_inputs: int
    steps: list                      # (kl, kr, resolvent tuple)
    learned: set = field(default_factory=set)   # step indices ending a chain

    @property
    def R(self) -> int:
        return len(self.steps)

    def width(self, f: CnfFormula) -> int:
        return max([f.width] + [len(s[2]) for s in self.steps])

    def clause(self, f: CnfFormula, k: int):
        return f.clauses[k] if k < self.num_inputs else self.steps[k - self.num_inputs][2]

    def pivots(self, f: CnfFormula) -> list:
        return [find_pivot(self.clause(f, kl), self.clause(f, kr)) for kl, kr, _ in self.steps]


@dataclass
class Reject:
    step: int
    reason: str

    def __bool__(self):
        return False


class Accept:
    def __bool__(self):
        return True

    def __repr__(self):
        return "Accept()"


def validate_refutation(f: CnfFormula, p: RefutationProof):
    """Accept() iff every step resolves earlier clauses and the last is empty."""
    n = len(f.clauses)
    if p.num_inputs != n:
        return Reject(-1, f"proof is over {p.num_inputs} inputs, formula has {n}")
    if not p.steps:
        return Reject(-1, "empty proof")
    if len(p.steps) > MAX_RESOLUTIONS:
        return Reject(-1, "too many resolutions")
    avail = list(f.clauses)
    for i, (kl, kr, res) in enumerate(p.steps):
        if not (0 <= kl < len(avail) and 0 <= kr < len(avail)):
            return Reject(i, "antecedent-out-of-range")
        c0, c1 = avail[kl], avail[kr]
        piv = find_pivot(c0, c1)
        if piv is None:
            return Reject(i, "no-unique-pivot")
        try:
            res_c = make_clause(res)
        except StructureError:
            return Reject(i, "malformed-resolvent")
        if set(res_c) != set(resolve(c0, c1, piv)):
            return Reject(i, "not-a-resolvent")
        avail.append(res_c)
    if avail[-1]:
        return Reject(len(p.steps) - 1, "last-resolvent-not-empty")
    return Accept()


def trim(f: CnfFormula, p: RefutationProof) -> RefutationProof:
    """Drop steps the final empty clause does not depend on."""
    n = p.num_inputs
    need = [False] * len(p.steps)
    need[-1] = True
    for i in range(len(p.steps) - 1, -1, -1):
        if need[i]:
            for k in p.steps[i][:2]:
                if k >= n:
                    need[k - n] = True
    remap = {}
    steps = []
    learned = set()
    for i, (kl, kr, res) in enumerate(p.steps):
        if not need[i]:
            continue
        remap[n + i] = n + len(steps)
        if i in p.learned:
            learned.add(len(steps))
        steps.append((remap.get(kl, kl), remap.get(kr, kr), res))
    return RefutationProof(n, steps, learned)


# -- trace import ------------------------------------------------------------

def import_trace(text: str, f: CnfFormula) -> RefutationProof:
    """Parse `<id> <lit>* 0 <ante>* 0` lines; chains are folded left to right."""
    by_set = {}
    for i, c in enumerate(f.clauses):
        by_set.setdefault(frozenset(c), i)
    n = len(f.clauses)
    ref = {}          # trace id -> proof index
    clause_of = {}    # proof index -> clause
    steps = []
    learned = set()
    done = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(("c", "#")):
            continue
        try:
            nums = [int(t) for t in line.split()]
        except ValueError:
            raise TraceError(f"line {lineno}: non-integer token") from None
        if len(nums) < 3 or nums.count(0) < 2:
            raise TraceError(f"line {lineno}: expected '<id> <lit>* 0 <ante>* 0'")
        cid = nums[0]
        z = nums.index(0, 1)
        lits = nums[1:z]
        rest = nums[z + 1:]
        if rest[-1] != 0 or 0 in rest[:-1]:
            raise TraceError(f"line {lineno}: malformed antecedent list")
        antes = rest[:-1]
        if cid in ref:
            raise TraceError(f"line {lineno}: clause id {cid} defined twice")
        try:
            stated = make_clause(lits)
        except StructureError as e:
            raise TraceError(f"line {lineno}: {e}") from None
        if not antes:
            k = by_set.get(frozenset(stated))
            if k is None:
                raise TraceError(f"line {lineno}: input clause {stated} not in formula")
            ref[cid] = k
            clause_of[k] = f.clauses[k]
            continue
        for a in antes:
            if a not in ref:
                raise TraceError(f"line {lineno}: dangling antecedent {a}")
        if len(antes) == 1:
            # a copy step; alias the id
            if set(clause_of[ref[antes[0]]]) != set(stated):
                raise TraceError(f"line {lineno}: single antecedent differs from clause")
            ref[cid] = ref[antes[0]]
            continue
        cur_k = ref[antes[0]]
        cur = clause_of[cur_k]
        for a in antes[1:]:
            other = clause_of[ref[a]]
            piv = find_pivot(cur, other)
            if piv is None:
                raise TraceError(f"line {lineno}: chain not derivable at antecedent {a}")
            res = resolve(cur, other, piv)
            steps.append((cur_k, ref[a], res))
            cur_k = n + len(steps) - 1
            cur = res
            clause_of[cur_k] = res
        if set(cur) != set(stated):
            raise TraceError(f"line {lineno}: chain yields {cur}, line states {stated}")
        learned.add(len(steps) - 1)
        ref[cid] = cur_k
        if not stated:
            done = True
            break
    if not done:
        raise TraceError("trace never derives the empty clause")
    if len(steps) > MAX_RESOLUTIONS:
        raise ScaleError(f"{len(steps)} resolutions exceed the 2^23 cap")
    p = trim(f, RefutationProof(n, steps, learned))
    verdict = validate_refutation(f, p)
    if not verdict:
        raise TraceError(f"expanded proof rejected: {verdict}")
    return p


def export_trace(f: CnfFormula, p: RefutationProof) -> str:
    """Inverse of import_trace: inputs, then one chain line per stored clause."""
    lines = [" ".join(map(str, [i + 1, *c, 0, 0])) for i, c in enumerate(f.clauses)]
    n = p.num_inputs
    cp = compress(p)
    for j, chain in enumerate(cp.chains):
        antes = [chain[0][0] + 1]
        antes += [kr + 1 for _, kr, _ in chain]
        lines.append(" ".join(map(str, [n + j + 1, *chain[-1][2], 0, *antes, 0])))
    return "\n".join(lines) + "\n"


# -- binary interchange ------------------------------------------------------

MAGIC = b"ZKRP\x01"


def _u24(x: int) -> bytes:
    if not 0 <= x <= MAX_INDEX:
        raise ScaleError(f"{x} does not fit in 24 bits")
    return x.to_bytes(3, "little")


def dump_proof(p: RefutationProof) -> bytes:
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(_u24(p.num_inputs))
    out.write(_u24(p.R))
    for i, (kl, kr, res) in enumerate(p.steps):
        out.write(_u24(kl) + _u24(kr))
        out.write(bytes([len(res), 1 if i in p.learned else 0]))
        for l in res:
            out.write(_u24(2 * var(l) + (l < 0)))
    return out.getvalue()


def load_proof(data: bytes) -> RefutationProof:
    if not data.startswith(MAGIC):
        raise TraceError("not a proof file")
    pos = len(MAGIC)

    def take(k):
        nonlocal pos
        if pos + k > len(data):
            raise TraceError("truncated proof file")
        chunk = data[pos:pos + k]
        pos += k
        return chunk

    u24 = lambda: int.from_bytes(take(3), "little")
    n = u24()
    R = u24()
    steps = []
    learned = set()
    for i in range(R):
        kl, kr = u24(), u24()
        width, flag = take(2)
        lits = []
        for _ in range(width):
            code = u24()
            lits.append(-(code >> 1) if code & 1 else code >> 1)
        if flag:
            learned.add(i)
        steps.append((kl, kr, tuple(lits)))
    return RefutationProof(n, steps, learned)


# -- compression -------------------------------------------------------------

@dataclass
class CompressedProof:
    """Chains of resolution steps; only each chain's final resolvent is stored.

    Index space: inputs 0..n-1, stored resolvent j at n+j.  A chain step is
    (kl, kr, resolvent) with kl = EPHEMERAL meaning "previous intermediate".
    """
    num_inputs: int
    chains: list

    EPHEMERAL = -1

    @property
    def R_prime(self) -> int:
        return len(self.chains)

    @property
    def R(self) -> int:
        return sum(len(c) for c in self.chains)

    @property
    def n_res(self) -> list:
        return [len(c) for c in self.chains]

    def stored(self) -> list:
        return [c[-1][2] for c in self.chains]

    def expand(self) -> RefutationProof:
        """Flatten back into a plain binary proof (same order of steps)."""
        n = self.num_inputs
        steps = []
        learned = set()
        store_idx = {}
        for j, chain in enumerate(self.chains):
            for kl, kr, res in chain:
                kl = n + len(steps) - 1 if kl == self.EPHEMERAL else store_idx.get(kl, kl)
                kr = store_idx.get(kr, kr)
                steps.append((kl, kr, res))
            store_idx[n + j] = n + len(steps) - 1
            learned.add(len(steps) - 1)
        return RefutationProof(n, steps, learned)


def compress(p: RefutationProof) -> CompressedProof:
    """Merge every intermediate consumed once, by the very next step, into a chain.

    Resolvents flagged in p.learned always end a chain.  When the intermediate
    is the right antecedent of its consumer the step is mirrored, which swaps
    the pivot polarity but leaves the resolvent unchanged.
    """
    n = p.num_inputs
    uses = [0] * len(p.steps)
    for kl, kr, _ in p.steps:
        for k in (kl, kr):
            if k >= n:
                uses[k - n] += 1
    ephemeral = [False] * len(p.steps)
    for i in range(len(p.steps) - 1):
        if i in p.learned or uses[i] != 1:
            continue
        kl, kr, _ = p.steps[i + 1]
        if n + i in (kl, kr) and kl != kr:
            ephemeral[i] = True
    chains = []
    remap = {}
    cur = []
    for i, (kl, kr, res) in enumerate(p.steps):
        if i > 0 and ephemeral[i - 1]:
            if kr == n + i - 1:
                kl, kr = kr, kl
            kl = CompressedProof.EPHEMERAL
        else:
            kl = remap.get(kl, kl)
        kr = remap.get(kr, kr)
        if kl != CompressedProof.EPHEMERAL and kl >= n + len(chains) or kr >= n + len(chains):
            raise StructureError("reference to a non-stored resolvent")
        cur.append((kl, kr, res))
        if not ephemeral[i]:
            remap[n + i] = n + len(chains)
            chains.append(cur)
            cur = []
    return CompressedProof(n, chains)


def count_structures(n_res: Sequence[int]) -> int:
    """Lower-bound count of proof structures consistent with per-chain sizes."""
    if not n_res:
        raise DomainError("need at least one chain")
    if any(int(x) < 1 for x in n_res):
        raise DomainError("chain sizes must be >= 1")
    Rp = len(n_res)
    nj = []
    for j, x in enumerate(n_res, 1):
        if x == 1:
            nj.append(1)
        elif j != Rp:
            nj.append(x - 1)
        else:
            nj.append(x)
    total = 1
    suffix = 0
    # N = prod_{i=1}^{R'-1} sum_{j=i+1}^{R'} n_j, built from the right
    sums = []
    for j in range(Rp - 1, 0, -1):
        suffix += nj[j]
        sums.append(suffix)
    for s in sums:
        total *= s
    return total


def factorial_bound(n_chains: int) -> int:
    return math.factorial(max(n_chains - 1, 0))


def parse_chain_sizes(text: str) -> list:
    return [int(t) for t in text.replace(",", " ").split()]
