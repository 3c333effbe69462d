"""Dishonest provers for the soundness battery.

A Cheat is consulted by the prover at fixed points of the run; every method
defaults to honest behaviour.  The verifier never sees a Cheat.
"""

from __future__ import annotations

import numpy as np

from ..backend.channel import TamperChannel
from ..cnf import CnfFormula, var
from ..encoding import encode_literal
from ..errors import NotEquivalent
from ..proof import RefutationProof, validate_refutation
from ..sat import Sat, find_assignment, solve


class Cheat:
    name = "honest"
    phase = None                   # where the verifier is expected to abort
    hooks = None                   # backend hooks: "tag", "mulproof", "echo"

    def secret_clauses(self, inst, sec):
        return sec

    def refute(self, f: CnfFormula, inst):
        """Called when the formula is satisfiable; an honest prover gives up.

        A cheater returns (g, proof): a refutation of some formula g whose
        first len(f) clauses are f, read through address().
        """
        raise NotEquivalent()

    def address(self, k: int) -> int:
        """ROM address the prover reads for input clause k of the proof."""
        return k

    def find_assignment(self, sec: CnfFormula):
        return find_assignment(sec)

    def proof(self, f, proof):
        return proof

    def public_clauses(self, pub):
        return pub

    def index_map(self, entries):
        return entries

    def codes(self, codes, wit):
        return codes

    def inverses(self, inv):
        return inv

    def wrap_channel(self, chan):
        return chan


class DropPublicLiteral(Cheat):
    name, phase = "drop-public-literal", "P1"

    def __init__(self, clause=0):
        self.clause = clause

    def public_clauses(self, pub):
        pub = list(pub)
        i = next(k for k in range(self.clause, len(pub)) if len(pub[k]) > 1)
        pub[i] = pub[i][1:]
        return pub


class DropPublicClause(Cheat):
    """Omit the unit clause asserting the miter output."""
    name, phase = "drop-public-clause", "P1"

    def public_clauses(self, pub):
        return list(pub[:-1]) + [pub[0]]   # keep the count, lose the content


class OversizedIndex(Cheat):
    name, phase = "index-out-of-range", "P1"

    def index_map(self, entries):
        entries = [list(e) for e in entries]
        entries[-1][1] = 1 << 64
        return entries


class ForgedResolvent(Cheat):
    """Replace one step's resolvent by a strictly stronger clause."""
    name, phase = "forged-resolvent", "P2"

    def proof(self, f, p):
        steps = list(p.steps)
        for i, (kl, kr, res) in enumerate(steps):
            if len(res) >= 1:
                steps[i] = (kl, kr, res[1:])
                break
        forged = RefutationProof(p.num_inputs, steps, set(p.learned))
        assert not validate_refutation(f, forged)
        return forged


class ForwardReference(Cheat):
    """Read a step's right antecedent from a cell that is derived later."""
    name, phase = "forward-reference", "P2"

    def proof(self, f, p):
        n = p.num_inputs
        steps = list(p.steps)
        kl, kr, res = steps[0]
        if len(steps) < 2:
            raise ValueError("need at least two steps for a forward reference")
        steps[0] = (kl, n + len(steps) - 1, res)
        forged = RefutationProof(p.num_inputs, steps, set(p.learned))
        assert validate_refutation(f, forged).reason == "antecedent-out-of-range"
        return forged


class WrongRomValue(Cheat):
    """Refute a satisfiable miter by pretending a helpful unit clause is in memory.

    The prover refutes the formula plus one extra unit clause, and serves that
    clause from the address of a real input clause.
    """
    name, phase = "wrong-rom-value", "P2"

    def refute(self, f, inst):
        self.extra = len(f.clauses)
        for v in sorted(f.variables()):
            for lit in (v, -v):
                g = CnfFormula(f.clauses + [(lit,)], f.num_vars)
                res = solve(g)
                if isinstance(res, Sat):
                    continue
                if any(self.extra in s[:2] for s in res.proof.steps):
                    return g, res.proof
        raise NotEquivalent()

    def address(self, k):
        return 0 if k == self.extra else k


class ContradictorySecret(Cheat):
    """Secret clauses (x)(-x); the prover claims both polarities of x."""
    name, phase = "contradictory-secret", "P3"

    def secret_clauses(self, inst, sec):
        public = set(inst.names.values())
        lits = [l for c in sec for l in c]
        self.v = next((var(l) for l in lits if var(l) not in public), var(lits[0]))
        return list(sec) + [(self.v,), (-self.v,)]

    def find_assignment(self, sec):
        honest = CnfFormula([c for c in sec.clauses if len(c) > 1], sec.num_vars)
        return find_assignment(honest)

    def codes(self, codes, wit):
        # swap some other variable's code for the missing polarity of x
        pos = encode_literal(wit.ctx, self.v)
        neg = encode_literal(wit.ctx, -self.v)
        have = pos if pos in codes else neg
        other = next(c for c in codes if c != have)
        out = [c for c in codes if c != other] + [pos ^ neg ^ have]
        return sorted(out)


class BadAssignment(Cheat):
    """Flip one variable so that some secret clause is left unsatisfied."""
    name, phase = "bad-assignment", "P3"

    def find_assignment(self, sec):
        omega = dict(find_assignment(sec))
        for v in sorted(sec.variables()):
            omega[v] = not omega[v]
            if not sec.satisfied_by(omega):
                return omega
            omega[v] = not omega[v]
        raise ValueError("no single flip breaks the assignment")


class SmuggledLiteral(Cheat):
    """Add a secret clause that mentions an internal spec variable."""
    name, phase = "smuggled-literal", "P4"

    def secret_clauses(self, inst, sec):
        hidden = sorted(v for v in inst.names.values() if v not in inst.io)
        if not hidden:
            raise ValueError("spec has no internal variables to smuggle")
        return list(sec) + [(hidden[0], sec[0][0])]


class TamperedTag(Cheat):
    name, phase = "tampered-tag", "P1"

    def __init__(self):
        self.hooks = {"tag": _flip_first}


def _flip_first(m):
    m = np.array(m, copy=True)
    m.reshape(-1, 2)[0, 0] ^= np.uint64(1)
    return m


class TamperedWire(Cheat):
    """Flip one byte of the n-th prover frame in flight; any phase may catch it."""
    name = "tampered-wire"

    def __init__(self, frame_no=3, byte_no=0, mask=1):
        self.frame_no, self.byte_no, self.mask = frame_no, byte_no, mask

    def wrap_channel(self, chan):
        return TamperChannel(chan, self.frame_no, self.byte_no, self.mask)
