"""A compact CDCL solver that logs the resolution chain of every learned clause.

Watched literals, VSIDS activity with phase saving, Luby restarts and 1UIP
learning.  Literals assigned at decision level 0 are resolved out of learned
clauses with derived unit clauses, so every chain is a sequence of genuine
binary resolutions and the final conflict yields the empty clause.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .circuit import Circuit, truth_columns
from .cnf import CnfFormula, find_pivot, resolve
from .errors import ScaleError, SolverTimeout, StructureError, WitnessError
from .proof import RefutationProof, trim, validate_refutation


@dataclass
class Sat:
    assignment: dict        # var -> bool


@dataclass
class Unsat:
    proof: RefutationProof


def _luby(i: int) -> int:
    # 1 1 2 1 1 2 4 1 1 2 ...
    k = 1
    while (1 << k) - 1 < i + 1:
        k += 1
    while True:
        if i + 1 == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i + 1:
            k += 1


class _Solver:
    def __init__(self, f: CnfFormula, seed: int = 0):
        self.f = f
        self.nv = f.num_vars
        self.val = [-1] * (self.nv + 1)
        self.level = [0] * (self.nv + 1)
        self.reason = [-1] * (self.nv + 1)
        self.phase = [0] * (self.nv + 1)
        self.act = [0.0] * (self.nv + 1)
        self.inc = 1.0
        self.trail = []
        self.lim = []
        self.qhead = 0
        self.watches = [[] for _ in range(2 * self.nv + 2)]
        self.clauses = []       # internal literal lists (watch order mutates)
        self.node = []          # clause index -> proof node id
        # proof nodes: ids < n are inputs; others index into self.chains
        self.n = len(f.clauses)
        self.chains = []        # list of antecedent node-id lists
        self.unit_node = {}     # var -> node deriving its level-0 literal
        self.heap = [(-0.0, v) for v in range(1, self.nv + 1)]
        heapq.heapify(self.heap)
        self.seed = seed

    # literals: 2v for v, 2v+1 for -v
    @staticmethod
    def lit(l):
        return 2 * l if l > 0 else -2 * l + 1

    def value(self, p):
        v = self.val[p >> 1]
        return -1 if v < 0 else v ^ (p & 1)

    def assign(self, p, reason):
        v = p >> 1
        self.val[v] = 1 - (p & 1)
        self.level[v] = len(self.lim)
        self.reason[v] = reason
        self.trail.append(p)

    def add_clause(self, lits, node):
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.node.append(node)
        if len(lits) >= 2:
            self.watches[lits[0]].append(ci)
            self.watches[lits[1]].append(ci)
        return ci

    def propagate(self):
        clauses, watches = self.clauses, self.watches
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            fl = p ^ 1
            ws = watches[fl]
            i = j = 0
            while i < len(ws):
                ci = ws[i]
                c = clauses[ci]
                if c[0] == fl:
                    c[0], c[1] = c[1], fl
                i += 1
                if self.value(c[0]) == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if self.value(c[k]) != 0:
                        c[1], c[k] = c[k], c[1]
                        watches[c[1]].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if self.value(c[0]) == 0:
                        while i < len(ws):
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return ci
                    self.assign(c[0], ci)
            del ws[j:]
        return -1

    def bump(self, v):
        self.act[v] += self.inc
        if self.act[v] > 1e100:
            self.act = [a * 1e-100 for a in self.act]
            self.inc *= 1e-100
            self.heap = [(-self.act[u], u) for u in range(1, self.nv + 1) if self.val[u] < 0]
            heapq.heapify(self.heap)
        if self.val[v] < 0:
            heapq.heappush(self.heap, (-self.act[v], v))

    def derive_unit(self, v):
        """Proof node of the unit clause for v's level-0 literal (memoized)."""
        todo = [v]
        while todo:
            u = todo[-1]
            if u in self.unit_node:
                todo.pop()
                continue
            ci = self.reason[u]
            lits = self.clauses[ci]
            if len(lits) == 1:
                self.unit_node[u] = self.node[ci]
                todo.pop()
                continue
            others = [q >> 1 for q in lits if (q >> 1) != u]
            missing = [w for w in others if w not in self.unit_node]
            if missing:
                todo.extend(missing)
                continue
            self.chains.append([self.node[ci]] + [self.unit_node[w] for w in others])
            self.unit_node[u] = self.n + len(self.chains) - 1
            todo.pop()
        return self.unit_node[v]

    def analyze(self, confl):
        dl = len(self.lim)
        seen = set()
        chain = [self.node[confl]]
        out = []
        zero = []
        counter = 0
        c = self.clauses[confl]
        skip = -1
        idx = len(self.trail) - 1
        while True:
            for q in c:
                v = q >> 1
                if v == skip or v in seen:
                    continue
                seen.add(v)
                self.bump(v)
                if self.level[v] == dl:
                    counter += 1
                elif self.level[v] > 0:
                    out.append(q)
                else:
                    zero.append(v)
            while (self.trail[idx] >> 1) not in seen or self.level[self.trail[idx] >> 1] != dl:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            skip = p >> 1
            ci = self.reason[skip]
            chain.append(self.node[ci])
            c = self.clauses[ci]
        for v in zero:
            chain.append(self.derive_unit(v))
        learned = [p ^ 1] + out
        bt = 0
        if out:
            k = max(range(len(out)), key=lambda t: self.level[out[t] >> 1])
            out[0], out[k] = out[k], out[0]
            learned = [p ^ 1] + out
            bt = self.level[out[0] >> 1]
        self.inc *= 1.0 / 0.95
        if len(chain) == 1:
            return learned, bt, chain[0]
        self.chains.append(chain)
        return learned, bt, self.n + len(self.chains) - 1

    def backtrack(self, lvl):
        if len(self.lim) <= lvl:
            return
        start = self.lim[lvl]
        for p in self.trail[start:]:
            v = p >> 1
            self.phase[v] = self.val[v]
            self.val[v] = -1
            self.reason[v] = -1
            heapq.heappush(self.heap, (-self.act[v], v))
        del self.trail[start:]
        del self.lim[lvl:]
        self.qhead = len(self.trail)

    def decide(self):
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.val[v] < 0:
                self.lim.append(len(self.trail))
                self.assign(2 * v + (0 if self.phase[v] else 1), -1)
                return True
        return False

    def final_chain(self, confl):
        c = self.clauses[confl]
        self.chains.append([self.node[confl]] + [self.derive_unit(q >> 1) for q in c])
        return self.n + len(self.chains) - 1

    def run(self, budget):
        for i, c in enumerate(self.f.clauses):
            lits = [self.lit(l) for l in c]
            if not lits:
                return ("unsat", None, i)
            ci = self.add_clause(lits, i)
            if len(lits) == 1:
                s = self.value(lits[0])
                if s == 0:
                    v = lits[0] >> 1
                    self.chains.append([i, self.derive_unit(v)])
                    return ("unsat", None, self.n + len(self.chains) - 1)
                if s < 0:
                    self.assign(lits[0], ci)
        conflicts = 0
        restart_no = 0
        next_restart = 100 * _luby(0)
        while True:
            confl = self.propagate()
            if confl >= 0:
                conflicts += 1
                if conflicts > budget:
                    raise SolverTimeout(f"gave up after {budget} conflicts")
                if not self.lim:
                    return ("unsat", None, self.final_chain(confl))
                learned, bt, node = self.analyze(confl)
                self.backtrack(bt)
                ci = self.add_clause(learned, node)
                self.assign(learned[0], ci)
                if conflicts >= next_restart:
                    restart_no += 1
                    next_restart = conflicts + 100 * _luby(restart_no)
                    self.backtrack(0)
            elif not self.decide():
                return ("sat", {v: self.val[v] == 1 for v in range(1, self.nv + 1)}, None)

    def build_proof(self, final):
        """Expand the chains the final node depends on into binary steps."""
        n = self.n
        if final < n:
            raise StructureError("formula contains the empty clause")
        need = set()
        stack = [final]
        while stack:
            x = stack.pop()
            if x >= n and x not in need:
                need.add(x)
                stack.extend(self.chains[x - n])
        where = {}          # node -> proof clause index
        clause = {}
        for i in range(n):
            where[i] = i
            clause[i] = self.f.clauses[i]
        steps = []
        learned = set()
        for node in sorted(need):
            antes = self.chains[node - n]
            kl = where[antes[0]]
            cur = clause[antes[0]]
            for a in antes[1:]:
                other = clause[a]
                piv = find_pivot(cur, other)
                if piv is None:
                    raise StructureError("solver produced an invalid chain")
                cur = resolve(cur, other, piv)
                steps.append((kl, where[a], cur))
                kl = n + len(steps) - 1
            where[node] = kl
            clause[node] = cur
            learned.add(len(steps) - 1)
        return RefutationProof(n, steps, learned)


def solve(f: CnfFormula, budget: int = 200_000, seed: int = 0):
    """Sat(assignment) or Unsat(proof); both results are checked before return."""
    s = _Solver(f, seed)
    kind, model, final = s.run(budget)
    if kind == "sat":
        if not f.satisfied_by(model):
            raise StructureError("internal: model does not satisfy formula")
        return Sat(model)
    proof = trim(f, s.build_proof(final))
    verdict = validate_refutation(f, proof)
    if not verdict:
        raise StructureError(f"internal: proof rejected {verdict}")
    return Unsat(proof)


def find_assignment(f: CnfFormula, budget: int = 200_000) -> dict:
    res = solve(f, budget)
    if isinstance(res, Unsat):
        raise WitnessError("formula is unsatisfiable; no witness exists")
    return res.assignment


def tt_equiv(spec: Circuit, impl: Circuit) -> bool:
    """Exhaustive truth-table comparison with positional IO pairing."""
    return counterexample(spec, impl) is None


def counterexample(spec: Circuit, impl: Circuit):
    if len(spec.inputs) != len(impl.inputs) or len(spec.outputs) != len(impl.outputs):
        raise StructureError("IO shapes differ")
    n = len(spec.inputs)
    if n > 22:
        raise ScaleError(f"{n} inputs is too many for exhaustive comparison (max 22)")
    diff = 0
    for a, b in zip(truth_columns(spec), truth_columns(impl)):
        diff |= a ^ b
    if not diff:
        return None
    row = (diff & -diff).bit_length() - 1
    return {net: (row >> i) & 1 for i, net in enumerate(spec.inputs)}
