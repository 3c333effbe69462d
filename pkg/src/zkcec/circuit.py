"""Gate-level netlists, Tseitin encoding and miter construction.

Netlist text format, one statement per line::

    # comment
    input a
    output c
    gate AND c a b

Gates may appear in any order; they are stored topologically sorted (stable
with respect to file order).
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field

from .cnf import CnfFormula, normalize
from .errors import ParseError, StructureError

ARITY = {"AND": 2, "OR": 2, "XOR": 2, "NAND": 2, "NOR": 2, "XNOR": 2,
         "NOT": 1, "BUF": 1}
NET_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Gate:
    kind: str
    out: str
    ins: tuple


@dataclass
class Circuit:
    name: str
    inputs: list
    outputs: list
    gates: list

    def eval(self, bits: dict) -> dict:
        """Evaluate on a {net: 0/1} (or bit-parallel int) input assignment."""
        return _evaluate(self, dict(bits), mask=1)

    def simulate(self, values: list) -> list:
        v = _evaluate(self, dict(zip(self.inputs, values)), mask=1)
        return [v[o] for o in self.outputs]

    def internal_nets(self) -> list:
        return [g.out for g in self.gates]


def _gate_fn(kind, a, b, mask):
    if kind == "AND":
        return a & b
    if kind == "OR":
        return a | b
    if kind == "XOR":
        return a ^ b
    if kind == "NAND":
        return (a & b) ^ mask
    if kind == "NOR":
        return (a | b) ^ mask
    if kind == "XNOR":
        return a ^ b ^ mask
    if kind == "NOT":
        return a ^ mask
    return a  # BUF


def _evaluate(c: Circuit, values: dict, mask: int) -> dict:
    for g in c.gates:
        a = values[g.ins[0]]
        b = values[g.ins[1]] if len(g.ins) > 1 else 0
        values[g.out] = _gate_fn(g.kind, a, b, mask)
    return values


def truth_columns(c: Circuit):
    """Bit-parallel truth table: one 2^n-bit int per output.

    Input i toggles with period 2^(i+1), so row r of the table is the input
    vector whose bit i is input i.
    """
    n = len(c.inputs)
    rows = 1 << n
    mask = (1 << rows) - 1
    cols = {}
    for i, net in enumerate(c.inputs):
        block = ((1 << (1 << i)) - 1) << (1 << i)  # 0..01..1 pattern of period 2^(i+1)
        period = 1 << (i + 1)
        pat = block
        span = period
        while span < rows:
            pat |= pat << span
            span <<= 1
        cols[net] = pat & mask
    vals = _evaluate(c, cols, mask)
    return [vals[o] for o in c.outputs]


# -- parsing -----------------------------------------------------------------

def parse_netlist(text: str, name: str = "circuit") -> Circuit:
    inputs, outputs, gates = [], [], []
    driver = {}       # net -> (line, col) of its definition
    out_pos = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = []
        for m in re.finditer(r"\S+", line):
            toks.append((m.group(), m.start() + 1))
        if not toks:
            continue
        word, col = toks[0]
        for tok, tcol in toks[1:]:
            if word != "gate" or tcol != toks[1][1]:
                if not NET_RE.match(tok):
                    raise ParseError("syntax", f"bad net name {tok!r}", lineno, tcol)
        if word == "input":
            if len(toks) != 2:
                raise ParseError("syntax", "expected 'input <net>'", lineno, col)
            net, ncol = toks[1]
            if net in driver:
                raise ParseError("multiply-driven", f"net {net!r} already driven",
                                 lineno, ncol)
            driver[net] = (lineno, ncol)
            inputs.append(net)
        elif word == "output":
            if len(toks) != 2:
                raise ParseError("syntax", "expected 'output <net>'", lineno, col)
            out_pos[len(outputs)] = (lineno, toks[1][1])
            outputs.append(toks[1][0])
        elif word == "gate":
            if len(toks) < 3:
                raise ParseError("syntax", "expected 'gate <KIND> <out> <in>...'",
                                 lineno, col)
            kind, kcol = toks[1]
            if kind.upper() not in ARITY:
                raise ParseError("unknown-kind", f"unknown gate kind {kind!r}", lineno, kcol)
            kind = kind.upper()
            out, ocol = toks[2]
            ins = tuple(t for t, _ in toks[3:])
            if len(ins) != ARITY[kind]:
                raise ParseError("arity", f"{kind} takes {ARITY[kind]} inputs, got {len(ins)}",
                                 lineno, kcol)
            if out in driver:
                raise ParseError("multiply-driven", f"net {out!r} already driven",
                                 lineno, ocol)
            driver[out] = (lineno, ocol)
            gates.append((Gate(kind, out, ins), lineno, toks[3][1]))
        else:
            raise ParseError("syntax", f"unknown statement {word!r}", lineno, col)

    for g, lineno, col in gates:
        for net in g.ins:
            if net not in driver:
                raise ParseError("undriven", f"net {net!r} is never driven", lineno, col)
    for k, net in enumerate(outputs):
        if net not in driver:
            raise ParseError("undriven", f"output {net!r} is never driven", *out_pos[k])
    if not outputs:
        raise ParseError("structure", "circuit has no outputs")

    ordered = _topo_sort(gates, set(inputs))
    return Circuit(name, inputs, outputs, ordered)


def _topo_sort(gates, inputs):
    # Kahn's algorithm, always emitting the earliest ready gate in file order
    producer = {g.out: i for i, (g, _, _) in enumerate(gates)}
    missing = [0] * len(gates)
    users = {}
    for i, (g, _, _) in enumerate(gates):
        for net in g.ins:
            if net in producer:
                missing[i] += 1
                users.setdefault(net, []).append(i)
    heap = [i for i, k in enumerate(missing) if k == 0]
    heapq.heapify(heap)
    ordered = []
    while heap:
        i = heapq.heappop(heap)
        g = gates[i][0]
        ordered.append(g)
        for u in users.get(g.out, ()):
            missing[u] -= 1
            if missing[u] == 0:
                heapq.heappush(heap, u)
    if len(ordered) < len(gates):
        g, lineno, col = next(item for i, item in enumerate(gates) if missing[i])
        raise ParseError("loop", f"combinational loop through {g.out!r}", lineno, col)
    return ordered


def load_netlist(path) -> Circuit:
    from pathlib import Path
    p = Path(path)
    return parse_netlist(p.read_text(encoding="utf-8"), name=p.stem)


def write_netlist(c: Circuit) -> str:
    lines = [f"# {c.name}"]
    lines += [f"input {n}" for n in c.inputs]
    lines += [f"output {n}" for n in c.outputs]
    lines += [f"gate {g.kind} {g.out} {' '.join(g.ins)}" for g in c.gates]
    return "\n".join(lines) + "\n"


# -- Tseitin -----------------------------------------------------------------

# templates over (a, b, c) as signed positions 1, 2, 3
TEMPLATES = {
    "AND":  [(1, -3), (2, -3), (-1, -2, 3)],
    "OR":   [(-1, 3), (-2, 3), (1, 2, -3)],
    "NAND": [(1, 3), (2, 3), (-1, -2, -3)],
    "NOR":  [(-1, -3), (-2, -3), (1, 2, 3)],
    "XOR":  [(-1, -2, -3), (1, 2, -3), (1, -2, 3), (-1, 2, 3)],
    "XNOR": [(-1, -2, 3), (1, 2, 3), (1, -2, -3), (-1, 2, -3)],
    "NOT":  [(1, 3), (-1, -3)],
    "BUF":  [(-1, 3), (1, -3)],
}


def gate_clauses(kind: str, a: int, b: int, c: int) -> list:
    """Instantiate the template; repeated inputs are normalized away."""
    slot = {1: a, 2: b, 3: c}
    out = []
    for tpl in TEMPLATES[kind]:
        cl = normalize(slot[abs(p)] if p > 0 else -slot[abs(p)] for p in tpl)
        if cl is not None:
            out.append(cl)
    return out


class VarAlloc:
    """Hands out variable ids 1, 2, ... and remembers their names."""

    def __init__(self):
        self.names = [None]
        self.ids = {}

    def new(self, name: str) -> int:
        if name in self.ids:
            raise StructureError(f"variable {name!r} allocated twice")
        self.ids[name] = len(self.names)
        self.names.append(name)
        return self.ids[name]

    def __len__(self):
        return len(self.names) - 1


def tseitin(c: Circuit, var_of: dict, alloc: VarAlloc = None, prefix: str = "") -> CnfFormula:
    """Clauses for every gate in order; nets missing from var_of get fresh vars."""
    clauses = []
    for g in c.gates:
        if g.out not in var_of:
            if alloc is None:
                raise StructureError(f"no variable for net {g.out!r}")
            var_of[g.out] = alloc.new(prefix + g.out)
        a = var_of[g.ins[0]]
        b = var_of[g.ins[1]] if len(g.ins) > 1 else 0
        clauses += gate_clauses(g.kind, a, b, var_of[g.out])
    return CnfFormula(clauses, len(alloc) if alloc else 0)


# -- miter -------------------------------------------------------------------

@dataclass
class MiterBundle:
    phi_pub: CnfFormula
    phi_sec: CnfFormula
    vars_io: set
    vars_sec: set
    out_var: int
    names: list                  # names[v] for v >= 1
    num_pub_vars: int            # public variables are 1..num_pub_vars
    counterexample_vars: list = field(default_factory=list)  # input var ids

    @property
    def formula(self) -> CnfFormula:
        """Full miter CNF in commitment order: secret clauses first."""
        return CnfFormula(self.phi_sec.clauses + self.phi_pub.clauses,
                          len(self.names) - 1)

    @property
    def vars_pub(self) -> set:
        return set(range(1, self.num_pub_vars + 1))

    def public_names(self) -> list:
        return [(self.names[v], v) for v in range(1, self.num_pub_vars + 1)]


def public_part(spec: Circuit):
    """Everything the verifier can rebuild from the spec alone.

    Returns (phi_pub, alloc, spec_var, io_vars, out_var).  Variable order:
    inputs, spec internals, impl output slots o:k, comparators x:k, OR nodes r:k.
    """
    alloc = VarAlloc()
    spec_var = {}
    for net in spec.inputs:
        spec_var[net] = alloc.new("i:" + net)
    input_vars = [spec_var[n] for n in spec.inputs]
    for g in spec.gates:
        spec_var[g.out] = alloc.new("s:" + g.out)
    clauses = tseitin(spec, spec_var).clauses
    m = len(spec.outputs)
    slots = [alloc.new(f"o:{k}") for k in range(m)]
    cmp_vars = [alloc.new(f"x:{k}") for k in range(m)]
    for k in range(m):
        clauses += gate_clauses("XOR", spec_var[spec.outputs[k]], slots[k], cmp_vars[k])
    acc = cmp_vars[0]
    for k in range(1, m):
        node = alloc.new(f"r:{k}")
        clauses += gate_clauses("OR", acc, cmp_vars[k], node)
        acc = node
    clauses.append((acc,))
    phi_pub = CnfFormula(clauses, len(alloc))
    return phi_pub, alloc, spec_var, set(input_vars) | set(slots), acc


def build_miter(spec: Circuit, impl: Circuit) -> MiterBundle:
    if len(spec.inputs) != len(impl.inputs):
        raise StructureError(f"input count mismatch: {len(spec.inputs)} vs {len(impl.inputs)}")
    if len(spec.outputs) != len(impl.outputs):
        raise StructureError(f"output count mismatch: {len(spec.outputs)} vs {len(impl.outputs)}")
    phi_pub, alloc, spec_var, io, out_var = public_part(spec)
    n_pub = len(alloc)

    impl_var = {net: spec_var[s] for net, s in zip(impl.inputs, spec.inputs)}
    m = len(impl.outputs)
    slot_ids = [alloc.ids[f"o:{k}"] for k in range(m)]
    # an impl output driven by a gate takes over its slot variable directly,
    # unless that net already feeds an earlier slot
    claimed = {}
    gate_outs = {g.out for g in impl.gates}
    for k, net in enumerate(impl.outputs):
        if net in gate_outs and net not in claimed:
            claimed[net] = k
            impl_var[net] = slot_ids[k]
    sec = tseitin(impl, impl_var, alloc, prefix="h:").clauses
    for k, net in enumerate(impl.outputs):
        if claimed.get(net) != k:
            sec += gate_clauses("BUF", impl_var[net], 0, slot_ids[k])
    phi_sec = CnfFormula(sec, len(alloc))

    bundle = MiterBundle(
        phi_pub=phi_pub, phi_sec=phi_sec, vars_io=io,
        vars_sec=set(range(n_pub + 1, len(alloc) + 1)),
        out_var=out_var, names=alloc.names, num_pub_vars=n_pub,
        counterexample_vars=[spec_var[n] for n in spec.inputs])
    shared = phi_pub.variables() & phi_sec.variables()
    if not shared <= io:
        raise StructureError("secret clauses touch non-interface public variables")
    return bundle
