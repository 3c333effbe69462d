"""CNF layer: literals are nonzero signed ints (DIMACS convention).

A clause is a tuple of literals with no duplicates and no complementary pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ParseError, StructureError

Clause = tuple


def var(lit: int) -> int:
    return lit if lit > 0 else -lit


def make_clause(lits: Iterable[int]) -> Clause:
    """Validate and freeze a clause; duplicates or tautologies raise."""
    out = tuple(int(l) for l in lits)
    seen = set()
    for l in out:
        if l == 0:
            raise StructureError("literal 0 is not allowed")
        if l in seen:
            raise StructureError(f"duplicate literal {l} in clause {out}")
        if -l in seen:
            raise StructureError(f"tautological clause {out}")
        seen.add(l)
    return out


def normalize(lits: Iterable[int]):
    """Drop repeated literals, keep first-occurrence order. None if tautology."""
    out = []
    seen = set()
    for l in lits:
        if -l in seen:
            return None
        if l not in seen:
            seen.add(l)
            out.append(l)
    return tuple(out)


def resolve(c0: Sequence[int], c1: Sequence[int], pivot: int) -> Clause:
    """Resolvent of c0 (containing +pivot) and c1 (containing -pivot).

    Literal order: c0's remaining literals, then c1's new ones.
    """
    out = [l for l in c0 if l != pivot]
    have = set(out)
    for l in c1:
        if l != -pivot and l not in have:
            out.append(l)
            have.add(l)
    return tuple(out)


def find_pivot(c0: Sequence[int], c1: Sequence[int]):
    """The unique literal p in c0 with -p in c1, or None if not exactly one."""
    s1 = set(c1)
    clashes = [l for l in c0 if -l in s1]
    return clashes[0] if len(clashes) == 1 else None


@dataclass
class CnfFormula:
    clauses: list = field(default_factory=list)
    num_vars: int = 0

    def __post_init__(self):
        self.clauses = [make_clause(c) for c in self.clauses]
        top = max((var(l) for c in self.clauses for l in c), default=0)
        self.num_vars = max(self.num_vars, top)

    def __len__(self):
        return len(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __getitem__(self, i):
        return self.clauses[i]

    def variables(self) -> set:
        return {var(l) for c in self.clauses for l in c}

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def literal_count(self) -> int:
        return sum(len(c) for c in self.clauses)

    def satisfied_by(self, assignment) -> bool:
        return all(any(assignment.get(var(l), False) == (l > 0) for l in c)
                   for c in self.clauses)

    def __add__(self, other: "CnfFormula") -> "CnfFormula":
        return CnfFormula(self.clauses + other.clauses,
                          max(self.num_vars, other.num_vars))


def to_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + (" 0" if c else "0") for c in f.clauses]
    return "\n".join(lines)


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses = []
    pending: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line[0] == "p":
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("syntax", f"bad problem line {line!r}", lineno, 1)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError("syntax", "non-integer counts", lineno, 1) from None
            continue
        if header is None:
            raise ParseError("syntax", "clause before problem line", lineno, 1)
        col = 1
        for tok in line.split():
            col = raw.index(tok, col - 1) + 1
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError("syntax", f"bad literal {tok!r}", lineno, col) from None
            if lit == 0:
                try:
                    clauses.append(make_clause(pending))
                except StructureError as e:
                    raise ParseError("clause", str(e), lineno, col) from None
                pending = []
            else:
                if abs(lit) > header[0]:
                    raise ParseError("range", f"literal {lit} exceeds {header[0]} vars",
                                     lineno, col)
                pending.append(lit)
            col += len(tok)
    if pending:
        raise ParseError("syntax", "last clause not 0-terminated")
    if header is None:
        raise ParseError("syntax", "missing problem line")
    if len(clauses) != header[1]:
        raise ParseError("count", f"header says {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(clauses, header[0])
