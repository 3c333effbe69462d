"""Benchmark harness: every corpus pair in plain and compressed mode.

Rows follow the column shape of the usual evaluation table.  Timings are
measured on the verifier side and only reported, never checked.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .circuit import build_miter, load_netlist
from .errors import SolverTimeout, ZkcecError
from .proof import compress, count_structures, factorial_bound
from .protocol.config import Config
from .protocol.session import run_local
from .protocol.statement import PublicStatement, tape_size
from .sat import Sat, solve

COLUMNS = ["circuit", "lits", "cls", "R", "W", "t_P1+2", "t_P3", "t_P4", "t_total", "R'",
           "t'_total", "speedup"]
DEFAULT_MAX_TAPE = 40_000_000      # dealer entries (16 bytes each, two tapes)
DEFAULT_MAX_CLAUSES = 5_000


@dataclass
class BenchRow:
    circuit: str
    lits: int = None
    cls: int = None
    R: int = None
    W: int = None
    t_P12: float = None
    t_P3: float = None
    t_P4: float = None
    t_total: float = None
    R_prime: int = None
    t_total_c: float = None
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    @property
    def speedup(self):
        if self.t_total and self.t_total_c:
            return self.t_total / self.t_total_c
        return None

    def cells(self) -> list:
        vals = [self.circuit, self.lits, self.cls, self.R, self.W, self.t_P12, self.t_P3,
                self.t_P4, self.t_total, self.R_prime, self.t_total_c, self.speedup]
        return ["" if v is None else (f"{v:.6f}" if isinstance(v, float) else v) for v in vals]


def corpus_pairs(corpus_dir) -> list:
    """(name, spec path, impl path, expected-equivalent or None), sorted by name."""
    d = Path(corpus_dir)
    index = {}
    if (d / "index.json").exists():
        index = json.loads((d / "index.json").read_text())
    out = []
    for spec in sorted(d.glob("*.spec.net")):
        name = spec.name[: -len(".spec.net")]
        impl = d / f"{name}.impl.net"
        if impl.exists():
            out.append((name, spec, impl, index.get(name, {}).get("equivalent")))
    return out


def default_corpus() -> Path:
    return Path(__file__).with_name("corpus")


def _estimate(bundle, config):
    """Solve once and size both runs: (bundle, (proof, compressed) or None, tape needs)."""
    f = bundle.formula
    res = solve(f, config.solver_budget)
    if isinstance(res, Sat):
        return bundle, None, None
    p = res.proof
    cp = compress(p)
    base = dict(mode="cec", n_sec=len(bundle.phi_sec), n_pub=len(bundle.phi_pub),
                w=p.width(f), R=p.R, m=len(bundle.phi_sec.variables()))
    hidden = bundle.num_pub_vars - len(bundle.vars_io)
    need = tape_size(PublicStatement(**base), 2 * hidden)
    need_c = tape_size(PublicStatement(**base, compress=True, chains=cp.n_res), 2 * hidden)
    return bundle, (p, cp), (need, need_c)


def bench_pair(name, spec, impl, config: Config = None, max_tape: int = DEFAULT_MAX_TAPE,
               max_clauses: int = DEFAULT_MAX_CLAUSES):
    config = config or Config()
    row = BenchRow(name)
    bundle = build_miter(spec, impl)
    row.lits = len(bundle.phi_sec.variables())
    row.cls = len(bundle.phi_sec)
    N = len(bundle.formula)
    if N > max_clauses:
        # refutations are rarely shorter than the formula; with R >= N the
        # one-hot reads alone need 2 R N selector entries
        est = 2 * N * N
        row.status = (f"refused: {N} clauses exceeds {max_clauses}; at R >= {N} the run needs "
                      f">= {est:.2e} dealer entries (~{2 * 16 * est / 1e9:.0f} GB of tape)")
        row.extra = {"inputs": N, "tape_lower_bound": est}
        return row
    try:
        bundle, proofs, needs = _estimate(bundle, config)
    except SolverTimeout:
        row.status = f"refused: solver budget of {config.solver_budget} conflicts exhausted"
        return row
    if proofs is None:
        row.status = "not-equivalent"
        return row
    p, cp = proofs
    row.R, row.R_prime = p.R, cp.R_prime
    row.W = p.width(bundle.formula) + 1
    row.extra = {"inputs": len(bundle.formula), "tape": needs[0], "tape_c": needs[1]}
    if needs[0] > max_tape:
        gb = 2 * 16 * needs[0] / 1e9
        row.status = (f"refused: needs {needs[0]} dealer entries (~{gb:.1f} GB of tape), "
                      f"limit {max_tape}")
        return row
    for compressed in (False, True):
        cfg = Config(**{**config.__dict__, "compress": compressed})
        r = run_local(spec, impl, cfg)
        if not r.accepted:
            row.status = f"{'compressed ' if compressed else ''}run {r.outcome} in {r.phase}"
            return row
        t = r.verifier.times
        if compressed:
            row.t_total_c = t["total"]
        else:
            row.t_P12 = r.verifier.t_P12
            row.t_P3, row.t_P4, row.t_total = t["P3"], t["P4"], t["total"]
            row.extra["t_commit"] = t["commit"]
    return row


def _bench_one(args):
    name, spec_path, impl_path, config, max_tape, max_clauses = args
    try:
        return bench_pair(name, load_netlist(spec_path), load_netlist(impl_path), config,
                          max_tape, max_clauses)
    except ZkcecError as e:
        return BenchRow(name, status=f"failed: {type(e).__name__}: {e}")


def run_bench(corpus_dir=None, config: Config = None, names=None, jobs: int = 1,
              max_tape: int = DEFAULT_MAX_TAPE, max_clauses: int = DEFAULT_MAX_CLAUSES,
              include_inequivalent: bool = False) -> list:
    config = config or Config()
    pairs = corpus_pairs(corpus_dir or default_corpus())
    if names:
        pairs = [pr for pr in pairs if pr[0] in set(names)]
    elif not include_inequivalent:
        pairs = [pr for pr in pairs if pr[3] is not False]
    work = [(n, s, i, config, max_tape, max_clauses) for n, s, i, _ in pairs]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(_bench_one, work))
    return [_bench_one(w) for w in work]


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def to_text(rows) -> str:
    head = COLUMNS + ["status"]
    table = [head] + [[str(c) if not isinstance(c, str) or c else "-" for c in r.cells()]
                      + [r.status] for r in rows]
    for line in table[1:]:
        for k in (5, 6, 7, 8, 10, 11):
            if line[k] != "-":
                line[k] = f"{float(line[k]):.3f}"
    widths = [max(len(line[k]) for line in table) for k in range(len(head))]
    return "\n".join("  ".join(c.rjust(wd) for c, wd in zip(line, widths)) for line in table)


def structure_report(n_res) -> dict:
    N = count_structures(n_res)
    F = factorial_bound(len(n_res))
    try:
        ratio = N / F
    except OverflowError:
        ratio = math.inf
    return {"R_prime": len(n_res), "N": N, "factorial": F, "ratio": ratio,
            "log2_ratio": math.log2(N) - math.log2(F)}
