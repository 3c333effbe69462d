"""Command line: zkcec compile|solve|prove|verify|run-local|bench|estimate-structures|tape-gen.

Exit codes: 0 accept (or success), 2 not equivalent, 3 protocol abort,
4 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as benchmod
from .backend.channel import connect, listen
from .backend.dealer import (ROLE_PROVER, ROLE_VERIFIER, dealer_gen, read_tape, seeded_tape,
                             write_tape)
from .backend.zk import PROVER, VERIFIER
from .circuit import build_miter, load_netlist
from .cnf import parse_dimacs, to_dimacs
from .encoding import assign_indices
from .errors import NotEquivalent, NotRefutable, ParseError, StructureError, ZkcecError
from .proof import compress, dump_proof, export_trace, load_proof, parse_chain_sizes
from .protocol.config import load_config
from .protocol.session import (Report, Session, prepare_blueprint, prepare_cec, run_blueprint,
                               run_local, run_local_blueprint, run_main)
from .protocol.statement import tape_size
from .sat import Sat, solve

EXIT_OK, EXIT_NOT_EQUIV, EXIT_ABORT, EXIT_INPUT = 0, 2, 3, 4


def _config(a):
    over = {"rom_mode": a.rom_mode, "compress": True if a.compress else None}
    if a.seed is not None:
        over.update(dealer_seed=f"seed-{a.seed}", prover_seed=a.seed, verifier_seed=a.seed + 1)
    return load_config(a.config, **over)


def _outcome_code(outcome: str) -> int:
    if outcome == "accept":
        return EXIT_OK
    if outcome in ("not-equivalent", "not-refutable"):
        return EXIT_NOT_EQUIV
    return EXIT_ABORT


def _write_report(path, rep: Report, extra=None):
    d = rep.to_dict()
    if extra:
        d.update(extra)
    text = json.dumps(d, indent=1, sort_keys=True, default=str)
    if path:
        Path(path).write_text(text + "\n")
    return d


def _summary(rep: Report) -> str:
    line = f"{rep.role}: {rep.outcome}"
    if rep.outcome in ("abort", "error") and rep.phase:
        line += f" in {rep.phase}"
    if rep.reason:
        line += f" ({rep.reason})"
    return line


# -- commands ----------------------------------------------------------------

def cmd_compile(a):
    spec, impl = load_netlist(a.spec), load_netlist(a.impl)
    b = build_miter(spec, impl)
    out = Path(a.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    f = b.formula
    cnf = out.with_suffix(".cnf")
    cnf.write_text(to_dimacs(f) + "\n")
    idx = assign_indices(b)
    part = {
        "num_vars": f.num_vars,
        "secret_clauses": [0, len(b.phi_sec)],
        "public_clauses": [len(b.phi_sec), len(f)],
        "public": sorted(b.vars_pub - b.vars_io),
        "io": sorted(b.vars_io),
        "secret": sorted(b.vars_sec),
        "out_var": b.out_var,
        "index_map": sorted(([n, i] for n, i in idx.items() if i <= b.num_pub_vars),
                            key=lambda e: e[1]),
    }
    side = out.with_suffix(".partition.json")
    side.write_text(json.dumps(part, indent=1) + "\n")
    print(f"{cnf}: {f.num_vars} vars, {len(f)} clauses "
          f"({len(b.phi_pub)} public, {len(b.phi_sec)} secret)")
    print(f"{side}: {len(b.vars_io)} io, {len(part['public'])} public-only, "
          f"{len(b.vars_sec)} secret vars")
    return EXIT_OK


def cmd_solve(a):
    config = _config(a)
    if a.cnf:
        f = parse_dimacs(Path(a.cnf).read_text())
    else:
        if not a.impl:
            raise StructureError("solve needs SPEC IMPL or --cnf")
        f = build_miter(load_netlist(a.spec), load_netlist(a.impl)).formula
    res = solve(f, config.solver_budget)
    if isinstance(res, Sat):
        model = " ".join(str(v if res.assignment[v] else -v) for v in sorted(res.assignment))
        print("SAT")
        print(f"v {model} 0")
        return EXIT_NOT_EQUIV
    p = res.proof
    cp = compress(p)
    print(f"UNSAT: R={p.R} w={p.width(f)} R'={cp.R_prime}")
    if a.proof:
        Path(a.proof).write_bytes(dump_proof(p))
    if a.trace:
        Path(a.trace).write_text(export_trace(f, p))
    if a.chains:
        Path(a.chains).write_text(" ".join(map(str, cp.n_res)) + "\n")
    return EXIT_OK


def _tape_for(a, role, config):
    if a.tape:
        return read_tape(a.tape)
    return seeded_tape(config.dealer_seed, ROLE_PROVER if role == PROVER else ROLE_VERIFIER)


def _channel(a, config):
    if bool(a.listen) == bool(a.connect):
        raise StructureError("give exactly one of --listen / --connect")
    if a.listen:
        return listen(a.listen, config.timeout)
    return connect(a.connect, config.timeout)


def cmd_prove(a):
    config = _config(a)
    if a.blueprint:
        prop, sys_ = parse_dimacs(Path(a.spec).read_text()), parse_dimacs(Path(a.impl).read_text())
    else:
        spec, impl = load_netlist(a.spec), load_netlist(a.impl)
    chan = _channel(a, config)
    s = Session(PROVER, chan, _tape_for(a, PROVER, config), config)
    try:
        rep = run_blueprint(s, prop, sys_) if a.blueprint else run_main(s, spec, impl)
    finally:
        chan.close()
    _write_report(a.report, rep)
    print(_summary(rep))
    return _outcome_code(rep.outcome)


def cmd_verify(a):
    config = _config(a)
    chan = _channel(a, config)
    s = Session(VERIFIER, chan, _tape_for(a, VERIFIER, config), config)
    try:
        if a.blueprint:
            rep = run_blueprint(s, parse_dimacs(Path(a.spec).read_text()))
        else:
            rep = run_main(s, load_netlist(a.spec))
    finally:
        chan.close()
    _write_report(a.report, rep)
    print(_summary(rep))
    for k, v in rep.leakage.items():
        print(f"  {k} = {v}")
    return _outcome_code(rep.outcome)


def cmd_run_local(a):
    config = _config(a)
    if a.blueprint:
        prop, sys_ = parse_dimacs(Path(a.spec).read_text()), parse_dimacs(Path(a.impl).read_text())
        r = run_local_blueprint(prop, sys_, config=config)
    else:
        r = run_local(load_netlist(a.spec), load_netlist(a.impl), config)
    rep = r.verifier or r.prover
    d = _write_report(a.report, rep, {"prover": r.prover.to_dict()})
    print(_summary(r.prover))
    if r.verifier:
        print(_summary(r.verifier))
        for k in ("commit", "P1", "P2", "P3", "P4", "total"):
            if k in rep.times:
                print(f"  t_{k} = {rep.times[k]:.3f}s")
        print(f"  t_P1+2 = {d['t_P1+2']:.3f}s")
        print(f"  leakage: {json.dumps(rep.leakage)}")
        print(f"  tape: {rep.tape_used}/{rep.tape_size} entries, "
              f"{rep.bytes_recv} bytes received")
    if r.prover.counterexample is not None:
        print(f"  counterexample inputs: {r.prover.counterexample}")
    return _outcome_code(r.outcome)


def cmd_bench(a):
    config = _config(a)
    rows = benchmod.run_bench(a.corpus, config, names=a.names, jobs=a.jobs,
                              max_tape=a.max_tape, max_clauses=a.max_clauses,
                              include_inequivalent=a.all)
    print(benchmod.to_text(rows))
    if a.report:
        Path(a.report).write_text(benchmod.to_csv(rows))
    return EXIT_OK


def cmd_estimate_structures(a):
    if a.chains:
        n_res = parse_chain_sizes(a.chains)
    else:
        data = Path(a.proof).read_bytes()
        n_res = compress(load_proof(data)).n_res if data.startswith(b"ZKRP") \
            else parse_chain_sizes(data.decode())
    rep = benchmod.structure_report(n_res)
    print(f"R'         = {rep['R_prime']}")
    print(f"N          = {rep['N']}")
    print(f"(R'-1)!    = {rep['factorial']}")
    print(f"N/(R'-1)!  = {rep['ratio']:.6g}  (log2 {rep['log2_ratio']:.3f})")
    return EXIT_OK


def cmd_tape_gen(a):
    config = _config(a)
    if a.count:
        count = a.count
    else:
        if a.blueprint:
            inst, wit, st = prepare_blueprint(parse_dimacs(Path(a.spec).read_text()),
                                              parse_dimacs(Path(a.impl).read_text()), None, config)
        else:
            inst, wit, st = prepare_cec(load_netlist(a.spec), load_netlist(a.impl), config)
        count = tape_size(st, inst.p4_count())
    pt, vt = dealer_gen(config.dealer_seed, count)
    out = Path(a.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_tape(str(out) + ".prover.tape", pt)
    write_tape(str(out) + ".verifier.tape", vt)
    print(f"wrote {count} entries to {out}.prover.tape and {out}.verifier.tape")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (default: $ZKCEC_CONFIG)")
    common.add_argument("--seed", type=int, help="seed the dealer and both parties")
    common.add_argument("--rom-mode", choices=["onehot"])
    common.add_argument("--compress", action="store_true", help="store only learned clauses")

    ap = argparse.ArgumentParser(prog="zkcec", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("compile", parents=[common], help="miter CNF plus partition sidecar")
    p.add_argument("spec")
    p.add_argument("impl")
    p.add_argument("-o", "--output", default="miter")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("solve", parents=[common], help="refute the miter locally")
    p.add_argument("spec", nargs="?")
    p.add_argument("impl", nargs="?")
    p.add_argument("--cnf", help="solve a DIMACS file instead of a netlist pair")
    p.add_argument("--proof", help="write the binary proof here")
    p.add_argument("--trace", help="write a text trace here")
    p.add_argument("--chains", help="write per-chain step counts here")
    p.set_defaults(fn=cmd_solve)

    for name, fn in (("prove", cmd_prove), ("verify", cmd_verify)):
        p = sub.add_parser(name, parents=[common], help=f"run the {name}r over a socket")
        p.add_argument("spec", help="spec netlist (or public DIMACS with --blueprint)")
        if name == "prove":
            p.add_argument("impl", help="impl netlist (or secret DIMACS with --blueprint)")
        p.add_argument("--listen", metavar="HOST:PORT")
        p.add_argument("--connect", metavar="HOST:PORT")
        p.add_argument("--tape", help="dealer tape file from tape-gen (default: seeded dealer)")
        p.add_argument("--blueprint", action="store_true", help="inputs are DIMACS formulas")
        p.add_argument("--report", help="write the JSON report here")
        p.set_defaults(fn=fn)

    p = sub.add_parser("run-local", parents=[common], help="both roles in one process")
    p.add_argument("spec")
    p.add_argument("impl")
    p.add_argument("--blueprint", action="store_true", help="inputs are DIMACS formulas")
    p.add_argument("--report", help="write the JSON report here")
    p.set_defaults(fn=cmd_run_local)

    p = sub.add_parser("bench", parents=[common], help="benchmark table over a corpus")
    p.add_argument("corpus", nargs="?", help="corpus directory (default: bundled)")
    p.add_argument("--names", nargs="*")
    p.add_argument("--jobs", type=int, default=1, help="run pairs in parallel")
    p.add_argument("--all", action="store_true", help="include inequivalent pairs")
    p.add_argument("--max-tape", type=int, default=benchmod.DEFAULT_MAX_TAPE)
    p.add_argument("--max-clauses", type=int, default=benchmod.DEFAULT_MAX_CLAUSES)
    p.add_argument("--report", help="write the CSV table here")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("estimate-structures", help="structure count for a compressed proof")
    p.add_argument("proof", nargs="?", help="binary proof or a chain-size list file")
    p.add_argument("--chains", help='chain sizes inline, e.g. "1,1,2,5"')
    p.set_defaults(fn=cmd_estimate_structures)

    p = sub.add_parser("tape-gen", parents=[common], help="write dealer tapes for both roles")
    p.add_argument("spec", nargs="?")
    p.add_argument("impl", nargs="?")
    p.add_argument("--count", type=int, help="entries (default: exact need of SPEC IMPL)")
    p.add_argument("--blueprint", action="store_true")
    p.add_argument("-o", "--output", default="dealer")
    p.set_defaults(fn=cmd_tape_gen)
    return ap


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    if a.cmd == "estimate-structures" and not (a.proof or a.chains):
        print("error: give a proof file or --chains", file=sys.stderr)
        return EXIT_INPUT
    if a.cmd == "tape-gen" and not a.count and not (a.spec and a.impl):
        print("error: give --count or SPEC IMPL", file=sys.stderr)
        return EXIT_INPUT
    try:
        return a.fn(a)
    except NotEquivalent as e:
        print(f"not equivalent; counterexample inputs {e.counterexample}")
        return EXIT_NOT_EQUIV
    except NotRefutable as e:
        print(f"not refutable: {e}")
        return EXIT_NOT_EQUIV
    except (ParseError, StructureError, OSError, ValueError, ZkcecError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
