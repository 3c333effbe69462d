import json
import socket
import threading

import pytest

from zkcec.cli import main
from zkcec.cnf import parse_dimacs

from conftest import AND_NET, CORPUS

C = str(CORPUS)


def net(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def free_port():
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_compile_and_fixture(tmp_path, capsys):
    a = net(tmp_path, "a.net", AND_NET)
    assert main(["compile", a, a, "-o", str(tmp_path / "out" / "m")]) == 0
    f = parse_dimacs((tmp_path / "out" / "m.cnf").read_text())
    part = json.loads((tmp_path / "out" / "m.partition.json").read_text())
    lo, hi = part["secret_clauses"]
    assert hi - lo == 3
    assert part["public_clauses"][1] == len(f)
    # spec gate (3) plus xor comparator (4) plus the output unit
    assert hi == len(f) - 8
    assert {"i:a", "i:b", "s:c"} <= {n for n, _ in part["index_map"]}
    assert part["out_var"] in part["public"]
    assert set(part["io"]).isdisjoint(part["secret"])


def test_compile_io_mismatch(tmp_path, capsys):
    a = net(tmp_path, "a.net", AND_NET)
    b = net(tmp_path, "b.net", "input a\ninput b\ninput d\noutput c\ngate AND c a b\n")
    assert main(["compile", a, b, "-o", str(tmp_path / "m")]) == 4
    assert "StructureError" in capsys.readouterr().err


def test_missing_file(tmp_path):
    assert main(["run-local", str(tmp_path / "nope"), str(tmp_path / "nope")]) == 4


def test_solve_writes_artifacts(tmp_path, capsys):
    args = ["solve", f"{C}/adder2.spec.net", f"{C}/adder2.impl.net",
            "--proof", str(tmp_path / "p.bin"), "--trace", str(tmp_path / "t.txt"),
            "--chains", str(tmp_path / "c.txt")]
    assert main(args) == 0
    assert capsys.readouterr().out.startswith("UNSAT")
    assert (tmp_path / "p.bin").read_bytes()[:4] == b"ZKRP"
    sizes = [int(x) for x in (tmp_path / "c.txt").read_text().split()]
    assert all(s >= 1 for s in sizes)
    capsys.readouterr()
    assert main(["estimate-structures", str(tmp_path / "p.bin")]) == 0
    assert main(["estimate-structures", str(tmp_path / "c.txt")]) == 0


def test_solve_sat(tmp_path, capsys):
    assert main(["solve", f"{C}/bad_and_or.spec.net", f"{C}/bad_and_or.impl.net"]) == 2
    assert capsys.readouterr().out.startswith("SAT")


def test_run_local_accept_and_report(tmp_path, capsys):
    rep = tmp_path / "r.json"
    assert main(["run-local", "--seed", "3", f"{C}/adder4.spec.net", f"{C}/adder4.impl.net",
                 "--report", str(rep)]) == 0
    out = capsys.readouterr().out
    assert "accept" in out and "t_P1+2" in out
    d = json.loads(rep.read_text())
    assert d["outcome"] == "accept" and d["tape_used"] == d["tape_size"]
    assert {"leakage", "times", "bytes_recv", "t_P1+2", "prover"} <= set(d)


def test_run_local_inequivalent(capsys):
    assert main(["run-local", f"{C}/bad_adder2.spec.net", f"{C}/bad_adder2.impl.net"]) == 2
    assert "counterexample" in capsys.readouterr().out


def test_run_local_blueprint(tmp_path, capsys):
    prop = net(tmp_path, "prop.cnf", "p cnf 3 2\n3 0\n-1 0\n")
    sys_ = net(tmp_path, "sys.cnf", "p cnf 3 3\n1 -3 0\n2 -3 0\n-1 -2 3 0\n")
    assert main(["run-local", "--blueprint", prop, sys_]) == 0
    sat = net(tmp_path, "sat.cnf", "p cnf 3 1\n2 0\n")
    assert main(["run-local", "--blueprint", net(tmp_path, "u.cnf", "p cnf 1 1\n1 0\n"),
                 sat]) == 2


def test_estimate_structures_inline(capsys):
    assert main(["estimate-structures", "--chains", "1,1,2,5"]) == 0
    out = capsys.readouterr().out
    assert "= 210" in out and "= 6" in out
    assert main(["estimate-structures"]) == 4


def test_bench_csv(tmp_path, capsys):
    rep = tmp_path / "b.csv"
    assert main(["bench", "--names", "and2", "adder2", "--report", str(rep)]) == 0
    lines = rep.read_text().splitlines()
    assert lines[0] == "circuit,lits,cls,R,W,t_P1+2,t_P3,t_P4,t_total,R',t'_total,speedup"
    assert [l.split(",")[0] for l in lines[1:]] == ["adder2", "and2"]


def _serve(argv, out):
    out.append(main(argv))


@pytest.mark.parametrize("tapes", [False, True])
def test_socket_prove_verify(tmp_path, capsys, tapes):
    spec, impl = f"{C}/adder2.spec.net", f"{C}/adder2.impl.net"
    extra_p, extra_v = [], []
    if tapes:
        assert main(["tape-gen", "--seed", "1", spec, impl, "-o", str(tmp_path / "t" / "d")]) == 0
        extra_p = ["--tape", str(tmp_path / "t" / "d.prover.tape")]
        extra_v = ["--tape", str(tmp_path / "t" / "d.verifier.tape")]
    port = free_port()
    res = []
    th = threading.Thread(target=_serve, args=(["verify", "--seed", "1", spec, "--listen",
                                                f"127.0.0.1:{port}",
                                                "--report", str(tmp_path / "v.json")]
                                               + extra_v, res))
    th.start()
    code = None
    for _ in range(50):
        try:
            code = main(["prove", "--seed", "1", spec, impl, "--connect", f"127.0.0.1:{port}"]
                        + extra_p)
            break
        except ConnectionRefusedError:
            import time
            time.sleep(0.1)
    th.join()
    assert code == 0 and res == [0]
    assert json.loads((tmp_path / "v.json").read_text())["outcome"] == "accept"


def test_tape_gen_needs_input(tmp_path):
    assert main(["tape-gen", "-o", str(tmp_path / "x")]) == 4
    assert main(["tape-gen", "--count", "10", "-o", str(tmp_path / "x")]) == 0
    assert (tmp_path / "x.prover.tape").exists()
