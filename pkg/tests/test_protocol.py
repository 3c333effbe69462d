import json

import numpy as np
import pytest

from zkcec.backend.channel import Tag
from zkcec.circuit import parse_netlist
from zkcec.cnf import CnfFormula
from zkcec.protocol import cheats as C
from zkcec.protocol.config import Config
from zkcec.protocol.session import cec_instance, run_local, run_local_blueprint
from zkcec.protocol.statement import PublicStatement, selector_count, tape_breakdown, tape_size
from zkcec.sat import tt_equiv

from conftest import AND_NET, NAND_NOT_NET, pair

FIXED = Config(prover_seed=7, verifier_seed=8)
AND_SYS = CnfFormula([(1, -3), (2, -3), (-1, -2, 3)], 3)      # a=1 b=2 c=3
PROP = CnfFormula([(3,), (-1,)], 3)


# -- honest runs -------------------------------------------------------------

def test_and_vs_nand_not():
    r = run_local(parse_netlist(AND_NET), parse_netlist(NAND_NOT_NET))
    assert r.accepted and r.prover.accepted


@pytest.mark.parametrize("name", ["adder2", "cmp2", "dec3"])
def test_small_pairs_accept(name):
    assert run_local(*pair(name)).accepted


def test_adder4_report_fields():
    r = run_local(*pair("adder4"), FIXED)
    assert r.accepted
    d = r.verifier.to_dict()
    for k in ("commit", "P1", "P2", "P3", "P4", "total"):
        assert d["times"][k] >= 0
    assert d["t_P1+2"] == pytest.approx(sum(d["times"][k] for k in ("commit", "P1", "P2")))
    assert set(d["leakage"]) == {"n_sec", "n_pub", "w", "R", "m"}
    assert d["bytes_recv"] > 0 and d["msgs_recv"] > 0


def test_compressed_run_declares_chains():
    r = run_local(*pair("adder3"), Config(compress=True))
    assert r.accepted
    lk = r.verifier.leakage
    assert sum(lk["chains"]) == lk["R"] and lk["R_prime"] == len(lk["chains"]) < lk["R"]


def test_inequivalent_pair_reports_counterexample():
    spec, impl = pair("bad_adder2")
    r = run_local(spec, impl)
    assert r.outcome == "not-equivalent" and r.verifier is None
    cex = r.prover.counterexample
    assert spec.simulate(cex) != impl.simulate(cex)


# -- blueprint mode ----------------------------------------------------------

def test_blueprint_worked_instance():
    r = run_local_blueprint(PROP, AND_SYS)
    assert r.accepted
    assert r.verifier.leakage == {"n_sec": 3, "n_pub": 2, "w": 3, "R": 2, "m": 3}


def test_blueprint_contradictory_system():
    r = run_local_blueprint(PROP, AND_SYS, cheat=C.ContradictorySecret())
    assert r.outcome == "abort" and r.phase == "P3"


def test_blueprint_disjoint_is_not_refutable():
    r = run_local_blueprint(CnfFormula([(1,)], 1), CnfFormula([(2, 3)], 3))
    assert r.outcome == "not-refutable" and r.verifier is None


def test_blueprint_verifier_learns_interface_from_hello():
    assert run_local_blueprint(PROP, AND_SYS, verifier_interface=None).accepted


def test_blueprint_interface_mismatch():
    r = run_local_blueprint(PROP, AND_SYS, verifier_interface={1})
    assert r.outcome == "abort" and r.phase == "hello"


# -- dishonest provers -------------------------------------------------------

BATTERY = [C.DropPublicLiteral(), C.DropPublicClause(), C.OversizedIndex(), C.ForgedResolvent(),
           C.ForwardReference(), C.ContradictorySecret(), C.BadAssignment(),
           C.SmuggledLiteral(), C.TamperedTag()]


@pytest.mark.parametrize("cheat", BATTERY, ids=lambda c: c.name)
def test_cheats_abort_in_their_phase(cheat):
    r = run_local(*pair("adder2"), cheat=cheat)
    assert r.outcome == "abort" and r.phase == cheat.phase


def test_wrong_rom_value_on_inequivalent_pair():
    spec, impl = pair("bad_adder2")
    assert not tt_equiv(spec, impl)
    r = run_local(spec, impl, cheat=C.WrongRomValue())
    assert r.outcome == "abort" and r.phase == "P2"


def test_forged_resolvent_compressed():
    r = run_local(*pair("adder2"), Config(compress=True), cheat=C.ForgedResolvent())
    assert r.outcome == "abort" and r.phase == "P2"


def test_verifier_with_wrong_spec():
    spec, impl = pair("adder2")
    other = pair("cmp2")[0]
    r = run_local(spec, impl, verifier_spec=other)
    assert r.outcome == "abort" and r.phase in ("hello", "P1")
    r = run_local(*pair("and2"), verifier_spec=parse_netlist(AND_NET.replace("AND", "OR")))
    assert r.outcome == "abort" and r.phase == "P1"


# -- transcripts -------------------------------------------------------------

def test_transcripts_are_deterministic():
    a = run_local(*pair("adder2"), FIXED, record_view=True)
    b = run_local(*pair("adder2"), FIXED, record_view=True)
    assert a.accepted and a.view == b.view
    c = run_local(*pair("adder2"), Config(prover_seed=7, verifier_seed=9), record_view=True)
    assert c.accepted and c.view != a.view


def test_every_flipped_frame_aborts():
    spec, impl = pair("and2")
    n = len(run_local(spec, impl, FIXED, record_view=True).view)
    for k in range(n):
        for byte_no, mask in ((0, 1), (5, 0x80)):
            r = run_local(spec, impl, FIXED, cheat=C.TamperedWire(k, byte_no, mask))
            assert not r.accepted, (k, byte_no)
            assert r.outcome in ("abort", "error")


def test_verifier_view_is_whitelisted():
    spec, impl = pair("adder3")
    r = run_local(spec, impl, record_view=True)
    assert r.accepted
    allowed = {Tag.HELLO, Tag.INDEX_MAP, Tag.COMMIT_DELTA, Tag.ECHO, Tag.MULPROOF, Tag.ZERO,
               Tag.CHECKPOINT, Tag.CODES}
    assert {t for t, _ in r.view} <= allowed
    frames = {}
    for t, payload in r.view:
        frames.setdefault(t, []).append(payload)

    (hello,) = frames[Tag.HELLO]
    st = PublicStatement.from_json(hello)
    assert set(json.loads(hello)) == {"mode", "n_sec", "n_pub", "w", "R", "m", "compress",
                                      "chains", "interface", "config_digest", "version"}
    assert st.chains is None and st.interface is None
    (imap,) = frames[Tag.INDEX_MAP]
    assert {n for n, _ in json.loads(imap)} == set(cec_instance(spec).names)
    (codes,) = frames[Tag.CODES]
    assert len(codes) == 16 * st.m

    deltas = np.frombuffer(b"".join(frames[Tag.COMMIT_DELTA]), np.uint8)
    bits = np.unpackbits(deltas)
    assert abs(bits.mean() - 0.5) < 5 / np.sqrt(bits.size)


def test_leakage_is_the_statement():
    r = run_local(*pair("adder2"), Config(compress=True))
    lk = r.verifier.leakage
    assert set(lk) == {"n_sec", "n_pub", "w", "R", "m", "R_prime", "chains"}
    assert lk == r.prover.leakage


# -- tape sizing -------------------------------------------------------------

@pytest.mark.parametrize("name,compress", [("and2", False), ("adder2", False),
                                           ("adder3", True), ("parity8", True)])
def test_tape_consumption_is_exact(name, compress):
    r = run_local(*pair(name), Config(compress=compress))
    assert r.accepted
    for rep in (r.prover, r.verifier):
        assert rep.tape_used == rep.tape_size


def test_undersized_tape_fails_before_commitment():
    r = run_local(*pair("adder2"), tape_slack=-1)
    assert r.outcome == "error" and r.phase == "hello"
    assert r.verifier.error == "TapeExhausted"
    assert r.verifier.tape_used == 0 and r.prover.tape_used == 0


def test_tape_micro_case():
    # R=1, w=1, one secret and one public clause; hand count with W=2:
    # commit 2*2, resolvent 2, reads (1+1)*2, witnesses 2*2+1, selectors 2*2, mask 1,
    # P3 mask 1, P4 mask 1
    st = PublicStatement("cec", n_sec=1, n_pub=1, w=1, R=1, m=1)
    assert tape_breakdown(st, 0) == {"commit": 4, "P2": 2 + 4 + 5 + 4 + 1, "P3": 1, "P4": 1}
    assert tape_size(st, 0) == 22


def test_tape_micro_run():
    r = run_local_blueprint(CnfFormula([(1,)], 1), CnfFormula([(-1,)], 1))
    assert r.accepted
    assert r.verifier.leakage == {"n_sec": 1, "n_pub": 1, "w": 1, "R": 1, "m": 1}
    assert r.verifier.tape_used == r.prover.tape_used == 22


def test_tape_terms_linear_in_R():
    a = PublicStatement("cec", n_sec=10, n_pub=5, w=4, R=50, m=6)
    b = PublicStatement("cec", n_sec=10, n_pub=5, w=4, R=100, m=6)
    lin = lambda st: st.R * st.W + 2 * st.R * st.W + st.R + st.R * st.W + st.R_prime * st.W
    assert lin(b) == 2 * lin(a)
    sel = lambda st: selector_count(st)
    # selector term is quadratic-ish: N + j grows with the step index
    assert sel(b) > 2 * sel(a)
    assert tape_breakdown(b, 3)["P3"] == tape_breakdown(a, 3)["P3"]
