"""Prover and verifier state machines.

Both roles run the same phase functions; the role decides which half of
each step executes.  Phases in order: hello, commit, P1 (public clauses are
the ones the verifier expects), P2 (the whole formula is refuted), P3 (the
secret clauses are satisfiable), P4 (secret clauses avoid non-interface
public variables), verdict.
"""

from __future__ import annotations

import json
import random
import secrets
import threading
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

import numpy as np

from .. import fieldvec as fv
from ..backend.channel import Tag, local_pair
from ..backend.dealer import dealer_gen
from ..backend.rom import OneHotRom
from ..backend.zk import (PROVER, VERIFIER, AuthVec, _arr, _bytes, expand_challenge,
                          make_party, poly_eval, poly_eval_grid)
from ..circuit import build_miter, public_part
from ..cnf import CnfFormula, find_pivot, var
from ..encoding import (CONST_LIT, IO, PUBLIC, SECRET, EncodingContext, encode_clauses,
                        encode_literal, public_context, setup_key)
from ..errors import (NotEquivalent, NotRefutable, ProtocolAbort, ScaleError, TapeExhausted,
                      WidthError)
from ..proof import CompressedProof, compress
from ..sat import Sat, solve
from .cheats import Cheat
from .config import Config
from .statement import BLUEPRINT, CEC, PROTOCOL_VERSION, PublicStatement, tape_size

MAX_INDEX = 1 << 64


# -- instances ---------------------------------------------------------------

@dataclass
class PublicInstance:
    """What both parties know before the run: the public clauses and variables."""
    mode: str
    clauses: list
    names: dict            # name -> variable id, every public variable
    io: set                # interface variables

    def hidden_vars(self) -> list:
        return sorted(v for v in self.names.values() if v not in self.io)

    def interface_names(self) -> list:
        inv = {v: n for n, v in self.names.items()}
        return [inv[v] for v in sorted(self.io)]

    def p4_count(self) -> int:
        return 2 * len(self.hidden_vars())


def cec_instance(spec) -> PublicInstance:
    phi_pub, alloc, _, io, _ = public_part(spec)
    names = {alloc.names[v]: v for v in range(1, len(alloc) + 1)}
    return PublicInstance(CEC, list(phi_pub.clauses), names, set(io))


def blueprint_instance(phi_prop: CnfFormula, interface) -> PublicInstance:
    pub = phi_prop.variables()
    interface = set(interface)
    if not interface <= pub:
        raise ValueError("interface variables must occur in the public formula")
    names = {f"v{v}": v for v in sorted(pub)}
    return PublicInstance(BLUEPRINT, list(phi_prop.clauses), names, interface)


@dataclass
class Witness:
    sec: list
    ctx: EncodingContext
    proof: object                  # RefutationProof or CompressedProof
    content: CnfFormula            # the formula the proof's input indices refer to
    assignment: dict               # var -> bool over the secret clauses' variables
    index_map: list                # (name, index) for public variables
    w: int
    t_solve: float = 0.0


def _clause_vars(clauses) -> set:
    return {var(l) for c in clauses for l in c}


def prepare(inst: PublicInstance, sec, num_vars: int, config: Config, cheat: Cheat = None,
            on_sat=None):
    """Prover-side work before any message: solve, find a witness, pick a key.

    Returns (Witness, PublicStatement).  on_sat(model) raises the honest
    refusal when the conjunction is satisfiable.
    """
    cheat = cheat or Cheat()
    t0 = time.perf_counter()
    sec = [tuple(c) for c in cheat.secret_clauses(inst, list(sec))]
    num_vars = max([num_vars] + list(_clause_vars(sec)))
    f = CnfFormula(sec + [tuple(c) for c in inst.clauses], num_vars)
    res = solve(f, config.solver_budget)
    if isinstance(res, Sat):
        try:
            g, proof = cheat.refute(f, inst)
        except NotEquivalent:
            if on_sat:
                on_sat(res.assignment)
            raise
    else:
        g, proof = f, res.proof
    proof = cheat.proof(g, proof)
    w = proof.width(g)
    omega = cheat.find_assignment(CnfFormula(sec, num_vars))
    sec_vars = _clause_vars(sec)
    omega = {v: bool(omega.get(v, False)) for v in sorted(sec_vars)}

    public = set(inst.names.values())
    cls = {}
    for v in sorted(public | sec_vars):
        cls[v] = (IO if v in inst.io else PUBLIC) if v in public else SECRET
    rng = random.Random(config.prover_seed) if config.prover_seed is not None else None
    ctx = setup_key(EncodingContext(idx={v: v for v in cls}, cls=cls), rng)
    index_map = sorted(((n, ctx.idx[v]) for n, v in inst.names.items()), key=lambda e: e[1])

    if config.compress:
        proof = compress(proof)
    wit = Witness(sec, ctx, proof, g, omega, index_map, w, time.perf_counter() - t0)
    st = PublicStatement(
        mode=inst.mode, n_sec=len(sec), n_pub=len(inst.clauses), w=w, R=proof.R,
        m=len(omega), compress=config.compress,
        chains=proof.n_res if config.compress else None,
        interface=inst.interface_names() if inst.mode == BLUEPRINT else None,
        config_digest=config.digest().hex())
    return wit, st


def prepare_cec(spec, impl, config: Config, cheat: Cheat = None):
    bundle = build_miter(spec, impl)
    inst = cec_instance(spec)

    def refuse(model):
        raise NotEquivalent([int(bool(model.get(v, False))) for v in bundle.counterexample_vars])

    wit, st = prepare(inst, bundle.phi_sec.clauses, len(bundle.names) - 1, config, cheat, refuse)
    return inst, wit, st


def prepare_blueprint(phi_prop: CnfFormula, phi_sys: CnfFormula, interface=None,
                      config: Config = None, cheat: Cheat = None):
    config = config or Config()
    if interface is None:
        interface = phi_prop.variables() & phi_sys.variables()
    inst = blueprint_instance(phi_prop, interface)

    def refuse(model):
        raise NotRefutable("the conjunction is satisfiable")

    num_vars = max(phi_prop.num_vars, phi_sys.num_vars)
    try:
        wit, st = prepare(inst, phi_sys.clauses, num_vars, config, cheat, refuse)
    except NotEquivalent:
        raise NotRefutable("the conjunction is satisfiable") from None
    return inst, wit, st


# -- session -----------------------------------------------------------------

@dataclass
class Report:
    role: str
    mode: str = CEC
    outcome: str = "error"         # accept | abort | not-equivalent | not-refutable | error
    phase: str = None
    reason: str = ""
    error: str = None
    leakage: dict = field(default_factory=dict)
    times: dict = field(default_factory=dict)
    bytes_sent: int = 0
    bytes_recv: int = 0
    msgs_sent: int = 0
    msgs_recv: int = 0
    tape_used: int = 0
    tape_size: int = 0
    counterexample: list = None

    @property
    def accepted(self) -> bool:
        return self.outcome == "accept"

    @property
    def t_P12(self) -> float:
        """Commitment, P1 and P2 folded together."""
        return sum(self.times.get(k, 0.0) for k in ("commit", "P1", "P2"))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["t_P1+2"] = self.t_P12
        return d


class Session:
    def __init__(self, role, chan, tape, config: Config = None, cheat: Cheat = None):
        """`tape` is a dealer tape, or a callable count -> tape that is sized after hello."""
        self.role = role
        self.tape_factory = tape if callable(tape) else None
        if self.tape_factory:
            tape = self.tape_factory(1)
        self.config = config or Config()
        self.cheat = cheat or Cheat()
        hooks = None
        if role == PROVER:
            chan = self.cheat.wrap_channel(chan)
            hooks = self.cheat.hooks
            seed = self.config.prover_seed
        else:
            seed = self.config.verifier_seed
        rng = random.Random(seed) if seed is not None else secrets.SystemRandom()
        self.party = make_party(role, chan, tape, rng, hooks)
        self.inst = None
        self.wit = None
        self.stmt = None
        self.ctx = None              # verifier's public encoding context (after P1)
        self.times = {}
        self.need = 0

    @property
    def is_prover(self):
        return self.role == PROVER

    @property
    def chan(self):
        return self.party.chan

    @contextmanager
    def phase(self, name):
        self.party.phase = name
        t0 = time.perf_counter()
        try:
            yield
        except (ProtocolAbort, TapeExhausted):
            raise
        except Exception as e:
            # anything unexpected still tells the peer where we stopped
            self.chan.abort(name, f"{type(e).__name__}: {e}")
            raise
        finally:
            self.times[name] = time.perf_counter() - t0

    def commit(self, values=None, shape=None) -> AuthVec:
        """Commit an array (prover) or receive commitments of a shape (verifier)."""
        if self.is_prover:
            if values.size == 0:
                return AuthVec(x=values.copy(), m=values.copy())
            return self.party.commit(values)
        shape = (shape,) if isinstance(shape, int) else tuple(shape)
        if int(np.prod(shape, dtype=np.int64)) == 0:
            return AuthVec(k=np.zeros(shape + (2,), np.uint64))
        return self.party.commit(shape)


def _empty_clause(W):
    e = fv.zeros(W)
    e[0, 0] = 1
    return e


def run_hello(s: Session):
    p = s.party
    if s.is_prover:
        p.chan.send(Tag.HELLO, s.stmt.to_json())
    else:
        try:
            st = PublicStatement.from_json(p.chan.recv(Tag.HELLO))
        except (ValueError, TypeError, KeyError) as e:
            p.fail(f"malformed statement: {e}")
        if st.version != PROTOCOL_VERSION:
            p.fail(f"protocol version {st.version} not supported")
        if st.config_digest != s.config.digest().hex():
            p.fail("config digest mismatch")
        if st.mode != s.inst.mode or st.compress != s.config.compress:
            p.fail("mode or compression flag mismatch")
        if st.mode == BLUEPRINT:
            declared = st.interface or []
            if s.inst.io is None:
                inv = s.inst.names
                if not all(n in inv for n in declared):
                    p.fail("declared interface is not part of the public formula")
                s.inst.io = {inv[n] for n in declared}
            elif declared != s.inst.interface_names():
                p.fail("interface mismatch")
        s.stmt = st
    s.need = tape_size(s.stmt, s.inst.p4_count())
    if s.tape_factory:
        p.tape = s.tape_factory(s.need)
    if p.tape.remaining() < s.need:
        p.chan.abort("hello", "dealer tape too small")
        raise TapeExhausted(f"tape holds {p.tape.remaining()} entries, run needs {s.need}")


def run_commit(s: Session):
    """Secret clauses first, then public clauses."""
    st = s.stmt
    if s.is_prover:
        w = s.wit
        com_sec = s.commit(encode_clauses(w.ctx, w.sec, st.w))
        pub = s.cheat.public_clauses(list(s.inst.clauses))
        com_pub = s.commit(encode_clauses(w.ctx, pub, st.w))
    else:
        com_sec = s.commit(shape=(st.n_sec, st.W))
        com_pub = s.commit(shape=(st.n_pub, st.W))
    return com_sec, com_pub


def _parse_index_map(s: Session, raw: bytes) -> dict:
    p = s.party
    try:
        entries = json.loads(raw.decode())
        pairs = [(str(n), int(i)) for n, i in entries]
    except (ValueError, TypeError) as e:
        p.fail(f"malformed index map: {e}")
    for _, i in pairs:
        if not 0 < i < MAX_INDEX:
            p.fail(f"index {i} outside [1, 2^64)")
    names = [n for n, _ in pairs]
    if len(set(names)) != len(names) or set(names) != set(s.inst.names):
        p.fail("index map does not match the public variables")
    if len({i for _, i in pairs}) != len(pairs):
        p.fail("index map is not injective")
    return {s.inst.names[n]: i for n, i in pairs}


def run_p1(s: Session, com_pub: AuthVec):
    """The committed public clauses are exactly the ones rebuilt from public data."""
    p, st = s.party, s.stmt
    if s.is_prover:
        entries = s.cheat.index_map(s.wit.index_map)
        p.chan.send(Tag.INDEX_MAP, json.dumps([[n, i] for n, i in entries]).encode())
        expect = encode_clauses(s.wit.ctx, s.inst.clauses, st.w)
    else:
        idx = _parse_index_map(s, p.chan.recv(Tag.INDEX_MAP))
        if st.n_pub != len(s.inst.clauses):
            p.fail(f"statement declares {st.n_pub} public clauses, expected "
                   f"{len(s.inst.clauses)}")
        cls = {v: IO if v in s.inst.io else PUBLIC for v in idx}
        try:
            s.ctx = public_context(idx, cls)
            expect = encode_clauses(s.ctx, s.inst.clauses, st.w)
        except (ScaleError, WidthError) as e:
            p.fail(str(e))
    p.check_equal_public(com_pub, expect, "public clauses")
    p.checkpoint()


@dataclass
class _Layout:
    """Public shape of the refutation: which read feeds which step."""
    bounds: list
    left: np.ndarray         # read slot of the left antecedent, -1 if chained
    right: np.ndarray        # read slot of the right antecedent
    res_pos: np.ndarray      # resolvent position in (stored ++ ephemeral)
    first: np.ndarray        # step opens a chain


def _layout(sizes, N) -> _Layout:
    bounds, left, right, res_pos, first = [], [], [], [], []
    Rp = len(sizes)
    e = 0
    for j, n in enumerate(sizes):
        for k in range(n):
            if k == 0:
                left.append(len(bounds))
                bounds.append(N + j)
            else:
                left.append(-1)
            right.append(len(bounds))
            bounds.append(N + j)
            first.append(k == 0)
            if k == n - 1:
                res_pos.append(j)
            else:
                res_pos.append(Rp + e)
                e += 1
    return _Layout(bounds, np.array(left), np.array(right), np.array(res_pos),
                   np.array(first))


def _chains(proof):
    if isinstance(proof, CompressedProof):
        return proof.num_inputs, proof.chains
    return proof.num_inputs, [[st] for st in proof.steps]


def _p2_plan(s: Session):
    """Prover's plaintext for P2: every clause it will commit, in order."""
    wit, st, cheat = s.wit, s.stmt, s.cheat
    n, chains = _chains(wit.proof)
    stored = [c[-1][2] for c in chains]

    def content(k):
        return wit.content.clauses[k] if k < n else stored[k - n]

    def address(k):
        return cheat.address(k) if k < n else st.N + (k - n)

    ephemeral, reads, read_idx, wits, pivots = [], [], [], [], []
    for chain in chains:
        prev = None
        for k, (kl, kr, res) in enumerate(chain):
            if k == 0:
                c0 = content(kl)
                reads.append(c0)
                read_idx.append(address(kl))
            else:
                c0 = prev
            c1 = content(kr)
            reads.append(c1)
            read_idx.append(address(kr))
            piv = find_pivot(c0, c1)
            if piv is None:
                wits += [(), ()]
                pivots.append(0)
            else:
                r = set(res)
                w0 = sorted((r | {piv}) - set(c0))[:st.w]
                w1 = sorted((r | {-piv}) - set(c1))[:st.w]
                wits += [tuple(w0), tuple(w1)]
                pivots.append(encode_literal(wit.ctx, piv))
            if k < len(chain) - 1:
                ephemeral.append(res)
            prev = res
    enc = lambda cl: encode_clauses(wit.ctx, cl, st.w)
    return {"stored": enc(stored), "ephemeral": enc(ephemeral), "reads": enc(reads),
            "read_idx": read_idx, "wits": enc(wits).reshape(-1, 2, st.W, 2),
            "pivots": fv.to_vec(pivots)}


def run_p2(s: Session, com_sec: AuthVec, com_pub: AuthVec):
    """Every resolution step is valid and the last stored clause is empty."""
    p, st = s.party, s.stmt
    W, R = st.W, st.R
    sizes = st.chain_sizes
    Rp = len(sizes)
    lay = _layout(sizes, st.N)
    T = len(lay.bounds)
    plan = _p2_plan(s) if s.is_prover else None
    pv = (lambda k: plan[k]) if plan else (lambda k: None)

    stored = s.commit(pv("stored"), (Rp, W))
    ephem = s.commit(pv("ephemeral"), (R - Rp, W))
    rom = OneHotRom(p)
    rom.init(AuthVec.concat([com_sec, com_pub, stored]))
    reads = s.commit(pv("reads"), (T, W))
    rom.read(lay.bounds, reads, pv("read_idx"))
    wit = s.commit(pv("wits"), (R, 2, W))
    piv = s.commit(pv("pivots"), (R,))

    z, gamma = fv.to_ints(expand_challenge(p.challenge(), 2, b"P2"))
    ev = poly_eval(AuthVec.concat([reads, stored, ephem]), z)
    idx0 = np.where(lay.left >= 0, lay.left, T + np.roll(lay.res_pos, 1))
    c0, c1, cr = ev[idx0], ev[lay.right], ev[T + lay.res_pos]
    evw = poly_eval(wit, z)
    w0 = evw.map(lambda a: np.ascontiguousarray(a[:, 0]))
    w1 = evw.map(lambda a: np.ascontiguousarray(a[:, 1]))
    # w0 c0 = cr (z + p)  and  w1 c1 = cr (z + p + const)
    p.quad.add([(w0, c0), (cr, p.add_const(piv, z))])
    p.quad.add([(w1, c1), (cr, p.add_const(piv, z ^ CONST_LIT))])
    p.check_equal_public(stored[Rp - 1], _empty_clause(W), "last clause is not empty")
    rom.check(gamma)
    p.flush()
    p.checkpoint()


def _hstack(a: AuthVec, b: AuthVec) -> AuthVec:
    if a.k is not None:
        return AuthVec(k=np.concatenate([a.k, b.k], axis=1))
    return AuthVec(x=np.concatenate([a.x, b.x], axis=1), m=np.concatenate([a.m, b.m], axis=1))


def _contig(av: AuthVec) -> AuthVec:
    return av.map(np.ascontiguousarray)


def run_p3(s: Session, com_sec: AuthVec):
    """Some literal set with no complementary pair hits a root of every secret clause."""
    p, st = s.party, s.stmt
    n, m = st.n_sec, st.m
    if s.is_prover:
        wit = s.wit
        codes = sorted(encode_literal(wit.ctx, v if b else -v) for v, b in wit.assignment.items())
        codes = s.cheat.codes(codes, wit)
        vec = fv.to_vec(codes) if codes else fv.zeros(0)
        p.chan.send(Tag.CODES, _bytes(vec))
    else:
        payload = p.chan.recv(Tag.CODES)
        if len(payload) != 16 * m:
            p.fail(f"expected {m} literal codes")
        vec = _arr(payload, (m,))
        codes = fv.to_ints(vec) if m else []
        seen = set(codes)
        if len(seen) != len(codes):
            p.fail("repeated literal code")
        # i < j suffices: a code never complements itself
        if any(c ^ CONST_LIT in seen for c in codes):
            p.fail("complementary literal codes")
        if n and not m:
            p.fail("no assignment for a nonempty secret formula")
    if n and m:
        ev = poly_eval_grid(com_sec, vec)               # (n, m)
        if m == 1:
            p.check_zero(ev[:, 0], "secret clause unsatisfied")
        else:
            if s.is_prover:
                run = fv.row_prefix_prod(ev.x)[:, 1:m - 1]
                mid = s.commit(np.ascontiguousarray(run))
            else:
                mid = s.commit(shape=(n, m - 2))
            acc = _hstack(ev[:, :1], mid)                # acc[:, j] = e_0 ... e_j
            if m > 2:
                p.quad.add([(_contig(acc[:, :m - 2]).reshape(-1),
                             _contig(ev[:, 1:m - 1]).reshape(-1))],
                           l=_contig(mid).reshape(-1))
            p.quad.add([(_contig(acc[:, m - 2]), _contig(ev[:, m - 1]))])
    p.flush()
    p.checkpoint()


def _inv_or_zero(a: np.ndarray) -> np.ndarray:
    zero = ~np.any(a, axis=-1)
    b = a.copy()
    b[zero] = fv.scalar(1)
    inv = fv.batch_inv(b)
    inv[zero] = 0
    return inv


def run_p4(s: Session, com_sec: AuthVec):
    """No secret clause vanishes at a non-interface public literal."""
    p, st = s.party, s.stmt
    idx = s.wit.ctx.idx if s.is_prover else s.ctx.idx
    codes = []
    for v in s.inst.hidden_vars():
        codes += [idx[v], idx[v] ^ CONST_LIT]
    n, L = st.n_sec, len(codes)
    if n and L:
        ev = poly_eval_grid(com_sec, fv.to_vec(codes)).reshape(-1)
        if s.is_prover:
            inv = s.commit(s.cheat.inverses(_inv_or_zero(ev.x)))
        else:
            inv = s.commit(shape=n * L)
        p.quad.add([(ev, inv)], l=p.const(fv.ones(n * L)))
    p.flush()
    p.checkpoint()


def run_verdict(s: Session):
    if s.is_prover:
        if s.chan.recv(Tag.VERDICT) != b"accept":
            raise ProtocolAbort("verdict", "verifier did not accept")
    else:
        s.chan.send(Tag.VERDICT, b"accept")


def run_session(s: Session, inst: PublicInstance, wit: Witness = None,
                stmt: PublicStatement = None) -> Report:
    """Run every phase; never raises, the outcome is in the report."""
    s.inst, s.wit, s.stmt = inst, wit, stmt
    rep = Report(role=s.role, mode=inst.mode)
    t0 = time.perf_counter()
    try:
        with s.phase("hello"):
            run_hello(s)
        with s.phase("commit"):
            com_sec, com_pub = run_commit(s)
        with s.phase("P1"):
            run_p1(s, com_pub)
        with s.phase("P2"):
            run_p2(s, com_sec, com_pub)
        with s.phase("P3"):
            run_p3(s, com_sec)
        with s.phase("P4"):
            run_p4(s, com_sec)
        with s.phase("verdict"):
            run_verdict(s)
        rep.outcome = "accept"
    except ProtocolAbort as e:
        rep.outcome, rep.phase, rep.reason = "abort", e.phase, e.reason
    except Exception as e:
        rep.outcome, rep.phase = "error", s.party.phase
        rep.reason, rep.error = str(e), type(e).__name__
    s.times["total"] = time.perf_counter() - t0
    if wit is not None:
        s.times["solve"] = wit.t_solve
    rep.times = dict(s.times)
    if s.stmt is not None:
        rep.leakage = s.stmt.leakage()
    c = s.chan
    rep.bytes_sent, rep.bytes_recv = c.bytes_sent, c.bytes_recv
    rep.msgs_sent, rep.msgs_recv = c.msgs_sent, c.msgs_recv
    rep.tape_used, rep.tape_size = s.party.used, s.need
    return rep


def run_main(s: Session, spec, impl=None) -> Report:
    """The equivalence proof for one role; the prover also needs impl."""
    if not s.is_prover:
        return run_session(s, cec_instance(spec))
    try:
        inst, wit, st = prepare_cec(spec, impl, s.config, s.cheat)
    except NotEquivalent as e:
        s.chan.abort("hello", "prover declined: circuits are not equivalent")
        return Report(role=PROVER, outcome="not-equivalent", phase="hello", reason=str(e),
                      counterexample=e.counterexample)
    return run_session(s, inst, wit, st)


def run_blueprint(s: Session, phi_prop: CnfFormula, phi_sys: CnfFormula = None,
                  interface=None) -> Report:
    """Blueprint checks over a public property and a secret system formula.

    The verifier may leave `interface` as None to adopt the prover's
    declaration (it must lie inside the public formula's variables).
    """
    if not s.is_prover:
        inst = blueprint_instance(phi_prop, interface or ())
        if interface is None:
            inst.io = None
        return run_session(s, inst)
    try:
        inst, wit, st = prepare_blueprint(phi_prop, phi_sys, interface, s.config, s.cheat)
    except NotRefutable as e:
        s.chan.abort("hello", "prover declined: conjunction is satisfiable")
        return Report(role=PROVER, mode=BLUEPRINT, outcome="not-refutable", phase="hello",
                      reason=str(e))
    return run_session(s, inst, wit, st)


# -- in-process runs ---------------------------------------------------------

@dataclass
class LocalResult:
    prover: Report
    verifier: Report = None
    view: list = None              # frames the verifier received

    @property
    def outcome(self) -> str:
        if self.verifier is None:
            return self.prover.outcome
        return self.verifier.outcome

    @property
    def accepted(self) -> bool:
        return self.verifier is not None and self.verifier.accepted and self.prover.accepted

    @property
    def phase(self):
        return (self.verifier or self.prover).phase


def _local(config, inst, wit, stmt, v_inst, cheat, tape_slack, record_view):
    need = max(tape_size(stmt, inst.p4_count()),
               tape_size(stmt, v_inst.p4_count() if v_inst.io is not None else 0))
    ptape, vtape = dealer_gen(config.dealer_seed, max(need + tape_slack, 1))
    ca, cb = local_pair(config.timeout)
    ps = Session(PROVER, ca, ptape, config, cheat)
    vs = Session(VERIFIER, cb, vtape, config)
    if record_view:
        cb.view = []
    out = {}
    th = threading.Thread(target=lambda: out.setdefault("p", run_session(ps, inst, wit, stmt)),
                          daemon=True)
    th.start()
    vrep = run_session(vs, v_inst)
    th.join()
    return LocalResult(out["p"], vrep, cb.view)


def run_local(spec, impl, config: Config = None, cheat: Cheat = None, tape_slack: int = 0,
              verifier_spec=None, record_view: bool = False) -> LocalResult:
    """Prover and verifier in two threads over an in-process channel and dealer."""
    config = config or Config()
    try:
        inst, wit, st = prepare_cec(spec, impl, config, cheat)
    except NotEquivalent as e:
        return LocalResult(Report(role=PROVER, outcome="not-equivalent", phase="hello",
                                  reason=str(e), counterexample=e.counterexample))
    v_inst = cec_instance(verifier_spec if verifier_spec is not None else spec)
    return _local(config, inst, wit, st, v_inst, cheat, tape_slack, record_view)


def run_local_blueprint(phi_prop: CnfFormula, phi_sys: CnfFormula, interface=None,
                        config: Config = None, cheat: Cheat = None, tape_slack: int = 0,
                        verifier_interface="same", record_view: bool = False) -> LocalResult:
    config = config or Config()
    try:
        inst, wit, st = prepare_blueprint(phi_prop, phi_sys, interface, config, cheat)
    except NotRefutable as e:
        return LocalResult(Report(role=PROVER, mode=BLUEPRINT, outcome="not-refutable",
                                  phase="hello", reason=str(e)))
    vi = inst.io if verifier_interface == "same" else verifier_interface
    v_inst = blueprint_instance(phi_prop, vi or ())
    if vi is None:
        v_inst.io = None
    return _local(config, inst, wit, st, v_inst, cheat, tape_slack, record_view)
