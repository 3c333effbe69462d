import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

from zkcec.backend.channel import local_pair
from zkcec.backend.dealer import dealer_gen
from zkcec.backend.zk import PROVER, VERIFIER, make_party
from zkcec.bench import corpus_pairs, default_corpus
from zkcec.circuit import load_netlist, parse_netlist

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CORPUS = default_corpus()
# ZKCEC_FULL_SWEEP=1 raises the seeded sweeps from their quick size to 10^4
FULL_SWEEP = os.environ.get("ZKCEC_FULL_SWEEP", "") not in ("", "0")


def sweep_size(quick=1000, full=10_000):
    return full if FULL_SWEEP else quick


def pair(name, corpus=CORPUS):
    d = Path(corpus)
    return load_netlist(d / f"{name}.spec.net"), load_netlist(d / f"{name}.impl.net")


def equivalent_pairs():
    return [n for n, _, _, eq in corpus_pairs(CORPUS) if eq]


AND_NET = "input a\ninput b\noutput c\ngate AND c a b\n"
NAND_NOT_NET = "input a\ninput b\noutput c\ngate NAND t a b\ngate NOT c t\n"
OR_NET = "input a\ninput b\noutput c\ngate OR c a b\n"


@pytest.fixture
def and_gate():
    return parse_netlist(AND_NET, "and")


_pool = ThreadPoolExecutor(1)


def two_party(prover_fn, verifier_fn, seed=0, count=256, hooks=None):
    """Run prover_fn(party) on a worker thread and verifier_fn(party) here.

    Returns (prover result, verifier result); an exception is returned in
    place of a result.  Fresh tapes and channel per call.
    """
    pt, vt = dealer_gen(f"test-{seed}", count)
    ca, cb = local_pair(timeout=30)
    rng_p, rng_v = random.Random(seed), random.Random((seed << 20) + 1)
    p = make_party(PROVER, ca, pt, rng_p, hooks)
    v = make_party(VERIFIER, cb, vt, rng_v)

    def wrap(fn, party):
        try:
            return fn(party)
        except Exception as e:          # noqa: BLE001 - handed back to the test
            return e

    fut = _pool.submit(wrap, prover_fn, p)
    vres = wrap(verifier_fn, v)
    if isinstance(vres, Exception):
        cb.close()                      # unblock a prover still waiting
    return fut.result(timeout=60), vres
