"""Read-only memory over committed clause polynomials, with hidden read indices.

One-hot mode: every read t carries a bound L_t (reads may only touch cells
0..L_t-1) and a committed step vector s of length L_t with s_j = [j >= i],
where i is the hidden index.  The constraints

    s_j (s_j + 1) = 0          every entry is a bit
    s_{j-1} (s_j + 1) = 0      the bits never fall back to 0
    s_{L-1} = 1                the step happens inside the window

make e_j = s_j + s_{j-1} the indicator of position i, and

    sum_j e_j * F_j + D_t = 0

ties the read value to cell i, where F_j and D_t are the cells and the read
value evaluated at a random point chosen after all commitments.  The bound
replaces a range proof: an index outside the window has no valid s.
"""

from __future__ import annotations

import numpy as np

from .. import fieldvec as fv
from .zk import AuthVec, poly_eval

CHUNK = 1 << 16     # selector entries processed per block


class OneHotRom:
    mode = "onehot"

    def __init__(self, party):
        self.party = party
        self.cells = None
        self.bounds = []
        self.values = []
        self.sel = []

    def init(self, cells: AuthVec):
        # later initializations are ignored
        if self.cells is None:
            self.cells = cells

    @staticmethod
    def selector_count(bounds) -> int:
        return int(sum(bounds))

    def read(self, bounds, values: AuthVec, indices=None):
        """Register reads: values (T, W) committed, bounds (T,), indices prover-only."""
        bounds = [int(b) for b in bounds]
        total = sum(bounds)
        p = self.party
        if p.is_prover:
            s = np.zeros((total, 2), np.uint64)
            off = 0
            for b, i in zip(bounds, indices):
                if 0 <= i < b:
                    s[off + i:off + b, 0] = 1
                off += b
            s = p.commit(s)
        else:
            s = p.commit(total)
        self.bounds.extend(bounds)
        self.values.append(values)
        self.sel.append(s)

    def check(self, gamma: int):
        """Register all read constraints; the caller flushes the batch."""
        p = self.party
        if not self.bounds:
            return
        values = AuthVec.concat(self.values)
        sel = AuthVec.concat(self.sel)
        bounds = np.array(self.bounds, dtype=np.int64)
        ends = np.cumsum(bounds)
        p.check_equal_public(sel[ends - 1], fv.ones(len(bounds)), "ROM window")
        F = poly_eval(self.cells, gamma)
        D = poly_eval(values, gamma)
        S = int(ends[-1])
        T = len(bounds)
        block = _OneHotBlock(sel, bounds, F, D)
        p.quad.add_custom(block, n=S + (S - T) + T)


class _OneHotBlock:
    """Weighted sums of all one-hot constraints, in chunks of whole reads."""

    def __init__(self, sel, bounds, F, D):
        self.sel, self.bounds, self.F, self.D = sel, bounds, F, D
        self.starts = np.concatenate([[0], np.cumsum(bounds)])

    def _chunks(self):
        T = len(self.bounds)
        t0 = 0
        while t0 < T:
            t1 = t0 + 1
            while t1 < T and self.starts[t1 + 1] - self.starts[t0] <= CHUNK:
                t1 += 1
            yield t0, t1
            t0 = t1

    def _layout(self, t0, t1):
        o0, o1 = int(self.starts[t0]), int(self.starts[t1])
        b = self.bounds[t0:t1]
        local = np.arange(o1 - o0) - np.repeat(self.starts[t0:t1] - o0, b)
        first = local == 0
        # prev: positions whose successor lies in the same read
        last_mask = np.zeros(o1 - o0, bool)
        last_mask[(np.cumsum(b) - 1)] = True
        prev = np.nonzero(~last_mask)[0]
        seg = np.repeat(np.arange(t1 - t0), b)
        return o0, o1, local, first, prev, seg

    def _split(self, chi):
        S = int(self.starts[-1])
        T = len(self.bounds)
        return chi[:S], chi[S:2 * S - T], chi[2 * S - T:]

    @staticmethod
    def _e(a, first):
        e = a.copy()
        e[1:] ^= a[:-1]
        e[first] = a[first]
        return e

    def prover_sums(self, chi):
        cb, cm, cr = self._split(chi)
        a0 = np.zeros(2, np.uint64)
        a1 = np.zeros(2, np.uint64)
        Fx, Fm = self.F.x, self.F.m
        for t0, t1 in self._chunks():
            o0, o1, local, first, prev, seg = self._layout(t0, t1)
            sx, sm = self.sel.x[o0:o1], self.sel.m[o0:o1]
            w = cb[o0:o1]
            # s*s + s: the cross term x*m + m*x vanishes in characteristic 2
            a0 ^= fv.wdot(w, sm, sm)
            a1 ^= fv.dot(w, sm)
            w = cm[o0 - t0:o1 - t1]
            a0 ^= fv.wdot(w, sm[prev], sm[prev + 1])
            a1 ^= fv.wdot(w, sx[prev], sm[prev + 1]) ^ fv.wdot(w, sm[prev], sx[prev + 1])
            a1 ^= fv.dot(w, sm[prev])
            w = cr[t0:t1][seg]
            ex, em = self._e(sx, first), self._e(sm, first)
            gx, gm = Fx[local], Fm[local]
            a0 ^= fv.wdot(w, em, gm)
            a1 ^= fv.wdot(w, ex, gm) ^ fv.wdot(w, em, gx)
            a1 ^= fv.dot(cr[t0:t1], self.D.m[t0:t1])
        return a0, a1

    def verifier_sums(self, chi):
        cb, cm, cr = self._split(chi)
        b = np.zeros(2, np.uint64)
        lk = np.zeros(2, np.uint64)
        Fk = self.F.k
        for t0, t1 in self._chunks():
            o0, o1, local, first, prev, seg = self._layout(t0, t1)
            sk = self.sel.k[o0:o1]
            w = cb[o0:o1]
            b ^= fv.wdot(w, sk, sk)
            lk ^= fv.dot(w, sk)
            w = cm[o0 - t0:o1 - t1]
            b ^= fv.wdot(w, sk[prev], sk[prev + 1])
            lk ^= fv.dot(w, sk[prev])
            w = cr[t0:t1][seg]
            b ^= fv.wdot(w, self._e(sk, first), Fk[local])
            lk ^= fv.dot(cr[t0:t1], self.D.k[t0:t1])
        return b, lk
