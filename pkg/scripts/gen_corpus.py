"""Regenerate the bundled netlist corpus under src/zkcec/corpus/.

Each pair is <name>.spec.net / <name>.impl.net.  Pairs whose name starts with
"bad_" are deliberately inequivalent.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "zkcec" / "corpus"


class B:
    def __init__(self, name):
        self.name = name
        self.lines = [f"# {name}"]
        self.k = 0

    def inp(self, *nets):
        for n in nets:
            self.lines.append(f"input {n}")
        return nets

    def out(self, *nets):
        for n in nets:
            self.lines.append(f"output {n}")

    def g(self, kind, *ins, out=None):
        if out is None:
            self.k += 1
            out = f"n{self.k}"
        self.lines.append(f"gate {kind} {out} {' '.join(ins)}")
        return out

    def text(self):
        return "\n".join(self.lines) + "\n"


def ripple_adder(n, name):
    b = B(name)
    A = b.inp(*[f"a{i}" for i in range(n)])
    Bv = b.inp(*[f"b{i}" for i in range(n)])
    outs = [f"s{i}" for i in range(n)] + ["cout"]
    b.out(*outs)
    carry = None
    for i in range(n):
        x = b.g("XOR", A[i], Bv[i])
        if carry is None:
            b.g("BUF", x, out=f"s{i}")
            carry = b.g("AND", A[i], Bv[i], out="cout" if n == 1 else None)
            continue
        b.g("XOR", x, carry, out=f"s{i}")
        t1 = b.g("AND", A[i], Bv[i])
        t2 = b.g("AND", x, carry)
        carry = b.g("OR", t1, t2, out="cout" if i == n - 1 else None)
    return b.text()


def nand_adder(n, name):
    # sum through XNOR pairs, carry as a NAND-NAND majority
    b = B(name)
    A = b.inp(*[f"a{i}" for i in range(n)])
    Bv = b.inp(*[f"b{i}" for i in range(n)])
    b.out(*[f"y{i}" for i in range(n)], "co")
    carry = None
    for i in range(n):
        if carry is None:
            b.g("XNOR", A[i], Bv[i], out="t0")
            b.g("NOT", "t0", out="y0")
            u = b.g("NAND", A[i], Bv[i])
            carry = b.g("NOT", u, out="co" if n == 1 else None)
            continue
        xn = b.g("XNOR", A[i], Bv[i])
        b.g("XNOR", xn, carry, out=f"y{i}")
        p = b.g("NAND", A[i], Bv[i])
        q = b.g("NAND", A[i], carry)
        r = b.g("NAND", Bv[i], carry)
        pq = b.g("AND", p, q)
        carry = b.g("NAND", pq, r, out="co" if i == n - 1 else None)
    return b.text()


def broken_adder(n, name):
    # the final carry OR becomes an AND
    text = ripple_adder(n, name)
    return text.replace("gate OR cout", "gate AND cout")


def comparator2(name, alt=False):
    b = B(name)
    a1, a0, b1, b0 = b.inp("a1", "a0", "b1", "b0")
    b.out("gt", "eq", "lt")
    if not alt:
        e1 = b.g("XNOR", a1, b1)
        e0 = b.g("XNOR", a0, b0)
        b.g("AND", e1, e0, out="eq")
        nb1 = b.g("NOT", b1)
        nb0 = b.g("NOT", b0)
        na1 = b.g("NOT", a1)
        na0 = b.g("NOT", a0)
        g1 = b.g("AND", a1, nb1)
        g0 = b.g("AND", a0, nb0)
        g0e = b.g("AND", g0, e1)
        b.g("OR", g1, g0e, out="gt")
        l1 = b.g("AND", na1, b1)
        l0 = b.g("AND", na0, b0)
        l0e = b.g("AND", l0, e1)
        b.g("OR", l1, l0e, out="lt")
    else:
        # a - b through a 2-bit subtractor, flags from borrow and difference
        d0 = b.g("XOR", a0, b0)
        na0 = b.g("NOT", a0)
        br0 = b.g("AND", na0, b0)
        x1 = b.g("XOR", a1, b1)
        d1 = b.g("XOR", x1, br0)
        na1 = b.g("NOT", a1)
        t1 = b.g("AND", na1, b1)
        nx1 = b.g("NOT", x1)
        t2 = b.g("AND", nx1, br0)
        b.g("OR", t1, t2, out="lt")
        nz = b.g("OR", d0, d1)
        b.g("NOT", nz, out="eq")
        b.g("NOR", "lt", "eq", out="gt")
    return b.text()


def multiplier(n, name, reverse=False):
    b = B(name)
    A = b.inp(*[f"a{i}" for i in range(n)])
    Bv = b.inp(*[f"b{i}" for i in range(n)])
    outs = [f"p{i}" for i in range(2 * n)]
    b.out(*outs)
    cols = [[] for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            cols[i + j].append(b.g("AND", A[i], Bv[j]))
    if reverse:
        cols = [list(reversed(c)) for c in cols]
    for k in range(2 * n):
        c = cols[k]
        while len(c) > 1:
            if len(c) >= 3 and not reverse:
                x, y, z = c.pop(0), c.pop(0), c.pop(0)
                t = b.g("XOR", x, y)
                s = b.g("XOR", t, z)
                u = b.g("AND", x, y)
                v = b.g("AND", t, z)
                cy = b.g("OR", u, v)
                c.append(s)
            else:
                x, y = c.pop(0), c.pop(0)
                s = b.g("XOR", x, y)
                cy = b.g("AND", x, y)
                c.append(s)
            if k + 1 < 2 * n:
                cols[k + 1].append(cy)
        if c:
            b.g("BUF", c[0], out=f"p{k}")
        else:
            b.g("XOR", A[0], A[0], out=f"p{k}")
    return b.text()


def parity(n, name, tree):
    b = B(name)
    xs = list(b.inp(*[f"x{i}" for i in range(n)]))
    b.out("par")
    if tree:
        while len(xs) > 2:
            nxt = []
            for i in range(0, len(xs) - 1, 2):
                nxt.append(b.g("XNOR", xs[i], xs[i + 1]) if i % 4 == 0 else b.g("XOR", xs[i], xs[i + 1]))
            if len(xs) % 2:
                nxt.append(xs[-1])
            xs = nxt
        # each XNOR flips the result once; count them to fix polarity
        flips = sum(1 for l in b.lines if l.startswith("gate XNOR"))
        if flips % 2:
            b.g("XNOR", xs[0], xs[1], out="par")
        else:
            b.g("XOR", xs[0], xs[1], out="par")
    else:
        acc = xs[0]
        for i, x in enumerate(xs[1:], 1):
            acc = b.g("XOR", acc, x, out="par" if i == n - 1 else None)
    return b.text()


def decoder3(name, alt=False):
    b = B(name)
    s = b.inp("s0", "s1", "s2")
    b.out(*[f"d{i}" for i in range(8)])
    ns = [b.g("NOT", x) for x in s]
    for i in range(8):
        lit = [s[k] if (i >> k) & 1 else ns[k] for k in range(3)]
        if not alt:
            t = b.g("AND", lit[0], lit[1])
            b.g("AND", t, lit[2], out=f"d{i}")
        else:
            # d_i = NOR of the complemented literals
            comp = [ns[k] if (i >> k) & 1 else s[k] for k in range(3)]
            t = b.g("OR", comp[1], comp[2])
            b.g("NOR", comp[0], t, out=f"d{i}")
    return b.text()


def sbox_table(seed):
    rng = random.Random(seed)
    t = list(range(16))
    rng.shuffle(t)
    return t


def aes_sbox_table():
    def mul(a, b):
        r = 0
        while b:
            if b & 1:
                r ^= a
            a = (a << 1) ^ (0x11B if a & 0x80 else 0)
            b >>= 1
        return r
    inv = [0] * 256
    for a in range(1, 256):
        inv[a] = next(b for b in range(1, 256) if mul(a, b) == 1)
    out = []
    for a in range(256):
        b = inv[a]
        rot = lambda k: ((b << k) | (b >> (8 - k))) & 0xFF
        out.append(b ^ rot(1) ^ rot(2) ^ rot(3) ^ rot(4) ^ 0x63)
    return out


def sbox_sop(table, name, n=4):
    # sum of minterms per output bit
    b = B(name)
    x = b.inp(*[f"x{k}" for k in range(n)])
    b.out(*[f"y{k}" for k in range(n)])
    nx = [b.g("NOT", v) for v in x]
    for bit in range(n):
        terms = []
        for v in range(1 << n):
            if (table[v] >> bit) & 1:
                lit = [x[k] if (v >> k) & 1 else nx[k] for k in range(n)]
                while len(lit) > 1:
                    lit = [b.g("AND", lit[i], lit[i + 1]) if i + 1 < len(lit) else lit[i]
                           for i in range(0, len(lit), 2)]
                terms.append(lit[0])
        acc = terms[0]
        for i, t in enumerate(terms[1:], 1):
            acc = b.g("OR", acc, t, out=f"y{bit}" if i == len(terms) - 1 else None)
        if len(terms) == 1:
            b.g("BUF", acc, out=f"y{bit}")
    return b.text()


def sbox_mux(table, name, n=4):
    # Shannon expansion as a mux tree on x_{n-1} ... x0
    b = B(name)
    x = b.inp(*[f"x{k}" for k in range(n)])
    b.out(*[f"y{k}" for k in range(n)])
    zero = b.g("XOR", x[0], x[0])
    one = b.g("XNOR", x[0], x[0])
    nx = [b.g("NOT", v) for v in x]

    def mux(sel, hi, lo):
        if hi == lo:
            return hi
        p = b.g("AND", x[sel], hi)
        q = b.g("AND", nx[sel], lo)
        return b.g("OR", p, q)

    for bit in range(n):
        level = [one if (table[v] >> bit) & 1 else zero for v in range(1 << n)]
        for sel in range(n):
            level = [mux(sel, level[2 * i + 1], level[2 * i]) for i in range(len(level) // 2)]
        b.g("BUF", level[0], out=f"y{bit}")
    return b.text()


def and_spec(name):
    b = B(name)
    b.inp("a", "b")
    b.out("c")
    b.g("AND", "a", "b", out="c")
    return b.text()


def and_impl(name):
    b = B(name)
    b.inp("a", "b")
    b.out("c")
    n = b.g("NAND", "a", "b")
    b.g("NOT", n, out="c")
    return b.text()


def or_impl(name):
    b = B(name)
    b.inp("a", "b")
    b.out("c")
    b.g("OR", "a", "b", out="c")
    return b.text()


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    table = sbox_table(2024)
    bad_table = list(table)
    bad_table[3], bad_table[9] = bad_table[9], bad_table[3]
    pairs = {
        "and2": (and_spec("and2_spec"), and_impl("and2_impl")),
        "adder2": (ripple_adder(2, "adder2_spec"), nand_adder(2, "adder2_impl")),
        "adder3": (ripple_adder(3, "adder3_spec"), nand_adder(3, "adder3_impl")),
        "adder4": (ripple_adder(4, "adder4_spec"), nand_adder(4, "adder4_impl")),
        "cmp2": (comparator2("cmp2_spec"), comparator2("cmp2_impl", alt=True)),
        "mul3": (multiplier(3, "mul3_spec"), multiplier(3, "mul3_impl", reverse=True)),
        "parity8": (parity(8, "parity8_spec", tree=False), parity(8, "parity8_impl", tree=True)),
        "dec3": (decoder3("dec3_spec"), decoder3("dec3_impl", alt=True)),
        "sbox4": (sbox_sop(table, "sbox4_spec"), sbox_mux(table, "sbox4_impl")),
        "bad_and_or": (and_spec("bad_and_or_spec"), or_impl("bad_and_or_impl")),
        "bad_adder2": (ripple_adder(2, "bad_adder2_spec"), broken_adder(2, "bad_adder2_impl")),
        "bad_parity8": (parity(8, "bad_parity8_spec", tree=False), parity(8, "bad_parity8_impl", tree=False).replace("gate XOR par", "gate XNOR par")),
        "bad_sbox4": (sbox_sop(table, "bad_sbox4_spec"), sbox_mux(bad_table, "bad_sbox4_impl")),
    }
    index = {}
    for name, (spec, impl) in pairs.items():
        (OUT / f"{name}.spec.net").write_text(spec)
        (OUT / f"{name}.impl.net").write_text(impl)
        index[name] = {"equivalent": not name.startswith("bad_")}
    (OUT / "index.json").write_text(json.dumps(index, indent=1) + "\n")

    # beyond desk scale: kept apart so the bench can show a graceful refusal
    large = OUT / "large"
    large.mkdir(exist_ok=True)
    aes = aes_sbox_table()
    (large / "aes_sbox.spec.net").write_text(sbox_sop(aes, "aes_sbox_spec", 8))
    (large / "aes_sbox.impl.net").write_text(sbox_mux(aes, "aes_sbox_impl", 8))
    (large / "index.json").write_text(json.dumps({"aes_sbox": {"equivalent": True}}, indent=1)
                                      + "\n")


if __name__ == "__main__":
    main()
