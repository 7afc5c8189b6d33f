"""Writes the shipped data files.

J = E4^3/Δ − 744 from integer q-series, the class 2B series
q^{-1}∏(1 + q^n)^{-24} + 24, and multiplication tables for small groups.

    python3 tools/j_oracle.py data
"""

import itertools
import sys
from pathlib import Path

TOP = 30


def sigma3(n):
    return sum(d**3 for d in range(1, n + 1) if n % d == 0)


def mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        if x:
            for j, y in enumerate(b[: n + 1 - i]):
                out[i + j] += x * y
    return out


def inverse(a, n):
    # a[0] == 1
    out = [0] * (n + 1)
    out[0] = 1
    for k in range(1, n + 1):
        out[k] = -sum(a[i] * out[k - i] for i in range(1, k + 1))
    return out


def j_coefficients(n):
    """c_0 … c_n of J, with c_0 = 0."""
    m = n + 2
    e4 = [1] + [240 * sigma3(k) for k in range(1, m + 1)]
    e4_cubed = mul(mul(e4, e4, m), e4, m)
    # Δ/q = ∏(1 − q^k)^24
    eta = [1] + [0] * m
    for k in range(1, m + 1):
        factor = [0] * (m + 1)
        factor[0], factor[k] = 1, -1
        for _ in range(24):
            eta = mul(eta, factor, m)
    j_times_q = mul(e4_cubed, inverse(eta, m), m)
    # j = q^{-1}·j_times_q; c_k is the q^{k+1} entry
    c = [j_times_q[k + 1] for k in range(n + 1)]
    c[0] -= 744
    return c


def t2b_coefficients(n):
    m = n + 2
    prod = [1] + [0] * m
    for k in range(1, m + 1):
        factor = [0] * (m + 1)
        factor[0], factor[k] = 1, 1
        for _ in range(24):
            prod = mul(prod, factor, m)
    inv = inverse(prod, m)
    c = [inv[k + 1] for k in range(n + 1)]
    c[0] += 24
    return c


def series_file(c, comment):
    lines = [f"# {comment}", "M 1", "L 1", f"K {len(c) - 1}", "-1 1"]
    lines += [f"{k} {v}" for k, v in enumerate(c) if k >= 1 and v != 0]
    return "\n".join(lines) + "\n"


def table_file(elements, op):
    index = {e: i for i, e in enumerate(elements)}
    rows = [" ".join(str(index[op(a, b)]) for b in elements) for a in elements]
    return f"order {len(elements)}\n" + "\n".join(rows) + "\n"


def perm_closure(gens):
    ident = tuple(range(len(gens[0])))
    seen, frontier = [ident], [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple(g[p[i]] for i in range(len(p)))
                if q not in seen:
                    seen.append(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def compose(x, y):
    # apply x first, then y
    return tuple(y[i] for i in x)


def quaternions():
    # ±1, ±i, ±j, ±k as (sign, unit)
    table = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elements = [(s, u) for u in "1ijk" for s in (1, -1)]

    def op(a, b):
        s, u = table[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    return elements, op


def character_file(series_by_power, kmax, pmax):
    lines = ["N 1", f"orders h={len(series_by_power)}", f"kmax {kmax}", f"pmax {pmax}"]
    for e, c in enumerate(series_by_power, start=1):
        lines.append(f"0 0 0 {e} L=1 1/1")
        lines += [f"0 0 {k + 1} {e} L=1 {v}/1" for k, v in enumerate(c) if k + 1 <= kmax and v != 0]
    return "\n".join(lines) + "\n"


def main(out):
    out = Path(out)
    (out / "groups").mkdir(parents=True, exist_ok=True)
    j = j_coefficients(TOP)
    assert j[1] == 196884 and j[2] == 21493760
    (out / "j.qs").write_text(series_file(j, "J = E4^3/Delta - 744"))
    (out / "t2b.qs").write_text(series_file(t2b_coefficients(TOP), "class 2B"))
    for n in range(1, 13):
        (out / "groups" / f"z{n}.txt").write_text(table_file(list(range(n)), lambda a, b, n=n: (a + b) % n))
    s3 = perm_closure([(1, 0, 2), (1, 2, 0)])
    (out / "groups" / "s3.txt").write_text(table_file(s3, compose))
    d4 = perm_closure([(1, 2, 3, 0), (3, 2, 1, 0)])
    (out / "groups" / "d4.txt").write_text(table_file(d4, compose))
    q8, op = quaternions()
    (out / "groups" / "q8.txt").write_text(table_file(q8, op))
    j80 = j_coefficients(80)
    (out / "j_module.txt").write_text(character_file([j80], 81, 8))
    (out / "t2b_module.txt").write_text(character_file([t2b_coefficients(80), j80], 81, 8))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
