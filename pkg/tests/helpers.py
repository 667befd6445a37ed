"""Random homogeneous data and small checks shared by the test modules."""
from __future__ import annotations

import random

from homapprox.groebner import vec_add
from homapprox.kernel import mono_div, mono_divides, mono_lcm, monomials_of_degree


def random_vector(ctx, degrees, d: int, rng: random.Random, density: float = 0.6) -> dict:
    v = {}
    for i, a in enumerate(degrees):
        for m in monomials_of_degree(d - a, ctx.weights) if d >= a else []:
            if rng.random() < density:
                v[(i, m)] = rng.randrange(1, ctx.p)
    return v


def random_gens(ctx, degrees, rng: random.Random, count: int, lo: int = 1, hi: int = 2) -> list[dict]:
    out = []
    for _ in range(10 * count):
        if len(out) == count:
            break
        v = random_vector(ctx, degrees, rng.randint(lo, hi), rng)
        if v:
            out.append(v)
    return out


def lead(ctx, v: dict):
    return max(v, key=ctx.tkey)


def s_vector(ctx, a: dict, b: dict):
    (pa, ma), (pb, mb) = lead(ctx, a), lead(ctx, b)
    if pa != pb:
        return None
    L = mono_lcm(ma, mb)
    p = ctx.p
    ca, cb = a[(pa, ma)], b[(pb, mb)]
    ua, ub = mono_div(L, ma), mono_div(L, mb)
    sa = {(i, tuple(x + y for x, y in zip(m, ua))): c * pow(ca, p - 2, p) % p for (i, m), c in a.items()}
    sb = {(i, tuple(x + y for x, y in zip(m, ub))): c * pow(cb, p - 2, p) % p for (i, m), c in b.items()}
    return vec_add(sa, sb, p, -1)


def buchberger_criterion_holds(gb) -> bool:
    """Every S-vector among basis elements and I*e_j reduces to zero."""
    ctx = gb.ctx
    elems = [e.vec for e in gb.basis]
    for pos in range(gb.F.rank):
        elems += [{(pos, m): c for m, c in g.items()} for g in ctx.ideal_gb]
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            s = s_vector(ctx, elems[i], elems[j])
            if s and gb.normal_form(s):
                return False
    return True


def divides_lead(ctx, basis, v) -> bool:
    pos, m = lead(ctx, v)
    return any(e.lead[0] == pos and mono_divides(e.lead[1], m) for e in basis)
