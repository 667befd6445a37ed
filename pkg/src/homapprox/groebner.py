"""Groebner bases for graded submodules of free modules over R = S/I.

Vectors are sparse dicts ``{(position, monomial): coefficient}``.  Working over
R is done by treating ``f * e_j`` (``f`` in the reduced basis of I) as implicit
basis elements in every position, so membership is always decided modulo
``I * F``.

The Buchberger loop is graded (normal strategy): pairs and inputs are handled
in increasing degree, pairs before inputs of the same degree.  With tracking
enabled every basis element remembers how it was built from the inputs; an
S-vector (or an input) that reduces to zero then hands back a syzygy of the
inputs.  By Schreyer's theorem these syzygies generate the whole syzygy module
of the inputs modulo I.
"""
from __future__ import annotations

import heapq
from itertools import combinations
from typing import Iterable, Sequence

from .kernel import (PolynomialRing, mono_degree, mono_div, mono_divides, mono_lcm,
                     mono_mul, padd, pdegree)

_POS_RADIX = 1 << 20


class GradingError(ValueError):
    pass


# ------------------------------------------------------------------ vectors

def vec_add(a: dict, b: dict, p: int, scale: int = 1) -> dict:
    out = dict(a)
    for t, c in b.items():
        v = (out.get(t, 0) + scale * c) % p
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def vec_scale(a: dict, c: int, p: int) -> dict:
    c %= p
    if not c:
        return {}
    return {t: (v * c) % p for t, v in a.items()}


def vec_mul_poly(a: dict, f: dict, p: int) -> dict:
    """Multiply every coordinate of vector ``a`` by polynomial ``f``."""
    out: dict = {}
    for (pos, m), c in a.items():
        for fm, fc in f.items():
            t = (pos, mono_mul(m, fm))
            v = (out.get(t, 0) + c * fc) % p
            if v:
                out[t] = v
            else:
                del out[t]
    return out


def vec_from_polys(polys: Sequence[dict]) -> dict:
    return {(i, m): c for i, f in enumerate(polys) for m, c in f.items()}


def vec_to_polys(v: dict, rank: int) -> list[dict]:
    out: list[dict] = [{} for _ in range(rank)]
    for (i, m), c in v.items():
        out[i][m] = c
    return out


def vec_shift_positions(v: dict, offset: int) -> dict:
    return {(i + offset, m): c for (i, m), c in v.items()}


def vec_restrict(v: dict, lo: int, hi: int, offset: int = 0) -> dict:
    """Coordinates ``lo <= i < hi`` re-indexed to start at ``offset``."""
    return {(i - lo + offset, m): c for (i, m), c in v.items() if lo <= i < hi}


def vec_degree(v: dict, weights, gen_degrees) -> int | None:
    degs = {mono_degree(m, weights) + gen_degrees[i] for (i, m) in v}
    if not degs:
        return None
    if len(degs) > 1:
        raise GradingError("vector is not homogeneous")
    return degs.pop()


def apply_matrix(columns: Sequence[dict], v: dict, p: int) -> dict:
    """Image of ``v`` under the matrix whose j-th column is ``columns[j]``."""
    out: dict = {}
    for (j, m), c in v.items():
        col = columns[j]
        for (i, cm), cc in col.items():
            t = (i, mono_mul(cm, m))
            val = (out.get(t, 0) + c * cc) % p
            if val:
                out[t] = val
            else:
                del out[t]
    return out


# ---------------------------------------------------------------- contexts

class FreeModule:
    """Graded free module over a ring context; ``degrees`` are generator degrees.

    ``twists`` follows the R(t) convention: a generator of degree a is R(-a).
    """

    def __init__(self, ctx: "RingContext", degrees: Sequence[int]):
        self.ctx = ctx
        self.degrees = tuple(int(d) for d in degrees)

    @classmethod
    def from_twists(cls, ctx, twists):
        return cls(ctx, [-t for t in twists])

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def twists(self) -> tuple:
        return tuple(-d for d in self.degrees)

    def degree_of(self, v: dict) -> int | None:
        return vec_degree(v, self.ctx.weights, self.degrees)

    def unit(self, j: int) -> dict:
        return {(j, self.ctx.S.one_mono()): 1}

    def __eq__(self, other):
        return isinstance(other, FreeModule) and self.ctx is other.ctx and self.degrees == other.degrees

    def __hash__(self):
        return hash((id(self.ctx), self.degrees))


class _Elt:
    __slots__ = ("vec", "lead", "deg", "rep", "idx")

    def __init__(self, vec, lead, deg, rep, idx):
        self.vec = vec
        self.lead = lead
        self.deg = deg
        self.rep = rep
        self.idx = idx


class RingContext:
    """R = S/I for a homogeneous ideal I of the graded polynomial ring S."""

    def __init__(self, S: PolynomialRing, ideal: Iterable = (), name: str = "R"):
        self.S = S
        self.name = name
        self.p = S.p
        self.weights = S.weights
        self.nvars = S.nvars
        gens = []
        for f in ideal:
            d = f.as_dict() if hasattr(f, "as_dict") else dict(f)
            d = {m: c % S.p for m, c in d.items() if c % S.p}
            if not d:
                continue
            if any(m == S.one_mono() for m in d):
                raise ValueError("ideal contains a unit; the quotient ring is zero")
            pdegree(d, S.weights)
            gens.append(d)
        self.ideal_gens = gens
        self._tkeys: dict = {}
        self.ideal_gb: list[dict] = []
        self.ideal_leads: list[tuple] = []
        if gens:
            amb = RingContext(S, (), name=name + "_S")
            F = FreeModule(amb, [0])
            run = buchberger(amb, F.degrees, [{(0, m): c for m, c in g.items()} for g in gens])
            self.ideal_gb = [{m: c for (_, m), c in e.vec.items()} for e in run.basis]
            self.ideal_leads = [e.lead[1] for e in run.basis]
        self.dimension = krull_dimension(self.ideal_leads, self.nvars)
        self._ambient = None
        self.cache: dict = {}

    # term keys: monomial first, lower position index wins ties
    def tkey(self, t) -> int:
        k = self._tkeys.get(t)
        if k is None:
            k = self.S.order.key(t[1]) * _POS_RADIX + (_POS_RADIX - 1 - t[0])
            self._tkeys[t] = k
        return k

    def ambient(self) -> "RingContext":
        """The polynomial ring S itself as a context (I = 0)."""
        if not self.ideal_gens:
            return self
        if self._ambient is None:
            self._ambient = RingContext(self.S, (), name=self.name + "_S")
        return self._ambient

    def free(self, degrees: Sequence[int]) -> FreeModule:
        return FreeModule(self, degrees)

    def poly(self, text: str) -> dict:
        return self.S(text).as_dict()

    def reduce_poly(self, f: dict) -> dict:
        """Normal form of a polynomial modulo I."""
        v = reduce_vector(self, {(0, m): c for m, c in f.items()}, [])[0]
        return {m: c for (_, m), c in v.items()}

    def describe(self) -> dict:
        return {
            "name": self.name,
            "variables": list(self.S.names),
            "weights": list(self.weights),
            "char": self.p,
            "order": self.S.order.kind,
            "ideal": [self.S.format(g) for g in self.ideal_gens],
        }


def krull_dimension(leads: Sequence[tuple], nvars: int) -> int:
    """Largest set of variables containing the support of no lead monomial."""
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in leads]
    for size in range(nvars, -1, -1):
        for U in combinations(range(nvars), size):
            Us = set(U)
            if not any(s <= Us for s in supports):
                return size
    return 0


# -------------------------------------------------------------- reduction

def _find_reducer(ctx, index, pos, mono):
    for lm, e in index.get(pos, ()):
        if mono_divides(lm, mono):
            return lm, e
    for lm, f in zip(ctx.ideal_leads, ctx.ideal_gb):
        if mono_divides(lm, mono):
            return lm, f
    return None


def reduce_vector(ctx: RingContext, vec: dict, basis: Sequence[_Elt], index=None,
                  rep: dict | None = None, full: bool = True):
    """Reduce ``vec`` by ``basis`` and the implicit ideal elements.

    Returns ``(remainder, quotient_rep)`` where ``quotient_rep`` accumulates
    ``sum q * rep(g)`` when ``rep`` is given (else None).  All basis elements
    must be monic.
    """
    p = ctx.p
    tkey = ctx.tkey
    if index is None:
        index = _build_index(basis)
    v = dict(vec)
    heap = [(-tkey(t), t) for t in v]
    heapq.heapify(heap)
    rem = {}
    qrep = dict(rep) if rep is not None else None
    while heap:
        _, t = heapq.heappop(heap)
        c = v.get(t)
        if c is None:
            continue
        pos, mono = t
        found = _find_reducer(ctx, index, pos, mono)
        if found is None:
            rem[t] = c
            del v[t]
            if not full:
                break
            continue
        lm, g = found
        q = mono_div(mono, lm)
        if isinstance(g, _Elt):
            items = g.vec.items()
            for (gp, gm), gc in items:
                tt = (gp, mono_mul(gm, q))
                old = v.get(tt)
                nv = ((old or 0) - c * gc) % p
                if nv:
                    if old is None:
                        heapq.heappush(heap, (-tkey(tt), tt))
                    v[tt] = nv
                elif old is not None:
                    del v[tt]
            if qrep is not None and g.rep:
                for (ri, rm), rc in g.rep.items():
                    tt = (ri, mono_mul(rm, q))
                    nv = (qrep.get(tt, 0) + c * rc) % p
                    if nv:
                        qrep[tt] = nv
                    else:
                        qrep.pop(tt, None)
        else:
            # ideal generator g (a monic polynomial dict) placed at ``pos``
            for gm, gc in g.items():
                tt = (pos, mono_mul(gm, q))
                old = v.get(tt)
                nv = ((old or 0) - c * gc) % p
                if nv:
                    if old is None:
                        heapq.heappush(heap, (-tkey(tt), tt))
                    v[tt] = nv
                elif old is not None:
                    del v[tt]
    if not full and v:
        rem.update(v)
    return rem, qrep


def _build_index(basis):
    index: dict = {}
    for e in basis:
        index.setdefault(e.lead[0], []).append((e.lead[1], e))
    return index


def _reduce_rep_mod_ideal(ctx, rep):
    if not ctx.ideal_gb or not rep:
        return rep
    return reduce_vector(ctx, rep, ())[0]


def _lead(ctx, v):
    tkey = ctx.tkey
    return max(v, key=tkey)


def _make_monic(ctx, vec, rep):
    lt = _lead(ctx, vec)
    c = vec[lt]
    if c != 1:
        inv = pow(c, -1, ctx.p)
        vec = vec_scale(vec, inv, ctx.p)
        if rep is not None:
            rep = vec_scale(rep, inv, ctx.p)
    return vec, rep, lt


# ------------------------------------------------------------- buchberger

class GBRun:
    """Outcome of one Buchberger run."""

    def __init__(self, ctx, degrees, basis, syzygies, kept, input_degrees, tracked):
        self.ctx = ctx
        self.degrees = degrees
        self.basis = basis
        self.syzygies = syzygies
        self.kept = kept
        self.input_degrees = input_degrees
        self.tracked = tracked
        self.index = _build_index(basis)


def buchberger(ctx: RingContext, degrees: Sequence[int], inputs: Sequence[dict], *,
               track: bool = False, candidates_from: int | None = None,
               input_degrees: Sequence[int | None] | None = None,
               track_from: int = 0) -> GBRun:
    """Reduced Groebner basis of ``<inputs> + I*F`` in the free module with
    generator ``degrees``.

    Inputs with index ``>= candidates_from`` are candidates: one that reduces to
    zero on arrival is dropped (``kept[i] = False``) and yields no syzygy, which
    makes the kept candidates a minimal generating set modulo the earlier
    inputs.  With ``track`` the run records syzygies of the non-dropped inputs.
    Inputs before ``track_from`` are treated like elements of I: they take part
    in the basis but carry no coordinate, so syzygies and representations are
    those of the remaining inputs modulo them (coordinates re-indexed from 0).
    """
    p = ctx.p
    weights = ctx.weights
    tkey = ctx.tkey
    n_in = len(inputs)
    if candidates_from is None:
        candidates_from = n_in
    degs_in = []
    for i, v in enumerate(inputs):
        d = vec_degree(v, weights, degrees)
        if d is None:
            d = input_degrees[i] if input_degrees is not None else None
            if d is None:
                raise GradingError(f"input {i} is zero and has no declared degree")
        elif input_degrees is not None and input_degrees[i] is not None and input_degrees[i] != d:
            raise GradingError(f"input {i} has degree {d}, declared {input_degrees[i]}")
        degs_in.append(d)
    one = ctx.S.one_mono()

    basis: list[_Elt] = []
    index: dict = {}
    syzygies: list[dict] = []
    kept = [True] * n_in
    done_pairs: set = set()
    pending: list = []  # heap of (deg, lcmkey, i, j)
    pending_set: set = set()

    ideal_leads = ctx.ideal_leads
    n_ideal = len(ideal_leads)

    def lead_of(j, pos):
        if j >= 0:
            return basis[j].lead[1]
        return ideal_leads[-j - 1]

    def add_pairs(new: _Elt):
        pos, lm = new.lead
        i = new.idx
        pdeg = degrees[pos]
        for lm2, e in index.get(pos, ()):
            L = mono_lcm(lm, lm2)
            key = (mono_degree(L, weights) + pdeg, tkey((pos, L)), e.idx, i)
            heapq.heappush(pending, key)
            pending_set.add((e.idx, i))
        for f in range(n_ideal):
            L = mono_lcm(lm, ideal_leads[f])
            key = (mono_degree(L, weights) + pdeg, tkey((pos, L)), -f - 1, i)
            heapq.heappush(pending, key)
            pending_set.add((-f - 1, i))

    def pair_done(a, b):
        if a < 0 and b < 0:
            return True
        if a > b:
            a, b = b, a
        return (a, b) in done_pairs

    def chain_skip(i, j, pos, L):
        # Buchberger's second criterion: some k with lead | L and both
        # (i,k), (j,k) already treated.
        for lm, e in index.get(pos, ()):
            k = e.idx
            if k == i or k == j or not mono_divides(lm, L):
                continue
            if pair_done(i, k) and pair_done(j, k):
                return True
        for f in range(n_ideal):
            k = -f - 1
            if k == i or k == j or not mono_divides(ideal_leads[f], L):
                continue
            if pair_done(i, k) and pair_done(j, k):
                return True
        return False

    def insert(vec, rep, deg):
        vec, rep, lt = _make_monic(ctx, vec, rep)
        e = _Elt(vec, lt, deg, rep, len(basis))
        basis.append(e)
        index.setdefault(lt[0], []).append((lt[1], e))
        add_pairs(e)

    order = sorted(range(n_in), key=lambda i: (degs_in[i], i >= candidates_from, i))
    ip = 0
    while ip < len(order) or pending:
        next_in = degs_in[order[ip]] if ip < len(order) else None
        if pending and (next_in is None or pending[0][0] <= next_in):
            deg, _, a, b = heapq.heappop(pending)
            pending_set.discard((a, b))
            ea = basis[a] if a >= 0 else None
            eb = basis[b]
            pos = eb.lead[0]
            lb = eb.lead[1]
            la = lead_of(a, pos)
            L = mono_lcm(la, lb)
            if chain_skip(a, b, pos, L):
                done_pairs.add((a, b) if a < b else (b, a))
                continue
            qb = mono_div(L, lb)
            qa = mono_div(L, la)
            s = {}
            for (gp, gm), gc in eb.vec.items():
                s[(gp, mono_mul(gm, qb))] = gc
            if ea is not None:
                for (gp, gm), gc in ea.vec.items():
                    t = (gp, mono_mul(gm, qa))
                    v = (s.get(t, 0) - gc) % p
                    if v:
                        s[t] = v
                    else:
                        s.pop(t, None)
            else:
                f = ctx.ideal_gb[-a - 1]
                for gm, gc in f.items():
                    t = (pos, mono_mul(gm, qa))
                    v = (s.get(t, 0) - gc) % p
                    if v:
                        s[t] = v
                    else:
                        s.pop(t, None)
            srep = None
            if track:
                srep = {}
                if eb.rep:
                    srep = {(ri, mono_mul(rm, qb)): rc for (ri, rm), rc in eb.rep.items()}
                if ea is not None and ea.rep:
                    for (ri, rm), rc in ea.rep.items():
                        t = (ri, mono_mul(rm, qa))
                        v = (srep.get(t, 0) - rc) % p
                        if v:
                            srep[t] = v
                        else:
                            srep.pop(t, None)
            done_pairs.add((a, b) if a < b else (b, a))
            rem, q = reduce_vector(ctx, s, basis, index, rep={} if track else None)
            if track:
                newrep = _reduce_rep_mod_ideal(ctx, vec_add(srep, q, p, -1))
            if rem:
                insert(rem, newrep if track else None, deg)
            elif track and newrep:
                syzygies.append(newrep)
        else:
            i = order[ip]
            ip += 1
            vec = inputs[i]
            rem, q = reduce_vector(ctx, vec, basis, index, rep={} if track else None)
            if track:
                base = {(i - track_from, one): 1} if i >= track_from else {}
                newrep = _reduce_rep_mod_ideal(ctx, vec_add(base, q, p, -1))
            if rem:
                insert(rem, newrep if track else None, degs_in[i])
            elif i >= candidates_from:
                kept[i] = False
            elif track and newrep:
                syzygies.append(newrep)

    # inter-reduce tails
    for e in basis:
        lt = e.lead
        c = e.vec[lt]
        tail = dict(e.vec)
        del tail[lt]
        others = [g for g in basis if g is not e]
        oidx = _build_index(others)
        rem, q = reduce_vector(ctx, tail, others, oidx, rep={} if track else None)
        rem[lt] = c
        e.vec = rem
        if track:
            e.rep = _reduce_rep_mod_ideal(ctx, vec_add(e.rep, q, p, -1))
    basis.sort(key=lambda e: tkey(e.lead))
    for k, e in enumerate(basis):
        e.idx = k
    return GBRun(ctx, tuple(degrees), basis, syzygies, kept, degs_in, track)


# ---------------------------------------------------------------- API

class ModuleGB:
    """Groebner basis of a submodule of ``F`` (I * F included)."""

    def __init__(self, F: FreeModule, gens: Sequence[dict], track: bool = False,
                 run: GBRun | None = None):
        self.F = F
        self.ctx = F.ctx
        self.gens = list(gens)
        self.run = run if run is not None else buchberger(F.ctx, F.degrees, self.gens, track=track)
        self.basis = self.run.basis
        self.order = {"kind": "term-over-position", "monomial_order": self.ctx.S.order.describe()}

    @property
    def tracked(self) -> bool:
        return self.run.tracked

    def normal_form(self, v: dict) -> dict:
        return reduce_vector(self.ctx, v, self.basis, self.run.index)[0]

    def contains(self, v: dict) -> bool:
        return not self.normal_form(v)

    def lift(self, v: dict) -> dict | None:
        """Coefficients ``c`` (a vector over the generators) with
        ``v = sum c_i gens_i`` modulo I, or None when ``v`` is not in the span."""
        if not self.run.tracked:
            raise ValueError("lift needs a tracked Groebner basis")
        rem, q = reduce_vector(self.ctx, v, self.basis, self.run.index, rep={})
        if rem:
            return None
        return _reduce_rep_mod_ideal(self.ctx, q)

    def leads(self) -> dict:
        out: dict = {}
        for e in self.basis:
            out.setdefault(e.lead[0], []).append(e.lead[1])
        return out

    def vectors(self) -> list[dict]:
        return [e.vec for e in self.basis]


def module_groebner(gens: Sequence[dict], F: FreeModule, track: bool = False) -> ModuleGB:
    return ModuleGB(F, gens, track=track)


def normal_form(v: dict, gb: ModuleGB) -> dict:
    return gb.normal_form(v)


def syzygies(gens: Sequence[dict], F: FreeModule,
             degrees: Sequence[int] | None = None) -> tuple[FreeModule, list[dict]]:
    """Generators of ``{c : sum c_i gens_i in I*F}``.

    Returns the free module G (one generator per input, degree = input degree)
    and syzygy vectors in G.  ``degrees`` is required when some input is zero.
    """
    run = buchberger(F.ctx, F.degrees, gens, track=True, input_degrees=degrees)
    G = FreeModule(F.ctx, run.input_degrees)
    return G, list(run.syzygies)
