"""Finitely presented graded modules M = coker(A: F1 -> F0) and their maps."""
from __future__ import annotations

import itertools
from typing import Sequence

from .groebner import (FreeModule, GradingError, ModuleGB, RingContext, apply_matrix,
                       buchberger, reduce_vector, vec_add, vec_degree, vec_scale,
                       vec_shift_positions)
from .kernel import mono_degree, mono_divides, monomials_of_degree

_ids = itertools.count(1)

DEFAULT_WINDOW = 12


class FPModule:
    """coker of ``relations`` (columns in the free module with generator ``degrees``)."""

    def __init__(self, ctx: RingContext, degrees: Sequence[int], relations: Sequence[dict] = (),
                 name: str | None = None, gb: ModuleGB | None = None):
        self.ctx = ctx
        self.degrees = tuple(int(d) for d in degrees)
        F0 = FreeModule(ctx, self.degrees)
        rels = []
        for r in relations:
            if r:
                F0.degree_of(r)
                rels.append(r)
        self.relations = rels
        self.F0 = F0
        self.uid = next(_ids)
        self.name = name
        self._gb = gb
        self._hilb: dict = {}
        self._zero = None
        self.cache: dict = {}

    @classmethod
    def free(cls, ctx, degrees, name=None) -> "FPModule":
        return cls(ctx, degrees, (), name=name)

    @classmethod
    def zero(cls, ctx) -> "FPModule":
        return cls(ctx, (), (), name="0")

    @property
    def ngens(self) -> int:
        return len(self.degrees)

    @property
    def twists(self) -> tuple:
        return tuple(-d for d in self.degrees)

    @property
    def rel_degrees(self) -> list[int]:
        return [self.F0.degree_of(r) for r in self.relations]

    @property
    def gb(self) -> ModuleGB:
        if self._gb is None:
            self._gb = ModuleGB(self.F0, self.relations)
        return self._gb

    def normal_form(self, v: dict) -> dict:
        return self.gb.normal_form(v)

    def is_zero_element(self, v: dict) -> bool:
        return not self.normal_form(v)

    def unit(self, j: int) -> dict:
        return self.F0.unit(j)

    def is_zero(self) -> bool:
        if self._zero is None:
            self._zero = all(not self.normal_form(self.unit(j)) for j in range(self.ngens))
        return self._zero

    def is_free(self) -> bool:
        """True when the presentation has no relations beyond I * F0."""
        return all(not _reduces_mod_ideal(self.ctx, r) for r in self.relations)

    def hilbert(self, d: int) -> int:
        """dim_k M_d, counted by standard monomials."""
        h = self._hilb.get(d)
        if h is not None:
            return h
        leads = self.gb.leads()
        ideal_leads = self.ctx.ideal_leads
        weights = self.ctx.weights
        total = 0
        for j, a in enumerate(self.degrees):
            e = d - a
            if e < 0:
                continue
            L = leads.get(j, []) + ideal_leads
            for m in _monos(e, weights):
                if not any(mono_divides(l, m) for l in L):
                    total += 1
        self._hilb[d] = total
        return total

    def hilbert_function(self, D: int = DEFAULT_WINDOW, start: int = 0) -> list[int]:
        return [self.hilbert(d) for d in range(start, start + D + 1)]

    def min_degree(self) -> int:
        return min(self.degrees) if self.degrees else 0

    def __repr__(self):
        label = self.name or f"M{self.uid}"
        return f"<FPModule {label}: {self.ngens} gens, {len(self.relations)} rels>"


def _reduces_mod_ideal(ctx, r):
    """True when r is nonzero modulo I."""
    return bool(reduce_vector(ctx, r, ())[0])


_MONO_CACHE: dict = {}


def _monos(e, weights):
    key = (e, tuple(weights))
    out = _MONO_CACHE.get(key)
    if out is None:
        out = monomials_of_degree(e, weights)
        _MONO_CACHE[key] = out
    return out


def hilbert_window(modules: Sequence[FPModule], D: int = DEFAULT_WINDOW) -> range:
    """Common degree range [lo, lo + D] for comparing Hilbert functions."""
    los = [M.min_degree() for M in modules if M.ngens]
    lo = min(los) if los else 0
    return range(lo, lo + D + 1)


def hilbert_equal(M: FPModule, N: FPModule, D: int = DEFAULT_WINDOW) -> bool:
    return all(M.hilbert(d) == N.hilbert(d) for d in hilbert_window([M, N], D))


# ---------------------------------------------------------------- maps

class ModuleMap:
    """Homogeneous map of degree ``shift``: generator j of the source goes to
    ``columns[j]`` (a vector over the target's generators)."""

    def __init__(self, source: FPModule, target: FPModule, columns: Sequence[dict], shift: int = 0,
                 check: bool = False):
        if len(columns) != source.ngens:
            raise ValueError(f"map needs {source.ngens} columns, got {len(columns)}")
        if source.ctx is not target.ctx:
            raise ValueError("source and target live over different rings")
        self.source = source
        self.target = target
        self.shift = int(shift)
        cols = []
        for j, c in enumerate(columns):
            c = {t: v for t, v in c.items() if v}
            if c:
                d = target.F0.degree_of(c)
                if d != source.degrees[j] + self.shift:
                    raise GradingError(
                        f"column {j} has degree {d}, expected {source.degrees[j] + self.shift}")
            cols.append(c)
        self.columns = cols
        if check and not self.is_well_defined():
            raise ValueError("matrix does not descend to the presented modules")

    @property
    def ctx(self):
        return self.source.ctx

    def apply(self, v: dict) -> dict:
        return apply_matrix(self.columns, v, self.ctx.p)

    def is_well_defined(self) -> bool:
        return all(self.target.is_zero_element(self.apply(r)) for r in self.source.relations)

    def compatibility_residues(self) -> list[dict]:
        return [self.target.normal_form(self.apply(r)) for r in self.source.relations]

    def reduced(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [self.target.normal_form(c) for c in self.columns],
                         self.shift)

    def is_zero(self) -> bool:
        return all(self.target.is_zero_element(c) for c in self.columns)

    def equals(self, other: "ModuleMap") -> bool:
        if other.source is not self.source and other.source.degrees != self.source.degrees:
            return False
        p = self.ctx.p
        return all(self.target.is_zero_element(vec_add(a, b, p, -1))
                   for a, b in zip(self.columns, other.columns))

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        p = self.ctx.p
        return ModuleMap(self.source, self.target,
                         [vec_add(a, b, p) for a, b in zip(self.columns, other.columns)], self.shift)

    def scale(self, c: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, [vec_scale(a, c, self.ctx.p) for a in self.columns],
                         self.shift)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def then(self, g: "ModuleMap") -> "ModuleMap":
        """g after self."""
        return compose(g, self)

    def __repr__(self):
        return f"<ModuleMap {self.source!r} -> {self.target!r} shift {self.shift}>"


def compose(g: ModuleMap, f: ModuleMap) -> ModuleMap:
    """g ∘ f."""
    if f.target is not g.source and f.target.degrees != g.source.degrees:
        raise ValueError("maps are not composable")
    cols = [g.target.normal_form(g.apply(c)) for c in f.columns]
    return ModuleMap(f.source, g.target, cols, f.shift + g.shift)


def identity(M: FPModule) -> ModuleMap:
    return ModuleMap(M, M, [M.unit(j) for j in range(M.ngens)])


def zero_map(M: FPModule, N: FPModule, shift: int = 0) -> ModuleMap:
    return ModuleMap(M, N, [{} for _ in range(M.ngens)], shift)


def map_from_rows(M: FPModule, N: FPModule, rows: Sequence[Sequence[dict]], shift: int = 0) -> ModuleMap:
    """Map given by a matrix with ``N.ngens`` rows and ``M.ngens`` columns."""
    cols = []
    for j in range(M.ngens):
        col = {}
        for i in range(N.ngens):
            for m, c in rows[i][j].items():
                col[(i, m)] = c
        cols.append(col)
    return ModuleMap(M, N, cols, shift)


# -------------------------------------------------------- subquotients

class SubQuotient:
    """The submodule of ``F / rels`` generated by ``gens``.

    ``module`` is a minimal presentation on the kept generators; ``express``
    writes an element of the span as a vector over ``module``'s generators.
    """

    def __init__(self, ctx: RingContext, degrees: Sequence[int], gens: Sequence[dict],
                 rels: Sequence[dict], gen_degrees: Sequence[int | None] | None = None,
                 name: str | None = None):
        self.ctx = ctx
        self.ambient_degrees = tuple(degrees)
        rels = [r for r in rels if r]
        nr = len(rels)
        gens = list(gens)
        in_degs = [None] * nr + (list(gen_degrees) if gen_degrees is not None else [None] * len(gens))
        run = buchberger(ctx, degrees, rels + gens, track=True, candidates_from=nr,
                         input_degrees=in_degs, track_from=nr)
        self.run = run
        kept = [i for i in range(len(gens)) if run.kept[nr + i]]
        self.kept = kept
        self.renumber = {old: new for new, old in enumerate(kept)}
        kdegs = [run.input_degrees[nr + i] for i in kept]
        syz = []
        for s in run.syzygies:
            v = {}
            for (i, m), c in s.items():
                v[(self.renumber[i], m)] = c
            if v:
                syz.append(v)
        run2 = buchberger(ctx, kdegs, syz, candidates_from=0)
        minimal = [s for s, k in zip(syz, run2.kept) if k]
        Fk = FreeModule(ctx, kdegs)
        gb = ModuleGB(Fk, minimal, run=run2)
        self.module = FPModule(ctx, kdegs, minimal, name=name, gb=gb)
        self.vectors = [gens[i] for i in kept]

    def express(self, v: dict) -> dict | None:
        rem, q = reduce_vector(self.ctx, v, self.run.basis, self.run.index, rep={})
        if rem:
            return None
        out = {}
        p = self.ctx.p
        for (i, m), c in q.items():
            t = (self.renumber[i], m)
            val = (out.get(t, 0) + c) % p
            if val:
                out[t] = val
            else:
                out.pop(t, None)
        return self.module.normal_form(out)

    def contains(self, v: dict) -> bool:
        return not reduce_vector(self.ctx, v, self.run.basis, self.run.index)[0]


def minimize(M: FPModule) -> tuple[FPModule, ModuleMap, ModuleMap]:
    """Minimal presentation N of M with inverse isomorphisms ``N -> M`` and ``M -> N``."""
    cached = M.cache.get("minimize")
    if cached is not None:
        return cached
    sq = SubQuotient(M.ctx, M.degrees, [M.unit(j) for j in range(M.ngens)], M.relations,
                     gen_degrees=M.degrees, name=M.name)
    N = sq.module
    to_M = ModuleMap(N, M, [M.unit(j) for j in sq.kept])
    from_M = ModuleMap(M, N, [sq.express(M.unit(j)) for j in range(M.ngens)])
    out = (N, to_M, from_M)
    M.cache["minimize"] = out
    N.cache["minimize"] = (N, identity(N), identity(N))
    return out


def minimal(M: FPModule) -> FPModule:
    return minimize(M)[0]


def is_minimal_presentation(M: FPModule) -> bool:
    one = M.ctx.S.one_mono()
    return all(m != one for r in M.relations for (_, m) in r)


# -------------------------------------------------- kernels and friends

def preimage_generators(f: ModuleMap, extra: Sequence[dict] = ()) -> list[dict]:
    """Generators of {c in F0(source) : f(c) in im(extra) + rels(target)}."""
    N = f.target
    rels = list(N.relations) + [e for e in extra if e]
    nr = len(rels)
    degs = [None] * nr + [d + f.shift for d in f.source.degrees]
    run = buchberger(f.ctx, N.degrees, rels + f.columns, track=True, input_degrees=degs,
                     track_from=nr)
    return list(run.syzygies)


def kernel(f: ModuleMap) -> tuple[FPModule, ModuleMap]:
    M = f.source
    gens = preimage_generators(f)
    sq = SubQuotient(f.ctx, M.degrees, gens, M.relations)
    K = sq.module
    inc = ModuleMap(K, M, sq.vectors)
    return K, inc


def cokernel(f: ModuleMap) -> tuple[FPModule, ModuleMap]:
    N = f.target
    C = FPModule(f.ctx, N.degrees, list(N.relations) + [c for c in f.columns if c])
    return C, ModuleMap(N, C, [C.unit(j) for j in range(N.ngens)])


def image(f: ModuleMap) -> tuple[FPModule, ModuleMap, ModuleMap]:
    """im f with the factorization source ->> im f >-> target."""
    N = f.target
    sq = SubQuotient(f.ctx, N.degrees, f.columns, N.relations,
                     gen_degrees=[d + f.shift for d in f.source.degrees])
    Im = sq.module
    inc = ModuleMap(Im, N, sq.vectors)
    epi = ModuleMap(f.source, Im, [sq.express(c) for c in f.columns], f.shift)
    return Im, epi, inc


def is_mono(f: ModuleMap) -> bool:
    return kernel(f)[0].is_zero()


def is_epi(f: ModuleMap) -> bool:
    N = f.target
    gb = ModuleGB(N.F0, list(N.relations) + [c for c in f.columns if c])
    return all(gb.contains(N.unit(j)) for j in range(N.ngens))


def is_iso(f: ModuleMap) -> bool:
    return is_epi(f) and is_mono(f)


def factor_through(f: ModuleMap, g: ModuleMap) -> ModuleMap | None:
    """h with g ∘ h = f (same source as f, target = source of g), or None."""
    G = g.source
    sq = _span_lifter(g)
    cols = []
    for c in f.columns:
        e = sq(c)
        if e is None:
            return None
        cols.append(e)
    return ModuleMap(f.source, G, cols, f.shift - g.shift)


def _span_lifter(g: ModuleMap):
    """Function writing elements of im g as images of vectors over g.source's generators."""
    N = g.target
    rels = list(N.relations)
    nr = len(rels)
    degs = [None] * nr + [d + g.shift for d in g.source.degrees]
    run = buchberger(g.ctx, N.degrees, rels + g.columns, track=True, input_degrees=degs,
                     track_from=nr)
    G = g.source
    p = g.ctx.p

    def lift(v):
        rem, q = reduce_vector(g.ctx, v, run.basis, run.index, rep={})
        if rem:
            return None
        return G.normal_form(q)

    return lift


# ------------------------------------------------------ constructions

def direct_sum(M: FPModule, N: FPModule) -> FPModule:
    if M.ctx is not N.ctx:
        raise ValueError("modules live over different rings")
    k = M.ngens
    rels = list(M.relations) + [vec_shift_positions(r, k) for r in N.relations]
    return FPModule(M.ctx, M.degrees + N.degrees, rels)


def direct_sum_maps(M: FPModule, N: FPModule, S: FPModule | None = None):
    """(S, inclusions, projections) for S = M ⊕ N."""
    if S is None:
        S = direct_sum(M, N)
    k = M.ngens
    iM = ModuleMap(M, S, [S.unit(j) for j in range(k)])
    iN = ModuleMap(N, S, [S.unit(k + j) for j in range(N.ngens)])
    pM = ModuleMap(S, M, [M.unit(j) for j in range(k)] + [{} for _ in range(N.ngens)])
    pN = ModuleMap(S, N, [{} for _ in range(k)] + [N.unit(j) for j in range(N.ngens)])
    return S, (iM, iN), (pM, pN)


def direct_sum_many(mods: Sequence[FPModule], ctx: RingContext | None = None) -> FPModule:
    if not mods:
        return FPModule.zero(ctx)
    out = mods[0]
    for M in mods[1:]:
        out = direct_sum(out, M)
    return out


def shift(M: FPModule, s: int) -> FPModule:
    """M(s) in the usual convention: generator degrees decrease by s."""
    rels = list(M.relations)
    return FPModule(M.ctx, [d - s for d in M.degrees], rels)


def pushout(f: ModuleMap, g: ModuleMap) -> tuple[FPModule, ModuleMap, ModuleMap]:
    """P = (B ⊕ C) / {(f a, -g a)} with the canonical maps B -> P and C -> P."""
    if f.source is not g.source:
        raise ValueError("pushout needs maps with a common source")
    if f.shift or g.shift:
        raise GradingError("pushout expects degree-preserving maps")
    B, C = f.target, g.target
    p = f.ctx.p
    k = B.ngens
    rels = list(B.relations) + [vec_shift_positions(r, k) for r in C.relations]
    for a, b in zip(f.columns, g.columns):
        v = vec_add(a, vec_shift_positions(b, k), p, -1)
        if v:
            rels.append(v)
    P = FPModule(f.ctx, B.degrees + C.degrees, rels)
    iB = ModuleMap(B, P, [P.unit(j) for j in range(k)])
    iC = ModuleMap(C, P, [P.unit(k + j) for j in range(C.ngens)])
    return P, iB, iC


def pushout_induced(P: FPModule, iB: ModuleMap, iC: ModuleMap, u: ModuleMap, v: ModuleMap,
                    check: bool = True) -> ModuleMap:
    """The map P -> T restricting to u on B and v on C."""
    T = u.target
    h = ModuleMap(P, T, list(u.columns) + list(v.columns), u.shift)
    if check and not h.is_well_defined():
        raise ValueError("cone does not agree on the common source")
    return h


class ShortExactSequence:
    """0 -> A -i-> B -p-> C -> 0 with verdict flags."""

    def __init__(self, i: ModuleMap, p: ModuleMap):
        if i.target is not p.source:
            raise ValueError("maps are not composable")
        self.i = i
        self.p = p
        self._flags = None

    @property
    def A(self):
        return self.i.source

    @property
    def B(self):
        return self.i.target

    @property
    def C(self):
        return self.p.target

    def flags(self) -> dict:
        if self._flags is None:
            i, p = self.i, self.p
            wd = i.is_well_defined() and p.is_well_defined()
            comp = compose(p, i).is_zero() if wd else False
            mono = is_mono(i) if wd else False
            epi = is_epi(p) if wd else False
            middle = False
            if wd and comp:
                gens = preimage_generators(p)
                span = ModuleGB(self.B.F0, list(self.B.relations) + [c for c in i.columns if c])
                middle = all(span.contains(g) for g in gens)
            self._flags = {"well_defined": wd, "composite_zero": comp, "mono": mono,
                           "epi": epi, "exact_middle": middle}
        return self._flags

    def is_exact(self) -> bool:
        return all(self.flags().values())

    def hilbert_conserved(self, D: int = DEFAULT_WINDOW) -> bool:
        return all(self.B.hilbert(d) == self.A.hilbert(d) + self.C.hilbert(d)
                   for d in hilbert_window([self.A, self.B, self.C], D))
