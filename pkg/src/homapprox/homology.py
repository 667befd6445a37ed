"""Resolutions, syzygy modules, transposes, Hom and Ext, duals and natural maps."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .fpmodule import (DEFAULT_WINDOW, FPModule, ModuleMap, SubQuotient, compose, hilbert_window,
                       identity, is_iso, is_minimal_presentation, is_mono, kernel, cokernel,
                       minimal, minimize, preimage_generators)
from .groebner import GradingError, ModuleGB, RingContext, apply_matrix, buchberger

INFINITY = float("inf")


# ------------------------------------------------------------ resolutions

class Resolution:
    """Free resolution ... -> P_1 -> P_0 -> M.

    ``degrees[i]`` are the generator degrees of P_i and ``maps[i]`` (i >= 1)
    the columns of d_i as vectors over P_{i-1}.  P_0 is the generator cover of
    ``module`` and d_1 its presentation; later steps use minimal generators of
    each kernel, so the resolution is minimal whenever the presentation is.
    """

    def __init__(self, module: FPModule, degrees=None, maps=None, complete: bool = False):
        self.module = module
        self.ctx = module.ctx
        if degrees is None:
            rels = module.relations
            degrees = [tuple(module.degrees), tuple(module.F0.degree_of(r) for r in rels)]
            maps = [None, list(rels)]
        self.degrees = [tuple(d) for d in degrees]
        self.maps = maps
        self.complete = complete or not self.degrees[-1]

    @property
    def length(self) -> int:
        return len(self.degrees) - 1

    def extend(self, n: int) -> "Resolution":
        """Make sure P_0 .. P_n are known."""
        ctx = self.ctx
        while self.length < n:
            if self.complete:
                self.degrees.append(())
                self.maps.append([])
                continue
            i = self.length
            cols = self.maps[i]
            run = buchberger(ctx, self.degrees[i - 1], cols, track=True,
                             input_degrees=list(self.degrees[i]))
            syz = list(run.syzygies)
            run2 = buchberger(ctx, self.degrees[i], syz, candidates_from=0)
            nxt = [s for s, k in zip(syz, run2.kept) if k]
            degs = tuple(run2.input_degrees[j] for j, k in enumerate(run2.kept) if k)
            self.degrees.append(degs)
            self.maps.append(nxt)
            if not nxt:
                self.complete = True
        return self

    def rank(self, i: int) -> int:
        self.extend(i)
        return len(self.degrees[i])

    def betti(self, upto: int) -> dict:
        self.extend(upto)
        return {i: dict(sorted(Counter(self.degrees[i]).items())) for i in range(upto + 1)}

    def betti_numbers(self, upto: int) -> list[int]:
        return [self.rank(i) for i in range(upto + 1)]

    def is_minimal(self, upto: int) -> bool:
        self.extend(upto)
        one = self.ctx.S.one_mono()
        return all(m != one for i in range(1, upto + 1) for col in self.maps[i] for (_, m) in col)

    def free_module(self, i: int) -> FPModule:
        self.extend(i)
        return FPModule.free(self.ctx, self.degrees[i])

    def differential(self, i: int) -> ModuleMap:
        self.extend(i)
        return ModuleMap(self.free_module(i), self.free_module(i - 1), self.maps[i])

    def verify(self, upto: int) -> dict:
        """d_{i-1} d_i = 0 and exactness at P_1 .. P_{upto-1} (plus H_0 = M)."""
        self.extend(upto + 1)
        ctx = self.ctx
        zero = True
        exact = True
        for i in range(2, upto + 1):
            for col in self.maps[i]:
                img = apply_matrix(self.maps[i - 1], col, ctx.p)
                if ModuleGB(ctx.free(self.degrees[i - 2]), []).normal_form(img):
                    zero = False
        for i in range(1, upto + 1):
            run = buchberger(ctx, self.degrees[i - 1], self.maps[i], track=True,
                             input_degrees=list(self.degrees[i]))
            gb = ModuleGB(ctx.free(self.degrees[i]), self.maps[i + 1])
            if not all(gb.contains(s) for s in run.syzygies):
                exact = False
        h0 = FPModule(ctx, self.degrees[0], self.maps[1])
        same = all(h0.hilbert(d) == self.module.hilbert(d)
                   for d in hilbert_window([h0, self.module], DEFAULT_WINDOW))
        return {"composite_zero": zero, "exact": exact, "augmentation": same}

    def padded(self, i: int, degree: int) -> "Resolution":
        """Add the exact summand R(-degree) -> R(-degree) in spots i and i-1 (i >= 1)."""
        self.extend(i + 1)
        degs = [list(d) for d in self.degrees]
        maps = [None] + [[dict(c) for c in m] for m in self.maps[1:]]
        one = self.ctx.S.one_mono()
        new_prev = len(degs[i - 1])
        degs[i - 1].append(degree)
        degs[i].append(degree)
        maps[i].append({(new_prev, one): 1})
        out = Resolution(self.module, [tuple(d) for d in degs], maps, complete=False)
        out.complete = self.complete
        return out


def free_resolution(M: FPModule, length: int, minimal_: bool = True) -> Resolution:
    if minimal_ and not is_minimal_presentation(M):
        N, _, _ = minimize(M)
        res = resolution_of(N)
    else:
        res = resolution_of(M)
    return res.extend(length)


def resolution_of(M: FPModule) -> Resolution:
    res = M.cache.get("resolution")
    if res is None:
        res = Resolution(M)
        M.cache["resolution"] = res
    return res


def syzygy(M: FPModule, n: int) -> FPModule:
    """Ω^n M = coker(d_{n+1}) on P_n of the minimal resolution; Ω^0 M is M minimized."""
    key = ("syzygy", n)
    if key in M.cache:
        return M.cache[key]
    N = minimal(M)
    if n == 0:
        out = N
    else:
        res = resolution_of(N).extend(n + 1)
        out = FPModule(M.ctx, res.degrees[n], res.maps[n + 1])
    M.cache[key] = out
    return out


def syzygy_sequence(M: FPModule, n: int):
    """Maps Ω^{i+1} M -> P_i -> Ω^i M for i = 0 .. n-1 (the defining short exact sequences).

    Returns a list of (inclusion, free module, projection).
    """
    N = minimal(M)
    res = resolution_of(N).extend(n + 1)
    out = []
    for i in range(n):
        Om_next = syzygy(M, i + 1)
        Om = syzygy(M, i)
        P = FPModule.free(M.ctx, res.degrees[i])
        inc = ModuleMap(Om_next, P, res.maps[i + 1])
        proj = ModuleMap(P, Om, [Om.unit(j) for j in range(P.ngens)])
        out.append((inc, P, proj))
    return out


def transpose(M: FPModule) -> FPModule:
    """coker of the R-dual of the first differential of a minimal presentation."""
    if "transpose" in M.cache:
        return M.cache["transpose"]
    N = minimal(M)
    rels = N.relations
    rel_degs = [N.F0.degree_of(r) for r in rels]
    cols = [{} for _ in range(N.ngens)]
    for k, r in enumerate(rels):
        for (j, m), c in r.items():
            cols[j][(k, m)] = c
    T = FPModule(M.ctx, [-d for d in rel_degs], cols)
    M.cache["transpose"] = T
    return T


# ------------------------------------------------------------------ Hom

def _hom_free_module(P_degrees: Sequence[int], N: FPModule) -> FPModule:
    nN = N.ngens
    degs = [b - a for a in P_degrees for b in N.degrees]
    rels = []
    for j in range(len(P_degrees)):
        off = j * nN
        for r in N.relations:
            rels.append({(off + l, m): c for (l, m), c in r.items()})
    return FPModule(N.ctx, degs, rels)


def _dual_columns(d_cols: Sequence[dict], n_prev: int, nN: int) -> list[dict]:
    """Columns of Hom(d, N): Hom(P_{i-1}, N) -> Hom(P_i, N)."""
    out = [dict() for _ in range(n_prev * nN)]
    for k, col in enumerate(d_cols):
        for (j, m), c in col.items():
            for l in range(nN):
                out[j * nN + l][(k * nN + l, m)] = c
    return out


class HomData:
    """Hom(M, N) as a finitely presented module plus conversions to and from maps."""

    def __init__(self, M: FPModule, N: FPModule):
        self.source = M
        self.target = N
        self.nN = N.ngens
        H0 = _hom_free_module(M.degrees, N)
        rel_degs = [M.F0.degree_of(r) for r in M.relations]
        H1 = _hom_free_module(rel_degs, N)
        delta = ModuleMap(H0, H1, _dual_columns(M.relations, M.ngens, self.nN))
        gens = preimage_generators(delta)
        self.sq = SubQuotient(M.ctx, H0.degrees, gens, H0.relations)
        self.module = self.sq.module
        self.H0 = H0

    def _flat_to_map(self, w: dict, shift: int) -> ModuleMap:
        nN = self.nN
        cols = [dict() for _ in range(self.source.ngens)]
        for (pos, m), c in w.items():
            j, l = divmod(pos, nN)
            cols[j][(l, m)] = c
        N = self.target
        return ModuleMap(self.source, N, [N.normal_form(c) for c in cols], shift)

    def element_to_map(self, v: dict, degree: int | None = None) -> ModuleMap:
        if degree is None:
            degree = self.module.F0.degree_of(v)
            if degree is None:
                degree = 0
        w = apply_matrix(self.sq.vectors, v, self.source.ctx.p)
        return self._flat_to_map(w, degree)

    def generator_map(self, g: int) -> ModuleMap:
        return self._flat_to_map(self.sq.vectors[g], self.module.degrees[g])

    def generator_maps(self) -> list[ModuleMap]:
        return [self.generator_map(g) for g in range(self.module.ngens)]

    def encode(self, phi: ModuleMap) -> dict:
        """Vector over the generators of Hom(M, N) representing ``phi``."""
        nN = self.nN
        w = {}
        for j, col in enumerate(phi.columns):
            for (l, m), c in col.items():
                w[(j * nN + l, m)] = c
        out = self.sq.express(w)
        if out is None:
            raise ValueError("map is not a homomorphism of the presented modules")
        return out


def hom(M: FPModule, N: FPModule) -> HomData:
    key = ("hom", N.uid)
    hd = M.cache.get(key)
    if hd is None:
        hd = HomData(M, N)
        M.cache[key] = hd
    return hd


def hom_module(M: FPModule, N: FPModule) -> tuple[FPModule, HomData]:
    hd = hom(M, N)
    return hd.module, hd


# ------------------------------------------------------------------ Ext

@dataclass
class ExtRecord:
    i: int
    source: FPModule
    target: FPModule
    module: FPModule
    trace: dict = field(default_factory=dict)

    def vanishes(self) -> bool:
        return self.module.ngens == 0


def ext_from_resolution(res: Resolution, N: FPModule, i: int) -> FPModule:
    res.extend(i + 1)
    nN = N.ngens
    Hi = _hom_free_module(res.degrees[i], N)
    Hnext = _hom_free_module(res.degrees[i + 1], N)
    delta = ModuleMap(Hi, Hnext, _dual_columns(res.maps[i + 1], len(res.degrees[i]), nN))
    gens = preimage_generators(delta)
    rels = list(Hi.relations)
    if i >= 1:
        rels += [c for c in _dual_columns(res.maps[i], len(res.degrees[i - 1]), nN) if c]
    return SubQuotient(N.ctx, Hi.degrees, gens, rels).module


def ext(M: FPModule, N: FPModule, i: int) -> ExtRecord:
    """Ext^i(M, N) from the resolution starting at M's presentation."""
    key = ("ext", N.uid, i)
    rec = M.cache.get(key)
    if rec is None:
        if i == 0:
            E = hom(M, N).module
        else:
            Mm = M if is_minimal_presentation(M) else minimal(M)
            E = ext_from_resolution(resolution_of(Mm), N, i)
        rec = ExtRecord(i, M, N, E, {"resolution": "minimal" if is_minimal_presentation(M) else "minimized"})
        M.cache[key] = rec
    return rec


def ext_vanishes(M: FPModule, N: FPModule, i: int) -> bool:
    return ext(M, N, i).vanishes()


# --------------------------------------------------------- C-dual, lambda

def c_dual(M: FPModule, C: FPModule) -> FPModule:
    return hom(M, C).module


def c_dual_map(f: ModuleMap, C: FPModule) -> ModuleMap:
    """f^†: Hom(N, C) -> Hom(M, C) for f: M -> N."""
    HN = hom(f.target, C)
    HM = hom(f.source, C)
    cols = []
    for g in range(HN.module.ngens):
        phi = HN.generator_map(g)
        cols.append(HM.encode(compose(phi, f)))
    return ModuleMap(HN.module, HM.module, cols, f.shift)


def lambda_map(M: FPModule, C: FPModule) -> ModuleMap:
    """Evaluation M -> Hom(Hom(M, C), C)."""
    key = ("lambda", C.uid)
    if key in M.cache:
        return M.cache[key]
    hd = hom(M, C)
    H = hd.module
    hd2 = hom(H, C)
    gens = hd.generator_maps()
    cols = []
    for j in range(M.ngens):
        ev_cols = [phi.columns[j] for phi in gens]
        ev = ModuleMap(H, C, ev_cols, M.degrees[j])
        cols.append(hd2.encode(ev))
    lam = ModuleMap(M, hd2.module, cols, 0)
    M.cache[key] = lam
    return lam


@dataclass
class NaturalMapRecord:
    kind: str
    module: FPModule
    dualizer: FPModule
    map: ModuleMap
    verdict: str


def natural_map_record(M: FPModule, C: FPModule, kind: str = "lambda") -> NaturalMapRecord:
    lam = lambda_map(M, C)
    mono = is_mono(lam)
    iso = mono and is_iso(lam)
    return NaturalMapRecord(kind, M, C, lam, "iso" if iso else "mono" if mono else "neither")


def lambda_is_mono(M: FPModule, C: FPModule) -> bool:
    key = ("lambda_mono", C.uid)
    if key not in M.cache:
        M.cache[key] = is_mono(lambda_map(M, C))
    return M.cache[key]


def lambda_is_iso(M: FPModule, C: FPModule) -> bool:
    key = ("lambda_iso", C.uid)
    if key not in M.cache:
        M.cache[key] = lambda_is_mono(M, C) and is_iso(lambda_map(M, C))
    return M.cache[key]


def ring_module(ctx: RingContext) -> FPModule:
    """R itself as a free module of rank one (shared instance per ring)."""
    R = ctx.cache.get("ring_module")
    if R is None:
        R = FPModule.free(ctx, [0], name=ctx.name)
        ctx.cache["ring_module"] = R
    return R


def residue_field(ctx: RingContext) -> FPModule:
    k = ctx.cache.get("residue_field")
    if k is None:
        rels = []
        for i in range(ctx.nvars):
            m = tuple(1 if j == i else 0 for j in range(ctx.nvars))
            rels.append({(0, m): 1})
        k = minimal(FPModule(ctx, [0], rels, name="k"))
        k.name = "k"
        ctx.cache["residue_field"] = k
    return k


def lambda_ring_map(C: FPModule) -> ModuleMap:
    """R -> Hom(C, C), 1 -> identity."""
    key = "lambda_ring"
    if key in C.cache:
        return C.cache[key]
    R = ring_module(C.ctx)
    hd = hom(C, C)
    f = ModuleMap(R, hd.module, [hd.encode(identity(C))])
    C.cache[key] = f
    return f


def rho_map(M: FPModule) -> ModuleMap:
    return lambda_map(M, ring_module(M.ctx))


def rho_sequence(M: FPModule, D: int = DEFAULT_WINDOW) -> dict:
    """Checks 0 -> Ext^1(Tr M, R) -> M -> M** -> Ext^2(Tr M, R) -> 0 numerically."""
    R = ring_module(M.ctx)
    rho = rho_map(M)
    K, _ = kernel(rho)
    Q, _ = cokernel(rho)
    T = transpose(M)
    E1 = ext(T, R, 1).module
    E2 = ext(T, R, 2).module
    MM = rho.target
    win = hilbert_window([M, MM, E1, E2, K], D)
    ker_ok = all(K.hilbert(d) == E1.hilbert(d) for d in win)
    coker_ok = all(Q.hilbert(d) == E2.hilbert(d) for d in win)
    four = all(M.hilbert(d) - MM.hilbert(d) == E1.hilbert(d) - E2.hilbert(d) for d in win)
    return {"kernel_matches_ext1": ker_ok, "cokernel_matches_ext2": coker_ok,
            "four_term_identity": four, "ext1_zero": E1.ngens == 0, "ext2_zero": E2.ngens == 0,
            "exact": ker_ok and coker_ok and four}


# ------------------------------------------------------ depth and friends

def grade(M: FPModule, N: FPModule) -> int | float:
    """min{i <= dim R : Ext^i(M, N) != 0}, or infinity."""
    for i in range(M.ctx.dimension + 1):
        if not ext_vanishes(M, N, i):
            return i
    return INFINITY


def depth(M: FPModule) -> int:
    if minimal(M).ngens == 0:
        raise ValueError("depth of the zero module is undefined")
    key = "depth"
    if key not in M.cache:
        k = residue_field(M.ctx)
        d = grade(k, M)
        if d == INFINITY:
            raise ValueError("no nonvanishing Ext^i(k, M) up to dim R")
        M.cache[key] = d
    return M.cache[key]


def is_cohen_macaulay_ring(ctx: RingContext) -> bool:
    return depth(ring_module(ctx)) == ctx.dimension


def canonical_module(ctx: RingContext) -> FPModule:
    """ω = Ext_S^c(R, S) shifted by the sum of the variable weights."""
    if "canonical" in ctx.cache:
        return ctx.cache["canonical"]
    if not is_cohen_macaulay_ring(ctx):
        raise ValueError("the ring is not Cohen-Macaulay; no canonical module")
    amb = ctx.ambient()
    RS = FPModule(amb, [0], [{(0, m): c for m, c in g.items()} for g in ctx.ideal_gens])
    c = ctx.nvars - ctx.dimension
    SS = FPModule.free(amb, [0])
    E = ext(RS, SS, c).module
    v = sum(ctx.weights)
    omega = minimal(FPModule(ctx, [d + v for d in E.degrees], E.relations))
    omega.name = "omega"
    if not is_iso(lambda_ring_map(omega)):
        raise ValueError("computed canonical module is not semidualizing")
    ctx.cache["canonical"] = omega
    return omega


@dataclass
class InjdimVerdict:
    verdict: str
    bass_numbers: list
    window: int
    depth_ring: int
    heuristic: bool = True


def bass_numbers(C: FPModule, upto: int) -> list[int]:
    k = residue_field(C.ctx)
    return [ext(k, C, i).module.ngens for i in range(upto + 1)]


def injdim_surrogate(C: FPModule, window: int = 2) -> InjdimVerdict:
    ctx = C.ctx
    top = ctx.dimension + window
    mu = bass_numbers(C, top)
    dR = depth(ring_module(ctx))
    tail = mu[dR + 1:top + 1]
    if all(m == 0 for m in tail):
        v = "finite"
    elif tail and all(m != 0 for m in tail):
        v = "infinite-up-to-window"
    else:
        v = "undetermined"
    return InjdimVerdict(v, mu, window, dR)
