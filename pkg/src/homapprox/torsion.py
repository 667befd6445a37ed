"""Torsionfreeness predicates relative to a module C, add C approximations and Cdim."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .fpmodule import (DEFAULT_WINDOW, FPModule, ModuleMap, ShortExactSequence, cokernel, compose,
                       direct_sum_many, hilbert_window, identity, is_epi, is_iso, is_mono, kernel,
                       minimal, minimize)
from .groebner import vec_add, vec_scale
from .homology import (depth, ext, ext_vanishes, hom, lambda_is_iso, lambda_is_mono, lambda_map,
                       lambda_ring_map, ring_module, transpose)
from .kernel import mono_degree, monomials_of_degree


class InternalInconsistency(RuntimeError):
    """Two independent computations of the same quantity disagree."""


@dataclass
class PredicateVerdict:
    predicate: str
    subjects: tuple
    n: int
    result: bool
    evidence: list = field(default_factory=list)

    def __bool__(self):
        return bool(self.result)

    def to_dict(self) -> dict:
        return {"predicate": self.predicate, "subjects": list(self.subjects), "n": self.n,
                "result": self.result,
                "evidence": [{"clause": c, "holds": bool(v)} for c, v in self.evidence]}


def _label(M: FPModule) -> str:
    return M.name or f"M{M.uid}"


def is_n_C_spherical(M: FPModule, C: FPModule, n: int) -> PredicateVerdict:
    if n < 1:
        raise ValueError("level must be at least 1")
    ev = [(f"Ext^{i}(M,C)=0", ext_vanishes(M, C, i)) for i in range(1, n + 1)]
    return PredicateVerdict("spherical", (_label(M), _label(C)), n, all(v for _, v in ev), ev)


def is_n_semidualizing(C: FPModule, n: int) -> PredicateVerdict:
    if n < 1:
        raise ValueError("level must be at least 1")
    lam = lambda_ring_map(C)
    ev = []
    if n == 1:
        ev.append(("lambda_R mono", is_mono(lam)))
    else:
        ev.append(("lambda_R iso", is_iso(lam)))
    for i in range(1, n + 1):
        ev.append((f"Ext^{i}(C,C)=0", ext_vanishes(C, C, i)))
    return PredicateVerdict("semidualizing", (_label(C),), n, all(v for _, v in ev), ev)


def is_n_C_torsionfree(M: FPModule, C: FPModule, n: int) -> PredicateVerdict:
    if n < 1:
        raise ValueError("level must be at least 1")
    ev = []
    if n == 1:
        ev.append(("lambda_M mono", lambda_is_mono(M, C)))
    else:
        ev.append(("lambda_M iso", lambda_is_iso(M, C)))
        dual = hom(M, C).module
        for i in range(1, n - 1):
            ev.append((f"Ext^{i}(M^dag,C)=0", ext_vanishes(dual, C, i)))
    return PredicateVerdict("C-torsionfree", (_label(M), _label(C)), n, all(v for _, v in ev), ev)


def is_n_torsionfree(M: FPModule, n: int) -> PredicateVerdict:
    """Ext^i(Tr M, R) = 0 for 1 <= i <= n, cross-checked against the
    characterization through rho_M and Ext^i(M*, R)."""
    if n < 1:
        raise ValueError("level must be at least 1")
    R = ring_module(M.ctx)
    T = transpose(M)
    ev = [(f"Ext^{i}(Tr M,R)=0", ext_vanishes(T, R, i)) for i in range(1, n + 1)]
    via_tr = all(v for _, v in ev)
    via_rho = is_n_C_torsionfree(M, R, n)
    ev.append(("rho characterization agrees", via_rho.result == via_tr))
    if via_rho.result != via_tr:
        raise InternalInconsistency(
            f"transpose route says {via_tr}, rho route says {via_rho.result} for {_label(M)} at level {n}")
    return PredicateVerdict("torsionfree", (_label(M),), n, via_tr, ev)


# --------------------------------------------------------- add C objects

def shifted_copy(C: FPModule, s: int) -> FPModule:
    """C with every generator degree raised by s (the graded module C(-s))."""
    return FPModule(C.ctx, [d + s for d in C.degrees], C.relations)


def addC_sum(C: FPModule, shifts: Sequence[int]) -> FPModule:
    """⊕ C(-s) for s in shifts, as one presentation."""
    nC = C.ngens
    degs = []
    rels = []
    for i, s in enumerate(shifts):
        degs += [d + s for d in C.degrees]
        off = i * nC
        rels += [{(off + l, m): c for (l, m), c in r.items()} for r in C.relations]
    M = FPModule(C.ctx, degs, rels)
    M.cache["addC"] = (C.uid, tuple(shifts))
    return M


def is_structural_addC(M: FPModule, C: FPModule) -> tuple | None:
    """The shift vector when M is literally a block sum of shifted copies of C."""
    nC = C.ngens
    if nC == 0:
        return () if M.ngens == 0 else None
    if M.ngens % nC:
        return None
    m = M.ngens // nC
    shifts = []
    for i in range(m):
        diffs = {M.degrees[i * nC + l] - C.degrees[l] for l in range(nC)}
        if len(diffs) != 1:
            return None
        shifts.append(diffs.pop())
    expected = addC_sum(C, shifts)
    norm = lambda rels: sorted(tuple(sorted(r.items())) for r in rels)
    if norm(expected.relations) != norm(M.relations):
        return None
    return tuple(shifts)


@dataclass
class Approximation:
    map: ModuleMap
    shifts: tuple
    flags: dict


def left_addC_approximation(M: FPModule, C: FPModule) -> Approximation:
    """M -> ⊕ C(-t_i) assembled from minimal generators of Hom(M, C)."""
    hd = hom(M, C)
    gens = hd.generator_maps()
    shifts = [-g.shift for g in gens]
    C0 = addC_sum(C, shifts)
    nC = C.ngens
    cols = []
    for j in range(M.ngens):
        col = {}
        for i, g in enumerate(gens):
            for (l, m), c in g.columns[j].items():
                col[(i * nC + l, m)] = c
        cols.append(col)
    f = ModuleMap(M, C0, cols)
    mono = is_mono(f)
    Z, _ = cokernel(f)
    Zm = minimal(Z)
    flags = {"mono": mono, "zero_hom": not gens and not minimal(M).is_zero(),
             "coker_ext1_vanishes": ext_vanishes(Zm, C, 1)}
    return Approximation(f, tuple(shifts), flags)


def right_addC_approximation(M: FPModule, C: FPModule) -> Approximation:
    """⊕ C(-t_i) -> M assembled from minimal generators of Hom(C, M)."""
    hd = hom(C, M)
    gens = hd.generator_maps()
    shifts = [g.shift for g in gens]
    C0 = addC_sum(C, shifts)
    cols = []
    for g in gens:
        cols += list(g.columns)
    g = ModuleMap(C0, M, cols)
    return Approximation(g, tuple(shifts), {"epi": is_epi(g)})


@dataclass
class ResolutionAttempt:
    success: bool
    failed_step: int | None
    steps: list
    hypotheses: dict


def prop_hypotheses(C: FPModule, n: int) -> dict:
    """Conditions on C under which resolution existence and torsionfreeness agree."""
    lamC = lambda_is_iso(C, C)
    dual = hom(C, C).module
    exts = {i: ext_vanishes(dual, C, i) for i in range(1, max(n - 1, 1))}
    forward = n <= 2 or (lamC and all(exts.get(i, True) for i in range(1, n - 2)))
    converse = n == 1 or (lamC and (n == 2 or all(exts.get(i, True) for i in range(1, n - 1))))
    return {"lambda_C iso": lamC, "forward": forward, "converse": converse,
            "ext_dual": {str(i): v for i, v in exts.items()}}


def left_addC_resolution(M: FPModule, C: FPModule, length: int) -> ResolutionAttempt:
    """0 -> M -> C_0 -> C_1 -> ... -> C_{length-1} built from left approximations."""
    if length < 1:
        raise ValueError("length must be at least 1")
    steps = []
    N = minimal(M)
    failed = None
    for s in range(length):
        appr = left_addC_approximation(N, C)
        steps.append(appr)
        if not appr.flags["mono"]:
            failed = s
            break
        Z, _ = cokernel(appr.map)
        N = minimal(Z)
    return ResolutionAttempt(failed is None, failed, steps, prop_hypotheses(C, length))


# ----------------------------------------------------------- membership

@dataclass
class Membership:
    status: str  # "yes", "no", "undetermined"
    multiplicity: int | None = None
    shifts: tuple = ()
    iso: ModuleMap | None = None
    reason: str = ""


def _hilbert_shifts(Y: FPModule, C: FPModule, D: int) -> tuple | None:
    win = hilbert_window([Y, C], D)
    lo_C = next((d for d in win if C.hilbert(d)), None)
    if lo_C is None:
        return None
    top = win.stop - 1 + max(0, max(Y.degrees, default=0) - min(Y.degrees, default=0))
    lo = min(Y.min_degree(), C.min_degree())
    residual = {d: Y.hilbert(d) for d in range(lo, top + 1)}
    base = C.hilbert(lo_C)
    shifts = []
    for d in range(lo, top + 1):
        r = residual[d]
        if r < 0:
            return None
        if r == 0:
            continue
        if r % base:
            return None
        mult = r // base
        s = d - lo_C
        shifts += [s] * mult
        for e in range(d, top + 1):
            residual[e] -= mult * C.hilbert(e - s)
    if any(residual.values()):
        return None
    return tuple(shifts)


def _homogeneous_hom_elements(hd, s: int) -> list[dict]:
    """Vectors spanning the degree-s part of Hom (as elements of the Hom module)."""
    H = hd.module
    weights = H.ctx.weights
    out = []
    for g, t in enumerate(H.degrees):
        if t > s:
            continue
        for m in monomials_of_degree(s - t, weights):
            v = H.normal_form({(g, m): 1})
            if v:
                out.append(v)
    return out


def addC_membership(Y: FPModule, C: FPModule, trials: int = 64, seed: int = 0,
                    window: int = DEFAULT_WINDOW) -> Membership:
    if not is_iso(lambda_ring_map(C)):
        return Membership("undetermined", reason="lambda_R is not an isomorphism")
    Ym = minimal(Y)
    if Ym.is_zero():
        return Membership("yes", 0, (), None)
    if minimal(C).is_zero():
        return Membership("no", reason="C is zero")
    shifts = _hilbert_shifts(Ym, C, window)
    if shifts is None:
        return Membership("no", reason="Hilbert function is not a sum of shifted copies of C")
    if len(shifts) * minimal(C).ngens != Ym.ngens:
        return Membership("no", reason="generator count mismatch")
    rng = random.Random(seed)
    hd = hom(C, Ym)
    p = C.ctx.p
    pools = {s: _homogeneous_hom_elements(hd, s) for s in set(shifts)}
    if any(not pools[s] for s in pools):
        return Membership("no", reason="no maps from C in a required degree")
    src = addC_sum(C, shifts)
    for _ in range(trials):
        cols = []
        for s in shifts:
            v = {}
            for e in pools[s]:
                v = vec_add(v, e, p, rng.randrange(1, p))
            phi = hd.element_to_map(v, s)
            cols += list(phi.columns)
        g = ModuleMap(src, Ym, cols)
        if is_iso(g):
            return Membership("yes", len(shifts), shifts, g)
    return Membership("undetermined", len(shifts), shifts,
                      reason=f"Hilbert data match but no isomorphism in {trials} trials")


# ------------------------------------------------------------------ Cdim

@dataclass
class CdimResult:
    status: str  # "finite", "infinite", "exceeded", "undetermined"
    value: int | None
    bound: int
    filtration: list
    reason: str = ""

    @property
    def finite(self) -> bool:
        return self.status == "finite"


def c_dim(M: FPModule, C: FPModule, bound: int | None = None, trials: int = 64,
          seed: int = 0) -> CdimResult:
    """Walk right approximations until a kernel lands in add C.

    The filtration lists (approximation, kernel inclusion) pairs followed by the
    final membership witness.
    """
    lam_iso = is_iso(lambda_ring_map(C))
    if bound is None:
        if not lam_iso:
            raise ValueError("a bound is required when lambda_R is not an isomorphism")
        bound = depth(C) + 1
    K = minimal(M)
    filtration = []
    for s in range(bound + 1):
        mem = addC_membership(K, C, trials=trials, seed=seed)
        if mem.status == "yes":
            filtration.append(("member", mem))
            return CdimResult("finite", s, bound, filtration)
        if mem.status == "undetermined":
            return CdimResult("undetermined", None, bound, filtration, mem.reason)
        if s == bound:
            break
        appr = right_addC_approximation(K, C)
        if not appr.flags["epi"]:
            if s == 0 and lam_iso:
                return CdimResult("infinite", None, bound, filtration,
                                  "no surjection from add C onto the module")
            return CdimResult("undetermined", None, bound, filtration,
                              f"right approximation not surjective at step {s}")
        Kn, inc = kernel(appr.map)
        filtration.append(("step", appr, inc))
        K = Kn
    return CdimResult("exceeded", None, bound, filtration)
