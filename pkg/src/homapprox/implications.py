"""Implications between torsionfreeness, grade, depth and Cdim, evaluated on
concrete modules.

Each check returns an ``ImplicationCheck``: ``applies`` records whether the
hypotheses hold on the data, ``holds`` whether the conclusion does.  A check
that applies but does not hold is a violation and indicates an engine bug.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .fpmodule import (DEFAULT_WINDOW, FPModule, ModuleMap, cokernel, compose, factor_through,
                       hilbert_window, identity, is_iso, minimal)
from .homology import (INFINITY, c_dual_map, depth, ext, ext_vanishes, grade, hom, lambda_map,
                       lambda_ring_map, ring_module, syzygy)
from .torsion import c_dim, is_n_C_torsionfree


@dataclass
class ImplicationCheck:
    name: str
    applies: bool
    holds: bool
    evidence: dict = field(default_factory=dict)

    @property
    def violated(self) -> bool:
        return self.applies and not self.holds

    def to_dict(self) -> dict:
        return {"name": self.name, "applies": self.applies, "holds": self.holds,
                "violated": self.violated, "evidence": self.evidence}


def _ring_torsionfree(C: FPModule, n: int) -> bool:
    """R is n-C-torsionfree; level 0 is vacuous."""
    if n <= 0:
        return True
    return is_n_C_torsionfree(ring_module(C.ctx), C, n).result


def split_retraction(f: ModuleMap) -> ModuleMap | None:
    """A map r with r ∘ f = id, or None when f is not a split monomorphism.

    Solved as a lifting problem: id lies in the image of precomposition
    Hom(N, M) -> Hom(M, M), h -> h ∘ f.
    """
    M, N = f.source, f.target
    pre = c_dual_map(f, M)
    HM = hom(M, M)
    one = ModuleMap(ring_module(M.ctx), HM.module, [HM.encode(identity(M))])
    lift = factor_through(one, pre)
    if lift is None:
        return None
    r = hom(N, M).element_to_map(lift.columns[0], -f.shift)
    return r


def is_retraction(r: ModuleMap, f: ModuleMap) -> bool:
    return compose(r, f).equals(identity(f.source))


def syzygy_of_torsionfree_is_torsionfree(M: FPModule, C: FPModule) -> ImplicationCheck:
    """R 1-C-torsionfree implies Ω M 1-C-torsionfree."""
    applies = _ring_torsionfree(C, 1)
    holds = is_n_C_torsionfree(syzygy(M, 1), C, 1).result
    return ImplicationCheck("syzygy keeps 1-C-torsionfreeness", applies, holds)


def lambda_of_syzygy_splits(M: FPModule, C: FPModule, n: int,
                            window: int = DEFAULT_WINDOW) -> ImplicationCheck:
    """R 2-C-torsionfree and n >= 2 imply: λ of Ω^n M is a split monomorphism
    and its cokernel has the Hilbert function of Ext^n(M, C)^†."""
    if n < 2:
        raise ValueError("level must be at least 2")
    applies = _ring_torsionfree(C, 2)
    X = syzygy(M, n)
    lam = lambda_map(X, C)
    r = split_retraction(lam)
    split = r is not None and is_retraction(r, lam)
    Q, _ = cokernel(lam)
    E = ext(M, C, n).module
    Edual = hom(E, C).module
    win = hilbert_window([Q, Edual], window)
    same = all(Q.hilbert(d) == Edual.hilbert(d) for d in win)
    ev = {"split": split, "cokernel_hilbert_matches": same, "window": [win.start, win.stop - 1]}
    return ImplicationCheck("lambda of n-th syzygy splits", applies, split and same, ev)


def grade_criterion(M: FPModule, C: FPModule, n: int) -> tuple[ImplicationCheck, ImplicationCheck]:
    """Ω^i M i-C-torsionfree for all i <= n versus grade(Ext^i(M,C), C) >= i-1.

    The forward direction needs R (n-1)-C-torsionfree, the converse R
    n-C-torsionfree.
    """
    each = {i: is_n_C_torsionfree(syzygy(M, i), C, i).result for i in range(1, n + 1)}
    grades = {i: grade(ext(M, C, i).module, C) for i in range(1, n + 1)}
    bounds = all(g >= i - 1 for i, g in grades.items())
    all_tf = all(each.values())
    ev = {"syzygies_torsionfree": {str(i): v for i, v in each.items()},
          "grades": {str(i): ("inf" if g == INFINITY else g) for i, g in grades.items()}}
    fwd = ImplicationCheck("torsionfree syzygies bound grades", _ring_torsionfree(C, n - 1) and all_tf,
                           bounds, ev)
    conv = ImplicationCheck("grade bounds give torsionfree syzygies", _ring_torsionfree(C, n) and bounds,
                            all_tf, ev)
    return fwd, conv


def _cdim(M: FPModule, C: FPModule, bound: int | None = None):
    return c_dim(M, C, bound=bound)


def cdim_at_most_depth(M: FPModule, C: FPModule) -> ImplicationCheck:
    """λ_R iso and Cdim M finite imply Cdim M <= depth C."""
    lam_iso = is_iso(lambda_ring_map(C))
    if not lam_iso:
        return ImplicationCheck("finite Cdim is at most depth C", False, True, {"lambda_R iso": False})
    t = depth(C)
    res = _cdim(M, C, bound=t + 1)
    ev = {"cdim": res.status, "value": res.value, "depth_C": t}
    return ImplicationCheck("finite Cdim is at most depth C", res.finite, res.finite and res.value <= t, ev)


def ext_vanishes_above_cdim(M: FPModule, C: FPModule, r: int) -> ImplicationCheck:
    """Ext^i(C,C) = 0 for 1 <= i <= r and Cdim M < r imply Ext^r(M, C) = 0."""
    self_orth = all(ext_vanishes(C, C, i) for i in range(1, r + 1))
    res = _cdim(M, C, bound=r - 1) if r >= 1 else None
    small = res is not None and res.finite and res.value < r
    holds = ext_vanishes(M, C, r)
    ev = {"self_orthogonal": self_orth, "cdim": res.status if res else None,
          "value": res.value if res else None}
    return ImplicationCheck("Ext vanishes above Cdim", self_orth and small, holds, ev)


def grade_bound_from_finite_cdim(M: FPModule, C: FPModule, n: int) -> ImplicationCheck:
    """λ_R iso, Ext^i(C,C) = 0 for i <= n and Cdim M finite imply
    grade(Ext^i(M,C), C) >= i for 1 <= i <= n."""
    lam_iso = is_iso(lambda_ring_map(C))
    self_orth = all(ext_vanishes(C, C, i) for i in range(1, n + 1))
    finite = False
    ev = {"lambda_R iso": lam_iso, "self_orthogonal": self_orth}
    if lam_iso:
        res = _cdim(M, C)
        finite = res.finite
        ev["cdim"] = res.status
    grades = {i: grade(ext(M, C, i).module, C) for i in range(1, n + 1)}
    ev["grades"] = {str(i): ("inf" if g == INFINITY else g) for i, g in grades.items()}
    holds = all(g >= i for i, g in grades.items())
    return ImplicationCheck("finite Cdim bounds Ext grades", lam_iso and self_orth and finite, holds, ev)


def grade_equals_depth_artinian(M: FPModule, N: FPModule) -> ImplicationCheck:
    """Over an artinian ring every nonzero module is supported at the maximal
    ideal only, so grade(M, N) = depth N = 0 for nonzero M and N."""
    applies = M.ctx.dimension == 0 and not minimal(M).is_zero() and not minimal(N).is_zero()
    if not applies:
        return ImplicationCheck("grade equals depth", False, True)
    g, t = grade(M, N), depth(N)
    return ImplicationCheck("grade equals depth", True, g == t, {"grade": g, "depth": t})


def all_checks(M: FPModule, C: FPModule, n: int) -> list[ImplicationCheck]:
    """Every implication above for one (M, C, n) triple."""
    out = [syzygy_of_torsionfree_is_torsionfree(M, C)]
    if n >= 2:
        out.append(lambda_of_syzygy_splits(M, C, n))
    out += list(grade_criterion(M, C, n))
    out.append(cdim_at_most_depth(M, C))
    out.append(ext_vanishes_above_cdim(M, C, n))
    out.append(grade_bound_from_finite_cdim(M, C, n))
    out.append(grade_equals_depth_artinian(M, C))
    return out
