"""Named fixture rings and the default module corpus."""
from __future__ import annotations

from .fpmodule import FPModule, minimal
from .groebner import RingContext
from .homology import residue_field, ring_module, syzygy, transpose
from .kernel import DEFAULT_PRIME, PolynomialRing

FIXTURES = {
    "R1": {"vars": ["x"], "weights": [1], "ideal": ["x^2"],
           "about": "F_p[x]/(x^2), artinian Gorenstein"},
    "R2": {"vars": ["x", "y"], "weights": [1, 1], "ideal": ["x*y"],
           "about": "F_p[x,y]/(xy), one-dimensional hypersurface"},
    "R3": {"vars": ["x", "y"], "weights": [1, 1], "ideal": ["x^2", "x*y", "y^2"],
           "about": "F_p[x,y]/(x,y)^2, artinian of type 2"},
    "R4": {"vars": ["x", "y", "z"], "weights": [3, 4, 5],
           "ideal": ["y^2 - x*z", "x^2*y - z^2", "x^3 - y*z"],
           "about": "semigroup ring of <3,4,5>, one-dimensional Cohen-Macaulay of type 2"},
    "R5": {"vars": ["x", "y"], "weights": [1, 1], "ideal": [],
           "about": "F_p[x,y], regular of dimension 2"},
}


def make_ring(names, ideal=(), weights=None, p: int = DEFAULT_PRIME, name: str = "R",
              order: str = "grevlex") -> RingContext:
    S = PolynomialRing(names, weights=weights, p=p, order=order)
    return RingContext(S, [S(f) if isinstance(f, str) else f for f in ideal], name=name)


def fixture(name: str, p: int = DEFAULT_PRIME) -> RingContext:
    info = FIXTURES[name]
    return make_ring(info["vars"], info["ideal"], info["weights"], p=p, name=name)


def variable_quotient(ctx: RingContext, i: int) -> FPModule:
    m = tuple(1 if j == i else 0 for j in range(ctx.nvars))
    M = minimal(FPModule(ctx, [0], [{(0, m): 1}]))
    M.name = f"R/({ctx.S.names[i]})"
    return M


def corpus(ctx: RingContext) -> list[tuple[str, FPModule]]:
    """k, R, R/(each variable), the first syzygy of k and the transpose of k."""
    k = residue_field(ctx)
    out = [("k", k), ("R", ring_module(ctx))]
    out += [(f"R/({v})", variable_quotient(ctx, i)) for i, v in enumerate(ctx.S.names)]
    om = syzygy(k, 1)
    om.name = om.name or "Omega1(k)"
    tr = transpose(k)
    tr.name = tr.name or "Tr(k)"
    out += [("Omega1(k)", om), ("Tr(k)", tr)]
    return out
