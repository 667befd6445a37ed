import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import buchberger_criterion_holds, random_gens, random_vector
from oracle import Oracle
from homapprox.fixtures import make_ring
from homapprox.fpmodule import FPModule
from homapprox.groebner import (FreeModule, apply_matrix, module_groebner, normal_form,
                                syzygies, vec_add, vec_scale)

ARTINIAN_AND_SMALL = ["R1", "R2", "R3"]


def oracle_for(ctx):
    return Oracle(ctx.weights, ctx.ideal_gb, ctx.p)


def unit(i, ctx):
    return {(i, ctx.S.one_mono()): 1}


def mono(ctx, text):
    (m,) = ctx.poly(text)
    return m


def test_unit_generator_spans_everything(rings):
    ctx = rings["R5"]
    gb = module_groebner([unit(0, ctx)], FreeModule(ctx, [0]))
    assert normal_form(unit(0, ctx), gb) == {}
    assert gb.contains({(0, mono(ctx, "x^3*y")): 5})


def test_principal_submodule_over_dual_numbers(rings):
    ctx = rings["R1"]
    x = mono(ctx, "x")
    gb = module_groebner([{(0, x): 1}], FreeModule(ctx, [0]))
    assert gb.vectors() == [{(0, x): 1}]
    assert normal_form({(0, x): 1}, gb) == {}
    assert normal_form(unit(0, ctx), gb) == unit(0, ctx)
    assert normal_form({}, gb) == {}


def test_hypersurface_membership(rings):
    ctx = rings["R2"]
    gb = module_groebner([{(0, mono(ctx, "x")): 1}], FreeModule(ctx, [0]))
    assert gb.contains({(0, mono(ctx, "x*y")): 1})
    gb2 = module_groebner([{(0, m): c for m, c in ctx.poly("x+y").items()}], FreeModule(ctx, [0]))
    assert gb2.contains({(0, mono(ctx, "x^2")): 1})


def test_free_columns_have_no_syzygies(rings):
    ctx = rings["R5"]
    G, syz = syzygies([unit(0, ctx), unit(1, ctx)], FreeModule(ctx, [0, 0]))
    assert syz == []
    ctx = rings["R1"]
    G, syz = syzygies([unit(0, ctx), unit(1, ctx)], FreeModule(ctx, [0, 0]))
    assert syz == []


def test_periodic_syzygy(rings):
    ctx = rings["R1"]
    x = mono(ctx, "x")
    G, syz = syzygies([{(0, x): 1}], FreeModule(ctx, [0]))
    assert G.degrees == (1,)
    assert syz == [{(0, x): 1}]


def test_koszul_syzygy_generates():
    ctx = make_ring(["x", "y"])
    x, y = (1, 0), (0, 1)
    gens = [{(0, x): 1}, {(0, y): 1}]
    G, syz = syzygies(gens, FreeModule(ctx, [0]))
    assert len(syz) == 1
    s = syz[0]
    assert s == {(0, y): 1, (1, x): ctx.p - 1} or s == {(0, y): ctx.p - 1, (1, x): 1}
    orc = oracle_for(ctx)
    for d in range(0, 5):
        assert orc.submodule_rank(G.degrees, syz, d) == orc.kernel_dim(G.degrees, [0], gens, [], d)


def test_determinism(rings):
    ctx = rings["R3"]
    rng = random.Random(3)
    gens = random_gens(ctx, [0, 1], rng, 3)
    a = module_groebner(gens, FreeModule(ctx, [0, 1])).vectors()
    b = module_groebner(list(gens), FreeModule(ctx, [0, 1])).vectors()
    assert a == b


def test_ideal_basis_is_reduced_and_stable(rings):
    for name in ("R2", "R3", "R4"):
        ctx = rings[name]
        again = make_ring(ctx.S.names, [dict(g) for g in ctx.ideal_gb], ctx.weights)
        assert again.ideal_gb == ctx.ideal_gb


def test_dimensions(rings):
    assert [rings[n].dimension for n in ("R1", "R2", "R3", "R4", "R5")] == [0, 1, 0, 1, 2]


@pytest.mark.parametrize("name", ARTINIAN_AND_SMALL)
@settings(max_examples=15)
@given(seed=st.integers(0, 10**6))
def test_buchberger_criterion_and_nf(rings, name, seed):
    ctx = rings[name]
    rng = random.Random(seed)
    degrees = [0, 1]
    gens = random_gens(ctx, degrees, rng, rng.randint(1, 3))
    gb = module_groebner(gens, FreeModule(ctx, degrees))
    assert buchberger_criterion_holds(gb)
    assert all(gb.normal_form(g) == {} for g in gens)
    for _ in range(7):
        d = rng.randint(0, 4)
        v = random_vector(ctx, degrees, d, rng)
        w = random_vector(ctx, degrees, d, rng)
        nv = gb.normal_form(v)
        assert gb.normal_form(nv) == nv
        c = rng.randrange(1, ctx.p)
        lin = gb.normal_form(vec_add(v, w, ctx.p, c))
        assert lin == vec_add(nv, gb.normal_form(w), ctx.p, c)
        assert gb.normal_form(vec_scale(v, c, ctx.p)) == vec_scale(nv, c, ctx.p)


@pytest.mark.parametrize("name", ARTINIAN_AND_SMALL)
@settings(max_examples=25)
@given(seed=st.integers(0, 10**6))
def test_against_oracle(rings, name, seed):
    ctx = rings[name]
    orc = oracle_for(ctx)
    rng = random.Random(seed)
    degrees = [0, 1]
    gens = random_gens(ctx, degrees, rng, rng.randint(1, 3))
    M = FPModule(ctx, degrees, gens)
    for d in range(0, 7):
        assert M.hilbert(d) == orc.module_dim(degrees, gens, d)
    for _ in range(4):
        v = random_vector(ctx, degrees, rng.randint(1, 3), rng, density=0.3)
        assert M.gb.contains(v) == orc.contains(degrees, gens, v)
    G, syz = syzygies(gens, FreeModule(ctx, degrees))
    for s in syz:
        assert FPModule(ctx, degrees).gb.normal_form(apply_matrix(gens, s, ctx.p)) == {}
    for d in range(0, 7):
        assert orc.submodule_rank(G.degrees, syz, d) - orc.submodule_rank(G.degrees, [], d) == \
            orc.kernel_dim(G.degrees, degrees, gens, [], d)
