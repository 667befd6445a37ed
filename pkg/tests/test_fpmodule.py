import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_gens, random_vector
from oracle import Oracle
from homapprox.fixtures import make_ring
from homapprox.fpmodule import (FPModule, ModuleMap, ShortExactSequence, cokernel, compose,
                                direct_sum, hilbert_equal, identity, image, is_epi, is_iso,
                                is_minimal_presentation, is_mono, kernel, minimize, pushout,
                                pushout_induced, zero_map)
from homapprox.homology import residue_field, ring_module


def mono(ctx, text):
    (m,) = ctx.poly(text)
    return m


def mult(ctx, text, M=None):
    """Multiplication by a homogeneous polynomial on R (or on a cyclic M)."""
    R = M if M is not None else ring_module(ctx)
    f = ctx.poly(text)
    deg = ctx.S(text).degree()
    return ModuleMap(R, R, [{(0, m): c for m, c in f.items()}], deg)


def hilb(M, D=6, start=0):
    return [M.hilbert(d) for d in range(start, start + D)]


def test_kernel_of_identity_and_zero(rings):
    ctx = rings["R2"]
    k = residue_field(ctx)
    R = ring_module(ctx)
    assert kernel(identity(R))[0].is_zero()
    K, inc = kernel(zero_map(R, k))
    assert hilbert_equal(K, R) and is_iso(inc)


def test_kernel_of_multiplication_on_hypersurface(rings):
    ctx = rings["R2"]
    K, inc = kernel(mult(ctx, "x"))
    # ann(x) = (y), isomorphic to R/(x) generated in degree 1
    assert K.degrees == (1,)
    assert hilb(K, 6) == [0, 1, 1, 1, 1, 1]
    assert compose(mult(ctx, "x"), inc).is_zero()


def test_cokernel_examples(rings):
    ctx = rings["R1"]
    R = ring_module(ctx)
    Q, proj = cokernel(mult(ctx, "x"))
    assert hilb(Q, 4) == [1, 0, 0, 0]
    assert cokernel(identity(R))[0].is_zero()
    Q0, _ = cokernel(zero_map(R, R))
    assert hilbert_equal(Q0, R)


def test_mono_epi_verdicts(rings):
    ctx = rings["R1"]
    R = ring_module(ctx)
    x = mult(ctx, "x")
    assert not is_mono(x) and not is_epi(x)
    assert is_iso(identity(R))
    epi = ModuleMap(R, residue_field(ctx), [{(0, ctx.S.one_mono()): 1}])
    assert is_epi(epi) and not is_mono(epi)


def test_pushout_examples():
    ctx = make_ring(["x"])
    one = ctx.S.one_mono()
    B = FPModule(ctx, [0], [{(0, (2,)): 1}])          # R/(x^2)
    A = FPModule(ctx, [1], [{(0, (1,)): 1}])          # k(-1), the socle
    C = FPModule(ctx, [1], [{(0, (1,)): 1}])
    f = ModuleMap(A, B, [{(0, (1,)): 1}])
    g = ModuleMap(A, C, [{(0, one): 1}])
    P, iB, iC = pushout(f, g)
    orc = Oracle(ctx.weights, [], ctx.p)
    for d in range(0, 6):
        assert P.hilbert(d) == B.hilbert(d) + C.hilbert(d) - A.hilbert(d)
        assert P.hilbert(d) == orc.module_dim(P.degrees, P.relations, d)
    assert compose(iB, f).equals(compose(iC, g))
    # along the identity the pushout is B; along A -> 0 it is coker f
    P1, jB, _ = pushout(f, identity(A))
    assert is_iso(jB)
    Z = FPModule.zero(ctx)
    P2, _, _ = pushout(f, zero_map(A, Z))
    assert hilbert_equal(P2, cokernel(f)[0])


def test_pushout_universal_property(rings):
    ctx = rings["R3"]
    R = ring_module(ctx)
    A = FPModule.free(ctx, [1])
    f = ModuleMap(A, R, [{(0, mono(ctx, "x")): 1}])
    g = ModuleMap(A, R, [{(0, mono(ctx, "y")): 1}])
    P, iB, iC = pushout(f, g)
    assert compose(iB, f).equals(compose(iC, g))
    # a cone: both legs land in R/(x, y) = k, where x and y act by zero
    T = residue_field(ctx)
    one = ctx.S.one_mono()
    u = ModuleMap(R, T, [{(0, one): 1}])
    v = ModuleMap(R, T, [{(0, one): 2}])
    assert compose(u, f).equals(compose(v, g))
    h = pushout_induced(P, iB, iC, u, v)
    assert compose(h, iB).equals(u) and compose(h, iC).equals(v)


def test_direct_sums(rings):
    ctx = rings["R1"]
    k = residue_field(ctx)
    R = ring_module(ctx)
    Z = FPModule.zero(ctx)
    assert hilbert_equal(direct_sum(k, Z), k)
    assert direct_sum(R, R).is_free() and direct_sum(R, R).ngens == 2
    assert hilb(direct_sum(k, k), 3) == [2, 0, 0]


def test_minimize_examples():
    ctx = make_ring(["x"])
    one = ctx.S.one_mono()
    assert minimize(FPModule(ctx, [0], [{(0, one): 1}]))[0].is_zero()
    M = FPModule(ctx, [0, 0], [{(0, one): 1}, {(1, (1,)): 1}])
    N, to_M, from_M = minimize(M)
    assert N.ngens == 1 and [set(r) for r in N.relations] == [{(0, (1,))}]
    assert compose(to_M, from_M).equals(identity(M))
    assert compose(from_M, to_M).equals(identity(N))


def test_minimize_random_with_constant_entry():
    ctx = make_ring(["x", "y"])
    rng = random.Random(11)
    one = ctx.S.one_mono()
    rels = [{(0, one): 1, (1, (1, 0)): 3, (2, (0, 1)): 5}]
    rels += random_gens(ctx, [1, 0, 0], rng, 2, lo=2, hi=2)
    M = FPModule(ctx, [1, 0, 0], rels)
    N, to_M, from_M = minimize(M)
    assert N.ngens == 2 and is_minimal_presentation(N)
    assert compose(to_M, from_M).equals(identity(M))
    assert compose(from_M, to_M).equals(identity(N))


def test_hilbert_examples(rings):
    assert hilb(ring_module(rings["R1"]), 4) == [1, 1, 0, 0]
    ctx = make_ring(["x", "y"])
    F = FPModule.free(ctx, [0, 1])   # twists (0, -1)
    assert [F.hilbert(d) for d in range(6)] == [(d + 1) + d for d in range(6)]
    assert hilb(FPModule.zero(ctx), 5) == [0] * 5


@pytest.mark.parametrize("name", ["R1", "R2", "R3"])
@settings(max_examples=10)
@given(seed=st.integers(0, 10**6))
def test_kernel_cokernel_properties(rings, name, seed):
    ctx = rings[name]
    rng = random.Random(seed)
    M = FPModule(ctx, [0, 1], random_gens(ctx, [0, 1], rng, rng.randint(0, 2)))
    N = FPModule(ctx, [0, 0], random_gens(ctx, [0, 0], rng, rng.randint(0, 2)))
    cols = []
    for j, a in enumerate(M.degrees):
        cols.append(random_vector(ctx, N.degrees, a + 1, rng))
    f = ModuleMap(M, N, cols, 1)
    # make f well defined by killing images of M's relations in the target
    T = FPModule(ctx, N.degrees, list(N.relations) + [f.apply(r) for r in M.relations])
    f = ModuleMap(M, T, cols, 1)
    assert f.is_well_defined()
    K, inc = kernel(f)
    assert compose(f, inc).is_zero()
    Q, proj = cokernel(f)
    Im, epi, incl = image(f)
    seq = ShortExactSequence(inc, epi)
    assert seq.is_exact()
    for d in range(0, 7):
        assert M.hilbert(d) == K.hilbert(d) + Im.hilbert(d + 1)
        assert T.hilbert(d + 1) == Im.hilbert(d + 1) + Q.hilbert(d + 1)
    Mm = minimize(M)[0]
    assert minimize(Mm)[0].degrees == Mm.degrees
    assert hilbert_equal(Mm, M)
