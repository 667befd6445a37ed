"""Spherical approximations 0 -> Y -> X -> M -> 0 built by iterated pushouts,
their verification, the Cohen-Macaulay and free specializations, and a
corpus runner relating syzygy torsionfreeness to injective dimension."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .fpmodule import (DEFAULT_WINDOW, FPModule, ModuleMap, ShortExactSequence, _span_lifter,
                       compose, direct_sum, hilbert_window, identity, is_iso, is_mono, minimal,
                       minimize, pushout, zero_map)
from .homology import (InjdimVerdict, canonical_module, depth, ext_vanishes, injdim_surrogate,
                       is_cohen_macaulay_ring, lambda_ring_map, ring_module, syzygy,
                       syzygy_sequence)
from .torsion import (PredicateVerdict, c_dim, is_n_C_spherical, is_n_C_torsionfree,
                      is_n_semidualizing, is_n_torsionfree, is_structural_addC,
                      left_addC_approximation)


class PreconditionError(ValueError):
    """An operation was called outside its hypotheses."""


class TheoremViolation(RuntimeError):
    """A proved equivalence failed on concrete data."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


@dataclass
class FiltrationStep:
    """0 -> Y_k -> C_k -> Y_{k+1} -> 0 with C_k a sum of shifted copies of C."""
    sequence: ShortExactSequence
    shifts: tuple


@dataclass
class LadderSquare:
    """One pushout square with its two short exact rows."""
    kind: str
    level: int
    corner: ModuleMap
    side: ModuleMap
    rows: list


@dataclass
class ApproximationCertificate:
    M: FPModule
    C: FPModule
    n: int
    sequence: ShortExactSequence
    filtration: list
    ladder: list = field(default_factory=list)
    hypotheses: str = "semidualizing"
    verdict: dict | None = None
    first_Y: FPModule | None = None
    first_shifts: tuple = ()

    @property
    def X(self) -> FPModule:
        return self.sequence.B

    @property
    def Y(self) -> FPModule:
        return self.sequence.A


def _mini_push(f: ModuleMap, g: ModuleMap):
    """Pushout with a minimized presentation; maps are transported accordingly."""
    P, iB, iC = pushout(f, g)
    Pm, to_P, from_P = minimize(P)
    return Pm, compose(from_P, iB), compose(from_P, iC)


def _induced(P: FPModule, iB: ModuleMap, iC: ModuleMap, u: ModuleMap, v: ModuleMap) -> ModuleMap:
    """Map out of a (minimized) pushout restricting to u on B and v on C."""
    S = direct_sum(iB.source, iC.source)
    cover = ModuleMap(S, P, list(iB.columns) + list(iC.columns))
    target = ModuleMap(S, u.target, list(u.columns) + list(v.columns))
    lift = _span_lifter(cover)
    cols = []
    for j in range(P.ngens):
        pre = lift(P.unit(j))
        if pre is None:
            raise TheoremViolation("pushout is not generated by its two legs")
        cols.append(u.target.normal_form(target.apply(pre)))
    h = ModuleMap(P, u.target, cols)
    if not h.is_well_defined():
        raise TheoremViolation("induced map out of a pushout is not well defined")
    return h


def _attempt_ladder(M: FPModule, C: FPModule, n: int):
    """Run the pushout ladder; returns (certificate or None, failing step message)."""
    Mmin, to_M, _ = minimize(M)
    seqs = syzygy_sequence(Mmin, n)  # seqs[i] = (Ω^{i+1} -> P_i, P_i, P_i -> Ω^i)
    ladder = []
    filtration = []
    X0 = syzygy(Mmin, n)
    appr = left_addC_approximation(X0, C)
    if not appr.flags["mono"]:
        return None, "left approximation of the n-th syzygy is not injective", ladder
    f_prev = appr.map
    Yk = f_prev.target
    u = f_prev  # Ω^{n-k+1} M -> Y_k
    shifts0 = appr.shifts
    for k in range(1, n + 1):
        inc, P, proj = seqs[n - k]
        Xk, b, c = _mini_push(u, inc)
        Om = proj.target
        q = _induced(Xk, b, c, zero_map(Yk, Om), proj)
        ladder.append(LadderSquare("X", k, u, inc,
                                   [ShortExactSequence(inc, ModuleMap(P, Om, proj.columns)),
                                    ShortExactSequence(b, q)]))
        if k == n:
            final_q = compose(to_M, q)
            seq = ShortExactSequence(b, final_q)
            cert = ApproximationCertificate(M, C, n, seq, filtration, ladder,
                                            first_Y=f_prev.target, first_shifts=shifts0)
            return cert, None, ladder
        appr = left_addC_approximation(Xk, C)
        if not appr.flags["mono"]:
            return None, f"left approximation at ladder step {k} is not injective", ladder
        fk = appr.map
        Yn, e, uk = _mini_push(fk, q)
        filtration.append(FiltrationStep(ShortExactSequence(compose(fk, b), e), appr.shifts))
        ladder.append(LadderSquare("Y", k, fk, q, [ShortExactSequence(compose(fk, b), e)]))
        Yk, u = Yn, uk
    raise AssertionError("unreachable")


def _hypotheses(C: FPModule, n: int, strict: bool) -> tuple[bool, str, list]:
    """n-semidualizing, or the weaker conditions that suffice for n = 1, 2."""
    sd = is_n_semidualizing(C, n)
    if sd.result:
        return True, "semidualizing", sd.evidence
    if n == 1:
        ok = ext_vanishes(C, C, 1)
        return ok, "ext1-vanishing", [("Ext^1(C,C)=0", ok)]
    if n == 2:
        lam = is_mono(lambda_ring_map(C))
        e1, e2 = ext_vanishes(C, C, 1), ext_vanishes(C, C, 2)
        ok = lam and e1 and e2
        return ok, "lambda-mono-ext12", [("lambda_R mono", lam), ("Ext^1(C,C)=0", e1),
                                         ("Ext^2(C,C)=0", e2)]
    return False, "semidualizing", sd.evidence


@dataclass
class BuildOutcome:
    success: bool
    certificate: ApproximationCertificate | None
    reason: str
    precondition: PredicateVerdict | None


def build_spherical_approximation(M: FPModule, C: FPModule, n: int, strict: bool = True,
                                  verify: bool = True) -> ApproximationCertificate:
    out = try_build(M, C, n, strict=strict, verify=verify)
    if not out.success:
        raise PreconditionError(out.reason)
    return out.certificate


def try_build(M: FPModule, C: FPModule, n: int, strict: bool = True, verify: bool = True) -> BuildOutcome:
    """Attempt the ladder.  With ``strict`` the torsionfreeness precondition is
    checked first; without it the ladder simply runs and the result is judged
    by the verifier, so success is measured independently of the predicate."""
    if n < 1:
        raise PreconditionError("level must be at least 1")
    ok, label, ev = _hypotheses(C, n, strict)
    if not ok:
        return BuildOutcome(False, None, "C does not satisfy the hypotheses: " +
                            ", ".join(c for c, v in ev if not v), None)
    pre = None
    if strict:
        pre = is_n_C_torsionfree(syzygy(M, n), C, n)
        if not pre.result:
            return BuildOutcome(False, None, "n-th syzygy is not n-C-torsionfree: " +
                                ", ".join(c for c, v in pre.evidence if not v), pre)
    cert, why, ladder = _attempt_ladder(M, C, n)
    if cert is None:
        return BuildOutcome(False, None, why, pre)
    cert.hypotheses = label
    if verify:
        v = verify_approximation(cert.sequence, C, n, filtration=cert, check_theorem=False)
        cert.verdict = v
        if not v["accepted"]:
            failed = [c for c, ok_ in v["clauses"].items() if not ok_]
            return BuildOutcome(False, cert, "constructed sequence fails: " + ", ".join(failed), pre)
    return BuildOutcome(True, cert, "", pre)


# ------------------------------------------------------------ verification

def _filtration_ok(cert, Y: FPModule, C: FPModule, n: int) -> tuple[bool, dict]:
    """Checks an add C filtration 0 -> Y_k -> C_k -> Y_{k+1} -> 0 ending at Y."""
    info = {}
    steps = cert.filtration
    first = cert.first_Y
    if first is None:
        return False, {"reason": "missing first layer"}
    ok = is_structural_addC(first, C) is not None
    info["first_layer_in_addC"] = ok
    prev = first
    for idx, st in enumerate(steps):
        seq = st.sequence
        exact = seq.is_exact()
        inC = is_structural_addC(seq.B, C) is not None
        chained = seq.A is prev
        info[f"layer{idx + 1}"] = {"exact": exact, "in_addC": inC, "chained": chained}
        ok = ok and exact and inC and chained
        prev = seq.C
    ok = ok and prev is Y
    info["ends_at_Y"] = prev is Y
    info["length"] = len(steps)
    ok = ok and len(steps) < n
    return ok, info


def verify_approximation(seq: ShortExactSequence, C: FPModule, n: int, filtration=None,
                         check_theorem: bool = True, cdim_bound: int | None = None,
                         window: int = DEFAULT_WINDOW) -> dict:
    """Clause-by-clause check of an n-C-spherical approximation."""
    Y, X, M = seq.A, seq.B, seq.C
    clauses = {}
    details = {}
    flags = seq.flags()
    clauses["sequence.exact"] = all(flags.values())
    details["sequence"] = flags
    if n == 0:
        # level zero: sphericity is vacuous and the only admissible Y is zero
        clauses["X.spherical"] = True
        clauses["Y.cdim<n"] = minimal(Y).is_zero()
    else:
        sph = is_n_C_spherical(X, C, n)
        clauses["X.spherical"] = sph.result
        details["X.spherical"] = sph.to_dict()
        if filtration is not None:
            ok, info = _filtration_ok(filtration, Y, C, n)
            details["Y.filtration"] = info
            clauses["Y.cdim<n"] = ok
        else:
            res = c_dim(Y, C, bound=n - 1 if cdim_bound is None else min(cdim_bound, n - 1))
            details["Y.cdim"] = {"status": res.status, "value": res.value}
            clauses["Y.cdim<n"] = res.finite and res.value < n
    clauses["ext1(X,Y)=0"] = ext_vanishes(X, Y, 1) if clauses["sequence.exact"] else False
    win = hilbert_window([X, Y, M], window)
    clauses["hilbert.conservation"] = all(X.hilbert(d) == Y.hilbert(d) + M.hilbert(d) for d in win)
    accepted = all(clauses.values())
    alarm = False
    if check_theorem and accepted and n >= 1:
        hyp = _converse_hypotheses(C, n)
        tf = is_n_C_torsionfree(syzygy(M, n), C, n)
        details["syzygy_torsionfree"] = tf.to_dict()
        details["converse_hypotheses"] = hyp
        if hyp and not tf.result:
            alarm = True
    return {"accepted": accepted, "clauses": clauses, "details": details, "alarm": alarm}


def _converse_hypotheses(C: FPModule, n: int) -> bool:
    """lambda_R injective for n = 1; lambda_R bijective and Ext^i(C,C)=0 for i < n otherwise."""
    lam = lambda_ring_map(C)
    if n == 1:
        return is_mono(lam)
    return is_iso(lam) and all(ext_vanishes(C, C, i) for i in range(1, n))


# ---------------------------------------------------------- specializations

def identity_certificate(M: FPModule, C: FPModule, n: int) -> ApproximationCertificate:
    Z = FPModule.zero(M.ctx)
    seq = ShortExactSequence(zero_map(Z, M), identity(M))
    return ApproximationCertificate(M, C, n, seq, [], [], first_Y=Z)


@dataclass
class CMApproximation:
    certificate: ApproximationCertificate
    depth_X: int | None
    injdim_layers: str
    y_free: bool
    checks: dict


def cm_approximation(M: FPModule) -> CMApproximation:
    ctx = M.ctx
    if not is_cohen_macaulay_ring(ctx):
        raise PreconditionError("ring is not Cohen-Macaulay")
    omega = canonical_module(ctx)
    d = ctx.dimension
    if d == 0:
        cert = identity_certificate(M, omega, 0)
        cert.verdict = verify_approximation(cert.sequence, omega, 0, filtration=cert)
        return CMApproximation(cert, None, "finite", True, {"identity": True})
    cert = build_spherical_approximation(M, omega, d)
    X, Y = cert.X, cert.Y
    dX = depth(X) if not minimal(X).is_zero() else None
    inj = injdim_surrogate(omega).verdict
    y_free = minimal(Y).is_free()
    checks = {"depth_X=dim": dX is None or dX == d, "layers_injdim_finite": inj == "finite",
              "verified": bool(cert.verdict and cert.verdict["accepted"])}
    return CMApproximation(cert, dX, inj, y_free, checks)


def ab_approximation(M: FPModule, n: int) -> ApproximationCertificate:
    pre = is_n_torsionfree(syzygy(M, n), n)
    if not pre.result:
        raise PreconditionError("n-th syzygy is not n-torsionfree")
    return build_spherical_approximation(M, ring_module(M.ctx), n)


def hilbert_data(cert: ApproximationCertificate, window: int = DEFAULT_WINDOW) -> dict:
    win = hilbert_window([cert.X, cert.Y, cert.M], window)
    return {"range": [win.start, win.stop - 1],
            "X": [cert.X.hilbert(d) for d in win],
            "Y": [cert.Y.hilbert(d) for d in win]}


# -------------------------------------------------------------- descent

def check_descent(M: FPModule, C: FPModule, n: int) -> dict:
    if not is_n_semidualizing(C, n).result:
        raise PreconditionError("C is not n-semidualizing")
    top = is_n_C_torsionfree(syzygy(M, n), C, n).result
    each = {i: is_n_C_torsionfree(syzygy(M, i), C, i).result for i in range(1, n + 1)}
    agree = top == all(each.values())
    return {"top": top, "each": each, "agree": agree}


# ---------------------------------------------------------- corpus runner

@dataclass
class CorpusReport:
    ring: str
    C: str
    n: int
    verdicts: dict
    surrogate: InjdimVerdict
    consistent: bool
    exhaustive: bool
    witness: str | None

    def to_dict(self) -> dict:
        return {"ring": self.ring, "C": self.C, "n": self.n,
                "verdicts": dict(sorted(self.verdicts.items())),
                "injdim": {"verdict": self.surrogate.verdict,
                           "bass_numbers": self.surrogate.bass_numbers,
                           "window": self.surrogate.window, "heuristic": True},
                "consistent": self.consistent,
                "scope": "exhaustive" if self.exhaustive else "surrogate only",
                "witness": self.witness}


def run_corpus(C: FPModule, n: int, corpus: Sequence[tuple[str, FPModule]], window: int = 2,
               jobs: int = 1) -> CorpusReport:
    ctx = C.ctx
    R = ring_module(ctx)
    if not is_n_C_torsionfree(R, C, n).result:
        raise PreconditionError("R is not n-C-torsionfree")

    def one(item):
        name, M = item
        return name, is_n_C_torsionfree(syzygy(M, n), C, n).result

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(one, corpus))
    else:
        results = [one(it) for it in corpus]
    verdicts = dict(results)
    sur = injdim_surrogate(C, window)
    all_true = all(verdicts.values())
    consistent = all_true == (sur.verdict == "finite") and sur.verdict != "undetermined"
    witness = next((name for name, v in results if not v), None)
    return CorpusReport(ctx.name, C.name or f"M{C.uid}", n, verdicts, sur, consistent,
                        ctx.dimension == 0, witness)
