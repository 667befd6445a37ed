"""Command line entry point: run scripts, verify certificates, list fixtures."""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

from .approximation import (PreconditionError, TheoremViolation, ab_approximation,
                            check_descent, cm_approximation, hilbert_data, run_corpus, try_build)
from .dsl import (Command, ModuleDecl, RingDecl, ScriptError, SessionScript, format_statement,
                  make_poly_ring, parse_script)
from .fixtures import FIXTURES, corpus, fixture
from .fpmodule import DEFAULT_WINDOW, FPModule, hilbert_window, minimal, shift
from .groebner import RingContext
from .homology import (canonical_module, ext, free_resolution, hom, injdim_surrogate,
                       is_cohen_macaulay_ring, residue_field, ring_module, syzygy, transpose)
from .report import (canonical_dumps, certificate_to_dict, make_report, payload_bytes,
                     replay_certificate)
from .torsion import (InternalInconsistency, c_dim, is_n_C_spherical, is_n_C_torsionfree,
                      is_n_semidualizing, is_n_torsionfree)

EXIT_OK, EXIT_USAGE, EXIT_PRECONDITION, EXIT_ALARM = 0, 1, 2, 3


@dataclass
class Options:
    hilbert_window: int = DEFAULT_WINDOW
    cdim_bound: int | None = None
    iso_trials: int = 64
    seed: int = 0
    jobs: int = 1

    def to_dict(self) -> dict:
        return {"hilbert_window": self.hilbert_window, "cdim_bound": self.cdim_bound,
                "iso_trials": self.iso_trials, "seed": self.seed}


class Session:
    """Name bindings for one script: the ring, k, omega and declared modules."""

    def __init__(self, decl: RingDecl):
        S = make_poly_ring(decl)
        self.ctx = RingContext(S, [S(f) for f in decl.ideal], name=decl.name)
        self.decl = decl
        self.modules: dict[str, FPModule] = {decl.name: ring_module(self.ctx),
                                             "k": residue_field(self.ctx)}
        self.declared: list = []

    def get(self, name: str) -> FPModule:
        if name == "omega" and name not in self.modules:
            if not is_cohen_macaulay_ring(self.ctx):
                raise PreconditionError("omega needs a Cohen-Macaulay ring")
            self.modules["omega"] = _named(canonical_module(self.ctx), "omega")
        return self.modules[name]

    def declare(self, d: ModuleDecl) -> None:
        ctx = self.ctx
        a = d.args
        if d.kind == "coker":
            rows, _, degrees = a
            S = ctx.S
            ncols = len(rows[0]) if rows else 0
            rels = [dict() for _ in range(ncols)]
            for i, row in enumerate(rows):
                for j, text in enumerate(row):
                    for m, c in S(text).as_dict().items():
                        rels[j][(i, m)] = c
            M = FPModule(ctx, degrees, rels)
        elif d.kind == "free":
            word, vals = a
            M = FPModule.free(ctx, [-v for v in vals] if word == "twists" else vals)
        elif d.kind == "canonical":
            if not is_cohen_macaulay_ring(ctx):
                raise PreconditionError("canonical module needs a Cohen-Macaulay ring")
            M = canonical_module(ctx)
        elif d.kind == "syzygy":
            M = syzygy(self.get(a[0]), a[1])
        elif d.kind == "transpose":
            M = transpose(self.get(a[0]))
        elif d.kind == "dual":
            M = hom(self.get(a[0]), self.get(a[1])).module
        else:
            M = shift(self.get(a[0]), a[1])
        self.modules[d.name] = _named(M, d.name)
        self.declared.append(d)


def _named(M: FPModule, name: str) -> FPModule:
    """A renamed copy, so shared cached modules keep their own names."""
    return FPModule(M.ctx, M.degrees, M.relations, name=name, gb=M._gb)


def _hilbert_list(M: FPModule, window: int) -> dict:
    win = hilbert_window([M], window)
    return {"start": win.start, "values": [M.hilbert(d) for d in win]}


def run_command(sess: Session, cmd: Command, opts: Options) -> tuple[dict, int]:
    """Payload and exit status for one command."""
    v, a = cmd.verb, cmd.args
    g = sess.get
    if v == "check":
        what, M, C, n = a
        if what == "torsionfree":
            res = is_n_C_torsionfree(g(M), g(C), n)
        elif what == "spherical":
            res = is_n_C_spherical(g(M), g(C), n)
        elif what == "semidualizing":
            res = is_n_semidualizing(g(M), n)
        else:
            res = is_n_torsionfree(g(M), n)
        return res.to_dict(), EXIT_OK
    if v == "approximate":
        M, C, n = a
        out = try_build(g(M), g(C), n, strict=True, verify=True)
        if not out.success:
            payload = {"result": "refused", "reason": out.reason}
            if out.precondition is not None:
                payload["precondition"] = out.precondition.to_dict()
            return payload, EXIT_PRECONDITION
        return _certificate_payload(out.certificate, opts)
    if v == "ab-approx":
        cert = ab_approximation(g(a[0]), a[1])
        return _certificate_payload(cert, opts)
    if v == "cm-approx":
        res = cm_approximation(g(a[0]))
        payload, status = _certificate_payload(res.certificate, opts)
        payload["depth_X"] = res.depth_X
        payload["layers_injdim"] = res.injdim_layers
        payload["Y_free"] = res.y_free
        payload["checks"] = res.checks
        return payload, status
    if v == "resolve":
        M, length = a
        res = free_resolution(g(M), length)
        betti = res.betti(length)
        return {"betti_numbers": res.betti_numbers(length),
                "graded_betti": {str(i): {str(d): c for d, c in row.items()} for i, row in betti.items()},
                "minimal": res.is_minimal(length), "complete": res.complete}, EXIT_OK
    if v == "ext":
        M, N, top = a
        rows = []
        for i in range(top + 1):
            E = minimal(ext(g(M), g(N), i).module)
            rows.append({"i": i, "generators": list(E.degrees),
                         "hilbert": _hilbert_list(E, opts.hilbert_window)})
        return {"ext": rows}, EXIT_OK
    if v == "cdim":
        M, C, bound = a
        if bound is None:
            bound = opts.cdim_bound
        res = c_dim(g(M), g(C), bound=bound, trials=opts.iso_trials, seed=opts.seed)
        return {"cdim": res.status, "value": res.value, "bound": res.bound,
                "reason": res.reason}, EXIT_OK
    if v == "descent":
        M, C, n = a
        res = check_descent(g(M), g(C), n)
        payload = {"top": res["top"], "each": {str(i): b for i, b in res["each"].items()},
                   "agree": res["agree"]}
        return payload, EXIT_OK if res["agree"] else EXIT_ALARM
    if v == "injdim":
        res = injdim_surrogate(g(a[0]))
        return {"verdict": res.verdict, "bass_numbers": res.bass_numbers, "window": res.window,
                "depth_ring": res.depth_ring, "heuristic": True}, EXIT_OK
    if v == "corpus":
        C, n = a
        rep = run_corpus(g(C), n, corpus(sess.ctx), jobs=opts.jobs)
        d = rep.to_dict()
        status = EXIT_OK
        if rep.exhaustive and not rep.consistent:
            status = EXIT_ALARM
        return d, status
    raise ValueError(f"unknown command {v!r}")


def _certificate_payload(cert, opts: Options) -> tuple[dict, int]:
    verdict = cert.verdict or {}
    payload = {"result": "certificate", "hypotheses": cert.hypotheses,
               "clauses": verdict.get("clauses", {}),
               "hilbert": hilbert_data(cert, opts.hilbert_window),
               "certificate": certificate_to_dict(cert)}
    status = EXIT_ALARM if verdict.get("alarm") else EXIT_OK
    return payload, status


def _inputs(sess: Session, cmd: Command, opts: Options) -> dict:
    return {"ring": format_statement(sess.decl),
            "declarations": [format_statement(d) for d in sess.declared],
            "command": format_statement(cmd),
            "options": opts.to_dict()}


def execute(script: SessionScript, opts: Options | None = None, out=None) -> tuple[list[dict], int]:
    """Run every statement in order; returns the reports and the exit status."""
    opts = opts or Options()
    reports = []
    worst = EXIT_OK
    sess = None
    for stmt in script.statements:
        where = f"{stmt.span.line}:{stmt.span.col}"
        if isinstance(stmt, RingDecl):
            sess = Session(stmt)
            continue
        if sess is None:
            raise ScriptError("the first statement must declare the ring")
        if isinstance(stmt, ModuleDecl):
            try:
                sess.declare(stmt)
            except PreconditionError as exc:
                _say(out, f"[precondition] {where} {format_statement(stmt)} {exc}")
                worst = max(worst, EXIT_PRECONDITION)
            continue
        start = time.perf_counter()
        inputs = _inputs(sess, stmt, opts)
        try:
            payload, status = run_command(sess, stmt, opts)
        except PreconditionError as exc:
            payload, status = {"result": "refused", "reason": str(exc)}, EXIT_PRECONDITION
        except (TheoremViolation, InternalInconsistency) as exc:
            payload, status = {"result": "alarm", "reason": str(exc)}, EXIT_ALARM
        except KeyError as exc:
            payload, status = {"result": "error", "reason": f"unbound name {exc}"}, EXIT_PRECONDITION
        elapsed = time.perf_counter() - start
        payload["status"] = {EXIT_OK: "ok", EXIT_PRECONDITION: "precondition",
                             EXIT_ALARM: "alarm"}[status]
        rep = make_report(format_statement(stmt), inputs, payload, opts.seed,
                          {"seconds": round(elapsed, 3)})
        reports.append(rep)
        worst = max(worst, status)
        _say(out, f"[{payload['status']}] {where} {format_statement(stmt)} {summary(payload)}")
    return reports, worst


def summary(payload: dict) -> str:
    if "result" in payload and isinstance(payload["result"], bool):
        return "-> " + str(payload["result"]).lower()
    if payload.get("result") == "certificate":
        failed = [k for k, ok in payload["clauses"].items() if not ok]
        return "-> certificate " + ("accepted" if not failed else "failing " + ", ".join(failed))
    if payload.get("result") in ("refused", "alarm", "error"):
        return "-> " + payload["result"] + ": " + payload["reason"]
    if "betti_numbers" in payload:
        return "-> betti " + " ".join(map(str, payload["betti_numbers"]))
    if "ext" in payload:
        return "-> generators " + " ".join(str(len(r["generators"])) for r in payload["ext"])
    if "verdicts" in payload:
        return (f"-> injdim {payload['injdim']['verdict']}, all torsionfree "
                f"{all(payload['verdicts'].values())}, consistent {payload['consistent']}")
    if "verdict" in payload:
        return "-> " + payload["verdict"]
    if "agree" in payload:
        return f"-> top {payload['top']}, agree {payload['agree']}"
    if "cdim" in payload:
        return f"-> {payload['cdim']} {payload['value'] if payload['value'] is not None else ''}".rstrip()
    return ""


def _say(out, line: str) -> None:
    if out is not None:
        print(line, file=out)


def replay_report(report: dict) -> bool:
    """Rerun a report's inputs with its seed; True iff the payload is byte-identical."""
    inp = report["inputs"]["content"]
    text = "\n".join([inp["ring"]] + inp["declarations"] + [inp["command"]])
    o = inp["options"]
    opts = Options(hilbert_window=o["hilbert_window"], cdim_bound=o["cdim_bound"],
                   iso_trials=o["iso_trials"], seed=report["seed"])
    reports, _ = execute(parse_script(text), opts)
    return payload_bytes(reports[-1]) == payload_bytes(report)


# ------------------------------------------------------------------ main

def _seed(args) -> int:
    env = os.environ.get("HOMAPPROX_SEED")
    return int(env) if env not in (None, "") else args.seed


def cmd_run(args) -> int:
    try:
        with open(args.script, encoding="utf-8") as fh:
            text = fh.read()
        script = parse_script(text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScriptError as exc:
        print(f"{args.script}:{exc}", file=sys.stderr)
        return EXIT_USAGE
    opts = Options(args.hilbert_window, args.cdim_bound, args.iso_trials, _seed(args), args.jobs)
    reports, status = execute(script, opts, out=sys.stdout)
    if args.report:
        doc = {"script": text, "reports": reports}
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(canonical_dumps(doc))
    return status


def _ring_matches(cert_ring: dict, ring_script: str) -> bool:
    decl = parse_script(ring_script).ring
    if decl is None:
        return False
    S = make_poly_ring(decl)
    ctx = RingContext(S, [S(f) for f in decl.ideal], name=decl.name)
    mine = ctx.describe()
    mine.pop("name")
    theirs = dict(cert_ring)
    theirs.pop("name", None)
    return mine == theirs


def cmd_verify(args) -> int:
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    certs = []
    replays = []
    if isinstance(doc, dict) and "certificate" in doc and "format" in doc:
        certs.append(("certificate", doc))
    elif isinstance(doc, dict) and "reports" in doc:
        for i, rep in enumerate(doc["reports"]):
            c = rep.get("payload", {}).get("certificate")
            if c is not None:
                certs.append((f"report {i + 1}: {rep['command']}", c))
            replays.append((f"report {i + 1}: {rep['command']}", rep))
    else:
        print("error: not a certificate or report file", file=sys.stderr)
        return EXIT_USAGE
    if args.ring:
        with open(args.ring, encoding="utf-8") as fh:
            ring_text = fh.read()
        for label, c in certs:
            if not _ring_matches(c.get("ring", {}), ring_text):
                print(f"rejected {label}: ring declaration does not match")
                return EXIT_PRECONDITION
    status = EXIT_OK
    for label, c in certs:
        res = replay_certificate(c)
        if res["accepted"]:
            print(f"accepted {label}")
        else:
            print(f"rejected {label}: failing clauses {', '.join(res['failing'])}")
            if res.get("error"):
                print(f"  {res['error']}")
            status = max(status, EXIT_PRECONDITION)
        if res.get("alarm"):
            print(f"alarm {label}: converse check failed")
            status = EXIT_ALARM
    if args.replay:
        for label, rep in replays:
            same = replay_report(rep)
            print(f"{'replayed' if same else 'replay differs'} {label}")
            if not same:
                status = max(status, EXIT_PRECONDITION)
    return status


def cmd_fixtures(args) -> int:
    for name, info in FIXTURES.items():
        ideal = ", ".join(info["ideal"]) or "0"
        print(f"{name}: vars {','.join(info['vars'])} weights {','.join(map(str, info['weights']))} "
              f"ideal ({ideal}) - {info['about']}")
    return EXIT_OK


def selftest_checks(names=("R1", "R2", "R3")) -> list[tuple[str, bool]]:
    """Fast fixture-wide sanity checks used by the ``selftest`` subcommand."""
    from .homology import lambda_ring_map, rho_sequence
    from .fpmodule import hilbert_equal, is_iso
    out = []
    for name in names:
        ctx = fixture(name)
        R = ring_module(ctx)
        out.append((f"{name}: lambda_R is an isomorphism", is_iso(lambda_ring_map(R))))
        for label, M in corpus(ctx):
            res = free_resolution(M, 2)
            out.append((f"{name}/{label}: resolution exact", all(res.verify(2).values())))
            out.append((f"{name}/{label}: Ext^0 matches Hom",
                        hilbert_equal(minimal(ext(M, R, 0).module), minimal(hom(M, R).module))))
            out.append((f"{name}/{label}: rho sequence exact", rho_sequence(M)["exact"]))
    return out


def cmd_selftest(args) -> int:
    checks = selftest_checks()
    bad = 0
    for label, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'} {label}")
        bad += not ok
    print(f"{len(checks) - bad}/{len(checks)} checks passed")
    return EXIT_OK if not bad else EXIT_ALARM


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="homapprox", description="Graded module approximations over F_p.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="execute a script")
    run.add_argument("script")
    run.add_argument("--hilbert-window", type=int, default=DEFAULT_WINDOW)
    run.add_argument("--cdim-bound", type=int, default=None)
    run.add_argument("--iso-trials", type=int, default=64)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--report", default=None, help="write the structured report here")
    run.add_argument("--jobs", type=int, default=1, help="parallel workers for corpus runs")
    run.set_defaults(func=cmd_run)
    ver = sub.add_parser("verify", help="re-check a certificate or every certificate in a report")
    ver.add_argument("certificate")
    ver.add_argument("--ring", default=None, help="script whose ring declaration must match")
    ver.add_argument("--replay", action="store_true", help="also rerun report inputs and compare payloads")
    ver.set_defaults(func=cmd_verify)
    fx = sub.add_parser("fixtures", help="fixture rings")
    fx.add_argument("action", choices=["list"])
    fx.set_defaults(func=cmd_fixtures)
    st = sub.add_parser("selftest", help="run the fixture sanity checks")
    st.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
