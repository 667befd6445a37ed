"""Canonical serialization of rings, modules, maps, certificates and reports.

Everything is written as JSON with sorted keys, so equal payloads are equal
byte strings.  Matrices are row-major lists of polynomial strings: a module's
presentation has one row per generator and one column per relation; a map
has one row per target generator and one column per source generator.
"""
from __future__ import annotations

import hashlib
import json

from . import __version__
from .approximation import (ApproximationCertificate, FiltrationStep, LadderSquare,
                            verify_approximation)
from .fpmodule import FPModule, ModuleMap, ShortExactSequence
from .groebner import RingContext
from .kernel import PolynomialRing

FORMAT = "homapprox-certificate/1"


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def content_hash(obj) -> str:
    data = json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return "sha256:" + hashlib.sha256(data.encode()).hexdigest()


# ------------------------------------------------------------------ rings

def encode_ring(ctx: RingContext) -> dict:
    return ctx.describe()


def decode_ring(d: dict) -> RingContext:
    S = PolynomialRing(d["variables"], weights=d["weights"], p=d["char"], order=d.get("order", "grevlex"))
    return RingContext(S, [S(f) for f in d["ideal"]], name=d.get("name", "R"))


# --------------------------------------------------------------- matrices

def _vectors_to_rows(ctx: RingContext, vectors, nrows: int) -> list[list[str]]:
    ncols = len(vectors)
    cells = [[{} for _ in range(ncols)] for _ in range(nrows)]
    for j, v in enumerate(vectors):
        for (i, m), c in v.items():
            cells[i][j][m] = c
    fmt = ctx.S.format
    return [[fmt(cell) for cell in row] for row in cells]


def _rows_to_vectors(ctx: RingContext, rows, ncols: int) -> list[dict]:
    S = ctx.S
    vecs = [dict() for _ in range(ncols)]
    for i, row in enumerate(rows):
        if len(row) != ncols:
            raise ValueError(f"row {i} has {len(row)} entries, expected {ncols}")
        for j, text in enumerate(row):
            for m, c in S(text).as_dict().items():
                vecs[j][(i, m)] = c
    return vecs


def encode_module(M: FPModule) -> dict:
    return {"degrees": list(M.degrees),
            "relations": _vectors_to_rows(M.ctx, M.relations, M.ngens),
            "nrel": len(M.relations)}


def decode_module(ctx: RingContext, d: dict) -> FPModule:
    rels = _rows_to_vectors(ctx, d["relations"], d["nrel"]) if d["degrees"] else []
    return FPModule(ctx, d["degrees"], rels)


def encode_map(f: ModuleMap, table: "ModuleTable") -> dict:
    return {"source": table.ref(f.source), "target": table.ref(f.target), "shift": f.shift,
            "matrix": _vectors_to_rows(f.ctx, f.columns, f.target.ngens)}


def decode_map(ctx: RingContext, d: dict, table: "ModuleTable") -> ModuleMap:
    src = table.get(d["source"])
    tgt = table.get(d["target"])
    cols = _rows_to_vectors(ctx, d["matrix"], src.ngens) if tgt.ngens else [{} for _ in range(src.ngens)]
    return ModuleMap(src, tgt, cols, d["shift"])


class ModuleTable:
    """Assigns stable ids to modules in order of first use."""

    def __init__(self, ctx: RingContext):
        self.ctx = ctx
        self.ids: dict = {}
        self.mods: list = []
        self.decoded: dict = {}

    def ref(self, M: FPModule) -> str:
        key = M.uid
        if key not in self.ids:
            self.ids[key] = f"m{len(self.mods)}"
            self.mods.append(M)
        return self.ids[key]

    def dump(self) -> dict:
        return {self.ids[M.uid]: encode_module(M) for M in self.mods}

    @classmethod
    def load(cls, ctx: RingContext, d: dict) -> "ModuleTable":
        t = cls(ctx)
        for key in sorted(d, key=lambda s: int(s[1:])):
            M = decode_module(ctx, d[key])
            M.name = key
            t.decoded[key] = M
        return t

    def get(self, key: str) -> FPModule:
        if key not in self.decoded:
            raise ValueError(f"unknown module reference {key!r}")
        return self.decoded[key]


def _enc_seq(seq: ShortExactSequence, table: ModuleTable) -> dict:
    return {"inclusion": encode_map(seq.i, table), "projection": encode_map(seq.p, table)}


def _dec_seq(ctx, d, table) -> ShortExactSequence:
    return ShortExactSequence(decode_map(ctx, d["inclusion"], table), decode_map(ctx, d["projection"], table))


# ------------------------------------------------------------ certificates

def certificate_to_dict(cert: ApproximationCertificate) -> dict:
    ctx = cert.M.ctx
    table = ModuleTable(ctx)
    body = {
        "M": table.ref(cert.M),
        "C": table.ref(cert.C),
        "n": cert.n,
        "hypotheses": cert.hypotheses,
        "sequence": _enc_seq(cert.sequence, table),
        "first_layer": table.ref(cert.first_Y) if cert.first_Y is not None else None,
        "first_shifts": list(cert.first_shifts),
        "filtration": [{"sequence": _enc_seq(st.sequence, table), "shifts": list(st.shifts)}
                       for st in cert.filtration],
        "ladder": [{"kind": sq.kind, "level": sq.level,
                    "corner": encode_map(sq.corner, table), "side": encode_map(sq.side, table),
                    "rows": [_enc_seq(r, table) for r in sq.rows]} for sq in cert.ladder],
    }
    verdict = cert.verdict or {}
    out = {
        "format": FORMAT,
        "engine": {"name": "homapprox", "version": __version__},
        "ring": encode_ring(ctx),
        "modules": table.dump(),
        "certificate": body,
        "verdict": {"accepted": verdict.get("accepted"), "clauses": verdict.get("clauses", {})},
    }
    out["digest"] = _digest(out)
    return out


def _digest(d: dict) -> str:
    return content_hash({k: d.get(k) for k in ("ring", "modules", "certificate", "verdict")})


def certificate_from_dict(d: dict, ctx: RingContext | None = None) -> ApproximationCertificate:
    if d.get("format") != FORMAT:
        raise ValueError("not a certificate")
    if ctx is None:
        ctx = decode_ring(d["ring"])
    table = ModuleTable.load(ctx, d["modules"])
    b = d["certificate"]
    seq = _dec_seq(ctx, b["sequence"], table)
    filt = [FiltrationStep(_dec_seq(ctx, st["sequence"], table), tuple(st["shifts"]))
            for st in b["filtration"]]
    ladder = [LadderSquare(sq["kind"], sq["level"], decode_map(ctx, sq["corner"], table),
                           decode_map(ctx, sq["side"], table),
                           [_dec_seq(ctx, r, table) for r in sq["rows"]]) for sq in b["ladder"]]
    first = table.get(b["first_layer"]) if b["first_layer"] is not None else None
    cert = ApproximationCertificate(table.get(b["M"]), table.get(b["C"]), b["n"], seq, filt, ladder,
                                    hypotheses=b["hypotheses"], first_Y=first,
                                    first_shifts=tuple(b["first_shifts"]))
    cert.recorded = d.get("verdict", {})
    return cert


def replay_certificate(d: dict) -> dict:
    """Re-check a serialized certificate from scratch; names every failing clause.

    The mathematical clauses are recomputed from the embedded matrices; the
    digest clause additionally flags edits that happen to leave a valid
    certificate of something else.
    """
    digest_ok = d.get("digest") == _digest(d)
    try:
        cert = certificate_from_dict(d)
    except Exception as exc:  # malformed data is a rejection, not a crash
        clauses = {"certificate.well_formed": False, "integrity.digest": digest_ok}
        return {"accepted": False, "clauses": clauses,
                "failing": sorted(k for k, ok in clauses.items() if not ok), "error": str(exc)}
    v = verify_approximation(cert.sequence, cert.C, cert.n, filtration=cert, check_theorem=True)
    clauses = dict(v["clauses"])
    clauses["ladder.rows_exact"] = all(r.is_exact() for sq in cert.ladder for r in sq.rows)
    recorded = cert.recorded.get("clauses", {})
    clauses["recorded_verdict.matches"] = all(clauses.get(k) == val for k, val in recorded.items())
    clauses["integrity.digest"] = digest_ok
    failing = sorted(k for k, ok in clauses.items() if not ok)
    return {"accepted": not failing, "clauses": clauses, "failing": failing, "alarm": v["alarm"]}


# ------------------------------------------------------------------ reports

def make_report(command: str, inputs: dict, payload: dict, seed: int, timing: dict | None = None) -> dict:
    return {
        "command": command,
        "engine": {"name": "homapprox", "version": __version__},
        "seed": seed,
        "inputs": {"content": inputs, "hash": content_hash(inputs)},
        "payload": payload,
        "timing": timing or {},
    }


def payload_bytes(report: dict) -> bytes:
    return canonical_dumps(report["payload"]).encode()
