"""Scenario reports: claims, witnesses, re-verification and rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

from .field import Embedding, make_field
from .groups import CapExceeded, MatrixGroup
from .invariants import BudgetExceeded, graded_character_values, quotient_vanishes, twisted_transfer
from .poly import Character, Polynomial, format_polynomial, parse_polynomial

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
EXIT_CODES = {PASS: 0, FAIL: 2, INCONCLUSIVE: 3}
EXIT_USAGE = 64


@dataclass
class Outcome:
    ok: bool | None  # None = inconclusive
    observed: dict = field(default_factory=dict)
    witnesses: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class ClaimResult:
    id: str
    operation: str
    expected: str
    status: str
    observed: dict
    witnesses: list[dict]
    notes: list[str]
    seconds: float = 0.0
    recheck: str | None = None

    def to_json(self) -> dict:
        out = {
            "id": self.id,
            "operation": self.operation,
            "expected": self.expected,
            "status": self.status,
            "observed": self.observed,
            "witnesses": self.witnesses,
            "notes": self.notes,
        }
        if self.recheck is not None:
            out["recheck"] = self.recheck
        return out


def combine(statuses) -> str:
    statuses = list(statuses)
    if FAIL in statuses:
        return FAIL
    if INCONCLUSIVE in statuses:
        return INCONCLUSIVE
    return PASS


@dataclass
class ScenarioReport:
    scenario: str
    locator: str
    anchor: str
    params: dict
    seed: int
    claims: list[ClaimResult]
    fields: list[dict]
    version: str
    errors: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def status(self) -> str:
        extra = [INCONCLUSIVE] if self.errors else []
        return combine([c.status for c in self.claims] + extra)

    def to_json(self, timings: bool = False) -> dict:
        out = {
            "tool": "mil",
            "version": self.version,
            "scenario": self.scenario,
            "locator": self.locator,
            "anchor": self.anchor,
            "params": self.params,
            "seed": self.seed,
            "status": self.status,
            "fields": self.fields,
            "claims": [c.to_json() for c in self.claims],
            "errors": self.errors,
        }
        if timings:
            out["timings"] = {"total": round(self.seconds, 3), "claims": {c.id: round(c.seconds, 3) for c in self.claims}}
        return out


# --------------------------------------------------------------------------
# witnesses


def group_json(G: MatrixGroup) -> dict:
    return G.to_json()


def dsp_witness(G: MatrixGroup, theta: Polynomial, witness: Polynomial) -> dict:
    return {"kind": "dsp", "group": group_json(G), "theta": format_polynomial(theta), "witness": format_polynomial(witness)}


def hsop_witness(G: MatrixGroup, fs: list[Polynomial]) -> dict:
    return {"kind": "hsop", "group": group_json(G), "field": fs[0].field.spec(), "polynomials": [format_polynomial(f) for f in fs]}


def invariants_witness(G: MatrixGroup, fs: list[Polynomial]) -> dict:
    return {"kind": "invariants", "group": group_json(G), "polynomials": [format_polynomial(f) for f in fs]}


def contraction_witness(G: MatrixGroup, gens: list[Polynomial], witness: Polynomial) -> dict:
    return {
        "kind": "contraction",
        "group": group_json(G),
        "generators": [format_polynomial(f) for f in gens],
        "witness": format_polynomial(witness),
    }


def _invariant(G: MatrixGroup, f: Polynomial) -> bool:
    from .poly import act

    return all(act(g, f) == f for g in G.generators)


def recheck_witness(w: dict) -> bool:
    """Rebuild the group from the report and re-verify one witness through the library."""
    G = MatrixGroup.from_json(w["group"])
    F, n = G.field, G.n
    kind = w["kind"]
    if kind == "dsp":
        theta = parse_polynomial(F, n, w["theta"])
        wit = parse_polynomial(F, n, w["witness"])
        vals = graded_character_values(G, theta)
        if vals is None:
            return False
        return twisted_transfer(G, Character(G, vals), wit) == theta
    if kind == "invariants":
        return all(_invariant(G, parse_polynomial(F, n, s)) for s in w["polynomials"])
    if kind == "hsop":
        K = make_field(w["field"]["p"], w["field"]["r"])
        if K is not F:
            from .decide import _extend_group

            G = _extend_group(G, K, Embedding(F, K))
        fs = [parse_polynomial(K, n, s) for s in w["polynomials"]]
        if not all(f.is_homogeneous() and _invariant(G, f) for f in fs):
            return False
        prod = 1
        for f in fs:
            prod *= f.degree
        return prod == G.order and quotient_vanishes(K, n, fs, sum(f.degree - 1 for f in fs) + 1)
    if kind == "contraction":
        from .invariants import ideal_graded_piece_vectors, invariant_ideal_piece
        from .linalg import Subspace

        gens = [parse_polynomial(F, n, s) for s in w["generators"]]
        h = parse_polynomial(F, n, w["witness"])
        d = h.degree
        in_JA = Subspace(F, _count(n, d), ideal_graded_piece_vectors(F, n, gens, d)).contains(h.to_vector(d))
        in_J = Subspace(F, _count(n, d), invariant_ideal_piece(G, gens, d)).contains(h.to_vector(d))
        return _invariant(G, h) and in_JA and not in_J
    raise ValueError(f"unknown witness kind {kind!r}")


def _count(n: int, d: int) -> int:
    from .poly import count

    return count(n, d)


def recheck_report(report: ScenarioReport) -> None:
    """Round-trip the report through JSON and re-verify every witness; failures fail the claim."""
    data = json.loads(json.dumps(report.to_json()))
    for claim, cj in zip(report.claims, data["claims"]):
        if not cj["witnesses"]:
            continue
        try:
            ok = all(recheck_witness(w) for w in cj["witnesses"])
        except (BudgetExceeded, CapExceeded) as exc:
            claim.recheck = INCONCLUSIVE
            claim.notes.append(f"recheck: {exc}")
            continue
        claim.recheck = PASS if ok else FAIL
        if not ok:
            claim.status = FAIL
            claim.notes.append("recheck: witness did not re-verify")


# --------------------------------------------------------------------------
# rendering


def schema() -> dict:
    return json.loads(resources.files("mil").joinpath("schema/report.schema.json").read_text())


def validate(doc: dict) -> None:
    import jsonschema

    jsonschema.validate(doc, schema())


def render_json(reports: list[ScenarioReport], version: str, timings: bool = False) -> str:
    if len(reports) == 1:
        doc: Any = reports[0].to_json(timings)
    else:
        doc = {
            "tool": "mil",
            "version": version,
            "scenario": "all",
            "status": combine(r.status for r in reports),
            "reports": [r.to_json(timings) for r in reports],
        }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _short(v: Any, width: int = 90) -> str:
    s = json.dumps(v, sort_keys=True) if not isinstance(v, str) else v
    return s if len(s) <= width else s[: width - 3] + "..."


def render_text(reports: list[ScenarioReport], timings: bool = True) -> str:
    lines = []
    for r in reports:
        head = f"== {r.scenario} [{r.status.upper()}]  {r.locator}"
        if timings:
            head += f"  ({r.seconds:.2f}s)"
        lines.append(head)
        lines.append(f"   params: {_short(r.params)}  seed: {r.seed}")
        for c in r.claims:
            extra = f" recheck={c.recheck}" if c.recheck else ""
            lines.append(f"   {c.status.upper():<12} {c.id}: {c.expected}{extra}")
            if c.status != PASS or c.observed:
                for k, v in c.observed.items():
                    lines.append(f"{'':17}{k} = {_short(v)}")
            for note in c.notes:
                lines.append(f"{'':17}note: {note}")
        for e in r.errors:
            lines.append(f"   ERROR {e}")
    if len(reports) > 1:
        lines.append(f"overall: {combine(r.status for r in reports).upper()}")
    return "\n".join(lines) + "\n"


def run_claim(cid: str, operation: str, expected: str, fn: Callable[[], Outcome]) -> ClaimResult:
    import time

    from .decide import VerdictRefused

    t = time.perf_counter()
    try:
        out = fn()
        status = {True: PASS, False: FAIL, None: INCONCLUSIVE}[out.ok]
        res = ClaimResult(cid, operation, expected, status, out.observed, out.witnesses, list(out.notes))
    except (BudgetExceeded, CapExceeded, VerdictRefused) as exc:
        res = ClaimResult(cid, operation, expected, INCONCLUSIVE, {}, [], [f"{type(exc).__name__}: {exc}"])
    except (AssertionError, ValueError, ArithmeticError) as exc:
        res = ClaimResult(cid, operation, expected, FAIL, {}, [], [f"{type(exc).__name__}: {exc}"])
    res.seconds = time.perf_counter() - t
    return res
