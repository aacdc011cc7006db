"""Text and line-delimited structured rendering of results."""
from __future__ import annotations

import json
from typing import Dict, Iterable, List

from .prover import Obligation, ProofObject, UNKNOWN

SCHEMA = 1


def _dumps(rec: Dict) -> str:
    return json.dumps(rec, sort_keys=True, ensure_ascii=False)


def records_to_text(records: Iterable[Dict]) -> str:
    return "\n".join(_dumps(r) for r in records) + "\n"


def header(command: str, **fields) -> Dict:
    rec = {"schema": SCHEMA, "record": "header", "command": command}
    rec.update(fields)
    return rec


def proof_records(po: ProofObject, source: str = "") -> List[Dict]:
    out = [header("analyze", source=source, conclusion=po.conclusion, theorem=po.theorem,
                  confidence=po.confidence, query=po.query, notes=list(po.notes))]

    def visit(o: Obligation, path: str, parent: str):
        out.append({"schema": SCHEMA, "record": "obligation", "path": path, "parent": parent,
                    "kind": o.kind, "subject": o.subject, "method": o.method, "outcome": o.outcome,
                    "witness": o.witness, "detail": o.detail})
        for i, c in enumerate(o.children, 1):
            visit(c, f"{path}.{i}", path)

    for i, o in enumerate(po.obligations, 1):
        visit(o, str(i), "")
    return out


def render_structured(po: ProofObject, source: str = "") -> str:
    return records_to_text(proof_records(po, source))


def parse_structured(text: str) -> ProofObject:
    """Inverse of ``render_structured``."""
    recs = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not recs or recs[0].get("record") != "header":
        raise ValueError("missing header record")
    head = recs[0]
    if head.get("schema") != SCHEMA:
        raise ValueError(f"unsupported schema {head.get('schema')}")
    nodes: Dict[str, Obligation] = {}
    roots: List[Obligation] = []
    for r in recs[1:]:
        if r.get("record") != "obligation":
            continue
        o = Obligation(r["kind"], r["subject"], r["method"], r["outcome"], r.get("witness"), r.get("detail", ""))
        nodes[r["path"]] = o
        if r["parent"]:
            nodes[r["parent"]].children.append(o)
        else:
            roots.append(o)
    return ProofObject(head["conclusion"], head["theorem"], roots, head["confidence"],
                       head.get("query", ""), list(head.get("notes", [])))


def render_text(po: ProofObject) -> str:
    lines = [f"conclusion: {po.conclusion} [{po.confidence}]",
             f"theorem: {po.theorem}"]
    if po.query:
        lines.append(f"query: {po.query}")
    lines.append("obligations:")

    def visit(o: Obligation, indent: int):
        pad = "  " * indent
        lines.append(f"{pad}[{o.outcome}] {o.kind} {o.subject} ({o.method})")
        if o.witness:
            lines.append(f"{pad}    witness: {o.witness}")
        if o.detail:
            lines.append(f"{pad}    {o.detail}")
        for c in o.children:
            visit(c, indent + 1)

    for o in po.obligations:
        visit(o, 1)
    unknown = [o for o in po.walk() if o.outcome == UNKNOWN and not o.children]
    if unknown:
        lines.append("unknown obligations:")
        for o in unknown:
            lines.append(f"  {o.kind} {o.subject} ({o.method}): {o.detail or 'no further information'}")
    for n in po.notes:
        lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


def render_report(po: ProofObject, fmt: str = "text", source: str = "") -> str:
    if fmt == "structured":
        return render_structured(po, source)
    if fmt == "text":
        return render_text(po)
    raise ValueError(f"unknown format {fmt}")
