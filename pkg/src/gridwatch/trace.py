"""Run traces: append-only event records with a canonical serialized form.

A trace is one header, a time-ordered list of records, and one summary.
The JSONL form is canonical (sorted keys, no whitespace), so a sha256 over
it doubles as a determinism check: same config + seed must reproduce the
digest bit for bit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field


def _canon(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class Trace:
    header: dict
    records: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def record(self, kind: str, t: float, **fields) -> None:
        rec = {"kind": kind, "t": t}
        rec.update(fields)
        self.records.append(rec)

    def iter_kind(self, kind: str):
        return (r for r in self.records if r["kind"] == kind)


def to_jsonl(trace: Trace) -> str:
    lines = [_canon({"kind": "header", **trace.header})]
    lines.extend(_canon(r) for r in trace.records)
    lines.append(_canon({"kind": "summary", **trace.summary}))
    return "\n".join(lines) + "\n"


def from_jsonl(text: str) -> Trace:
    header: dict | None = None
    summary: dict = {}
    records: list[dict] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        kind = obj.pop("kind")
        if kind == "header":
            if header is not None:
                raise ValueError("duplicate header line")
            header = obj
        elif kind == "summary":
            summary = obj
        else:
            obj["kind"] = kind
            records.append(obj)
    if header is None:
        raise ValueError("trace has no header line")
    return Trace(header=header, records=records, summary=summary)


def digest(trace: Trace) -> str:
    return hashlib.sha256(to_jsonl(trace).encode()).hexdigest()


def write_file(trace: Trace, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_jsonl(trace))


def read_file(path) -> Trace:
    with open(path) as fh:
        return from_jsonl(fh.read())
