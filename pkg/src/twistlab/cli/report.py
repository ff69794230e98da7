"""Reports: one nested key/value document, rendered as JSON or as text."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

STATUSES = ("pass", "fail", "skipped", "unchecked", "error")


def plain(v):
    """Convert numpy scalars and containers into JSON leaves."""
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return plain(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if v is None or isinstance(v, (int, float, str)):
        return v
    return str(v)


@dataclass
class Step:
    name: str
    args: dict = field(default_factory=dict)
    status: str = "unchecked"
    values: dict = field(default_factory=dict)
    expectations: list = field(default_factory=list)
    error: str | None = None

    def as_dict(self) -> dict:
        d = {"name": self.name, "args": plain(self.args), "status": self.status, "values": plain(self.values)}
        if self.expectations:
            d["expectations"] = plain(self.expectations)
        if self.error:
            d["error"] = self.error
        return d


@dataclass
class Report:
    scenario: str
    config: dict
    steps: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    exit_code: int = 0
    timings: dict | None = None

    @property
    def status(self) -> str:
        return {0: "pass", 1: "fail"}.get(self.exit_code, "error")

    def as_dict(self) -> dict:
        d = {
            "scenario": self.scenario,
            "status": self.status,
            "exit_code": self.exit_code,
            "params": plain(self.params),
            "config": plain(self.config),
            "steps": [s.as_dict() for s in self.steps],
        }
        if self.timings is not None:
            d["timings"] = plain(self.timings)
        return d


def render_machine(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _human_value(v, indent: int, out: list):
    pad = "  " * indent
    if isinstance(v, dict):
        for k in sorted(v):
            x = v[k]
            if isinstance(x, (dict, list)) and x and not _flat_list(x):
                out.append(f"{pad}{k}:")
                _human_value(x, indent + 1, out)
            else:
                out.append(f"{pad}{k}: {_leaf(x)}")
    elif isinstance(v, list):
        for x in v:
            if isinstance(x, (dict, list)) and not _flat_list(x):
                out.append(f"{pad}-")
                _human_value(x, indent + 1, out)
            else:
                out.append(f"{pad}- {_leaf(x)}")


def _flat_list(x) -> bool:
    return isinstance(x, list) and all(not isinstance(y, (dict, list)) for y in x)


def _leaf(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, list):
        return "[" + ", ".join(_leaf(y) for y in x) + "]"
    if isinstance(x, dict):
        return "{}"
    return "-" if x is None else str(x).replace("\n", " | ")


def render_human(doc: dict) -> str:
    out = [f"scenario {doc.get('scenario')}: {str(doc.get('status', '?')).upper()} (exit {doc.get('exit_code')})"]
    if doc.get("params"):
        out.append("params: " + ", ".join(f"{k}={_leaf(v)}" for k, v in sorted(doc["params"].items())))
    out.append("config: " + ", ".join(f"{k}={_leaf(v)}" for k, v in sorted(doc.get("config", {}).items())))
    for i, s in enumerate(doc.get("steps", []), start=1):
        args = " ".join(f"{k}={_leaf(v)}" for k, v in sorted(s.get("args", {}).items()))
        out.append(f"[{s['status']:>9}] {i:2d}. {s['name']}" + (f" ({args})" if args else ""))
        if s.get("error"):
            out.append(f"    error: {s['error']}")
        body: list = []
        _human_value(s.get("values", {}), 2, body)
        out += body
        for e in s.get("expectations", []):
            mark = "ok" if e["ok"] else "MISMATCH"
            out.append(f"    expect {e['key']} = {_leaf(e['expected'])}: {mark}"
                       + ("" if e["ok"] else f" (got {_leaf(e['actual'])})"))
    if doc.get("timings"):
        out.append("timings (s): " + ", ".join(f"{k}={v}" for k, v in sorted(doc["timings"].items())))
    return "\n".join(out) + "\n"


def render(doc: dict, fmt: str) -> str:
    return render_machine(doc) if fmt == "machine" else render_human(doc)
