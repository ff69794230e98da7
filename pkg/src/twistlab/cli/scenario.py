"""Scenario files and the step runner.

A scenario file is line based, ``#`` starts a comment::

    scenario heisenberg-small
    param p=5
    step heisenberg.build p=$p
    expect order = 125
    expect center_order = 5
    step twist.axioms which=x
    expect cocycle = "pass"

``expect`` values are JSON; keys may be dotted paths into nested values.
Step arguments are ``key=value`` with JSON values (bare words are strings)
and ``$name`` referring to a parameter.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

from ..algebra import TripleTensorCap
from ..groups import CapExceeded, ClosureTooLarge
from ..specfile import SpecError
from ..twists import InternalConsistencyError
from .report import Report, Step, plain
from .steps import BUILTINS, OPS, StepError


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<scenario>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass
class StepSpec:
    op: str
    args: dict = field(default_factory=dict)
    expect: dict = field(default_factory=dict)
    line: int | None = None


@dataclass
class Scenario:
    name: str
    params: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)


def _value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_scenario(text: str, *, source: str = "<scenario>") -> Scenario:
    sc = Scenario(name="")
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "scenario":
            if not rest:
                raise ScenarioError("scenario needs a name", no, source)
            sc.name = rest
        elif word == "param":
            k, eq, v = rest.partition("=")
            if not eq or not k.strip():
                raise ScenarioError(f"expected param key=value, got {rest!r}", no, source)
            sc.params[k.strip()] = _value(v.strip())
        elif word == "step":
            toks = rest.split()
            if not toks:
                raise ScenarioError("step needs an operation name", no, source)
            if toks[0] not in OPS:
                raise ScenarioError(f"unknown operation {toks[0]!r}", no, source)
            args = {}
            for t in toks[1:]:
                k, eq, v = t.partition("=")
                if not eq:
                    raise ScenarioError(f"expected key=value, got {t!r}", no, source)
                args[k] = _value(v)
            sc.steps.append(StepSpec(toks[0], args, {}, no))
        elif word == "expect":
            if not sc.steps:
                raise ScenarioError("expect before any step", no, source)
            k, eq, v = rest.partition("=")
            if not eq or not k.strip():
                raise ScenarioError(f"expected 'expect key = value', got {rest!r}", no, source)
            try:
                sc.steps[-1].expect[k.strip()] = json.loads(v.strip())
            except json.JSONDecodeError as exc:
                raise ScenarioError(f"expectation is not JSON: {exc.msg}", no, source) from None
        else:
            raise ScenarioError(f"unknown directive {word!r}", no, source)
    if not sc.name:
        raise ScenarioError("missing 'scenario <name>' line", None, source)
    if not sc.steps:
        raise ScenarioError("scenario has no steps", None, source)
    return sc


def builtin_scenario(name: str, params: dict) -> Scenario:
    if name not in BUILTINS:
        raise ScenarioError(f"no builtin scenario or file named {name!r} (builtins: {', '.join(sorted(BUILTINS))})")
    try:
        p, steps = BUILTINS[name](params)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"bad parameter for {name}: {exc}") from None
    return Scenario(name, p, [StepSpec(op, args, exp) for op, args, exp in steps])


def apply_params(sc: Scenario, overrides: dict) -> Scenario:
    """Replace declared parameters; values must keep the declared type."""
    params = dict(sc.params)
    for k, v in overrides.items():
        if k not in params:
            raise ScenarioError(f"scenario {sc.name!r} has no parameter {k!r}")
        want = type(params[k])
        if want is int:
            try:
                v = int(v)
            except (TypeError, ValueError):
                raise ScenarioError(f"parameter {k} must be an integer, got {v!r}") from None
        elif want is not str:
            v = _value(str(v))
            if type(v) is not want:
                raise ScenarioError(f"parameter {k} must be {want.__name__}, got {v!r}")
        params[k] = v
    steps = []
    for st in sc.steps:
        args = {}
        for k, v in st.args.items():
            if isinstance(v, str) and v.startswith("$"):
                if v[1:] not in params:
                    raise ScenarioError(f"unknown parameter {v}", st.line)
                v = params[v[1:]]
            args[k] = v
        steps.append(StepSpec(st.op, args, st.expect, st.line))
    return Scenario(sc.name, params, steps)


def lookup(values: dict, key: str):
    cur = values
    for part in key.split("."):
        if not isinstance(cur, dict) or part not in cur:
            return KeyError
        cur = cur[part]
    return cur


# exception class -> exit code; anything else propagates as a crash
HARD_ERRORS = (
    (InternalConsistencyError, 2),
    ((CapExceeded, ClosureTooLarge, TripleTensorCap), 3),
    ((StepError, SpecError, ValueError, ArithmeticError), 3),
)


def run_scenario(sc: Scenario, cfg, *, timings: bool = False) -> Report:
    rep = Report(sc.name, cfg.snapshot(), params=dict(sc.params), timings={} if timings else None)
    ctx: dict = {}
    code = 0
    for i, st in enumerate(sc.steps, start=1):
        step = Step(st.op, dict(st.args))
        rep.steps.append(step)
        if code >= 2:
            step.status = "skipped"
            continue
        t0 = time.perf_counter()
        try:
            step.values = plain(OPS[st.op](ctx, cfg, **st.args))
        except TypeError as exc:
            step.status, step.error = "error", f"bad arguments: {exc}"
            code = 3
            continue
        except Exception as exc:  # classified below
            for cls, c in HARD_ERRORS:
                if isinstance(exc, cls):
                    step.status, step.error = "error", f"{type(exc).__name__}: {exc}"
                    code = c
                    break
            else:
                raise
            continue
        finally:
            if timings:
                rep.timings[f"{i:02d} {st.op}"] = round(time.perf_counter() - t0, 3)
        ok_all = True
        for key, want in st.expect.items():
            got = lookup(step.values, key)
            ok = got is not KeyError and got == want
            step.expectations.append({"key": key, "expected": want,
                                      "actual": None if got is KeyError else got, "ok": ok})
            ok_all &= ok
        step.status = ("pass" if ok_all else "fail") if st.expect else "unchecked"
        if not ok_all:
            code = max(code, 1)
    rep.exit_code = code
    return rep
