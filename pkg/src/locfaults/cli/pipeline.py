"""Source file to localization report: the steps shared by `locate` and `bench`."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .. import bmc, cfg, engine
from ..errors import IncompleteCounterexample, NotACounterexample
from ..frontend import ArrayType, load, requires_holds
from ..solver import Limits


@dataclass
class RunConfig:
    source: Path
    b: int = 1
    b_mcd: int = 3
    b_mcs: int = 4
    marking: bool = True
    ce: Optional[dict] = None
    domain: tuple = bmc.INPUT_DOMAIN
    output: str = "text"
    limits: Limits = field(default_factory=Limits)

    def __post_init__(self):
        for name in ("b", "b_mcs"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.b_mcd < 0:
            raise ValueError(f"b_mcd must be non-negative, got {self.b_mcd}")
        lo, hi = self.domain
        if lo > hi:
            raise ValueError(f"empty input domain [{lo}, {hi}]")


def check_counterexample(tp, ce: dict) -> dict:
    """Bindings for every parameter with the declared shapes, or IncompleteCounterexample."""
    out = {}
    for name, ty in tp.program.params:
        if name not in ce:
            raise IncompleteCounterexample(f"counterexample does not bind input '{name}'")
        v = ce[name]
        if isinstance(ty, ArrayType):
            if not isinstance(v, list) or len(v) != ty.length or not all(_is_int(x) for x in v):
                raise IncompleteCounterexample(f"'{name}' must be a list of {ty.length} integers")
        elif ty == "bool":
            if not isinstance(v, bool):
                raise IncompleteCounterexample(f"'{name}' must be a boolean")
        elif not _is_int(v):
            raise IncompleteCounterexample(f"'{name}' must be an integer")
        out[name] = v
    extra = set(ce) - set(out)
    if extra:
        raise IncompleteCounterexample(f"unknown inputs: {', '.join(sorted(extra))}")
    return out


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def parse_ce(text: str) -> dict:
    try:
        ce = json.loads(text)
    except json.JSONDecodeError as e:
        raise IncompleteCounterexample(f"--ce is not valid JSON: {e}") from None
    if not isinstance(ce, dict):
        raise IncompleteCounterexample("--ce must be a JSON object")
    return ce


def run(rc: RunConfig, source_text: Optional[str] = None, program: str = ""):
    """Parse, unfold, find or check the counterexample, then localize.

    The time spent before localization is reported as pretreatment.
    """
    t0 = time.monotonic()
    text = source_text if source_text is not None else Path(rc.source).read_text()
    tp = load(text)
    g = cfg.prepare(tp, rc.b)
    if rc.ce is None:
        found = bmc.find_counterexample(g, rc.domain, rc.limits)
        if found is None:
            raise NotACounterexample("no counterexample found")
        ce = found.bindings
    else:
        ce = check_counterexample(tp, rc.ce)
        if not requires_holds(tp, ce):
            raise NotACounterexample("the input violates the precondition")
    pre = time.monotonic() - t0
    rep = engine.locate(g, ce, b_mcd=rc.b_mcd, b_mcs=rc.b_mcs, marking=rc.marking,
                        limits=rc.limits, program=program or tp.name)
    rep.pretreatment = pre
    return rep
