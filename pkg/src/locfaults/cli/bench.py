"""Batch runs over a suite directory, one CSV row per (program, bound)."""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .. import corpus
from ..errors import LocFaultsError
from ..solver import Limits
from .pipeline import RunConfig, run

log = logging.getLogger(__name__)

MAX_BUDGET = 3
COLUMNS = ["program", "b", "P", "L0", "L1", "L2", "L3", "paths", "explored", "mcds", "error"]


@dataclass
class Row:
    program: str
    b: int
    P: Optional[float] = None
    L: tuple = ()          # cumulative localization seconds after budget 0, 1, ...
    paths: Optional[int] = None
    explored: Optional[int] = None
    mcds: Optional[int] = None
    error: str = ""

    def as_csv(self) -> list:
        times = [f"{t:.4f}" for t in self.L] + [""] * (MAX_BUDGET + 1 - len(self.L))
        opt = lambda v: "" if v is None else v
        return [self.program, self.b, "" if self.P is None else f"{self.P:.4f}", *times,
                opt(self.paths), opt(self.explored), opt(self.mcds), self.error]


def bench_entry(e: corpus.Entry, b: int, b_mcs: int = 4, limits: Optional[Limits] = None) -> Row:
    row = Row(e.name, b)
    try:
        text, ce = e.instantiate(b)
        rc = RunConfig(e.path, b=b, b_mcd=min(MAX_BUDGET, e.bmcd or MAX_BUDGET),
                       b_mcs=e.bmcs or b_mcs, ce=ce, limits=limits or Limits())
        rep = run(rc, source_text=text, program=e.name)
    except (LocFaultsError, RecursionError) as err:
        row.error = f"{type(err).__name__}: {err}"
        log.warning("%s b=%d failed: %s", e.name, b, row.error)
        return row
    row.P = rep.pretreatment
    row.L = tuple(rep.step_seconds)
    row.paths, row.explored, row.mcds = rep.paths, rep.explored, len(rep.mcds)
    return row


def bench(suite, max_b: Optional[int] = None, limits: Optional[Limits] = None) -> list:
    rows = []
    for e in corpus.entries(suite):
        bounds = e.schedule or [e.b]
        for b in bounds:
            if max_b is not None and b > max_b:
                continue
            log.info("%s b=%d", e.name, b)
            rows.append(bench_entry(e, b, limits=limits))
    return rows


def write_csv(rows, out=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.as_csv())
    text = buf.getvalue()
    if out is not None:
        Path(out).write_text(text)
    return text
