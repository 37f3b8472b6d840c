"""Benchmark programs shipped with the package, each with a JSON sidecar.

Sidecar keys: `ce` (input bindings, or null for a correct program), `b`
(default unfolding bound), `bugs` (injected error lines), `schedule` (bounds
for the benchmark sweep), `bmcs`/`bmcd` (per-program budgets for the sweep),
`resize` (array parameter whose length follows b) and `approximate`.
A `ce` value of "b" binds the bound itself; "descending" builds [b, ..., 1]
and "ascending-min-last" builds [1, ..., b - 1, 0].
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

CORPUS_DIR = Path(__file__).parent


@dataclass
class Entry:
    name: str
    path: Path
    ce: Optional[dict]
    b: int = 1
    bugs: list = field(default_factory=list)
    schedule: list = field(default_factory=list)
    bmcs: Optional[int] = None
    bmcd: Optional[int] = None
    resize: Optional[str] = None
    approximate: bool = False
    ce_source: str = ""

    @property
    def source(self) -> str:
        return self.path.read_text()

    def instantiate(self, b: Optional[int] = None):
        """(source text, counterexample) for unfolding bound b."""
        b = self.b if b is None else b
        text = self.source
        if self.resize:
            text = re.sub(rf"\b{self.resize}: int\[\d+\]", f"{self.resize}: int[{b}]", text, count=1)
        ce = None
        if self.ce is not None:
            ce = {k: _value(v, b) for k, v in self.ce.items()}
        return text, ce


def _value(v, b):
    if v == "b":
        return b
    if v == "descending":
        return list(range(b, 0, -1))
    if v == "ascending-min-last":
        return list(range(1, b)) + [0]
    return v


def load_entry(path) -> Entry:
    path = Path(path)
    side = path.with_suffix(".json")
    meta = json.loads(side.read_text()) if side.exists() else {}
    known = {k: v for k, v in meta.items() if k in Entry.__dataclass_fields__}
    return Entry(name=path.stem, path=path, **{"ce": None, **known})


def entries(directory=CORPUS_DIR) -> list:
    return [load_entry(p) for p in sorted(Path(directory).glob("*.mj"))]


def get(name: str) -> Entry:
    return load_entry(CORPUS_DIR / f"{name}.mj")
