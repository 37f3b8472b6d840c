"""Text and JSON renderings of a LocalizationReport."""

from __future__ import annotations

import json

SCHEMA = 1


def _mcss(mcss) -> str:
    return ",".join(str(m) for m in mcss) if mcss else "-"


def _ce(ce: dict) -> str:
    return "{" + ", ".join(f"{k}={v}" for k, v in ce.items()) + "}"


def render_text(rep) -> str:
    lines = [
        f"program {rep.program}  b={rep.b}  b_mcd={rep.b_mcd}  b_mcs={rep.b_mcs}  "
        f"marking={'on' if rep.marking else 'off'}",
        f"counterexample {_ce(rep.ce)}",
    ]
    note = f"  ({rep.ce_path_note})" if rep.ce_path_note else ""
    lines.append(f"MCD {{}} : {_mcss(rep.ce_path_mcss)}{note}")
    for m in rep.mcds:
        note = f"  ({m.note})" if m.note else ""
        lines.append(f"MCD {m.deviation} : {_mcss(m.mcss)}{note}")
    for p in rep.pruned:
        detail = f" {p.detail}" if p.detail else ""
        lines.append(f"pruned {p.deviation} step {p.step}: {p.reason}{detail}")
    lines.append(f"explored {rep.explored}  paths {rep.paths}")
    lines.append(f"P {rep.pretreatment:.3f}s  L {rep.localization:.3f}s")
    return "\n".join(lines) + "\n"


def _coords(x):
    return list(x.coords)


def to_dict(rep) -> dict:
    return {
        "schema": SCHEMA,
        "program": rep.program,
        "ce": rep.ce,
        "b": rep.b,
        "b_mcd": rep.b_mcd,
        "b_mcs": rep.b_mcs,
        "marking": rep.marking,
        "ce_path": {"mcss": [_coords(m) for m in rep.ce_path_mcss], "note": rep.ce_path_note},
        "mcds": [{"deviation": _coords(m.deviation), "mcss": [_coords(x) for x in m.mcss],
                  "note": m.note} for m in rep.mcds],
        "pruned": [{"deviation": _coords(p.deviation), "reason": p.reason, "detail": p.detail,
                    "step": p.step} for p in rep.pruned],
        "explored": rep.explored,
        "paths": rep.paths,
        "timing": {"pretreatment": rep.pretreatment, "localization": rep.localization},
        "solver": {"calls": rep.solver.calls, "nodes": rep.solver.nodes,
                   "seconds": rep.solver.seconds},
    }


def render_json(rep) -> str:
    return json.dumps(to_dict(rep), indent=2) + "\n"
