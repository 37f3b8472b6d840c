"""Minimal correction subsets of an infeasible system.

`mcs_enumerate` follows Liffiton and Sakallah: indicators on soft constraints,
an AtMost bound growing from 1, and a blocking clause per discovered subset.
`mcs_oracle` checks every subset exhaustively and exists for testing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import solver as S
from .cfg import coord_sort_key
from .constraints import Csp
from .errors import FeasibleSystem, HardCoreInfeasible, OracleTooLarge

ORACLE_CAP = 14


@dataclass(frozen=True)
class Mcs:
    constraints: frozenset   # soft constraint ids
    coords: tuple            # rendered coordinates, sorted

    def __len__(self):
        return len(self.constraints)

    def __str__(self):
        return "{" + ",".join(self.coords) + "}"


def make_mcs(csp: Csp, ids) -> Mcs:
    by_id = {c.id: c for c in csp.soft}
    coords = sorted((by_id[i].coord_str for i in ids), key=_key)
    return Mcs(frozenset(ids), tuple(coords))


def _key(text):
    try:
        return (0, coord_sort_key(text))
    except ValueError:
        return (1, text)


def order(mcss):
    """Cardinality first, then natural order of the coordinates."""
    return sorted(mcss, key=lambda m: (len(m), [_key(c) for c in m.coords], sorted(m.constraints)))


def check_preconditions(csp: Csp, limits=None, stats=None):
    if not S.is_sat(csp, enforced=(), limits=limits, stats=stats):
        raise HardCoreInfeasible("hard constraints alone are infeasible")
    if S.is_sat(csp, limits=limits, stats=stats):
        raise FeasibleSystem("the system is feasible; it has no correction subsets")


def mcs_enumerate(csp: Csp, b_mcs: int, limits=None, stats=None, check=True):
    """All MCSs of cardinality at most `b_mcs`, ordered by size."""
    if check:
        check_preconditions(csp, limits, stats)
    found = []
    if b_mcs >= 1:
        # a singleton correction set is always minimal: test each one directly
        ids = [c.id for c in csp.soft]
        for cid in ids:
            if S.is_sat(csp, enforced=[i for i in ids if i != cid], limits=limits, stats=stats):
                found.append(frozenset([cid]))
    system = S.with_indicators(csp, limits, stats)
    ys = system.indicators
    for m in found:
        system.blocking.append(S.Clause([ys[c] for c in m]))
    k = 2
    while k <= b_mcs and S.solve_with_atmost(system, None):
        while True:
            res = S.solve_with_atmost(system, k)
            if not res:
                break
            model = res.model
            retracted = frozenset(cid for cid, y in ys.items() if model[system.solver.names[y]] == 0)
            found.append(retracted)
            system.blocking.append(S.Clause([ys[c] for c in retracted]))
        k += 1
    unique = list(dict.fromkeys(found))
    return order(make_mcs(csp, m) for m in unique)


def mcs_oracle(csp: Csp, b_mcs: int, limits=None):
    """Reference answer by feasibility checks over every soft subset."""
    n = len(csp.soft)
    if n > ORACLE_CAP:
        raise OracleTooLarge(f"{n} soft constraints exceed the oracle cap of {ORACLE_CAP}")
    check_preconditions(csp, limits)
    ids = [c.id for c in csp.soft]
    found = []
    for size in range(1, min(b_mcs, n) + 1):
        for sub in itertools.combinations(ids, size):
            s = frozenset(sub)
            if any(m <= s for m in found):
                continue
            keep = [i for i in ids if i not in s]
            if S.is_sat(csp, enforced=keep, limits=limits):
                found.append(s)
    return order(make_mcs(csp, m) for m in found)


def is_correction(csp: Csp, ids, limits=None) -> bool:
    keep = [c.id for c in csp.soft if c.id not in ids]
    return bool(S.is_sat(csp, enforced=keep, limits=limits))


def is_minimal(csp: Csp, ids, limits=None) -> bool:
    return all(not is_correction(csp, set(ids) - {m}, limits) for m in ids)
