"""Command-line entry point: `locate`, `bench` and `cfg`."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .. import cfg as cfgmod
from .. import corpus
from ..errors import (FrontendError, IncompleteCounterexample, NotACounterexample,
                      ResourceLimit, UnfoldBudgetExceeded, UnsupportedExpr)
from ..frontend import load
from ..solver import Limits
from .pipeline import RunConfig, parse_ce, run
from .report import render_json, render_text

EXIT_OK, EXIT_INPUT, EXIT_NO_CE, EXIT_LIMIT = 0, 1, 2, 3


def _domain(text):
    lo, _, hi = text.partition(",")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("expected LO,HI") from None


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="locfaults",
                                 description="Locate faults in a program from a failing input.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    loc = sub.add_parser("locate", help="localize the fault behind one counterexample")
    loc.add_argument("file", type=Path)
    loc.add_argument("--b", type=int, default=None,
                     help="loop unfolding bound (default: the sidecar's b, else 1)")
    loc.add_argument("--bmcd", type=int, default=3, help="max deviated conditions")
    loc.add_argument("--bmcs", type=int, default=4, help="max MCS cardinality")
    loc.add_argument("--no-marking", action="store_true")
    loc.add_argument("--ce", help='counterexample as JSON, e.g. \'{"i":0,"j":1}\'')
    loc.add_argument("--json", action="store_true", help="machine-readable output")
    loc.add_argument("--domain", type=_domain, default="-100,100",
                     help="input range for counterexample search, LO,HI")
    loc.add_argument("--timeout", type=float, default=Limits.seconds,
                     help="seconds per solver call")
    loc.add_argument("--max-nodes", type=int, default=Limits.nodes,
                     help="search nodes per solver call")

    be = sub.add_parser("bench", help="run every program of a suite over its bound schedule")
    be.add_argument("dir", type=Path, nargs="?", default=corpus.CORPUS_DIR)
    be.add_argument("--max-b", type=int, default=None)
    be.add_argument("--csv", type=Path, default=None, help="write CSV here instead of stdout")
    be.add_argument("--plot", type=Path, default=None, help="directory for scaling PNGs")
    be.add_argument("--timeout", type=float, default=Limits.seconds)

    cf = sub.add_parser("cfg", help="dump the unfolded DSA graph")
    cf.add_argument("file", type=Path)
    cf.add_argument("--b", type=int, default=1)
    cf.add_argument("--dot", action="store_true", help="Graphviz output")
    return ap


def _sidecar_b(path: Path):
    side = path.with_suffix(".json")
    if side.exists():
        return corpus.load_entry(path).b
    return None


def cmd_locate(args) -> int:
    b = args.b if args.b is not None else (_sidecar_b(args.file) or 1)
    try:
        ce = parse_ce(args.ce) if args.ce else None
        rc = RunConfig(args.file, b=b, b_mcd=args.bmcd, b_mcs=args.bmcs,
                       marking=not args.no_marking, ce=ce, domain=args.domain,
                       output="json" if args.json else "text",
                       limits=Limits(nodes=args.max_nodes, seconds=args.timeout))
        rep = run(rc)
    except (FrontendError, IncompleteCounterexample, UnfoldBudgetExceeded,
            UnsupportedExpr, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except NotACounterexample as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_CE
    except ResourceLimit as e:
        print(f"error: resource limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    sys.stdout.write(render_json(rep) if rc.output == "json" else render_text(rep))
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import bench, write_csv

    if not args.dir.is_dir():
        print(f"error: {args.dir} is not a directory", file=sys.stderr)
        return EXIT_INPUT
    rows = bench(args.dir, args.max_b, Limits(seconds=args.timeout))
    text = write_csv(rows, args.csv)
    if args.csv is None:
        sys.stdout.write(text)
    if args.plot is not None:
        from .plotting import scaling_figures
        for p in scaling_figures(rows, args.plot):
            print(f"wrote {p}", file=sys.stderr)
    return EXIT_OK


def cmd_cfg(args) -> int:
    try:
        g = cfgmod.prepare(load(args.file.read_text()), args.b)
    except (FrontendError, UnfoldBudgetExceeded, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.dot:
        sys.stdout.write(cfgmod.to_dot(g))
    else:
        for nid in g.topo_order():
            print(nid, g.nodes[nid])
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return {"locate": cmd_locate, "bench": cmd_bench, "cfg": cmd_cfg}[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
