"""Command line: ``pdens run FILE`` and ``pdens repl``."""
from __future__ import annotations

import argparse
import json
import os
import sys

from .dsl import (DSLSyntaxError, Document, Environment, Query, RunConfig, SemanticError,
                  exit_code, parse, print_document, run, run_query)


def dump(payload: dict, pretty: bool = False) -> str:
    if pretty:
        return json.dumps(payload, sort_keys=True, indent=2)
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def _config(args) -> RunConfig:
    depth = args.depth
    if depth is None:
        depth = int(os.environ.get("PDENS_DEPTH", "12"))
    return RunConfig(depth=depth, refine_bound=args.refine_bound, precision=args.precision)


def cmd_run(args) -> int:
    try:
        with open(args.file) as fh:
            doc = parse(fh.read())
    except (DSLSyntaxError, SemanticError) as e:
        print(dump({"error_kind": type(e).__name__, "message": str(e)}), file=sys.stderr)
        return 2
    results = run(doc, _config(args))
    for r in results:
        print(dump(r.payload, args.pretty))
    return exit_code(results)


def cmd_repl(args) -> int:
    """Statements end with ';'. The first must be 'prime P;'. Each new
    statement is checked against everything entered so far."""
    cfg = _config(args)
    env, prime, items = None, None, []
    buf, failed = "", False
    interactive = sys.stdin.isatty()
    while True:
        try:
            line = input(("pdens> " if not buf else "...> ") if interactive else "")
        except EOFError:
            break
        buf += line + "\n"
        if ";" not in line:
            continue
        stmt, buf = buf, ""
        try:
            if prime is None:
                doc = parse(stmt)
                prime, env = doc.prime, Environment(doc.prime)
            else:
                doc = parse(print_document(Document(prime, tuple(items))) + stmt)
            for item in doc.items[len(items):]:
                items.append(item)
                if isinstance(item, Query):
                    r = run_query(item, env, cfg)
                    failed |= not r.passed
                    print(dump(r.payload, args.pretty))
                else:
                    env.add(item)
        except Exception as e:
            print(dump({"error_kind": type(e).__name__, "message": str(e)}))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pdens", description="Local densities of p-adic sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="pretty", action="store_false",
                         help="one compact JSON object per line (default)")
        fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
        sp.add_argument("--depth", type=int, default=None,
                        help="cross-check truncation depth (default 12, or $PDENS_DEPTH)")
        sp.add_argument("--refine-bound", type=int, default=4,
                        help="group refinements tried by mt-check")
        sp.add_argument("--precision", type=int, default=None,
                        help="p-adic digits used when testing membership")
        sp.set_defaults(pretty=False)

    r = sub.add_parser("run", help="run a .pd document")
    r.add_argument("file")
    common(r)
    r.set_defaults(func=cmd_run)
    rp = sub.add_parser("repl", help="interactive session")
    common(rp)
    rp.set_defaults(func=cmd_repl)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
