from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, checks, img, levels
from .autfile import AutomatonFormatError, format_automaton, parse_automaton
from .levels import truncate
from .mealy import AutomatonError, minimize, order_up_to
from .words import relators_text


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    d = checks.Config()
    p.add_argument("--max-level", type=int, default=d.max_level, help=f"deepest tree level (6..{checks.MAX_LEVEL_CAP})")
    p.add_argument("--phi-depth", type=int, default=d.phi_depth, help=f"substitution depth (0..{checks.PHI_DEPTH_CAP})")
    p.add_argument("--state-budget", type=int, default=d.state_budget, help="max states of a product automaton")
    p.add_argument("--enum-budget", type=int, default=d.enum_budget, help="max size of an enumerated quotient")
    p.add_argument("--seed", type=int, default=d.seed, help="seed for sampled checks")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="img-branch", description="Exact checks on IMG(z^2+i) and its branching subgroup."
    )
    parser.add_argument("--version", action="version", version=f"img-branch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run registered checks and emit a JSON report")
    v.add_argument("--check", action="append", metavar="ID", help="check id (repeatable; default: all)")
    _add_config_flags(v)
    v.add_argument("--report", type=Path, help="also write the JSON report to this file")
    v.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    v.add_argument("--full", action="store_true", help="include every elementary item in the report")
    v.add_argument("--quiet", action="store_true", help="suppress the per-check lines on stderr")

    sub.add_parser("list", help="list registered checks")

    i = sub.add_parser("import", help="load and validate an automaton file")
    i.add_argument("file", type=Path)
    i.add_argument("--level", type=int, default=5, help="levels 1..N for the truncation summary")
    i.add_argument("--order-bound", type=int, default=64, help="bound for per-state order search")

    r = sub.add_parser("relators", help="print relator words phi^n(R')^2, one per line")
    r.add_argument("--depth", type=int, default=3)

    e = sub.add_parser("export-group", help="print level generators in cycle notation")
    e.add_argument("--group", choices=("G", "K", "K-prime", "St3"), default="K")
    e.add_argument("--level", type=int, default=5)
    return parser


def _cmd_verify(args) -> int:
    config = checks.Config(args.max_level, args.phi_depth, args.state_budget, args.enum_budget, args.seed)
    try:
        report = checks.run(args.check, config, jobs=args.jobs, full=args.full)
    except checks.UnknownCheck as exc:
        print(f"img-branch: unknown check id: {exc.args[0]} (see 'img-branch list')", file=sys.stderr)
        return 2
    except checks.ConfigError as exc:
        print(f"img-branch: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2, ensure_ascii=False) + "\n"
    sys.stdout.write(text)
    if args.report:
        args.report.write_text(text, encoding="utf-8")
    if not args.quiet:
        for c in report["checks"]:
            print(f"{c['status'].upper():5} {c['id']} ({c['checks']} items, {c['seconds']:.2f}s)", file=sys.stderr)
        print(f"verdict: {report['verdict']}", file=sys.stderr)
    return 0 if report["verdict"] == "pass" else 1


def _cmd_import(args) -> int:
    try:
        parsed = parse_automaton(args.file.read_text(encoding="utf-8"))
    except (OSError, AutomatonFormatError, AutomatonError) as exc:
        print(f"img-branch: {args.file}: {exc}", file=sys.stderr)
        return 1
    A = parsed.automaton
    reduced, _ = minimize(A)
    print(f"automaton: {parsed.name or args.file.name}")
    print(f"states: {len(A)} (minimal: {len(reduced)}), alphabet size {A.degree}")
    for name, g in A.elements().items():
        k = order_up_to(g, args.order_bound)
        print(f"  |{name}| = {k if k is not None else f'> {args.order_bound}'}")
    gens = [g for q, g in enumerate(A.elements().values()) if q != A.identity_state]
    for n in range(1, args.level + 1):
        G = levels.PermGroup(n, [truncate(g, n) for g in gens])
        print(f"  |level {n} image| = {G.order()}")
    print("normalized form:")
    sys.stdout.write(format_automaton(A, parsed.name))
    return 0


def _cmd_export(args) -> int:
    n = args.level
    group = {
        "G": lambda: img.g_level(n),
        "K": lambda: img.k_level(n),
        "K-prime": lambda: img.k_prime_level(n),
        "St3": lambda: img.stabilizer_level(n, 3),
    }[args.group]()
    sys.stdout.write(group.export_cycles())
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "list":
        sys.stdout.write(checks.list_table())
        return 0
    if args.command == "import":
        return _cmd_import(args)
    if args.command == "relators":
        sys.stdout.write(relators_text(args.depth))
        return 0
    return _cmd_export(args)


if __name__ == "__main__":
    sys.exit(main())
