"""Operator command line: ingest/validate, build, query, mine, serve, gen.

Every subcommand is a thin shell over library calls; stdout carries data
only and diagnostics go to stderr.  Exit codes are stable:

    0  success
    1  usage error (bad flags, bad query spec, bad thresholds)
    2  I/O error (missing/unreadable/corrupt files, unusable input)
    3  validation errors present (only with --strict)
    4  snapshot version mismatch
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .codebook import load_tables
from .cube import (
    CellQuery,
    Filter,
    GroupBy,
    QueryError,
    SnapshotError,
    SnapshotVersionError,
    aggregate,
    build_facts,
    result_to_delimited,
    snapshot_load,
    snapshot_save,
)
from .ingest import (
    IngestError,
    Severity,
    incidents_to_text,
    load_alias_map,
    read_incidents,
    write_violation_report,
)
from .mining import (
    build_transactions,
    mine_association_rules,
    mine_sequences,
    outliers_for_measure,
)
from .service import parse_query_request
from .synthetic import DEFAULT_PROFILE, generate_synthetic, load_profile

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_VALIDATION = 3
EXIT_VERSION = 4

SNAPSHOT_ENV = "INCUBE_SNAPSHOT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="incube", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--in", dest="input", required=True, help="input delimited file")
        p.add_argument("--delimiter", default=",", help="cell delimiter (default comma)")
        p.add_argument("--alias-map", help="JSON file mapping file headers to canonical names")

    p = sub.add_parser("gen", help="generate a synthetic incident file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--profile", help="generator profile JSON file")
    p.add_argument("--out", help="output path (default stdout)")

    p = sub.add_parser("validate", help="report codebook violations in a file")
    add_input_flags(p)
    p.add_argument("--strict", action="store_true", help="exit 3 when Errors are present")

    p = sub.add_parser("ingest", help="normalize a file into the canonical incident store")
    add_input_flags(p)
    p.add_argument("--out", required=True, help="normalized incident store path")
    p.add_argument("--report", help="violation report path (default stdout)")
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("build", help="build a cube snapshot from incidents")
    add_input_flags(p)
    p.add_argument("--out", required=True, help="snapshot path")
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("query", help="aggregate a snapshot into a delimited grid")
    p.add_argument("--snapshot", help=f"snapshot path (default ${SNAPSHOT_ENV})")
    p.add_argument("--group-by", action="append", default=[], metavar="DIM[:DEPTH]")
    p.add_argument("--measure", action="append", default=[], metavar="NAME")
    p.add_argument("--filter", action="append", default=[], metavar="DIM=M1|M2")
    p.add_argument("--spec", help="JSON query spec file (full fidelity)")
    p.add_argument("--delimiter", default=",")

    mine = sub.add_parser("mine", help="association rules, sequences, outliers")
    mine_sub = mine.add_subparsers(dest="miner", required=True)

    p = mine_sub.add_parser("rules", help="frequent itemsets as association rules")
    add_input_flags(p)
    p.add_argument("--min-support", type=float, required=True)
    p.add_argument("--min-confidence", type=float, required=True)
    p.add_argument("--dims", default=None, help="comma-separated item dimensions")

    p = mine_sub.add_parser("sequences", help="frequent incident sequences per entity")
    add_input_flags(p)
    p.add_argument("--min-support", type=int, required=True, help="entity count")
    p.add_argument("--key", default="perpetrator", help="comma-separated grouping dims")
    p.add_argument("--dims", default=None)
    p.add_argument("--max-items", type=int, default=None, help="cap total pattern size")

    p = mine_sub.add_parser("outliers", help="robust z-scores over an aggregate series")
    p.add_argument("--snapshot", help=f"snapshot path (default ${SNAPSHOT_ENV})")
    p.add_argument("--spec", required=True, help="JSON query spec file")
    p.add_argument("--measure", required=True)
    p.add_argument("--threshold", type=float, required=True)

    p = sub.add_parser("serve", help="serve a snapshot over HTTP")
    p.add_argument("--snapshot", help=f"snapshot path (default ${SNAPSHOT_ENV})")
    p.add_argument("--addr", default="127.0.0.1:8765", help="host:port to listen on")

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage problems; remap
        return EXIT_OK if exc.code == 0 else EXIT_USAGE

    handlers = {
        "gen": _cmd_gen,
        "validate": _cmd_validate,
        "ingest": _cmd_ingest,
        "build": _cmd_build,
        "query": _cmd_query,
        "mine": _cmd_mine,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except SnapshotVersionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERSION
    except (OSError, IngestError, SnapshotError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (QueryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_gen(args) -> int:
    profile = load_profile(args.profile) if args.profile else DEFAULT_PROFILE
    incidents = generate_synthetic(args.seed, args.n, profile)
    text = incidents_to_text(incidents)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        print(f"wrote {len(incidents)} incidents to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read(args):
    aliases = load_alias_map(args.alias_map) if args.alias_map else None
    with open(args.input, "rb") as handle:
        return read_incidents(handle, delimiter=args.delimiter, aliases=aliases)


def _cmd_validate(args) -> int:
    incidents, violations = _read(args)
    by_line = {inc.source_line: inc for inc in incidents}
    write_violation_report(violations, sys.stdout, by_line)
    errors = sum(1 for v in violations if v.is_error)
    print(f"{len(incidents)} incidents, {errors} errors, "
          f"{len(violations) - errors} warnings", file=sys.stderr)
    if args.strict and errors:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_ingest(args) -> int:
    incidents, violations = _read(args)
    by_line = {inc.source_line: inc for inc in incidents}
    bad_lines = {v.line for v in violations if v.is_error}
    kept = [inc for inc in incidents if inc.source_line not in bad_lines]
    with open(args.out, "w", encoding="utf-8", newline="") as handle:
        handle.write(incidents_to_text(kept))
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="") as handle:
            write_violation_report(violations, handle, by_line)
    else:
        write_violation_report(violations, sys.stdout, by_line)
    dropped = len(incidents) - len(kept)
    print(f"kept {len(kept)} incidents, dropped {dropped} with errors", file=sys.stderr)
    if args.strict and bad_lines:
        return EXIT_VALIDATION
    return EXIT_OK


def _cmd_build(args) -> int:
    incidents, violations = _read(args)
    bad_lines = {v.line for v in violations if v.is_error}
    kept = [inc for inc in incidents if inc.source_line not in bad_lines]
    if args.strict and bad_lines:
        print(f"error: {len(bad_lines)} rows carry validation errors", file=sys.stderr)
        return EXIT_VALIDATION
    table = build_facts(kept)
    snapshot_save(table, args.out)
    print(f"snapshot: {table.num_rows} facts -> {args.out}", file=sys.stderr)
    return EXIT_OK


def _snapshot_path(args) -> str:
    path = args.snapshot or os.environ.get(SNAPSHOT_ENV)
    if not path:
        raise ValueError(f"no snapshot given (use --snapshot or ${SNAPSHOT_ENV})")
    return path


def _query_from_args(args) -> CellQuery:
    if args.spec:
        with open(args.spec, "r", encoding="utf-8") as handle:
            return parse_query_request(json.load(handle))
    group_by = []
    for spec in args.group_by:
        name, _, depth = spec.partition(":")
        if depth and not depth.isdigit():
            raise ValueError(f"bad --group-by {spec!r}; expected DIM or DIM:DEPTH")
        group_by.append(GroupBy(name, int(depth) if depth else 1))
    filters = []
    for spec in args.filter:
        dim, sep, members = spec.partition("=")
        if not sep or not members:
            raise ValueError(f"bad --filter {spec!r}; expected DIM=MEMBER[|MEMBER...]")
        filters.append(Filter(dim, tuple(members.split("|"))))
    measures = tuple(args.measure) if args.measure else ("incident_count",)
    return CellQuery(tuple(group_by), tuple(filters), measures)


def _cmd_query(args) -> int:
    table = snapshot_load(_snapshot_path(args))
    result = aggregate(table, _query_from_args(args))
    sys.stdout.write(result_to_delimited(result, args.delimiter))
    return EXIT_OK


def _cmd_mine(args) -> int:
    if args.miner == "rules":
        incidents, _ = _read(args)
        dims = args.dims.split(",") if args.dims else None
        transactions = (
            build_transactions(incidents, dims) if dims else build_transactions(incidents)
        )
        rules = mine_association_rules(transactions, args.min_support, args.min_confidence)
        out = ["antecedent,consequent,support,confidence,lift,support_count"]
        for r in rules:
            out.append(
                f"\"{' & '.join(r.antecedent)}\",\"{' & '.join(r.consequent)}\","
                f"{r.support:.12g},{r.confidence:.12g},{r.lift:.12g},{r.support_count}"
            )
        print("\n".join(out))
        return EXIT_OK

    if args.miner == "sequences":
        incidents, _ = _read(args)
        dims = args.dims.split(",") if args.dims else None
        key = tuple(args.key.split(","))
        patterns = mine_sequences(
            incidents,
            key,
            args.min_support,
            *((dims,) if dims else ()),
            max_items=args.max_items,
        )
        out = ["pattern,support"]
        for p in patterns:
            rendered = " => ".join("{" + " + ".join(e) + "}" for e in p.elements)
            out.append(f"\"{rendered}\",{p.support}")
        print("\n".join(out))
        return EXIT_OK

    # outliers
    table = snapshot_load(_snapshot_path(args))
    with open(args.spec, "r", encoding="utf-8") as handle:
        q = parse_query_request(json.load(handle))
    if args.measure not in q.measures:
        q = CellQuery(q.group_by, q.filters, q.measures + (args.measure,))
    result = aggregate(table, q)
    reports = outliers_for_measure(result, args.measure, args.threshold)
    out = ["coords,measure,value,score,flagged,method"]
    for r in reports:
        out.append(
            f"\"{'/'.join(r.coords)}\",{r.measure},{r.value:.12g},{r.score:.12g},"
            f"{str(r.flagged).lower()},{r.method}"
        )
    print("\n".join(out))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port_text = args.addr.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"bad --addr {args.addr!r}; expected HOST:PORT")
    app = create_app(snapshot_path=_snapshot_path(args))
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    return EXIT_OK
