"""Command line front end: configure a surface, solve, emit tables and checks.

Exit codes: 0 success, 2 solve finished but left touched unknowns unpinned,
3 mathematical failure (inconsistency, missing complex input, nonlinear
frontier, cross-check mismatch), 64 usage error, 66 unreadable input file."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .complex_gw import ComplexProvider, default_provider, load_complex_table
from .errors import (
    ConflictingEntry,
    EngineError,
    InconsistentSystem,
    InvalidDivisorTriple,
    Mismatch,
    MissingComplexValue,
    NonlinearFrontier,
    ParseError,
)
from .figures import render_ladders, render_stage_profile
from .lattice import CurveClass, SurfaceModel
from .relations import RealKey, enumerate_instances
from .solver import (
    jsonable_to_csv,
    rows_from_csv,
    solve,
    table_to_csv,
    table_to_jsonable,
    write_report,
)
from .verify import cross_subset_check, expected_values_check, residual_sweep

EXIT_OK = 0
EXIT_UNRESOLVED = 2
EXIT_INCONSISTENT = 3
EXIT_USAGE = 64
EXIT_NOINPUT = 66


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the solver owns that code here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def build_parser():
    parser = _Parser(prog="realwdvv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--surface", help="p2 or blowup:R with 1 <= R <= 8")
        p.add_argument("--max-degree", type=int, help="anticanonical degree bound")
        p.add_argument("--config", help="JSON config with surface and divisor_triples")
        p.add_argument("--triples", help="JSON file listing divisor triples")
        p.add_argument("--complex-table", help="ingestion table of complex invariants")
        p.add_argument("--seeds", help="seed file, lines 'coeffs... l : value'")
        p.add_argument(
            "--composite",
            action="store_true",
            help="let ingested blowup tables fall back to the plane recursion "
            "for multiples of the line class",
        )

    p_compute = sub.add_parser("compute", help="solve and export the invariant table")
    common(p_compute)
    p_compute.add_argument("--emit", choices=("csv", "json"), default="csv")
    p_compute.add_argument("--out", help="table destination; stdout when omitted")
    p_compute.add_argument("--report", help="solve report destination (JSON)")
    p_compute.add_argument(
        "--figures",
        action="store_true",
        help="render ladder and stage-profile figures next to --out",
    )
    p_compute.add_argument(
        "--save-complex-table", help="persist fetched complex invariants here"
    )
    p_compute.set_defaults(func=cmd_compute)

    p_check = sub.add_parser("check", help="run the consistency battery")
    common(p_check)
    p_check.add_argument("--report", help="check report destination (JSON)")
    p_check.set_defaults(func=cmd_check)

    p_export = sub.add_parser("export", help="re-emit a computed table")
    p_export.add_argument("--table", required=True, help="existing table, CSV or JSON")
    p_export.add_argument("--emit", choices=("csv", "json"), required=True)
    p_export.add_argument("--out", help="destination; stdout when omitted")
    p_export.add_argument(
        "--abs-only",
        action="store_true",
        help="replace the signed value column with absolute values",
    )
    p_export.set_defaults(func=cmd_export)
    return parser


# -- input plumbing --------------------------------------------------------


def _read_text(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError("%s: %s" % (path, exc.strerror or exc)) from exc


def _load_json_file(path):
    text = _read_text(path)
    try:
        return json.loads(text)
    except ValueError as exc:
        raise ParseError("%s: not valid JSON: %s" % (path, exc)) from exc


def _coerce_triples(raw, source):
    try:
        return tuple(
            tuple(tuple(int(x) for x in cov) for cov in triple) for triple in raw
        )
    except (TypeError, ValueError) as exc:
        raise ParseError("%s: malformed divisor triples" % source) from exc


def _resolve_model(args, parser):
    cfg = _load_json_file(args.config) if args.config else {}
    surface = args.surface if args.surface is not None else cfg.get("surface")
    if surface is None:
        parser.error("--surface is required (or a config file providing one)")
    triples = None
    triples_from_file = None
    if args.triples:
        triples = _coerce_triples(_load_json_file(args.triples), args.triples)
        triples_from_file = args.triples
    elif "divisor_triples" in cfg:
        triples = _coerce_triples(cfg["divisor_triples"], args.config)
        triples_from_file = args.config
    from_flag = args.surface is not None
    try:
        if surface == "p2":
            return SurfaceModel.p2(triples)
        if isinstance(surface, dict) and set(surface) == {"blowup"}:
            return SurfaceModel.blowup(int(surface["blowup"]), triples)
        if isinstance(surface, str) and surface.startswith("blowup:"):
            return SurfaceModel.blowup(int(surface.split(":", 1)[1]), triples)
    except ValueError:
        pass
    except InvalidDivisorTriple as exc:
        raise ParseError("%s: %s" % (triples_from_file, exc)) from exc
    except EngineError as exc:
        if from_flag:
            parser.error(str(exc))
        raise ParseError("%s: %s" % (args.config, exc)) from exc
    if from_flag:
        parser.error("unrecognized surface %r" % (surface,))
    raise ParseError("%s: unrecognized surface %r" % (args.config, surface))


def _resolve_provider(args, model):
    if args.complex_table:
        kind = "composite" if (model.rank == 1 or args.composite) else "table"
        return load_complex_table(args.complex_table, model, kind=kind)
    provider = default_provider(model)
    if args.composite and model.rank > 1:
        provider = ComplexProvider(kind="composite", cache=dict(provider.cache))
    return provider


def parse_seed_file(text, model, source="<seeds>"):
    seeds = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, tail = line.partition(":")
        parts = head.split()
        if not tail.strip() or len(parts) != model.rank + 1:
            raise ParseError(
                "%s:%d: expected 'coeffs... l : value' with %d coefficients"
                % (source, lineno, model.rank)
            )
        try:
            coeffs = tuple(int(x) for x in parts[:-1])
            l = int(parts[-1])
            value = Fraction(tail.strip())
        except ValueError as exc:
            raise ParseError("%s:%d: %s" % (source, lineno, exc)) from exc
        key = RealKey(CurveClass(coeffs), l)
        if key in seeds and seeds[key] != value:
            raise ParseError(
                "%s:%d: conflicting duplicate seed for %s" % (source, lineno, key)
            )
        seeds[key] = value
    return seeds


def _resolve_seeds(args, model):
    if not args.seeds:
        return None
    return parse_seed_file(_read_text(args.seeds), model, source=args.seeds)


def _require_bound(args, parser):
    if args.max_degree is None:
        parser.error("--max-degree is required")
    if args.max_degree < 1:
        parser.error("--max-degree must be at least 1")
    return args.max_degree


# -- commands --------------------------------------------------------------


def cmd_compute(args, parser):
    bound = _require_bound(args, parser)
    model = _resolve_model(args, parser)
    provider = _resolve_provider(args, model)
    seeds = _resolve_seeds(args, model)
    try:
        table, report = solve(model, provider, bound, seeds=seeds)
    except (MissingComplexValue, NonlinearFrontier, InconsistentSystem) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INCONSISTENT
    if args.emit == "csv":
        payload = table_to_csv(table, bound)
    else:
        payload = json.dumps(table_to_jsonable(table, bound), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    report_path = args.report
    if report_path is None and args.out:
        report_path = str(Path(args.out).with_name(Path(args.out).stem + "_report.json"))
    if report_path:
        write_report(report, report_path)
    if args.figures:
        if not args.out:
            parser.error("--figures requires --out")
        stem = Path(args.out).with_suffix("")
        render_ladders(table, str(stem) + "_ladders.png", bound)
        render_stage_profile(report, str(stem) + "_stages.png")
    if args.save_complex_table:
        provider.save_cache(args.save_complex_table)
    n_seeded = sum(1 for s in table.status.values() if s == "seeded")
    n_solved = sum(1 for s in table.status.values() if s == "solved")
    print(
        "solved %d invariants (%d seeded, %d stragglers, %d unresolved) "
        "from %d instances in %.2fs"
        % (
            n_solved,
            n_seeded,
            len(report.stragglers),
            len(report.unresolved),
            report.instance_count,
            report.seconds,
        ),
        file=sys.stderr,
    )
    return EXIT_UNRESOLVED if report.stragglers else EXIT_OK


def cmd_check(args, parser):
    bound = _require_bound(args, parser)
    model = _resolve_model(args, parser)
    provider = _resolve_provider(args, model)
    seeds = _resolve_seeds(args, model)
    failed = False
    try:
        table, report = solve(model, provider, bound, seeds=seeds)
    except (MissingComplexValue, NonlinearFrontier, InconsistentSystem) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INCONSISTENT
    instances = enumerate_instances(model, bound, None, provider)
    checked, nonzero = residual_sweep(model, instances, table)
    print("instances: %d" % report.instance_count)
    print("residuals: %d nonzero / %d instances" % (len(nonzero), checked))
    failed = failed or bool(nonzero)

    from .solver import check_integrality

    bad = check_integrality(table)
    if bad:
        print("integrality: %d non-integer values" % len(bad))
        failed = True
    else:
        print("integrality: all solved values are integers")

    try:
        cross = cross_subset_check(model, provider, bound, seeds=seeds)
    except Mismatch as exc:
        print("cross-subset: MISMATCH %s" % exc, file=sys.stderr)
        return EXIT_INCONSISTENT
    except (MissingComplexValue, NonlinearFrontier, InconsistentSystem) as exc:
        print("cross-subset: error: %s" % exc, file=sys.stderr)
        return EXIT_INCONSISTENT
    print(
        "cross-subset: %d invariants pinned by both halves agree"
        % len(cross.overlap)
    )

    expected_doc = None
    if model.rank == 1:
        matched, mismatched, missing = expected_values_check(table)
        print(
            "expected values: %d comparisons, %d pass, %d mismatch, %d not computed"
            % (
                len(matched) + len(mismatched) + len(missing),
                len(matched),
                len(mismatched),
                len(missing),
            )
        )
        for key, want, got in matched:
            print("  %s: pass (|N| = %d)" % (key, want))
        for key, want, got in mismatched:
            print("  %s: MISMATCH (expected |N| = %d, got %d)" % (key, want, got))
        for key, want, _ in missing:
            print("  %s: not computed at this bound (expected |N| = %d)" % (key, want))
        failed = failed or bool(mismatched)
        expected_doc = {
            "pass": len(matched),
            "mismatch": len(mismatched),
            "not_computed": len(missing),
        }

    if args.report:
        doc = {
            "solve": report.to_jsonable(),
            "residuals": {"checked": checked, "nonzero": len(nonzero)},
            "cross_subset": cross.to_jsonable(),
            "integrality_violations": len(bad),
        }
        if expected_doc is not None:
            doc["expected_values"] = expected_doc
        with open(args.report, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if failed:
        return EXIT_INCONSISTENT
    return EXIT_UNRESOLVED if report.stragglers else EXIT_OK


def cmd_export(args, parser):
    text = _read_text(args.table)
    try:
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            doc = rows_from_csv(text)
    except (ValueError, IndexError, StopIteration) as exc:
        raise ParseError("%s: not a table file: %s" % (args.table, exc)) from exc
    if args.emit == "csv":
        payload = jsonable_to_csv(doc, abs_only=args.abs_only)
    else:
        if args.abs_only:
            doc = {
                "basis_labels": doc["basis_labels"],
                "rows": [dict(row, value=row["abs_value"]) for row in doc["rows"]],
            }
        payload = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(payload)
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ParseError, ConflictingEntry, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NOINPUT
    except (Mismatch, MissingComplexValue, NonlinearFrontier, InconsistentSystem) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
