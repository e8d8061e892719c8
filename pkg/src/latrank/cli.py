"""Command-line front end: experiment orchestration and persistent reports.

Every run writes a manifest.json plus a records file (jsonl or csv) into the
output directory.  Identical configuration and seed reproduce the files
byte-for-byte; floats are serialized at 15 significant digits and exact
rationals as "num/den" strings.

Exit codes: 0 success, 2 validation failure, 3 enumeration cap abort
(partial results flushed), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__, config
from .counting import ball, c1_estimate, koecher_identity_check, lhs_count, \
    primitive_zeta_check
from .errors import EnumerationCapError, LatrankError, ValidationError
from .hecke import convergence_table, validate_moment_window
from .modules import rank_factorize as modules_rank_factorize
from .numfield import parse_field_file, rationals

SCHEMA_VERSION = 1


def fmt_float(x) -> str:
    return f"{float(x):.15g}"


def fmt_value(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return fmt_float(x)
    return x


def _record_json(rec: dict) -> str:
    return json.dumps({k: fmt_value(v) for k, v in rec.items()}, sort_keys=False)


def write_report(out_dir: str, command: str, cfg: dict, records: list[dict],
                 fmt: str, field, wall_ms: float, status: str = "complete") -> None:
    os.makedirs(out_dir, exist_ok=True)
    records_name = f"records.{'jsonl' if fmt == 'json' else 'csv'}"
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": {k: fmt_value(v) for k, v in cfg.items()},
        "record_count": len(records),
        "records_file": records_name,
        "wall_time_ms": fmt_float(wall_ms),
        "library_version": __version__,
        "field_fingerprint": field.fingerprint(),
        "status": status,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=False)
        fh.write("\n")
    path = os.path.join(out_dir, records_name)
    if fmt == "json":
        with open(path, "w") as fh:
            for rec in records:
                fh.write(_record_json(rec) + "\n")
    else:
        with open(path, "w", newline="") as fh:
            if records:
                writer = csv.DictWriter(fh, fieldnames=list(records[0].keys()))
                writer.writeheader()
                for rec in records:
                    writer.writerow({k: fmt_value(v) for k, v in rec.items()})


def _load_field(args):
    if getattr(args, "field", None):
        return parse_field_file(args.field)
    return rationals()


def _parse_int_list(text: str) -> list[int]:
    return [int(t) for t in str(text).replace(",", " ").split()]


def _config_echo(args, keys):
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def cmd_field_info(args):
    fld = _load_field(args)
    records = [{
        "min_poly": list(fld.min_poly),
        "degree": fld.degree,
        "signature_r1": fld.signature[0],
        "signature_r2": fld.signature[1],
        "discriminant": fld.discriminant,
        "monogenic_index": fld.monogenic_index,
        "irreducibility_checked": fld.irreducibility_checked,
    }]
    return fld, records, _config_echo(args, ["field"])


def cmd_count_rank(args):
    fld = _load_field(args)
    f = ball(Fraction(args.ball))
    records = []
    for T in _parse_int_list(args.T):
        rep = lhs_count(fld, args.n, args.m, args.k, T, f, method=args.method)
        records.append({
            "n": args.n, "m": args.m, "k": args.k, "T": T,
            "raw_sum": rep.raw_sum, "normalized": rep.normalized,
            "matrices_seen": rep.matrices_seen, "method": rep.method,
        })
    return fld, records, _config_echo(args, ["field", "n", "m", "k", "T", "ball", "method"])


def cmd_c1_sum(args):
    fld = _load_field(args)
    f = ball(Fraction(args.ball))
    est = c1_estimate(fld, args.n, args.m, args.k, f, args.cutoff,
                      mc_samples=args.mc_samples, seed=args.seed)
    records = [{
        "n": est.n, "m": est.m, "k": est.k, "cutoff": est.cutoff,
        "value": est.partial_sum, "term_count": est.term_count,
        "tail_estimate": est.tail_estimate, "tail_is_heuristic": True,
        "mc_stderr": est.mc_stderr, "seed": args.seed,
    }]
    return fld, records, _config_echo(args, ["field", "n", "m", "k", "ball", "cutoff",
                                             "mc_samples", "seed"])


def cmd_schmidt_table(args):
    from .modules import dump_module_lines, enumerate_primitive_modules

    fld = _load_field(args)
    records = []
    for T in _parse_int_list(args.T):
        mods = enumerate_primitive_modules(fld, args.k, args.m, T)
        records.append({"k": args.k, "m": args.m, "T": T, "count": len(mods)})
        if args.dump_modules:
            os.makedirs(args.output_dir, exist_ok=True)
            with open(os.path.join(args.output_dir, f"modules_T{T}.jsonl"), "w") as fh:
                fh.write(dump_module_lines(mods))
    return fld, records, _config_echo(args, ["field", "k", "m", "T"])


def cmd_identity_check(args):
    fld = _load_field(args)
    if args.kind == "primitive-zeta":
        lhs, rhs, rel = primitive_zeta_check(args.n, args.m, args.cutoff)
    elif args.kind == "koecher":
        lhs, rhs, rel = koecher_identity_check(fld, args.n, args.m, args.cutoff)
    else:
        raise ValidationError(f"unknown identity kind {args.kind!r}")
    records = [{
        "kind": args.kind, "n": args.n, "m": args.m, "cutoff": args.cutoff,
        "lhs": lhs, "rhs": rhs, "relative_error": rel,
    }]
    return fld, records, _config_echo(args, ["field", "kind", "n", "m", "cutoff"])


def cmd_hecke_moment(args):
    fld = _load_field(args)
    validate_moment_window(args.n, args.m, args.s)
    g = ball(Fraction(args.ball))
    reports = convergence_table(fld, args.n, args.m, args.s, g,
                                primes=_parse_int_list(args.primes), mode=args.mode,
                                height_cutoff=args.cutoff, mc_samples=args.mc_samples,
                                seed=args.seed)
    records = []
    for r in reports:
        records.append({
            "p": r.p, "s": r.s, "n": r.n, "m": r.m, "mode": r.mode,
            "lhs": r.lhs, "stratified": r.stratified, "rhs_limit": r.rhs_limit,
            "abs_error": r.abs_error,
            "lhs_exact": r.lhs_exact if r.lhs_exact is not None else "",
            "seed": args.seed,
        })
    os.makedirs(args.output_dir, exist_ok=True)
    with open(os.path.join(args.output_dir, "summary.csv"), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["p", "lhs", "stratified", "rhs_limit", "abs_error"])
        for r in reports:
            writer.writerow([r.p, fmt_float(r.lhs), fmt_float(r.stratified),
                             fmt_float(r.rhs_limit), fmt_float(r.abs_error)])
    return fld, records, _config_echo(args, ["field", "n", "m", "s", "primes", "ball",
                                             "mode", "cutoff", "mc_samples", "seed"])


def cmd_factorize(args):
    fld = _load_field(args)
    rows = json.loads(args.matrix)
    mat = [[Fraction(str(x)) for x in row] for row in rows]
    C, D = modules_rank_factorize(fld, mat)
    records = [{
        "rank": D.k,
        "pivot_cols": list(D.pivot_cols),
        "C": [[fmt_value(sum(Fraction(c) for c in x.coords)) if fld.degree == 1
               else ",".join(str(c) for c in x.coords) for x in row] for row in C],
        "D": D.entry_strings(),
    }]
    return fld, records, _config_echo(args, ["field", "matrix"])


COMMANDS = {
    "field-info": cmd_field_info,
    "count-rank": cmd_count_rank,
    "c1-sum": cmd_c1_sum,
    "schmidt-table": cmd_schmidt_table,
    "identity-check": cmd_identity_check,
    "hecke-moment": cmd_hecke_moment,
    "factorize": cmd_factorize,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latrank",
        description="fixed-rank integral matrix counting and Hecke moment experiments",
    )
    parser.add_argument("--config", help="JSON file whose keys override flags")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--field", help="field specification file (default: rationals)")
        p.add_argument("--output-dir",
                       default=os.environ.get("LATRANK_OUTPUT_DIR", "latrank_out"))
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("field-info")
    common(p)

    p = sub.add_parser("count-rank")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--T", required=True, help="comma-separated list of scales")
    p.add_argument("--ball", default="1", help="radius of the ball test function")
    p.add_argument("--method", choices=["auto", "direct", "stratified"], default="auto")

    p = sub.add_parser("c1-sum")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ball", default="1")
    p.add_argument("--cutoff", type=float, required=True)
    p.add_argument("--mc-samples", type=int, default=0)

    p = sub.add_parser("schmidt-table")
    common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--T", required=True)
    p.add_argument("--dump-modules", action="store_true",
                   help="also write modules_T<T>.jsonl module lists")

    p = sub.add_parser("identity-check")
    common(p)
    p.add_argument("--kind", choices=["primitive-zeta", "koecher"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cutoff", type=float, required=True)

    p = sub.add_parser("hecke-moment")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--primes", required=True)
    p.add_argument("--ball", default="1")
    p.add_argument("--mode", default="exact", help="exact | auto | sampled:<count>")
    p.add_argument("--cutoff", type=float, default=30)
    p.add_argument("--mc-samples", type=int, default=4000)

    p = sub.add_parser("factorize")
    common(p)
    p.add_argument("--matrix", required=True,
                   help='JSON rows of rationals, e.g. "[[2,1],[4,2],[6,3]]"')
    return parser


def apply_config_file(args):
    if not args.config:
        return args
    with open(args.config) as fh:
        overrides = json.load(fh)
    for key, val in overrides.items():
        setattr(args, key.replace("-", "_"), val)
    return args


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config_file(args)
    except OSError as exc:
        print(f"latrank: cannot read config: {exc}", file=sys.stderr)
        return 4
    config.set_max_threads(getattr(args, "threads", 1) or 1)
    t0 = time.monotonic()
    try:
        fld, records, cfg = COMMANDS[args.command](args)
        status = "complete"
        code = 0
    except ValidationError as exc:
        print(f"latrank: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except EnumerationCapError as exc:
        print(f"latrank: {exc}", file=sys.stderr)
        fld, records, cfg = None, [], {}
        status = "cap_abort"
        code = 3
    except (ValueError, LatrankError) as exc:
        print(f"latrank: invalid configuration: {exc}", file=sys.stderr)
        return 2
    wall_ms = (time.monotonic() - t0) * 1000.0
    cfg = dict(cfg)
    cfg["seed"] = getattr(args, "seed", 0)
    cfg["threads"] = getattr(args, "threads", 1)
    try:
        if fld is None:
            fld = rationals()
        write_report(args.output_dir, args.command, cfg, records,
                     getattr(args, "format", "json"), fld, wall_ms,
                     status=status)
        for rec in records:
            print(_record_json(rec))
    except OSError as exc:
        print(f"latrank: I/O failure: {exc}", file=sys.stderr)
        return 4
    return code


if __name__ == "__main__":
    sys.exit(main())
