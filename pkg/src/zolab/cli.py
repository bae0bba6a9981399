"""Command-line surface: reproducible experiments with machine-readable output.

Subcommands: sample, eval, exact, estimate, index, classify, sweep,
decompose, percolate. Every output document embeds the resolved
configuration (JSON field ``config``; a leading ``#`` comment line in CSV
and PBM), and identical configurations produce byte-identical output.

Defaults may be overridden by environment variables with prefix ``ZOLAB_``
(flag ``--max-enum-n`` becomes ``ZOLAB_MAX_ENUM_N`` and so on); explicit
flags win over the environment.

Exit codes: 0 success, 2 input error, 3 resource-cap refusal. Errors are
written to stderr as one JSON object with ``error`` (machine-readable
code) and ``message``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional

from . import folang, local, percolation, thresholds
from .errors import InputError, ResourceError, ZolabError
from .image import Image, SampleSpec, read_pbm, sample, write_pbm
from .local import BasicLocalSentence
from .thresholds import PowerLawRate, SWEEP_CSV_HEADER, SweepRow, sweep_row_csv


def _env(flag: str) -> Optional[str]:
    return os.environ.get("ZOLAB_" + flag.replace("-", "_").upper())


def _env_default(flag: str, cast, fallback):
    raw = _env(flag)
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError as exc:
        raise InputError(f"bad value for ZOLAB_{flag.replace('-', '_').upper()}: {exc}") from exc


def _add_caps(parser: argparse.ArgumentParser, enum: bool = False, radius: bool = False, work: bool = False):
    if enum:
        parser.add_argument("--max-enum-n", type=int,
                            default=_env_default("max-enum-n", int, thresholds.DEFAULT_MAX_ENUM_N))
    if radius:
        parser.add_argument("--max-radius", type=int,
                            default=_env_default("max-radius", int, 2))
    if work:
        parser.add_argument("--work-budget", type=int,
                            default=_env_default("work-budget", int, folang.DEFAULT_WORK_BUDGET))


def _add_target(parser: argparse.ArgumentParser):
    parser.add_argument("--formula", help="first-order sentence, inline")
    parser.add_argument("--formula-file", help="file with a first-order sentence (# comments allowed)")
    parser.add_argument("--local", help="JSON file {r, psis: [...]} with a basic local sentence")


def _add_output(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=("csv", "json"),
                        default=_env_default("format", str, "csv"))
    parser.add_argument("--out", default=_env_default("out", str, None))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zolab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw a random image and emit plain PBM")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=_env_default("seed", int, 0))
    p.add_argument("--out", default=_env_default("out", str, None))

    p = sub.add_parser("eval", help="evaluate a sentence on a PBM image")
    _add_target(p)
    p.add_argument("--image", required=True)
    _add_caps(p, work=True, radius=True)

    p = sub.add_parser("exact", help="exact probability by exhaustive enumeration")
    _add_target(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    _add_caps(p, enum=True, radius=True, work=True)

    p = sub.add_parser("estimate", help="Monte Carlo estimate with Wilson interval")
    _add_target(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--samples", type=int, default=_env_default("samples", int, thresholds.DEFAULT_SAMPLES))
    p.add_argument("--seed", type=int, default=_env_default("seed", int, 0))
    _add_caps(p, radius=True, work=True)
    _add_output(p)

    p = sub.add_parser("index", help="index (max-min black count) of a basic local sentence")
    p.add_argument("--local", required=True)
    _add_caps(p, radius=True)

    p = sub.add_parser("classify", help="limiting probability under p(n) = c n^-alpha")
    p.add_argument("--local", required=True)
    p.add_argument("--alpha", type=str, required=True, help="exponent; fractions like 2/3 are exact")
    p.add_argument("--c", type=float, default=1.0)
    _add_caps(p, radius=True)

    p = sub.add_parser("sweep", help="threshold sweep over a list of sides")
    _add_target(p)
    p.add_argument("--n-list", required=True, help="comma-separated sides, e.g. 64,128,256")
    p.add_argument("--alpha", type=str, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=_env_default("samples", int, thresholds.DEFAULT_SAMPLES))
    p.add_argument("--seed", type=int, default=_env_default("seed", int, 0))
    _add_caps(p, radius=True, work=True)
    _add_output(p)

    p = sub.add_parser("decompose", help="slot-set sizes and minimal black counts")
    p.add_argument("--local", required=True)
    _add_caps(p, radius=True)

    p = sub.add_parser("percolate", help="crossing estimates or exhaustive duality check")
    p.add_argument("--duality", action="store_true")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--color", choices=("black", "white"), default="black")
    p.add_argument("--direction", choices=("left-right", "top-bottom"), default="left-right")
    p.add_argument("--samples", type=int, default=_env_default("samples", int, thresholds.DEFAULT_SAMPLES))
    p.add_argument("--seed", type=int, default=_env_default("seed", int, 0))
    _add_caps(p, enum=True)
    _add_output(p)

    return parser


def _parse_alpha(text: str):
    try:
        return Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad exponent {text!r}: {exc}") from exc


def _load_target(args, need: bool = True):
    given = [x for x in (args.formula, args.formula_file, getattr(args, "local", None)) if x]
    if len(given) > 1:
        raise InputError("give exactly one of --formula, --formula-file, --local")
    if args.formula is not None:
        return folang.parse(args.formula)
    if args.formula_file is not None:
        with open(args.formula_file, encoding="utf-8") as fh:
            return folang.parse(fh.read())
    if getattr(args, "local", None) is not None:
        return _load_local(args.local)
    if need:
        raise InputError("a target is required: --formula, --formula-file, or --local")
    return None


def _load_local(path: str) -> BasicLocalSentence:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad JSON in {path}: {exc}") from exc
    return BasicLocalSentence.from_json_doc(doc)


def _max_cells(args) -> int:
    r = getattr(args, "max_radius", 2)
    if r < 0:
        raise InputError("--max-radius must be >= 0")
    return (2 * r + 1) ** 2


def _config(args, **extra) -> dict:
    skip = {"out", "formula", "formula_file"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip and v is not None}
    if getattr(args, "formula", None) is not None:
        cfg["formula"] = args.formula
    if getattr(args, "formula_file", None) is not None:
        cfg["formula_file"] = args.formula_file
    cfg.update(extra)
    return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in sorted(cfg.items())}


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, config: dict, payload: dict) -> None:
    doc = {"config": config}
    doc.update(payload)
    _emit(args, json.dumps(doc, sort_keys=True) + "\n")


def _emit_rows(args, config: dict, rows: list[SweepRow]) -> None:
    if args.format == "json":
        payload = [
            {k: getattr(row, k) for k in SWEEP_CSV_HEADER.split(",")} for row in rows
        ]
        _emit_json(args, config, {"rows": payload})
        return
    lines = ["# " + json.dumps(config, sort_keys=True), SWEEP_CSV_HEADER]
    lines.extend(sweep_row_csv(row) for row in rows)
    _emit(args, "\n".join(lines) + "\n")


def _estimate_row(est, target, max_cells: int) -> SweepRow:
    lower = upper = None
    fp = thresholds._as_factored(target) if not isinstance(target, folang.Formula) else None
    if fp is not None and est.n >= 2 * fp.r + 2:
        bounds = thresholds.pattern_bounds(est.n, est.p, fp)
        lower, upper = bounds.lower, bounds.upper
    return SweepRow(
        n=est.n, p=est.p, samples=est.samples, hits=est.hits, phat=est.phat,
        ci_low=est.ci_low, ci_high=est.ci_high,
        lower_bound=lower, upper_bound=upper, classification=None,
    )


def _cmd_sample(args) -> None:
    spec = SampleSpec(args.n, args.p, args.seed)
    img = sample(spec)
    config = _config(args)
    pbm = write_pbm(img)
    header, _, rest = pbm.partition(b"\n")
    text = (header + b"\n# " + json.dumps(config, sort_keys=True).encode() + b"\n" + rest).decode()
    _emit(args, text)


def _cmd_eval(args) -> None:
    target = _load_target(args)
    with open(args.image, "rb") as fh:
        img = read_pbm(fh.read())
    if isinstance(target, BasicLocalSentence):
        value = local.match_factored(img, local.factor(target, _max_cells(args)))
    else:
        folang.check_sentence(target)
        value = folang.evaluate(img, target, work_budget=args.work_budget)
    _emit_json(args, _config(args, n=img.n), {"value": bool(value)})


def _cmd_exact(args) -> None:
    target = _load_target(args)
    if isinstance(target, BasicLocalSentence):
        target = local.factor(target, _max_cells(args))
    prob = thresholds.exact_probability(
        target, args.n, args.p, max_enum_n=args.max_enum_n, work_budget=args.work_budget
    )
    _emit_json(args, _config(args), {"probability": prob})


def _cmd_estimate(args) -> None:
    target = _load_target(args)
    if isinstance(target, BasicLocalSentence):
        target = local.factor(target, _max_cells(args))
    est = thresholds.estimate(
        target, args.n, args.p, samples=args.samples, seed=args.seed, work_budget=args.work_budget
    )
    _emit_rows(args, _config(args), [_estimate_row(est, target, _max_cells(args))])


def _cmd_index(args) -> None:
    sentence = _load_local(args.local)
    value = local.index(sentence, _max_cells(args))
    payload = {"index": "INFINITY" if value == math.inf else int(value)}
    exp = thresholds.threshold_exponent(sentence, _max_cells(args))
    payload["kind"] = exp.kind.value
    payload["threshold_exponent"] = None if exp.exponent is None else str(exp.exponent)
    _emit_json(args, _config(args), payload)


def _cmd_classify(args) -> None:
    sentence = _load_local(args.local)
    rate = PowerLawRate(args.c, _parse_alpha(args.alpha))
    limit = thresholds.classify(sentence, rate, _max_cells(args))
    _emit_json(args, _config(args), {"classification": limit.value})


def _cmd_sweep(args) -> None:
    target = _load_target(args)
    try:
        n_list = [int(x) for x in args.n_list.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad --n-list: {exc}") from exc
    if not n_list:
        raise InputError("--n-list must name at least one side")
    if isinstance(target, BasicLocalSentence):
        target = local.factor(target, _max_cells(args))
    rate = PowerLawRate(args.c, _parse_alpha(args.alpha))
    rows = thresholds.sweep(
        target, rate, n_list, samples=args.samples, seed=args.seed, work_budget=args.work_budget
    )
    _emit_rows(args, _config(args), rows)


def _cmd_decompose(args) -> None:
    sentence = _load_local(args.local)
    fp = local.factor(sentence, _max_cells(args))
    slots = [
        {"count": len(s), "min_black": s.min_black()} for s in fp.slot_sets
    ]
    value = local.index(sentence, _max_cells(args))
    exp = thresholds.threshold_exponent(sentence, _max_cells(args))
    _emit_json(
        args,
        _config(args),
        {
            "r": fp.r,
            "slots": slots,
            "index": "INFINITY" if value == math.inf else int(value),
            "kind": exp.kind.value,
            "threshold_exponent": None if exp.exponent is None else str(exp.exponent),
        },
    )


def _cmd_percolate(args) -> None:
    if args.duality:
        report = percolation.duality_check(args.n, max_enum_n=args.max_enum_n)
        _emit_json(
            args,
            _config(args),
            {"total": report.total, "violations": report.violations, "blr_count": report.blr_count},
        )
        return
    if args.p is None:
        raise InputError("percolate estimates need --p (or use --duality)")
    spec = percolation.CrossingSpec(
        percolation.PathColor.BLACK if args.color == "black" else percolation.PathColor.WHITE,
        percolation.Direction(args.direction),
    )
    est = thresholds.estimate(spec, args.n, args.p, samples=args.samples, seed=args.seed)
    row = SweepRow(
        n=est.n, p=est.p, samples=est.samples, hits=est.hits, phat=est.phat,
        ci_low=est.ci_low, ci_high=est.ci_high,
        lower_bound=None, upper_bound=None, classification=None,
    )
    _emit_rows(args, _config(args), [row])


_COMMANDS = {
    "sample": _cmd_sample,
    "eval": _cmd_eval,
    "exact": _cmd_exact,
    "estimate": _cmd_estimate,
    "index": _cmd_index,
    "classify": _cmd_classify,
    "sweep": _cmd_sweep,
    "decompose": _cmd_decompose,
    "percolate": _cmd_percolate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _COMMANDS[args.command](args)
        return 0
    except ResourceError as exc:
        _report(exc)
        return 3
    except ZolabError as exc:
        _report(exc)
        return 2
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io-error", "message": str(exc)}) + "\n")
        return 2
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": "input-error", "message": str(exc)}) + "\n")
        return 2


def _report(exc: ZolabError) -> None:
    sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")


if __name__ == "__main__":
    sys.exit(main())
