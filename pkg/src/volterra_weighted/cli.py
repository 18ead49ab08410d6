"""Command-line front end.

    volterra weights check SPEC [--radii R ...] [--n-max N] [--lp-degree D]
    volterra criteria --op tg --g G --nu NU --mu MU [--domain/--codomain/--question/--criterion]
    volterra opnorm   --op sg --g G --nu NU --mu MU [--domain/--codomain]
    volterra verify CONFIG.json [--jobs N] [--format json|csv|markdown] [--output PATH]

Exit codes: 0 ok, 1 disagreement or expectation mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .operators import OPS, SPACES, opnorm_lower
from .verify import (
    FORMATS,
    QUESTIONS,
    CaseSpec,
    RunConfig,
    _canon,
    _evaluate,
    criteria_for,
    emit_report,
    equivalence_matrix,
    run_cases,
    standard_sweep,
    to_json,
    valid_combinations,
)
from .weights import make_weight, weight_report

EXIT_OK, EXIT_FLAGGED, EXIT_USAGE = 0, 1, 2

__all__ = ["main", "RunConfig", "build_parser"]

# config flags shared by every evaluating subcommand (dest -> type)
_CONFIG_FLAGS = {
    "levels": int, "n_theta": int, "quad_tol": float, "lp_degree": int, "lp_samples": int,
    "seed": int, "search_degree": int, "search_random": int, "output": str, "format": str,
}


class UsageError(Exception):
    pass


def _write(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_config_flags(p):
    for name, typ in _CONFIG_FLAGS.items():
        flag = "--" + name.replace("_", "-")
        if name == "format":
            p.add_argument(flag, choices=FORMATS, default=None)
        else:
            p.add_argument(flag, type=typ, default=None)


def _add_case_flags(p):
    p.add_argument("--op", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--nu", required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--domain", default="Hinf")
    p.add_argument("--codomain", default="Hinf")
    p.add_argument("--question", default="Bounded")


def resolve_config(args, file_config: dict | None = None) -> RunConfig:
    """flag > VOLTERRA_SEED (seed only) > config file > default."""
    cfg = RunConfig.from_mapping(dict(file_config or {}))
    if os.environ.get("VOLTERRA_SEED"):
        cfg = cfg.merged(seed=int(os.environ["VOLTERRA_SEED"]))
    flags = {k: getattr(args, k, None) for k in _CONFIG_FLAGS}
    if getattr(args, "jobs", None) is not None:
        flags["jobs"] = args.jobs
    return cfg.merged(**flags)


def _case_from_args(args) -> CaseSpec:
    return CaseSpec.from_dict({"op": args.op, "g": args.g, "nu": args.nu, "mu": args.mu,
                               "domain": args.domain, "codomain": args.codomain,
                               "question": args.question})


def cmd_weights(args) -> int:
    nu = make_weight(args.spec)
    cfg = RunConfig().merged(lp_degree=args.lp_degree, lp_samples=args.lp_samples)
    lp = cfg.lp()
    rep = weight_report(nu, tuple(args.radii), args.n_max, lp)
    if args.format == "markdown":
        f = rep["flags"]
        lines = [f"## weight `{rep['spec']}`", "", "| property | value |", "|---|---|"]
        lines += [f"| {k} | {f[k]} |" for k in sorted(f)]
        s = rep["sandwich"]
        lines += ["", "| r | lower | upper |", "|---|---|---|"]
        lines += [f"| {r} | {lo} | {up} |" for r, lo, up in zip(s["radii"], s["lower"], s["upper"])]
        text = "\n".join(lines) + "\n"
    else:
        text = to_json(rep)
    _write(text, args.output)
    return EXIT_OK


def cmd_criteria(args) -> int:
    cfg = resolve_config(args)
    case = _case_from_args(args)
    entries = criteria_for(case.op_kind, case.domain_kind, case.codomain_kind, case.question)
    if not entries:
        raise UsageError("no criterion for this combination; valid combinations:\n  "
                         + "\n  ".join(valid_combinations()))
    if args.criterion:
        chosen = [e for e in entries if e.cid == args.criterion]
        if not chosen:
            raise UsageError(f"criterion {args.criterion!r} not available here; choose from "
                             + ", ".join(e.cid for e in entries))
        entry = chosen[0]
    else:
        entry = entries[0]
    res = _evaluate(entry, case, cfg.grid(), cfg.quad())
    doc = {"criterion": entry.cid, **res.to_dict()}
    _write(to_json(doc), cfg.output)
    return EXIT_OK


def cmd_opnorm(args) -> int:
    cfg = resolve_config(args)
    case = _case_from_args(args)
    est = opnorm_lower(case.op_kind, case.g, case.nu, case.mu, case.domain_kind,
                       case.codomain_kind, cfg.search())
    _write(to_json({"case": case.to_dict(), **est.to_dict()}), cfg.output)
    return EXIT_OK


def load_cases(doc: dict) -> list:
    """Explicit ``cases`` followed by those generated from ``sweep``."""
    cases = [CaseSpec.from_dict(c) for c in doc.get("cases", [])]
    sw = doc.get("sweep")
    if sw:
        cases += standard_sweep(
            symbols=tuple(sw.get("g", ("identity", "neglog1mz", "zero"))),
            alphas=tuple(sw.get("alpha", (0.5, 1.0))), betas=tuple(sw.get("beta", (0.5, 1.0))),
            ops=tuple(_canon(o, OPS, "operator") for o in sw.get("op", OPS)),
            questions=tuple(_canon(q, QUESTIONS, "question") for q in sw.get("question", QUESTIONS)),
            domain=_canon(sw.get("domain", "Hinf"), SPACES, "space"),
            codomain=_canon(sw.get("codomain", "Hinf"), SPACES, "space"))
    return cases


def cmd_verify(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    cfg = resolve_config(args, doc.get("config"))
    cases = load_cases(doc)
    if not cases:
        raise UsageError("config has an empty case list")
    reports = run_cases(cases, cfg, cfg.jobs)
    matrix = equivalence_matrix(cases, cfg, reports=reports)
    mismatches = [c.label for c, r in zip(cases, reports) if r["consistency"]["expect_mismatch"]]
    if cfg.format == "json":
        text = to_json({"schema": "volterra-report/1", "config": cfg.to_dict(),
                        "reports": reports, "matrix": matrix.to_dict(),
                        "summary": {"cases": len(cases),
                                    "disagreement_flags": matrix.n_flags,
                                    "expect_mismatches": mismatches}})
    else:
        text = emit_report(reports, cfg.format)
    _write(text, cfg.output)
    for m in mismatches:
        print(f"expectation mismatch: {m}", file=sys.stderr)
    for r in matrix.rows:
        if r["disagreement"]:
            print(f"disagreement: {r['case']}: {'; '.join(r['details'])}", file=sys.stderr)
    for c in matrix.coherence:
        print(f"incoherent: {c}", file=sys.stderr)
    return EXIT_FLAGGED if (matrix.n_flags or mismatches) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="volterra",
                                description="Criteria for Volterra type operators on weighted spaces")
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("weights", help="weight properties")
    wsub = w.add_subparsers(dest="action", required=True)
    wc = wsub.add_parser("check", help="property table for a weight spec")
    wc.add_argument("spec")
    wc.add_argument("--radii", type=float, nargs="+", default=[0.5, 0.9])
    wc.add_argument("--n-max", type=int, default=24)
    wc.add_argument("--lp-degree", type=int, default=None)
    wc.add_argument("--lp-samples", type=int, default=None)
    wc.add_argument("--format", choices=("json", "markdown"), default="json")
    wc.add_argument("--output", default=None)
    wc.set_defaults(func=cmd_weights)

    c = sub.add_parser("criteria", help="evaluate one criterion")
    _add_case_flags(c)
    c.add_argument("--criterion", default=None, help="criterion id (default: first listed)")
    _add_config_flags(c)
    c.set_defaults(func=cmd_criteria)

    o = sub.add_parser("opnorm", help="operator norm lower bound")
    _add_case_flags(o)
    _add_config_flags(o)
    o.set_defaults(func=cmd_opnorm)

    v = sub.add_parser("verify", help="run a case list from a JSON config")
    v.add_argument("config")
    v.add_argument("--jobs", type=int, default=None)
    _add_config_flags(v)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"volterra: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
