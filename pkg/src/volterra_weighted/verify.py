"""Per-case cross-checks: hypotheses, applicable criteria, norm estimate, verdict.

Criterion ids used in reports:

    Thm1/Cor1  T_g  H->H  bounded  IT sup         (iff: log g' in B, nu analytic)
    Rem1       T_g  H->H  bounded  IT sup         (sufficient only)
    Rem3       T_g  H->H  bounded  K5 sup         (iff: mu quasi-normal)
    Thm7       T_g  H->H  compact  IT double lim  (iff: log g' in B, nu analytic)
    Rem5       T_g  H->H  compact  IT double lim  (sufficient only)
    Rem6       T_g  H->H  compact  K5 -> 0        (iff: mu quasi-normal)
    Thm2/Cor2  S_g  H->H  bounded  IS sup         (iff: log g in B, nu analytic, nu quasi-normal)
    Prop1      S_g  H->H  bounded  IS sup         (sufficient: nu (U))
    Thm3       S_g  H->H  bounded  K1 sup         (iff: nu (U), mu quasi-normal)
    Thm9.1     S_g  H->H  compact  g = 0          (iff: mu = 1)
    Thm8       S_g  H->H  compact  IS double lim  (as Thm2)
    Prop3      S_g  H->H  compact  IS double lim  (sufficient: nu (U))
    Thm9.2     S_g  H->H  compact  K1 -> 0        (iff: nu (U), mu quasi-normal)
    Thm4/Thm10 S_g  B->B  K2 sup / -> 0
    Thm5/Thm11 S_g  H->B  K3 sup / -> 0           (iff: nu (U))
    Thm6/Thm12 S_g  B->H  K4 sup / -> 0           (iff: mu quasi-normal)
    Prop2/Prop4 S_g B->H  IB sup / double lim     (iff: log g in B, nu analytic)
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .criteria import (
    QuadSpec,
    boundedness_sup,
    compactness_double_limit,
    pointwise_quantity,
    sg_into_hinf_compact,
)
from .operators import (
    OPS,
    SPACES,
    SearchSpec,
    SymbolSpec,
    cauchy_constant,
    log_bloch_seminorm,
    make_symbol,
    opnorm_lower,
)
from .results import (
    COMPACT,
    DIVERGENT,
    FINITE,
    NONCOMPACT,
    NONZERO_LIMIT,
    ZERO_LIMIT,
    CriterionResult,
    _clean,
)
from .series import GridSpec
from .weights import LPSpec, RadialWeight, check_property_U, make_weight

SCHEMA = "volterra-report/1"
QUESTIONS = ("Bounded", "Compact")
BOUNDED, UNBOUNDED, IS_COMPACT, NOT_COMPACT, UNDECIDED = (
    "Bounded", "Unbounded", "Compact", "NotCompact", "Inconclusive")
FORMATS = ("json", "csv", "markdown")


# -- configuration ------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    levels: int = 14
    n_theta: int = 256
    substeps: int = 4
    quad_tol: float = 1e-6
    lp_degree: int = 32
    lp_samples: int = 24
    seed: int = 42
    search_degree: int = 8
    search_random: int = 8
    search_restarts: int = 3
    output: str | None = None
    format: str = "json"
    jobs: int | None = None

    def __post_init__(self):
        if self.levels < 6:
            raise ValueError("levels must be >= 6")
        if not self.quad_tol > 0:
            raise ValueError("quad_tol must be > 0")
        if min(self.n_theta, self.substeps, self.lp_degree, self.lp_samples,
               self.search_degree, self.search_restarts) < 1 or self.search_random < 0:
            raise ValueError("grid, LP and search sizes must be positive")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}")
        if self.jobs is not None and self.jobs < 1:
            raise ValueError("jobs must be >= 1")

    @classmethod
    def from_mapping(cls, d: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    def merged(self, **overrides) -> "RunConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def grid(self) -> GridSpec:
        return GridSpec(levels=self.levels, substeps=self.substeps, n_theta=self.n_theta)

    def quad(self) -> QuadSpec:
        return QuadSpec(tol=self.quad_tol, substeps=self.substeps)

    def lp(self) -> LPSpec:
        return LPSpec(degree=self.lp_degree, n_radii=self.lp_samples)

    def search(self) -> SearchSpec:
        return SearchSpec(degree=self.search_degree, n_random=self.search_random,
                          restarts=self.search_restarts, seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("output", "format", "jobs"):   # do not affect results
            d.pop(k)
        return d


# -- cases ----------------------------------------------------------------------------

def _canon(value, options, what):
    for o in options:
        if str(value).lower() == o.lower():
            return o
    raise ValueError(f"unknown {what} {value!r}; expected one of {', '.join(options)}")


@dataclass(frozen=True)
class CaseSpec:
    op_kind: str
    g: SymbolSpec
    nu: RadialWeight
    mu: RadialWeight
    domain_kind: str = "Hinf"
    codomain_kind: str = "Hinf"
    question: str = "Bounded"
    expect: str | None = None

    def __post_init__(self):
        if self.op_kind not in OPS or self.domain_kind not in SPACES \
                or self.codomain_kind not in SPACES or self.question not in QUESTIONS:
            raise ValueError("invalid case")
        if not isinstance(self.g, SymbolSpec) or not isinstance(self.nu, RadialWeight) \
                or not isinstance(self.mu, RadialWeight):
            raise TypeError("case needs a SymbolSpec and two RadialWeights")

    @classmethod
    def from_dict(cls, d: dict) -> "CaseSpec":
        allowed = {"op", "g", "nu", "mu", "domain", "codomain", "question", "expect"}
        extra = sorted(set(d) - allowed)
        if extra:
            raise ValueError(f"unknown case keys: {', '.join(extra)}")
        return cls(_canon(d.get("op", "Tg"), OPS, "operator"), make_symbol(d["g"]),
                   make_weight(d["nu"]), make_weight(d["mu"]),
                   _canon(d.get("domain", "Hinf"), SPACES, "space"),
                   _canon(d.get("codomain", "Hinf"), SPACES, "space"),
                   _canon(d.get("question", "Bounded"), QUESTIONS, "question"),
                   d.get("expect"))

    def to_dict(self) -> dict:
        d = {"op": self.op_kind, "g": self.g.name, "nu": self.nu.spec, "mu": self.mu.spec,
             "domain": self.domain_kind, "codomain": self.codomain_kind,
             "question": self.question}
        if self.expect is not None:
            d["expect"] = self.expect
        return d

    @property
    def tuple_key(self) -> tuple:
        return (self.op_kind, self.g.name, self.nu.spec, self.mu.spec,
                self.domain_kind, self.codomain_kind)

    @property
    def label(self) -> str:
        return (f"{self.op_kind}[{self.domain_kind}->{self.codomain_kind}] g={self.g.name} "
                f"nu={self.nu.spec} mu={self.mu.spec} {self.question}")


def standard_sweep(symbols=("identity", "neglog1mz", "zero"), alphas=(0.5, 1.0),
                   betas=(0.5, 1.0), ops=OPS, questions=QUESTIONS,
                   domain="Hinf", codomain="Hinf") -> list:
    """Cases over (g, nu = std:alpha, mu = std:beta) for each operator and question."""
    out = []
    for s in symbols:
        for a in alphas:
            for b in betas:
                for op in ops:
                    for q in questions:
                        out.append(CaseSpec.from_dict({
                            "op": op, "g": s, "nu": f"std:{a:g}", "mu": f"std:{b:g}",
                            "domain": domain, "codomain": codomain, "question": q}))
    return out


# -- criterion table ------------------------------------------------------------------

@dataclass(frozen=True)
class _Entry:
    cid: str
    kind: str
    mode: str
    requires: tuple = ()
    fallback: tuple | None = None          # (id, requires) of a sufficient-only reading
    upper: str | None = None               # how the value bounds the operator norm


_TABLE = {
    ("Tg", "Hinf", "Hinf", "Bounded"): (
        _Entry("Thm1", "IT", "Sup", ("log_gprime_B", "nu_analytic"), ("Rem1", ()), "value"),
        _Entry("Rem3", "K5", "Sup", ("mu_quasi_normal",))),
    ("Tg", "Hinf", "Hinf", "Compact"): (
        _Entry("Thm7", "IT", "DoubleLimit", ("log_gprime_B", "nu_analytic"), ("Rem5", ())),
        _Entry("Rem6", "K5", "BoundaryLimit", ("mu_quasi_normal",))),
    ("Sg", "Hinf", "Hinf", "Bounded"): (
        _Entry("Thm2", "IS", "Sup", ("log_g_B", "nu_analytic", "nu_quasi_normal"),
               ("Prop1", ("nu_U",)), "cauchy"),
        _Entry("Thm3", "K1", "Sup", ("nu_U", "mu_quasi_normal"))),
    ("Sg", "Hinf", "Hinf", "Compact"): (
        _Entry("Thm9.1", "g=0", "Exact", ("mu_is_one",)),
        _Entry("Thm8", "IS", "DoubleLimit", ("log_g_B", "nu_analytic", "nu_quasi_normal"),
               ("Prop3", ("nu_U",))),
        _Entry("Thm9.2", "K1", "BoundaryLimit", ("nu_U", "mu_quasi_normal"))),
    ("Sg", "Bloch", "Bloch", "Bounded"): (_Entry("Thm4", "K2", "Sup", (), None, "value"),),
    ("Sg", "Bloch", "Bloch", "Compact"): (_Entry("Thm10", "K2", "BoundaryLimit"),),
    ("Sg", "Hinf", "Bloch", "Bounded"): (_Entry("Thm5", "K3", "Sup", ("nu_U",), None, "cauchy"),),
    ("Sg", "Hinf", "Bloch", "Compact"): (_Entry("Thm11", "K3", "BoundaryLimit", ("nu_U",)),),
    ("Sg", "Bloch", "Hinf", "Bounded"): (
        _Entry("Thm6", "K4", "Sup", ("mu_quasi_normal",)),
        _Entry("Prop2", "IB", "Sup", ("log_g_B", "nu_analytic"), None, "value")),
    ("Sg", "Bloch", "Hinf", "Compact"): (
        _Entry("Thm12", "K4", "BoundaryLimit", ("mu_quasi_normal",)),
        _Entry("Prop4", "IB", "DoubleLimit", ("log_g_B", "nu_analytic"))),
}

_SPECIAL_IDS = {("Thm1", True): "Cor1", ("Thm2", True): "Cor2"}


def criteria_for(op_kind, domain_kind, codomain_kind, question) -> tuple:
    return _TABLE.get((op_kind, domain_kind, codomain_kind, question), ())


def valid_combinations() -> list:
    return [" ".join(k) for k in _TABLE]


def hypotheses(case: CaseSpec, grid: GridSpec | None = None) -> tuple[dict, dict]:
    """(flags, details): boolean hypothesis flags and the verdicts behind them."""
    lgp = log_bloch_seminorm("log_gprime", case.g, grid)
    lg = log_bloch_seminorm("log_g", case.g, grid)
    u = check_property_U(case.nu)
    flags = {
        "log_gprime_B": lgp.verdict == FINITE or case.g.univalent,
        "log_g_B": lg.verdict == FINITE,
        "nu_analytic": case.nu.analytic,
        "nu_U": bool(u.holds),
        "nu_quasi_normal": case.nu.quasi_normal_whitelisted,
        "mu_quasi_normal": case.mu.quasi_normal_whitelisted,
        "mu_is_one": case.mu.family == "one",
        "nu_typical": case.nu.typical,
    }
    details = {
        "log_gprime_B": {"verdict": lgp.verdict, "value": lgp.value,
                         "univalent": case.g.univalent},
        "log_g_B": {"verdict": lg.verdict, "value": lg.value},
        "nu_U": {"verdict": u.verdict, "value": u.value},
    }
    return flags, details


def _answer(question, verdict):
    if question == "Bounded":
        return {FINITE: BOUNDED, DIVERGENT: UNBOUNDED}.get(verdict, UNDECIDED)
    return {ZERO_LIMIT: IS_COMPACT, COMPACT: IS_COMPACT, NONZERO_LIMIT: NOT_COMPACT,
            NONCOMPACT: NOT_COMPACT}.get(verdict, UNDECIDED)


def _positive(question):
    return BOUNDED if question == "Bounded" else IS_COMPACT


def _evaluate(entry: _Entry, case: CaseSpec, grid, quad) -> CriterionResult:
    g, nu, mu = case.g, case.nu, case.mu
    if entry.mode == "Exact":
        val = float(np.max(np.abs(g.coeffs.coeffs)))
        zero = sg_into_hinf_compact(g)
        return CriterionResult("g=0", "Exact", val, ZERO_LIMIT if zero else NONZERO_LIMIT,
                               [val], {"max_abs_coeff": val}, {"g": g.name})
    if entry.kind.startswith("K"):
        return pointwise_quantity(entry.kind, g, nu, mu, entry.mode, grid)
    if entry.mode == "Sup":
        return boundedness_sup(entry.kind, g, nu, mu, grid, quad)
    return compactness_double_limit(entry.kind, g, nu, mu, grid, quad).as_result()


@dataclass
class CriterionRow:
    cid: str
    kind: str
    mode: str
    role: str                 # iff | sufficient | not-applicable
    requires: list
    failed: list
    result: CriterionResult | None = None
    answer: str | None = None     # None when not evaluated
    upper: str | None = None      # how a Finite value bounds the operator norm

    def to_dict(self) -> dict:
        return {"id": self.cid, "kind": self.kind, "mode": self.mode, "role": self.role,
                "requires": self.requires, "failed": self.failed, "answer": self.answer,
                "result": self.result.to_dict() if self.result else None}


@dataclass
class CaseReport:
    case: CaseSpec
    hypotheses: dict
    hypothesis_details: dict
    criteria: list
    norm: object
    consistency: dict
    verdict: str
    governing: str
    note: str = ""

    @property
    def evaluated(self) -> list:
        return [r for r in self.criteria if r.result is not None]

    def row(self, cid: str) -> CriterionRow:
        for r in self.criteria:
            if r.cid == cid:
                return r
        raise KeyError(cid)

    def to_dict(self) -> dict:
        return _clean({
            "schema": SCHEMA,
            "case": self.case.to_dict(),
            "hypotheses": self.hypotheses,
            "hypothesis_details": self.hypothesis_details,
            "criteria": [r.to_dict() for r in self.criteria],
            "norm": self.norm.to_dict() if self.norm is not None else None,
            "consistency": self.consistency,
            "verdict": self.verdict,
            "governing": self.governing,
            "note": self.note,
        })


def _disagreements(rows) -> list:
    """Pairs of applicable criteria that reach opposite definite answers."""
    out = []
    definite = [r for r in rows if r.answer != UNDECIDED]
    for i, a in enumerate(definite):
        for b in definite[i + 1:]:
            if a.answer == b.answer:
                continue
            # a sufficient-only row has no negative reading; it only counts when positive
            if (a.role == "sufficient" and b.role == "sufficient"):
                continue
            out.append(f"{a.cid}={a.answer} vs {b.cid}={b.answer}")
    return out


def run_case(case: CaseSpec, config: RunConfig | None = None) -> CaseReport:
    config = config or RunConfig()
    grid, quad = config.grid(), config.quad()
    flags, details = hypotheses(case, grid)
    rows = []
    for e in criteria_for(case.op_kind, case.domain_kind, case.codomain_kind, case.question):
        failed = [h for h in e.requires if not flags[h]]
        if not failed:
            cid, role, req = _SPECIAL_IDS.get((e.cid, flags["mu_is_one"]), e.cid), "iff", e.requires
        elif e.fallback and all(flags[h] for h in e.fallback[1]):
            cid, role, req = e.fallback[0], "sufficient", e.fallback[1]
        else:
            rows.append(CriterionRow(e.cid, e.kind, e.mode, "not-applicable",
                                     list(e.requires), failed))
            continue
        res = _evaluate(e, case, grid, quad)
        ans = _answer(case.question, res.verdict)
        if role == "sufficient" and ans != _positive(case.question):
            ans = UNDECIDED
        rows.append(CriterionRow(cid, e.kind, e.mode, role, list(req), failed, res, ans, e.upper))

    norm = opnorm_lower(case.op_kind, case.g, case.nu, case.mu, case.domain_kind,
                        case.codomain_kind, config.search())
    uppers = []
    for r in rows:
        how = r.upper
        if how and r.result is not None and r.result.verdict == FINITE:
            scale = cauchy_constant(case.nu) if how == "cauchy" else 1.0
            uppers.append(scale * r.result.value)
    norm.criterion_upper = min(uppers) if uppers else None

    disagreements = _disagreements([r for r in rows if r.result is not None])
    iff = [r for r in rows if r.role == "iff" and r.answer != UNDECIDED]
    suff = [r for r in rows if r.role == "sufficient" and r.answer != UNDECIDED]
    note = ""
    if iff:
        verdict, governing = iff[0].answer, iff[0].cid
    elif suff:
        verdict, governing = suff[0].answer, suff[0].cid
        note = f"sufficient-only: {governing}"
    else:
        verdict, governing = UNDECIDED, "none"
        applicable = [r for r in rows if r.result is not None]
        missing = sorted({h for r in rows for h in r.failed})
        if not rows:
            note = "no criterion covers this operator and pair of spaces"
        elif not applicable:
            note = "no applicable criterion; failed hypotheses: " + (", ".join(missing) or "none")
        else:
            note = "applicable criteria were inconclusive"
            if missing:
                note += "; failed hypotheses: " + ", ".join(missing)
    consistency = {
        "disagreements": disagreements,
        "norm_domination": norm.consistent(),
        "expect_mismatch": case.expect is not None and case.expect != verdict,
    }
    return CaseReport(case, flags, details, rows, norm, consistency, verdict, governing, note)


# -- batches ------------------------------------------------------------------------------

def _run_from_dict(args):
    case_d, cfg_d = args
    return run_case(CaseSpec.from_dict(case_d), RunConfig(**cfg_d)).to_dict()


def _round_trips(case: CaseSpec) -> bool:
    try:
        CaseSpec.from_dict(case.to_dict())
    except (ValueError, KeyError):
        return False
    return True


def run_cases(cases, config: RunConfig | None = None, jobs: int | None = None) -> list:
    """Run every case; returns report dicts in input order.

    Parallel runs rebuild each case from its spec strings in the worker, so
    cases built from custom callables are run in-process.
    """
    config = config or RunConfig()
    jobs = jobs or config.jobs or (os.cpu_count() or 1)
    cases = list(cases)
    if jobs == 1 or len(cases) < 2 or not all(_round_trips(c) for c in cases):
        return [run_case(c, config).to_dict() for c in cases]
    cfg = asdict(config)
    with ProcessPoolExecutor(max_workers=min(jobs, len(cases))) as ex:
        return list(ex.map(_run_from_dict, [(c.to_dict(), cfg) for c in cases]))


@dataclass
class EquivalenceMatrix:
    rows: list
    coherence: list = field(default_factory=list)

    @property
    def n_flags(self) -> int:
        return sum(1 for r in self.rows if r["disagreement"]) + len(self.coherence)

    def to_dict(self) -> dict:
        return _clean({"rows": self.rows, "coherence": self.coherence,
                       "disagreement_flags": self.n_flags})


def equivalence_matrix(cases, config: RunConfig | None = None, reports=None,
                       jobs: int | None = None) -> EquivalenceMatrix:
    """One row of per-criterion answers per case plus cross-question coherence.

    A row is flagged when two applicable criteria give opposite definite
    answers; a tuple is flagged when it is Compact but not Bounded.
    """
    cases = list(cases)
    if not cases:
        raise ValueError("no cases")
    if reports is None:
        reports = run_cases(cases, config, jobs)
    rows, by_tuple = [], {}
    for case, rep in zip(cases, reports):
        answers = {c["id"]: c["answer"] for c in rep["criteria"] if c["result"] is not None}
        dis = rep["consistency"]["disagreements"]
        rows.append({"case": case.label, "answers": answers, "verdict": rep["verdict"],
                     "governing": rep["governing"], "disagreement": bool(dis),
                     "details": dis})
        by_tuple.setdefault(case.tuple_key, {})[case.question] = rep["verdict"]
    coherence = []
    for key, v in by_tuple.items():
        if v.get("Compact") == IS_COMPACT and v.get("Bounded") == UNBOUNDED:
            coherence.append("Compact but Unbounded: " + " ".join(key))
    return EquivalenceMatrix(rows, coherence)


# -- serialisation -----------------------------------------------------------------------

def _as_dicts(report) -> list:
    items = report if isinstance(report, (list, tuple)) else [report]
    return [r.to_dict() if isinstance(r, CaseReport) else r for r in items]


def to_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n"


CSV_COLUMNS = ("case", "criterion", "role", "kind", "mode", "value", "verdict", "answer",
               "case_verdict", "governing")


def emit_report(report, fmt: str = "json") -> str:
    """Serialise one CaseReport (or a list of them / their dicts)."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    docs = _as_dicts(report)
    if fmt == "json":
        return to_json(docs[0] if not isinstance(report, (list, tuple)) else docs)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for d in docs:
            label = CaseSpec.from_dict(d["case"]).label if _spec_ok(d["case"]) else str(d["case"])
            for c in d["criteria"]:
                if c["result"] is None:
                    continue
                w.writerow([label, c["id"], c["role"], c["kind"], c["mode"],
                            c["result"]["value"], c["result"]["verdict"], c["answer"],
                            d["verdict"], d["governing"]])
        return buf.getvalue()
    return "\n".join(_markdown(d) for d in docs)


def _spec_ok(case_d) -> bool:
    try:
        CaseSpec.from_dict(case_d)
        return True
    except (ValueError, KeyError):
        return False


def _markdown(d: dict) -> str:
    c = d["case"]
    lines = [f"## {c['op']}: {c['domain']} -> {c['codomain']} ({c['question']})", "",
             f"g = `{c['g']}`, nu = `{c['nu']}`, mu = `{c['mu']}`", "",
             f"**Verdict:** {d['verdict']} (governing: {d['governing']})", ""]
    if d["note"]:
        lines += [f"_{d['note']}_", ""]
    lines += ["| hypothesis | holds |", "|---|---|"]
    lines += [f"| {k} | {v} |" for k, v in sorted(d["hypotheses"].items())]
    lines += ["", "| criterion | role | kind | mode | value | verdict | answer |",
              "|---|---|---|---|---|---|---|"]
    for r in d["criteria"]:
        if r["result"] is None:
            lines.append(f"| {r['id']} | {r['role']} (failed: {', '.join(r['failed'])}) "
                         f"| {r['kind']} | {r['mode']} | | | |")
        else:
            lines.append(f"| {r['id']} | {r['role']} | {r['kind']} | {r['mode']} "
                         f"| {r['result']['value']} | {r['result']['verdict']} | {r['answer']} |")
    n = d["norm"]
    if n is not None:
        lines += ["", f"Norm lower bound: {n['lower']} (criterion upper: {n['criterion_upper']})"]
    dis = d["consistency"]["disagreements"]
    lines += ["", "Disagreements: " + ("; ".join(dis) if dis else "none"), ""]
    return "\n".join(lines)
