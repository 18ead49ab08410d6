"""Criterion results and the rules that turn level sequences into verdicts."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

CAP = 1e6
GROWTH_FACTOR = 1.2
FINITE_RTOL = 1e-3
ZERO_TOL_REL = 1e-3
ZERO_TOL_ABS = 1e-10

FINITE = "Finite"
DIVERGENT = "Divergent"
ZERO_LIMIT = "ZeroLimit"
NONZERO_LIMIT = "NonzeroLimit"
INCONCLUSIVE = "Inconclusive"
COMPACT = "Compact-consistent"
NONCOMPACT = "Noncompact-consistent"


def _clean(x):
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.12g}")
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, str):     # numpy scalars
        return _clean(x.item())
    return x


@dataclass
class CriterionResult:
    kind: str
    mode: str
    value: float
    verdict: str
    history: list
    witness: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    note: str = ""

    def __post_init__(self):
        if not self.history:
            raise ValueError("history must be nonempty")

    @property
    def finite(self) -> bool:
        return self.verdict in (FINITE, ZERO_LIMIT, COMPACT)

    def to_dict(self) -> dict:
        """JSON-ready record; floats rounded to 12 significant digits."""
        return _clean(asdict(self))


def sup_verdict(levels) -> tuple[str, str]:
    """Finite / Divergent / Inconclusive from a nondecreasing level sequence.

    Divergent needs either magnitude past ``CAP`` with growth factor >= 1.2
    over the last three levels, or four positive, non-decaying increments
    (each at least 0.95 of the previous) that are not negligible.
    """
    v = [float(x) for x in levels]
    last = v[-1]
    if math.isinf(last):
        return DIVERGENT, "infinite value on the grid"
    if len(v) >= 4:
        if last > CAP and v[-4] > 0 and last / v[-4] >= GROWTH_FACTOR:
            return DIVERGENT, "exceeds cap with geometric growth"
        if len(v) >= 5:
            inc = [v[i + 1] - v[i] for i in range(len(v) - 5, len(v) - 1)]
            if (all(d > 0 for d in inc)
                    and all(inc[i + 1] >= 0.95 * inc[i] for i in range(3))
                    and inc[-1] >= 1e-3 * max(1.0, abs(last))):
                return DIVERGENT, "non-decaying increments across the last 4 levels"
        scale = max(abs(last), 1e-300)
        if last == 0.0 or (last - v[-4]) / scale <= FINITE_RTOL:
            return FINITE, ""
    elif last == 0.0:
        return FINITE, ""
    return INCONCLUSIVE, "level sequence neither stable nor clearly growing"


def limit_verdict(levels) -> tuple[str, str]:
    """ZeroLimit / NonzeroLimit / Inconclusive from per-level maxima."""
    v = [float(x) for x in levels]
    if len(v) < 4:
        return INCONCLUSIVE, "too few levels"
    if any(math.isinf(x) for x in v[-3:]):
        return NONZERO_LIMIT, "infinite near the boundary"
    peak = max(v)
    tol = max(ZERO_TOL_REL * peak, ZERO_TOL_ABS)
    tail = v[-4:]
    decreasing = all(tail[i + 1] < tail[i] for i in range(3)) or peak == 0.0
    if decreasing:
        if tail[-1] <= tol:
            return ZERO_LIMIT, ""
        return INCONCLUSIVE, "decreasing but still above tolerance at the last level"
    if tail[-1] > tol and tail[-1] >= 0.9 * max(tail):
        return NONZERO_LIMIT, ""
    return INCONCLUSIVE, "tail is not monotone"


def double_limit_verdict(profile, floor_rel: float = 0.1) -> tuple[str, str]:
    """Compact- / Noncompact-consistent / Inconclusive from C(m), m = 4, 5, ...

    Compact needs C(last) < 0.05 max(C(first), 1e-12) and a nonincreasing tail;
    Noncompact needs the last four values above ``floor_rel`` * max with no
    decaying trend.
    """
    c = [float(x) for x in profile]
    if len(c) < 5:
        return INCONCLUSIVE, "too few levels"
    tail = c[-4:]
    nonincreasing = all(tail[i + 1] <= tail[i] * (1 + 1e-9) + 1e-300 for i in range(3))
    if c[-1] < 0.05 * max(c[0], 1e-12) and nonincreasing:
        return COMPACT, ""
    peak = max(c)
    if peak > 0 and min(tail) > floor_rel * peak:
        ratios = [tail[i + 1] / tail[i] for i in range(3)]
        if min(ratios) > 0.9:
            return NONCOMPACT, ""
    return INCONCLUSIVE, "profile neither vanishing nor stable"
