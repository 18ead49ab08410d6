import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_weighted.results import (
    CriterionResult,
    double_limit_verdict,
    limit_verdict,
    sup_verdict,
)


def test_sup_verdicts():
    assert sup_verdict([0, 0.5, 0.9, 1.0, 1.0, 1.0, 1.0])[0] == "Finite"
    assert sup_verdict([0.0] * 6)[0] == "Finite"
    assert sup_verdict([m * math.log(2) for m in range(15)])[0] == "Divergent"
    assert sup_verdict([2.0 ** m for m in range(15)])[0] == "Divergent"
    assert sup_verdict([1, 2, math.inf])[0] == "Divergent"
    # converging, but still moving by more than the tolerance
    assert sup_verdict([1 - 2.0 ** (-m / 2) for m in range(15)])[0] == "Inconclusive"


def test_cap_rule():
    v = [1e6 * 1.1 ** m for m in range(8)]
    v[-4:] = [2e6, 2.1e6, 2.2e6, 2.5e6]
    assert sup_verdict(v)[0] == "Divergent"


def test_limit_verdicts():
    assert limit_verdict([2.0 ** -m for m in range(15)])[0] == "ZeroLimit"
    assert limit_verdict([0.0] * 6)[0] == "ZeroLimit"
    assert limit_verdict([2 - 2.0 ** -m for m in range(15)])[0] == "NonzeroLimit"
    # decreasing but far from zero at the last level
    assert limit_verdict([1 + 2.0 ** -m for m in range(15)])[0] == "Inconclusive"
    assert limit_verdict([1, 2])[0] == "Inconclusive"


def test_double_limit_verdicts():
    assert double_limit_verdict([4.0 ** -m for m in range(9)])[0] == "Compact-consistent"
    assert double_limit_verdict([1.0] * 9)[0] == "Noncompact-consistent"
    assert double_limit_verdict([2.0 ** (-m / 4) for m in range(9)])[0] == "Inconclusive"
    assert double_limit_verdict([1, 1])[0] == "Inconclusive"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 100), st.integers(8, 20))
def test_constant_sequences_are_finite_and_nonzero(c, n):
    assert sup_verdict([c] * n)[0] == "Finite"
    assert limit_verdict([c] * n)[0] == "NonzeroLimit"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 10), st.integers(8, 20))
def test_linear_growth_diverges(slope, n):
    assert sup_verdict([slope * m for m in range(n)])[0] == "Divergent"


def test_result_serialisation():
    r = CriterionResult("IT", "Sup", math.inf, "Divergent", [1.0, math.inf],
                        {"t": np.float64(0.5)}, {"nu": "one"})
    d = r.to_dict()
    assert d["value"] == "inf" and d["witness"]["t"] == 0.5
    json.dumps(d)
    assert not r.finite
    assert CriterionResult("K1", "Sup", 1 / 3, "Finite", [1 / 3]).to_dict()["value"] == 0.333333333333
    with pytest.raises(ValueError):
        CriterionResult("IT", "Sup", 0.0, "Finite", [])
