"""The twelve acceptance criteria at their stated tolerances and runtime budgets."""
import json

import pytest

from conftest import ACCEPTANCE_LINES
from minannuli.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"{c.number:02d}-{c.title.replace(' ', '-')}" for c in CRITERIA])
def test_criterion(criterion):
    res = criterion()
    ACCEPTANCE_LINES.append(res.line())
    print(res.line())
    assert res.passed, json.dumps(res.to_dict(), indent=1, default=str)
