"""Every acceptance criterion at its stated tolerance; one PASS/FAIL line each.

The lines are printed in pytest's terminal summary; ``stable-stats verify``
runs the same checks and emits JSON.
"""

import pytest

from stable_stats.acceptance import CHECKS

LINES: dict[int, str] = {}


@pytest.mark.parametrize("check_id", sorted(CHECKS))
def test_criterion(check_id):
    result = CHECKS[check_id]()
    LINES[check_id] = result.line()
    assert result.passed, result.line()
