"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -v``
or ``-s``).  The two default scans are shared through one validation context, so
their cost is charged to the first criterion that needs them.
"""

import json

import pytest

from cavityent.validation import CHECKS, ValidationContext, run_check


@pytest.fixture(scope="module")
def ctx():
    return ValidationContext()


def _summary(detail: dict) -> str:
    text = json.dumps(detail, default=float)
    return text if len(text) <= 240 else text[:237] + "..."


@pytest.mark.parametrize("name", list(CHECKS))
def test_criterion(name, ctx, capsys):
    result = run_check(name, ctx)
    in_time = result.limit_seconds is None or result.seconds <= result.limit_seconds
    ok = result.passed and in_time
    record = result.as_dict()
    limit = f"/{result.limit_seconds:g}s" if result.limit_seconds else ""
    line = (
        f"{'PASS' if ok else 'FAIL'} criterion {result.criterion:2d} {name} "
        f"[{result.seconds:.2f}s{limit}] {_summary(record['detail'])}"
    )
    with capsys.disabled():
        print("\n" + line)
    assert result.passed, line
    assert in_time, f"runtime {result.seconds:.2f}s exceeds {result.limit_seconds}s"
