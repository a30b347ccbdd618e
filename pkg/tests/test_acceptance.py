"""Acceptance suite: one test per criterion, each enforcing its oracle
values and its runtime budget and printing a single pass/fail line."""
import time

import pytest

from torsite.acceptance import CRITERIA


@pytest.mark.parametrize(
    "number,name,fn,limit",
    CRITERIA,
    ids=[f"criterion_{n:02d}_{name.replace(' ', '_')}" for n, name, _, _ in CRITERIA],
)
def test_criterion(number, name, fn, limit, capsys):
    start = time.perf_counter()
    try:
        detail = fn()
        ok = True
    except AssertionError as exc:
        detail = str(exc)
        ok = False
    seconds = time.perf_counter() - start
    status = "PASS" if ok and seconds <= limit else "FAIL"
    with capsys.disabled():
        print(
            f"\ncriterion {number:2d} [{status}] {seconds:7.2f}s / {limit:.0f}s  {name}: {detail}"
        )
    assert ok, f"criterion {number} failed: {detail}"
    assert seconds <= limit, f"criterion {number} exceeded {limit:.0f}s ({seconds:.2f}s)"
