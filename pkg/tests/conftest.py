import sys

import pytest
from hypothesis import settings

from homapprox.fixtures import fixture

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")


@pytest.fixture(scope="session")
def rings():
    return {name: fixture(name) for name in ("R1", "R2", "R3", "R4", "R5")}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for r in results:
        ok = r["ok"] and r.get("passed", True)
        secs = "n/a" if r["seconds"] is None else f"{r['seconds']:.1f} s"
        limit = "no limit" if r["limit"] is None else f"limit {r['limit']} s"
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {r['label']}  ({secs}, {limit})")
