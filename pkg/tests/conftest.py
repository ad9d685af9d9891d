import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def arbiter_path():
    return ROOT / "specs" / "arbiter.spec"


@pytest.fixture
def arbiter():
    from specrepair.harness import load_spec_file
    return load_spec_file(ROOT / "specs" / "arbiter.spec").spec


# -- acceptance criteria: one pass/fail line per criterion in the terminal summary --

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Mutable note a criterion test fills with its measured numbers."""
    note = {"detail": ""}
    request.node._criterion = note
    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and (rep.when == "call" or rep.failed):
        detail = getattr(item, "_criterion", {}).get("detail", "")
        if rep.failed and rep.when == "setup":
            detail = f"setup error: {call.excinfo.value!r}" if call.excinfo else "setup error"
        ACCEPTANCE[marker.args[0]] = (rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key} {'PASS' if passed else 'FAIL'}  {detail}")
