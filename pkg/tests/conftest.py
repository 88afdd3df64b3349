"""Per-criterion PASS/FAIL summary for the acceptance suite.

Acceptance tests carry ``@pytest.mark.criterion(n, "title")``. Every test of a
criterion must pass for the criterion to pass; tests may attach a short
measurement string with the ``acceptance_note`` fixture.
"""

import pytest

_results = {}  # n -> {"title", "ok", "notes"}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.fixture
def acceptance_note(request):
    def note(text):
        request.node.user_properties.append(("note", text))

    return note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    entry = _results.setdefault(n, {"title": title, "ok": True, "notes": [], "ran": False})
    if report.when == "call":
        entry["ran"] = True
    if report.failed or (report.when == "call" and report.skipped):
        entry["ok"] = False
    if report.when == "call":
        entry["notes"].extend(v for k, v in item.user_properties if k == "note")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_results):
        r = _results[n]
        status = "PASS" if r["ok"] and r["ran"] else "FAIL"
        notes = "; ".join(r["notes"])
        tr.write_line(f"criterion {n:2d} {status}  {r['title']}" + (f"  [{notes}]" if notes else ""))
