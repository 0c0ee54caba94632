import pytest

# (criterion number, label, passed, detail) rows filled in by test_acceptance.py
ACCEPTANCE: list[tuple[int, str, bool, str]] = []


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-scale slow Monte Carlo tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="full-scale run; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    by_number: dict[int, list] = {}
    for number, label, passed, detail in ACCEPTANCE:
        by_number.setdefault(number, []).append((label, passed, detail))
    for number in sorted(by_number):
        rows = by_number[number]
        ok = all(passed for _, passed, _ in rows)
        if len(rows) == 1:
            label, details = rows[0][0], rows[0][2]
        else:
            label = rows[0][0].split(":")[0]
            details = ", ".join(f"{lab.split(': ', 1)[-1]} {'ok' if passed else 'FAIL'}" for lab, passed, _ in rows)
        terminalreporter.write_line(f"criterion {number} {'PASS' if ok else 'FAIL'}  {label}  [{details}]")
