import re
from pathlib import Path

import numpy as np
import pytest

ACCEPTANCE_LINES: list[dict] = []
ACCEPTANCE_JSON = Path(__file__).resolve().parent.parent / "acceptance_results.json"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; printed at the end
    of the session and written to ``acceptance_results.json``."""

    def record(criterion: str, ok: bool, detail: str, **values):
        line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        ACCEPTANCE_LINES.append({"criterion": criterion, "pass": bool(ok), "detail": detail, **values})
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    rows = sorted(ACCEPTANCE_LINES, key=_order)
    for row in rows:
        terminalreporter.write_line(f"criterion {row['criterion']}: {'PASS' if row['pass'] else 'FAIL'}  "
                                    f"{row['detail']}")
    from rydberg3b.export import write_json
    write_json(ACCEPTANCE_JSON, rows)


def _order(row):
    num, rest = re.match(r"(\d+)(.*)", row["criterion"]).groups()
    return int(num), rest
