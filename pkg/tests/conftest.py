import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from descshot.core import LabeledScores


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def labeled(labels, scores) -> LabeledScores:
    labels = np.asarray(labels)
    ids = tuple(f"i{k}" for k in range(len(labels)))
    return LabeledScores(ids, labels, np.asarray(scores, dtype=np.float64))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", "call") != "call":
                continue
            if "test_acceptance.py" in rep.nodeid:
                rows.append((rep.nodeid.split("::")[-1], outcome))
    if rows:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in rows:
            status = "PASS" if outcome == "passed" else "FAIL"
            terminalreporter.write_line(f"{status}  {name}")
