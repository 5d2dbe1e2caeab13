import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from treechernoff.tree_model import GaussianTree, random_graft, random_tree  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


@pytest.fixture
def chain():
    """Chain 1-2-3 with weights 0.5 and 0.6."""
    return GaussianTree(3, [(1, 2, 0.5), (2, 3, 0.6)])


def random_pairs(count, n_max=10, seed=0, n_min=3):
    rng = np.random.default_rng(seed)
    pairs = []
    while len(pairs) < count:
        n = int(rng.integers(n_min, n_max + 1))
        tree = random_tree(n, rng)
        pairs.append(random_graft(tree, rng))
    return pairs


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Log one PASS/FAIL line per acceptance criterion, then assert it."""

    def _record(number, passed, detail):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number:>2}: {status}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
