from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from conelab import new_measure

settings.register_profile("conelab", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("conelab")

small_rationals = st.builds(
    Fraction, st.integers(min_value=-12, max_value=12), st.integers(min_value=1, max_value=4)
)
nonzero_weights = st.builds(
    Fraction, st.integers(min_value=-5, max_value=5).filter(bool), st.integers(min_value=1, max_value=3)
)


def measures(dim: int, max_atoms: int = 5, min_atoms: int = 1):
    """Exact measures; a few draws may cancel to zero, callers filter when needed."""
    atom = st.tuples(st.tuples(*[small_rationals] * dim), nonzero_weights)
    return st.lists(atom, min_size=min_atoms, max_size=max_atoms).map(lambda atoms: new_measure(dim, atoms))


def nonzero_measures(dim: int, max_atoms: int = 5):
    return measures(dim, max_atoms).filter(lambda m: not m.is_zero)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_criterion():
    def record(number: int, passed: bool, detail: str) -> str:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
