import numpy as np
from hypothesis import strategies as st

from l1line import DataSet


@st.composite
def datasets(draw, min_m=3, max_m=9, weighted=False, integer=False, distinct_t=True):
    """Small data sets; values on a coarse grid so ties and degeneracy show up."""
    m = draw(st.integers(min_m, max_m))
    if distinct_t:
        t = draw(st.lists(st.integers(-20, 20), min_size=m, max_size=m, unique=True))
    else:
        t = draw(st.lists(st.integers(-5, 5), min_size=m, max_size=m).filter(lambda v: len(set(v)) > 1))
    if integer:
        d = draw(st.lists(st.integers(-10, 10), min_size=m, max_size=m))
    else:
        d = [x / 10 for x in draw(st.lists(st.integers(-500, 500), min_size=m, max_size=m))]
    w = None
    if weighted:
        w = draw(st.lists(st.integers(1, 4), min_size=m, max_size=m))
    return DataSet(np.array(t, float), np.array(d, float), None if w is None else np.array(w, float))


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
