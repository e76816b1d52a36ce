import itertools
import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def crossing_by_quadruples(blocks):
    """Independent oracle: a crossing is i<j<k<l with i~k, j~l in different blocks."""
    label = {x: b for b, block in enumerate(blocks) for x in block}
    pts = sorted(label)
    for i, j, k, l in itertools.combinations(pts, 4):
        if label[i] == label[k] and label[j] == label[l] and label[i] != label[j]:
            return True
    return False


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
