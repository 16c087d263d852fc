import numpy as np
import pytest

from gmamm import SecurityParams, two_security_model

# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE: dict[int, dict] = {}


def record(criterion: int, title: str, part: str, passed: bool, detail: str = ""):
    entry = ACCEPTANCE.setdefault(criterion, {"title": title, "parts": []})
    entry["parts"].append((part, bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        entry = ACCEPTANCE[k]
        ok = all(p for _, p, _ in entry["parts"])
        tr.write_line(f"criterion {k} {'PASS' if ok else 'FAIL'}: {entry['title']}")
        for part, passed, detail in entry["parts"]:
            mark = "ok  " if passed else "FAIL"
            tr.write_line(f"    [{mark}] {part}" + (f" ({detail})" if detail else ""))


def grid_points(count: int = 500, seed: int = 20240917):
    """Random (gamma1, gamma2, phi) with phi spanning both sides of 1/2, endpoints included."""
    rng = np.random.default_rng(seed)
    g = rng.uniform(0.02, 0.98, size=(count, 2))
    phi = rng.uniform(0.0, 1.0, size=count)
    phi[0], phi[1] = 0.0, 1.0
    phi[phi == 0.5] = 0.25
    return [(float(a), float(b), float(f)) for (a, b), f in zip(g, phi)]


@pytest.fixture(scope="session")
def grid():
    return grid_points()


@pytest.fixture(scope="session")
def example_market():
    """gamma = (0.5, 0.5), phi = 0.9, p = 50, r = 1."""
    model = two_security_model(0.9)
    params = (SecurityParams(50.0, 1.0, 0.5, 0), SecurityParams(50.0, 1.0, 0.5, 1))
    return model, params
