import itertools

import numpy as np
import pytest

ACCEPTANCE_RESULTS = {}


def ref_splitmix64(seed, count):
    """Textbook SplitMix64, kept independent of the package implementation."""
    out = []
    x = seed % 2**64
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) % 2**64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) % 2**64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) % 2**64
        out.append(z ^ (z >> 31))
    return out


def ref_mix(value):
    # one SplitMix64 output from state (value - gamma) equals mix(value)
    return ref_splitmix64((value - 0x9E3779B97F4A7C15) % 2**64, 1)[0]


def brute_force_inertia(points, k=2):
    """Minimum within-cluster sum of squares over every labeling into at most k groups."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    best = np.inf
    for labels in itertools.product(range(k), repeat=len(pts)):
        labels = np.array(labels)
        total = 0.0
        for j in range(k):
            members = pts[labels == j]
            if len(members):
                total += ((members - members.mean(axis=0)) ** 2).sum()
        best = min(best, total)
    return best


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])


@pytest.fixture
def record_criterion():
    def record(number, status, detail):
        ACCEPTANCE_RESULTS[number] = f"criterion {number}: {status} - {detail}"
        print(ACCEPTANCE_RESULTS[number])

    return record
