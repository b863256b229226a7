import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from affine_sc.geometry import AffineSubspace  # noqa: E402


def line(offset, direction):
    return AffineSubspace(np.array(offset, float), np.array(direction, float).reshape(-1, 1))


def point(p):
    return AffineSubspace(np.array(p, float), np.zeros((len(p), 0)))


@pytest.fixture
def skew_lines():
    """x-axis line at y=0.5 and z-axis line at y=0.25: skew, origin in the hull."""
    return line([0, 0.5, 0], [1, 0, 0]), line([0, 0.25, 0], [0, 0, 1])


@pytest.fixture
def crossing_lines():
    """Two lines meeting at (0, 0.5, 0)."""
    return line([0, 0.5, 0], [1, 0, 0]), line([0, 0.5, 0], [0, 0, 1])


@pytest.fixture
def line_and_point():
    """Line at y=0.5 and a point at z=0.5; the hull misses the origin."""
    return line([0, 0.5, 0], [1, 0, 0]), point([0, 0, 0.5])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_instance(rng, D, N):
    X = rng.standard_normal((D, N))
    return X / np.linalg.norm(X, axis=0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "VERDICTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[k])
