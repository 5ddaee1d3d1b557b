import numpy as np
import pytest

from hopcap import ChannelSpec, place_nodes

# acceptance-criterion results, printed in the terminal summary
_criterion_lines: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {number}: {status} - {title}"
    if detail:
        line += f" ({detail})"
    _criterion_lines.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criterion_lines):
            terminalreporter.write_line(line)


@pytest.fixture
def no_fading():
    return ChannelSpec(fading="none", alpha=4.0, k_threshold=20.0)


@pytest.fixture
def rayleigh():
    return ChannelSpec(fading="rayleigh", alpha=4.0, k_threshold=20.0)


@pytest.fixture
def small_net():
    return place_nodes(25, 1.0, seed=1234)


@pytest.fixture
def collinear_net():
    """Three nodes on a line at x = 0, 1, 2."""
    from hopcap import NetworkInstance
    positions = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    return NetworkInstance(positions=positions, disk_radius=2.0, seed=0)
