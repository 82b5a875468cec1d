import numpy as np
import pytest

from bstunnel.geometry import TunnelGeometry, build_layout


@pytest.fixture
def geom():
    return TunnelGeometry(H=5.3, W=4.8, L=40.0, H_t=4.9, H_r=3.4)


@pytest.fixture
def unit_layout():
    """Single tag whose distances give c_1 = 1 (d_f = d_g = 1, alpha = 2)."""
    from dataclasses import replace

    lay = build_layout(TunnelGeometry(), 1, 20.0)
    one = np.ones(1)
    return replace(lay, c=one, w=one, d_f=one, d_g=one)


def pytest_configure(config):
    np.seterr(over="raise", invalid="raise")


def pytest_terminal_summary(terminalreporter):
    from .acceptance_log import RESULTS, format_line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        terminalreporter.write_line(format_line(number, *RESULTS[number]))
