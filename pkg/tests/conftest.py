import numpy as np
import pytest

from losdof import ArrayAperture, Link, freq2wlen, sample_grid

L_FIG2 = 0.2
D_FIG2 = 2.0


def ula_link(frequency=300e9, L=L_FIG2, D=D_FIG2):
    ap = ArrayAperture("interval", (L,))
    return Link(float(freq2wlen(frequency)), D, ap, ap)


def ula_grids(link, count):
    return sample_grid(link.source, count), sample_grid(link.receive, count)


def random_complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
