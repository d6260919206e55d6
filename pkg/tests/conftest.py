import pytest

from cavityheat.model import CavityParams, ResistorParams, SystemParams

BASE_L = 6.4e-3
BASE_C = 130e-12
BASE_Z0 = 60.1
BASE_R_LOSS = 2e-3
BASE_VOLUME = 2.25e-20
BASE_SIGMA = 3e9
BASE_GAMMA = {230.0: 1.53e9, 2.3: 1.53e7}

_acceptance_lines = []


def baseline_cavity(loss=BASE_R_LOSS):
    return CavityParams.from_impedance(BASE_L, BASE_C, BASE_Z0, loss)


def baseline_params(resistance=230.0, bath_temperature=0.04, explicit=True, loss=BASE_R_LOSS,
                 positions=(0.1, 0.9), **kw):
    override = BASE_GAMMA[resistance] if explicit else None
    r1 = ResistorParams(resistance, positions[0], BASE_VOLUME, BASE_SIGMA, override)
    r2 = ResistorParams(resistance, positions[1], BASE_VOLUME, BASE_SIGMA, override)
    return SystemParams(baseline_cavity(loss), r1, r2, bath_temperature, **kw)


@pytest.fixture
def params():
    return baseline_params()


@pytest.fixture
def acceptance_report():
    def report(label, ok, detail=""):
        _acceptance_lines.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
