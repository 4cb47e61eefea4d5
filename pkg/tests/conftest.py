import os

import pytest
from hypothesis import HealthCheck, settings

from mmwsec import SystemConfig

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def cfg20():
    """Moderate-SNR reference scenario: 20 dBm, L_d = L_e = 20, lambda = 1e-5."""
    return SystemConfig(p_dbm=20.0, l_d=20, l_e=20, lambda_e=1e-5)


@pytest.fixture
def an_cfg20(cfg20):
    return cfg20.replace(eta=0.5)


# --- acceptance reporting ---------------------------------------------------

_ACCEPTANCE: dict[int, tuple[bool, list[str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one acceptance criterion per test (slow)")


@pytest.fixture
def acceptance():
    """Record ``(name, ok, detail)`` checks for a criterion and assert they all hold."""

    def record(number, checks, info=""):
        ok = all(c[1] for c in checks)
        lines = [f"{'ok  ' if c[1] else 'FAIL'} {c[2]}" for c in checks]
        if info:
            lines.append(f"info {info}")
        _ACCEPTANCE[number] = (ok, lines)
        failed = [c[0] for c in checks if not c[1]]
        assert not failed, f"criterion {number} failed checks: {failed}"

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        ok, lines = _ACCEPTANCE[number]
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}")
        for line in lines:
            tr.write_line(f"    {line}")
