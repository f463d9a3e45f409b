import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "numerics", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("numerics")

# acceptance criterion -> (passed, one-line summary), filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def cubic():
    from largesol.nonlinearity import power

    return power(3.0)


@pytest.fixture(scope="session")
def cubic_ball_profiles(cubic):
    """Continuation and transform profiles for u^3 on the unit ball in 3D at n_r = 2048."""
    from largesol.radial import solve_large_continuation, solve_w_transform

    cont = solve_large_continuation(cubic, 1.0, 3, n_r=2048)
    wt = solve_w_transform(cubic, 1.0, 3, grid=cont.grid, fallback_profile=cont)
    return cont, wt


@pytest.fixture(scope="session")
def shooting_q3_n3():
    from oracles import PowerShooting

    return PowerShooting(3.0, 3)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, line = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {line}")
