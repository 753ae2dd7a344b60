import numpy as np
import pytest

from hardyshift import taylor, vector


def pytest_runtest_logreport(report):
    # One visible PASS/FAIL line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        if hasattr(report, "wasxfail") or getattr(report, "keywords", {}).get("xfail"):
            outcome = ("XFAIL (quoted value fails independent verification)"
                       if report.outcome == "skipped" else "XPASS")
        elif report.outcome == "passed":
            outcome = "PASS"
        else:
            outcome = report.outcome.upper().replace("FAILED", "FAIL")
        print(f"\n[acceptance] {name}: {outcome}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_taylor(rng, deg, cap, scale=1.0):
    coeffs = scale * (rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1))
    return taylor(coeffs, cap)


def random_vector(rng, m, deg, cap, scale=1.0):
    return vector([random_taylor(rng, deg, cap, scale) for _ in range(m)])
