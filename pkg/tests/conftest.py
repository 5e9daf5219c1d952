import os
import tempfile

# keep the Jack and calibration caches out of the user's home during tests
_CACHE = tempfile.mkdtemp(prefix="chamber_bessel_test_cache_")
os.environ["CHAMBER_BESSEL_CACHE"] = _CACHE

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
