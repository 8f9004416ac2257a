from pathlib import Path

import pytest

from toolforge.core import load_tool_spec
from toolforge.envs import load_env_config

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def load_suite(name: str):
    spec = load_tool_spec(FIXTURES / f"{name}.json")
    env_path = FIXTURES / f"{name}.env.json"
    env = load_env_config(env_path) if env_path.exists() else None
    return spec, env


# -- acceptance criteria reporting ---------------------------------------------

ACCEPTANCE_RESULTS: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    for n in range(1, 11):
        config.addinivalue_line("markers", f"criterion_{n}: acceptance criterion {n}")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for key in report.keywords:
        if key.startswith("criterion_"):
            number = int(key.split("_")[1])
            ACCEPTANCE_RESULTS[number] = ("PASS" if report.passed else "FAIL", report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        status, name = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"{status} criterion {number:2d}: {name}")
