import functools

import pytest

from zkmsa.msa_circuit import CircuitParams, build_main

_acceptance_lines: list[str] = []


@functools.lru_cache(maxsize=None)
def compiled(nseq: int, seq_len: int, aln_len: int):
    params = CircuitParams(nseq, seq_len, aln_len)
    return params, build_main(params)


@pytest.fixture
def circuit():
    return compiled


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and (report.when == "call" or report.failed):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        status = "PASS" if report.passed else "FAIL"
        _acceptance_lines.append(f"[{status}] {doc}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
