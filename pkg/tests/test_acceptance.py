"""Acceptance gate: one test per criterion, each at its stated scale and tolerance.

Every test prints a ``[PASS]``/``[FAIL]`` line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import subprocess
import sys
import time

import pytest

from qsmatch import checks


def report(log, result):
    line = result.line()
    print(line)
    log.append(line)
    return result


@pytest.fixture(scope="module")
def circuit_results():
    return {r.criterion: r for r in checks.check_circuits()}


def test_criterion_01_classical_equivalence(acceptance_log):
    r = report(acceptance_log, checks.check_classical())
    assert r.passed, r.detail


def test_criterion_02_qsand_equivalence(acceptance_log, circuit_results):
    r = report(acceptance_log, circuit_results[2])
    assert r.passed, r.detail


def test_criterion_03_qsadd_equivalence(acceptance_log, circuit_results):
    r = report(acceptance_log, circuit_results[3])
    assert r.passed, r.detail


def test_criterion_04_uncompute(acceptance_log, circuit_results):
    r = report(acceptance_log, circuit_results[4])
    assert r.passed, r.detail


def test_criterion_05_cross_simulator(acceptance_log):
    r = report(acceptance_log, checks.check_cross_sim())
    assert r.passed, r.detail


def test_criterion_06_grover_exactness(acceptance_log):
    r = report(acceptance_log, checks.check_grover_exactness())
    assert r.passed, r.detail


def test_criterion_07_end_to_end(acceptance_log):
    r = report(acceptance_log, checks.check_end_to_end())
    assert r.passed, r.detail


def test_criterion_08_block_coverage(acceptance_log):
    r = report(acceptance_log, checks.check_coverage())
    assert r.passed, r.detail


def test_criterion_09_depth_scaling(acceptance_log):
    r = report(acceptance_log, checks.check_depth_scaling())
    assert r.passed, r.detail


def test_criterion_10_selftest_command(acceptance_log):
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "qsmatch", "selftest"], capture_output=True, text=True,
                          timeout=600)
    dt = time.perf_counter() - t0
    ok = proc.returncode == 0 and dt < 300
    r = checks.CheckResult(10, "selftest command", ok, f"exit {proc.returncode} after criteria 1-6", dt)
    report(acceptance_log, r)
    assert ok, proc.stdout + proc.stderr
