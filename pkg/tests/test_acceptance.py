"""Every acceptance criterion at its stated time limit, one PASS/FAIL line each.

Lines are printed as the criteria run and repeated in the terminal summary.
"""

import subprocess
import sys
import time

import pytest

from diophok import acceptance

SEED = 42

# seconds; criterion 4 is "instantaneous" and 10 has no limit of its own
LIMITS = {1: 60, 2: 10, 3: 60, 4: 1, 5: 600, 6: 300, 7: 300, 8: 120, 9: 30, 10: None}

SUMMARY = []


def _report(cid, passed, elapsed, note=""):
    limit = LIMITS[cid]
    budget = f"< {limit} s" if limit else "no limit"
    line = (f"criterion {cid:>2}: {'PASS' if passed else 'FAIL'}  "
            f"{elapsed:7.2f} s ({budget}){'  ' + note if note else ''}")
    SUMMARY.append(line)
    print(line)


@pytest.mark.parametrize("cid", sorted(c for c in acceptance.CRITERIA if c != 10))
def test_criterion(cid):
    t0 = time.perf_counter()
    result = acceptance.CRITERIA[cid](SEED)
    elapsed = time.perf_counter() - t0
    in_time = LIMITS[cid] is None or elapsed < LIMITS[cid]
    _report(cid, result["passed"] and in_time, elapsed, result["name"])
    assert result["passed"], result["details"]
    assert in_time, f"took {elapsed:.1f} s"


def _selftest():
    proc = subprocess.run(
        [sys.executable, "-m", "diophok.cli", "selftest", "--seed", str(SEED)],
        capture_output=True, timeout=1800)
    return proc.returncode, proc.stdout


def test_criterion_10_determinism():
    t0 = time.perf_counter()
    inproc = acceptance.criterion_10(SEED)
    code_a, out_a = _selftest()
    code_b, out_b = _selftest()
    elapsed = time.perf_counter() - t0
    same = out_a == out_b and len(out_a) > 0
    _report(10, inproc["passed"] and same and code_a == code_b == 0, elapsed,
            "selftest --seed 42 twice, byte-identical")
    assert inproc["passed"]
    assert code_a == 0 and code_b == 0
    assert same
