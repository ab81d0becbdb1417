"""Acceptance criteria, all compared exactly over the rationals.

Each criterion prints one ``PASS``/``FAIL`` line.  Run directly with
``python tests/test_acceptance.py`` for just the summary.
"""

from __future__ import annotations

import sys
import time
from collections import Counter
from typing import Callable, Dict, List, Tuple

import pytest

from qstring.suites import SuiteReport, run_suite


def _summary(reports: List[SuiteReport]) -> Tuple[bool, str]:
    counts: Counter = Counter()
    for r in reports:
        counts.update(r.counts())
    ok = all(r.exit_code == 0 for r in reports) and counts["pass"] > 0 and not counts[
        "skipped-nongeneric"]
    detail = ", ".join(f"{k}={v}" for k, v in sorted(counts.items()) if v)
    return ok, detail


def _per_identity(report: SuiteReport) -> Counter:
    return Counter(c.identity_id for c in report.cases if c.status == "pass")


def master_theta():
    r = run_suite("master-theta", 202)
    ok, detail = _summary([r])
    return ok and len(r.cases) == 4 + 4 + 5, detail


def level_identities():
    r = run_suite("level-identities", 202)
    ok, detail = _summary([r])
    need = {"pP37": 3, "pP38m0": 4, "pP38m2": 4, "pP511": 5, "twofive-A": 2, "twofive-mu": 2}
    seen = _per_identity(r)
    return ok and all(seen[k] >= n for k, n in need.items()), detail


def quasi_periodicity():
    r = run_suite("quasi-periodicity", 120)
    ok, detail = _summary([r])
    pj = {(c.params["p"], c.params["j"]) for c in r.cases}
    return ok and pj == {(2, 1), (3, 1), (3, 2), (4, 1), (4, 3), (5, 2)}, detail


def cross_spin():
    r = run_suite("cross-spin", 120)
    ok, detail = _summary([r])
    seen = _per_identity(r)
    return ok and seen["cross-spin-25"] == 2 and seen["cross-spin-37"] > 0, detail


def polar_finite():
    r = run_suite("polar-finite", 100)
    ok, detail = _summary([r])
    general = [c for c in r.cases if c.identity_id == "polar-finite"]
    j1 = [c for c in r.cases if c.identity_id == "polar-finite-j1"]
    return ok and general and j1 and all(c.order == 80 for c in general), detail


def dual_route():
    r = run_suite("string-dual-route", 40)
    ok, detail = _summary([r])
    levels = {(c.params["p"], c.params["pprime"]) for c in r.cases}
    return ok and len(levels) == 6, detail


def kac_peterson():
    r = run_suite("kac-peterson", 200)
    ok, detail = _summary([r])
    seen = _per_identity(r)
    return ok and seen["periodicity"] > 0 and len(seen) == 6, detail


def toolkit():
    t0 = time.perf_counter()
    reports = [run_suite("theta-toolkit", 100), run_suite("appell-props", 100)]
    elapsed = time.perf_counter() - t0
    ok, detail = _summary(reports)
    random_ids = [k for r in reports for k in r.rejections]
    draws_ok = all(_per_identity(r)[k] >= 50 for r in reports for k in r.rejections)
    return ok and draws_ok and len(random_ids) == 21 and elapsed <= 180, \
        f"{detail}, {elapsed:.0f}s"


def pos_disc():
    r = run_suite("pos-disc", 60)
    ok, detail = _summary([r])
    per_abc = Counter((c.params["a"], c.params["b"], c.params["c"]) for c in r.cases)
    return ok and all(per_abc[k] >= 10 for k in [(1, 2, 1), (1, 3, 2), (2, 3, 1)]), \
        f"{detail}, rejected={sum(r.rejections.values())}"


def negative_level():
    r = run_suite("negative-level", 120)
    return _summary([r])


def mock_suites():
    reports = [run_suite(name, 150) for name in ("mock-forms", "mock-conjectures", "tenth-order")]
    return _summary(reports)


CRITERIA: Dict[int, Tuple[str, Callable[[], Tuple[bool, str]]]] = {
    1: ("master theta families to O(q^202)", master_theta),
    2: ("string functions as mock theta expressions to O(q^202)", level_identities),
    3: ("quasi-periodicity to O(q^120)", quasi_periodicity),
    4: ("cross-spin and its specialisations to O(q^120)", cross_spin),
    5: ("polar-finite decomposition, O(q^100) and O(q^80)", polar_finite),
    6: ("double-sum vs character-coefficient string functions to O(q^40)", dual_route),
    7: ("integrable eta quotients to O(q^200) and periodicity", kac_peterson),
    8: ("theta and Appell property suites, 50 draws each, O(q^100)", toolkit),
    9: ("positive-discriminant expansion, 10 draws each, O(q^60)", pos_disc),
    10: ("negative level through false thetas to O(q^120)", negative_level),
    11: ("mock theta suites to O(q^150)", mock_suites),
}


def run_criterion(n: int) -> Tuple[bool, str]:
    title, fn = CRITERIA[n]
    t0 = time.perf_counter()
    ok, detail = fn()
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {title} [{detail}; " \
           f"{time.perf_counter() - t0:.1f}s]"
    return ok, line


@pytest.mark.slow
@pytest.mark.parametrize("n", list(CRITERIA))
def test_acceptance_criterion(n, capsys):
    ok, line = run_criterion(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(n) for n in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
