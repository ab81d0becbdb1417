"""Suite registry: named groups of identity cases, seeded draws and reports."""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import appell, cache, hecke, mock, stringfn, theta
from .errors import UnknownSuite
from .series import Monomial
from .verify import ERROR, FAIL, PASS, SKIPPED, IdentityResult, format_monomial

# A runner evaluates one task and returns its results plus rejection counts
# keyed by identity id.
Runner = Callable[[], Tuple[List[IdentityResult], Dict[str, int]]]


class InvalidParams(ValueError):
    """A ``--params`` override names an unknown axis or has the wrong shape."""


@dataclass
class IdentityCase:
    suite: str
    identity_id: str
    params: Dict[str, Any]
    order: int

    def to_json(self) -> Dict[str, Any]:
        return {"suite": self.suite, "identity_id": self.identity_id,
                "params": dict(self.params), "order": self.order}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "IdentityCase":
        return cls(data["suite"], data["identity_id"], dict(data["params"]), int(data["order"]))


@dataclass
class SuiteReport:
    suite: str
    order: int
    seed: int
    started: str
    elapsed: float
    cases: List[IdentityResult]
    rejections: Dict[str, int] = field(default_factory=dict)

    def counts(self) -> Dict[str, int]:
        out = {PASS: 0, FAIL: 0, SKIPPED: 0, ERROR: 0}
        for c in self.cases:
            out[c.status] = out.get(c.status, 0) + 1
        return out

    @property
    def exit_code(self) -> int:
        c = self.counts()
        return 1 if c[FAIL] or c[ERROR] else 0

    @property
    def passed(self) -> bool:
        return self.exit_code == 0

    def to_json(self) -> Dict[str, Any]:
        return {
            "suite": self.suite,
            "order": self.order,
            "seed": self.seed,
            "started": self.started,
            "elapsed": round(self.elapsed, 3),
            "counts": self.counts(),
            "rejections": dict(sorted(self.rejections.items())),
            "cases": [c.to_json() for c in self.cases],
        }


# ---------------------------------------------------------------------------
# seeded parameter draws

GRID_DENOMINATORS = (1, 2, 3, 4, 6)


def draw_monomial(rng: random.Random, lo: int = -2, hi: int = 2) -> str:
    """A signed power of q with exponent on the grid ``k/d``, ``lo <= k/d <= hi``."""
    d = rng.choice(GRID_DENOMINATORS)
    e = Fraction(rng.randint(lo * d, hi * d), d)
    return format_monomial(Monomial(rng.choice((1, -1)), e))


def _rng(seed: int, *tags) -> random.Random:
    # string seeds hash deterministically, so each task gets its own stream
    return random.Random(":".join(str(t) for t in (seed,) + tags))


def _draw_until(label: str, count: int, draw: Callable[[random.Random], Dict[str, Any]],
                run: Callable[[Dict[str, Any]], IdentityResult], rng: random.Random,
                max_factor: int = 20) -> Tuple[List[IdentityResult], Dict[str, int]]:
    """Run ``count`` accepted draws; non-generic draws are rejected and counted."""
    results, rejected, attempts = [], 0, 0
    while len(results) < count and attempts < max_factor * count:
        attempts += 1
        params = draw(rng)
        res = run(params)
        if res.status == SKIPPED:
            rejected += 1
            continue
        results.append(res)
    return results, {label: rejected}


# ---------------------------------------------------------------------------
# task bodies (module level so they pickle for process pools)


def _single(fn: Callable[..., IdentityResult], *args, **kwargs):
    return [fn(*args, **kwargs)], {}


def _many(fn: Callable[..., List[IdentityResult]], *args, **kwargs):
    return list(fn(*args, **kwargs)), {}


def _theta_draw(identity_id: str, spec: Dict[str, Any], rng: random.Random) -> Dict[str, Any]:
    out = {}
    for key, kind in spec.items():
        out[key] = draw_monomial(rng) if kind == "mono" else rng.choice(kind)
    return out


def _random_theta(identity_id, spec, count, seed, order):
    rng = _rng(seed, "theta", identity_id)
    return _draw_until(identity_id, count, partial(_theta_draw, identity_id, spec),
                       lambda p: theta.verify_theta_identity(identity_id, p, order), rng)


def _random_appell(prop_id, spec, count, seed, order):
    rng = _rng(seed, "appell", prop_id)
    return _draw_until(prop_id, count, partial(_theta_draw, prop_id, spec),
                       lambda p: appell.verify_appell_property(prop_id, p, order), rng)


def _hecke_draw(a, b, c, rng):
    return {"a": a, "b": b, "c": c, "x": draw_monomial(rng, 0, 3), "y": draw_monomial(rng, 0, 3)}


def _random_pos_disc(abc, count, seed, order):
    a, b, c = abc
    rng = _rng(seed, "pos-disc", a, b, c)
    return _draw_until("pos-disc", count, partial(_hecke_draw, a, b, c),
                       lambda p: hecke.verify_hecke_identity("pos-disc", p, order), rng)


def _random_functional(abc, shifts, count, seed, order):
    a, b, c = abc
    rng = _rng(seed, "functional-equation", a, b, c)
    out, rejected = [], 0
    for _ in range(count):
        base = _hecke_draw(a, b, c, rng)
        for ell, k in shifts:
            res = hecke.verify_hecke_identity("functional-equation",
                                              dict(base, ell=ell, k=k), order)
            if res.status == SKIPPED:
                rejected += 1
            else:
                out.append(res)
    return out, {"functional-equation": rejected}


# ---------------------------------------------------------------------------
# suite definitions


@dataclass
class Suite:
    name: str
    default_order: int
    axes: Dict[str, Any]
    build: Callable[[int, int, Dict[str, Any]], List[Runner]]
    description: str = ""


# Parameter kinds for random draws: "mono" is a grid monomial, a tuple is a
# finite choice.
THETA_DRAWS: Dict[str, Dict[str, Any]] = {
    "jtp": {"x": "mono", "M": (1, 2, 3)},
    "j-elliptic": {"x": "mono", "n": (-3, -2, -1, 0, 1, 2, 3)},
    "j-flip-q": {"x": "mono"},
    "j-flip-inv": {"x": "mono"},
    "j-multisection": {"x": "mono", "n": (2, 3)},
    "j-neg-base": {"x": "mono"},
    "j-power": {"x": "mono", "n": (2, 3)},
    "jsplit": {"z": "mono", "m": (2, 3, 4)},
    "jsplit-m2": {"z": "mono"},
    "quintuple": {"x": "mono"},
    "quintuple-ratio": {"x": "mono"},
    "reciprocal": {"z": "mono"},
    "h1-thm1.1": {"x": "mono", "y": "mono"},
    "h1-thm1.2a": {"x": "mono", "y": "mono"},
    "h1-thm1.2b": {"x": "mono", "y": "mono"},
}
THETA_FIXED = [
    ("theta-to-j", {"n": n, "m": m}) for n, m in ((0, 1), (1, 2), (1, 3), (2, 5), (3, 4))
] + [(i, {}) for i in theta.THETA_IDENTITIES if i.startswith("rearrange") or i == "eta-pentagonal"]

APPELL_DRAWS: Dict[str, Dict[str, Any]] = {
    "z-period": {"x": "mono", "z": "mono", "qmod": (1, 2)},
    "x-inversion": {"x": "mono", "z": "mono", "qmod": (1, 2)},
    "x-shift": {"x": "mono", "z": "mono", "qmod": (1, 2)},
    "flip-xz": {"x": "mono", "z": "mono", "qmod": (1, 2)},
    "changing-z": {"x": "mono", "z": "mono", "z1": "mono", "qmod": (1,)},
    "m-split": {"x": "mono", "z": "mono", "zprime": "mono", "n": (1, 2, 3)},
}


def _theta_toolkit(order, seed, ax):
    tasks = [partial(_random_theta, i, THETA_DRAWS[i], ax["draws"], seed, order)
             for i in ax["identities"] if i in THETA_DRAWS]
    tasks += [partial(_single, theta.verify_theta_identity, i, p, order)
              for i, p in THETA_FIXED if i in ax["identities"]]
    return tasks


def _appell_props(order, seed, ax):
    return [partial(_random_appell, i, APPELL_DRAWS[i], ax["draws"], seed, order)
            for i in ax["properties"]]


def _hecke_core(order, seed, ax):
    shifts = [(ell, k) for ell in ax["ell"] for k in ax["k"]]
    return [partial(_random_functional, tuple(abc), shifts, ax["draws"], seed, order)
            for abc in ax["abc"]]


def _pos_disc(order, seed, ax):
    return [partial(_random_pos_disc, tuple(abc), ax["draws"], seed, order) for abc in ax["abc"]]


def _dual_route(order, seed, ax):
    tasks = []
    for p, pp in ax["levels"]:
        lv = stringfn.Level(p, pp)
        for m, ell in lv.labels(ax["mmax"]):
            tasks.append(partial(_single, stringfn.verify_dual_route, (p, pp), ell, m, order))
    return tasks


def _kac_peterson(order, seed, ax):
    tasks = [partial(_single, stringfn.verify_kac_peterson, i, order) for i in ax["identities"]]
    tasks += [partial(_many, stringfn.verify_periodicity, N, order) for N in ax["periodicity_N"]]
    return tasks


def _quasi(order, seed, ax):
    tasks = []
    for p, j in ax["pj"]:
        pp = 2 * p + j
        for r in range(0, (pp - 2) // 2 + 1):
            for s in range(j):
                for t in ax["t"]:
                    tasks.append(partial(_single, stringfn.verify_quasi_periodicity,
                                         p, j, r, s, t, order))
    return tasks


def _cross(order, seed, ax):
    tasks = []
    for p, j in ax["pj"]:
        pp = 2 * p + j
        for r in range(1, pp // 2 + 1):
            if 2 * r - 1 > pp - 2:
                continue
            for i in ax["i"]:
                tasks.append(partial(_single, stringfn.verify_cross_spin, p, j, i, r, order))
    tasks += [partial(_single, stringfn.verify_cross_spin_25, r, order) for r in (1, 2)]
    tasks += [partial(_single, stringfn.verify_cross_spin_37, i, r, order)
              for r in (1, 2, 3) for i in ax["i"]]
    return tasks


def _polar(order, seed, ax):
    tasks = []
    for p in ax["j1_p"]:
        for r in range((2 * p - 1) // 2 + 1):
            for z0 in ax["j1_z"]:
                tasks.append(partial(_single, stringfn.verify_polar_finite_j1,
                                     p, r, z0, order))
    general_order = min(order, ax["general_order"])
    for p, j in ax["general_pj"]:
        for r in range((2 * p + j - 2) // 2 + 1):
            for z0 in ax["general_z"]:
                tasks.append(partial(_single, stringfn.verify_polar_finite,
                                     p, j, r, z0, general_order))
    return tasks


def _mock_forms(order, seed, ax):
    tasks = [partial(_single, mock.verify_appell_form, i, order) for i in ax["appell_forms"]]
    tasks += [partial(_single, mock.verify_appell_form, "g", order, x, qmod)
              for x, qmod in ax["g_points"]]
    tasks += [partial(_single, mock.verify_alternate_form, i, order) for i in ax["alternate_forms"]]
    return tasks


def _mock_conjectures(order, seed, ax):
    return [partial(_single, mock.verify_mock_theta_conjecture, i, order)
            for i in ax["identities"]]


def _tenth(order, seed, ax):
    return [partial(_single, mock.verify_tenth_order_dissection, i, order)
            for i in ax["identities"]]


def _master(order, seed, ax):
    return [partial(_single, mock.verify_master_theta_family, fam, r, order)
            for fam in ax["families"] for r in mock.MASTER_RANGES[fam]]


def _levels(order, seed, ax):
    return [partial(_single, stringfn.verify_mock_identity, i, r, order)
            for i in ax["identities"] for r in stringfn.MOCK_IDENTITIES[i][1]]


def _negative(order, seed, ax):
    tasks = []
    for p, pp in ax["levels"]:
        lv = stringfn.Level(p, pp)
        for m, ell in lv.labels(ax["mmax"]):
            tasks.append(partial(_single, stringfn.verify_negative_level, p, pp, m, ell, order))
    return tasks


def _fourier(order, seed, ax):
    tasks = []
    for p, pp in ax["levels"]:
        for ell in range(pp - 1):
            tasks.append(partial(_single, stringfn.verify_fourier_expansion, (p, pp), ell, order))
        tasks.append(partial(_many, stringfn.verify_symmetries, (p, pp), order))
    for N in ax["decomposition_N"]:
        for ell in range(N + 1):
            tasks.append(partial(_single, stringfn.verify_theta_decomposition, N, ell, order))
    return tasks


MAIN_LEVELS = [[2, 5], [3, 7], [3, 8], [5, 11], [1, 3], [1, 4]]

SUITES: Dict[str, Suite] = {s.name: s for s in [
    Suite("theta-toolkit", 100,
          {"draws": 50, "identities": list(THETA_DRAWS) + [i for i, _ in THETA_FIXED]},
          _theta_toolkit, "theta-function identities, seeded random monomials"),
    Suite("appell-props", 100, {"draws": 50, "properties": list(APPELL_DRAWS)},
          _appell_props, "Appell function properties, seeded random monomials"),
    Suite("hecke-core", 40,
          {"draws": 4, "abc": [[1, 2, 1], [1, 3, 2], [2, 3, 1], [1, 1, 1]],
           "ell": [-3, -2, -1, 0, 1, 2, 3], "k": [-3, -2, -1, 0, 1, 2, 3]},
          _hecke_core, "double-sum functional equation over an (l, k) grid"),
    Suite("pos-disc", 60, {"draws": 10, "abc": [[1, 2, 1], [1, 3, 2], [2, 3, 1]]},
          _pos_disc, "positive-discriminant expansion of f_{a,b,c}"),
    Suite("string-dual-route", 40, {"levels": MAIN_LEVELS, "mmax": 6},
          _dual_route, "double-sum string functions against character coefficients"),
    Suite("kac-peterson", 200,
          {"identities": list(stringfn.KAC_PETERSON), "periodicity_N": [1, 2, 3]},
          _kac_peterson, "integrable-level eta quotients and periodicity"),
    Suite("quasi-periodicity", 120,
          {"pj": [[2, 1], [3, 1], [3, 2], [4, 1], [4, 3], [5, 2]], "t": [1, 2]},
          _quasi, "shift of m by 2jt for even spin"),
    Suite("cross-spin", 120,
          {"pj": [[2, 1], [3, 1], [5, 1], [4, 3]], "i": [-2, -1, 0, 1, 2, 3]},
          _cross, "odd spin through even spin"),
    Suite("polar-finite", 100,
          {"j1_p": [2, 3], "j1_z": ["-1", "-q", "-q^2"],
           "general_pj": [[3, 2]], "general_z": ["-q"], "general_order": 80},
          _polar, "polar-finite decomposition specialised at z"),
    Suite("mock-forms", 150,
          {"appell_forms": list(mock.APPELL_FORMS), "alternate_forms": list(mock.ALTERNATE_FORMS),
           "g_points": [["q^1/2", 1], ["-q^1/3", 1], ["q^1/4", 2], ["-q^5/2", 3]]},
          _mock_forms, "Eulerian mock theta functions against Appell forms"),
    Suite("mock-conjectures", 150, {"identities": list(mock.MOCK_CONJECTURES)},
          _mock_conjectures, "fifth-order f0, f1 through Appell functions"),
    Suite("tenth-order", 150, {"identities": list(mock.TENTH_ORDER)},
          _tenth, "tenth-order dissection identities"),
    Suite("master-theta", 202, {"families": list(mock.MASTER_THETA)},
          _master, "theta-function families behind the level identities"),
    Suite("level-identities", 202, {"identities": list(stringfn.MOCK_IDENTITIES)},
          _levels, "string functions as mock theta expressions"),
    Suite("negative-level", 120, {"levels": [[3, 5], [4, 7], [5, 8]], "mmax": 4},
          _negative, "negative-level string functions through false thetas"),
    Suite("fourier-consistency", 20, {"levels": MAIN_LEVELS, "decomposition_N": [1, 2, 3]},
          _fourier, "character numerator against the string-function Fourier sum"),
]}


def resolve_axes(suite: Suite, overrides: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    axes = json.loads(json.dumps(suite.axes))
    for key, value in (overrides or {}).items():
        if key not in axes:
            raise InvalidParams(f"suite {suite.name!r} has no parameter {key!r}; "
                                f"known: {', '.join(sorted(axes))}")
        if type(value) is not type(axes[key]) and not (
                isinstance(value, (int, float)) and isinstance(axes[key], (int, float))):
            raise InvalidParams(f"parameter {key!r} must be a {type(axes[key]).__name__}")
        axes[key] = value
    return axes


def get_suite(name: str) -> Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {name!r}; known: {', '.join(SUITES)}") from None


def _run_task(task: Runner, cache_dir: Optional[str]):
    if cache_dir:
        cache.configure(cache_dir)
    return task()


def run_suite(name: str, order: Optional[int] = None, seed: int = 0,
              params: Optional[Dict[str, Any]] = None, report_path=None,
              cache_dir: Optional[str] = None, jobs: int = 1) -> SuiteReport:
    """Run every case of a suite and optionally write its JSON report."""
    suite = get_suite(name)
    order = suite.default_order if order is None else int(order)
    if order < 1:
        raise InvalidParams("order must be positive")
    axes = resolve_axes(suite, params)
    active = cache.configure(cache_dir)
    cache_root = str(active.root) if active else None
    tasks = suite.build(order, seed, axes)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    t0 = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(partial(_run_task, cache_dir=cache_root), tasks))
    else:
        outcomes = [task() for task in tasks]
    cases: List[IdentityResult] = []
    rejections: Dict[str, int] = {}
    for results, rejected in outcomes:
        cases.extend(results)
        for key, n in rejected.items():
            rejections[key] = rejections.get(key, 0) + n
    report = SuiteReport(name, order, seed, started, time.perf_counter() - t0, cases, rejections)
    if report_path:
        write_report(report, report_path)
    return report


def write_report(report: SuiteReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return path
