"""Parameter sweeps over the protocol scenarios and boundary bisection."""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .channels import damp_both
from .errors import BracketError, BellSwapError, DomainError, ParseError, ValidationError
from .linalg import validate_density
from .nonlocality import analyze
from .states import BELL_LABELS, BellLabel, parse_number, diag_state, gisin, lhv_state, werner
from .swap import swap


def _second(point, name, first):
    return point[name] if name in point else point[first]


def _damp_werner(point):
    rho = damp_both(werner(point["alpha"]), point["gamma"])
    return [(None, 1.0, rho)]


def _swap_damped_werner(point):
    r1 = damp_both(werner(point["alpha"]), point["gamma"])
    r2 = damp_both(werner(_second(point, "alpha2", "alpha")), _second(point, "gamma2", "gamma"))
    return swap(r1, r2)


def _diag(a, b, c):
    d = 1.0 - a - b - c
    # absorb rounding from grid arithmetic so d=0 edges stay in the domain
    if -1e-12 < d < 0.0:
        d = 0.0
    return diag_state(a, b, c, d)


def _swap_diag(point):
    r1 = _diag(point["a1"], point["b1"], point["c1"])
    r2 = _diag(_second(point, "a2", "a1"), _second(point, "b2", "b1"), _second(point, "c2", "c1"))
    return swap(r1, r2)


def _swap_gisin(point):
    r1 = gisin(point["lambda1"], point["alpha1"])
    r2 = gisin(_second(point, "lambda2", "lambda1"), _second(point, "alpha2", "alpha1"))
    return swap(r1, r2)


def _swap_lhv(point):
    g1 = point.get("gamma1", 0.5)
    r1 = lhv_state(g1, point["beta1"])
    r2 = lhv_state(point.get("gamma2", g1), _second(point, "beta2", "beta1"))
    return swap(r1, r2)


@dataclass(frozen=True)
class Scenario:
    name: str
    required: tuple
    optional: tuple
    build: Callable
    swapped: bool = True


SCENARIOS = {
    s.name: s
    for s in (
        Scenario("damp-werner", ("alpha", "gamma"), (), _damp_werner, swapped=False),
        Scenario("swap-diag", ("a1", "b1", "c1"), ("a2", "b2", "c2"), _swap_diag),
        Scenario("swap-gisin", ("lambda1", "alpha1"), ("lambda2", "alpha2"), _swap_gisin),
        Scenario("swap-lhv", ("beta1",), ("beta2", "gamma1", "gamma2"), _swap_lhv),
        Scenario("swap-damped-werner", ("alpha", "gamma"), ("alpha2", "gamma2"), _swap_damped_werner),
    )
}


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ParseError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None


@dataclass(frozen=True)
class GridAxis:
    """Inclusive grid; the point count is round((stop - start) / step) + 1."""

    name: str
    start: float
    stop: float
    step: float = 1.0

    def __post_init__(self):
        if not self.step > 0:
            raise ParseError(f"grid {self.name!r}: step must be positive, got {self.step!r}")
        if self.stop < self.start:
            raise ParseError(f"grid {self.name!r}: stop {self.stop!r} < start {self.start!r}")

    @property
    def values(self) -> np.ndarray:
        n = int(round((self.stop - self.start) / self.step))
        if n == 0:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, n + 1)

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """``name=start:stop:step`` or ``name=value``."""
        name, eq, rng = text.partition("=")
        if not eq or not name.strip():
            raise ParseError(f"grid spec {text!r} must look like name=start:stop:step")
        parts = rng.split(":")
        try:
            nums = [parse_number(p) for p in parts]
        except ValueError:
            raise ParseError(f"bad number in grid spec {text!r}") from None
        if len(nums) == 1:
            return cls(name.strip(), nums[0], nums[0])
        if len(nums) != 3:
            raise ParseError(f"grid spec {text!r} needs start:stop:step")
        return cls(name.strip(), *nums)


@dataclass
class SweepSpec:
    scenario: str
    grids: list
    outcome_filter: Optional[frozenset] = None
    output_path: Optional[str] = None

    def __post_init__(self):
        sc = get_scenario(self.scenario)
        names = [g.name for g in self.grids]
        allowed = set(sc.required) | set(sc.optional)
        unknown = [n for n in names if n not in allowed]
        if unknown:
            raise ParseError(f"scenario {sc.name!r} has no parameters {unknown}")
        missing = [n for n in sc.required if n not in names]
        if missing:
            raise ParseError(f"scenario {sc.name!r} needs grids for {missing}")
        if len(set(names)) != len(names):
            raise ParseError(f"duplicate grid names in {names}")
        if self.outcome_filter is not None:
            self.outcome_filter = frozenset(BellLabel.parse(x) for x in self.outcome_filter)


COLUMNS_TAIL = (
    "outcome_label",
    "probability",
    "M",
    "chsh_max",
    "abs_lhs",
    "post_unitary_M",
    "abs_local_flag",
    "status",
)


def fmt_num(x: float) -> str:
    """Nine significant digits, positional notation unless |x| < 1e-3."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"refusing to write non-finite value {x}")
    if x == 0.0:
        return "0"
    if abs(x) < 1e-3 or abs(x) >= 1e16:
        return format(x, ".8e")
    return np.format_float_positional(x, precision=9, unique=False, fractional=False, trim="-")


def evaluate_point(scenario: str, point: dict, outcome_filter=None) -> list:
    """Rows (as dicts) for a single grid point."""
    sc = get_scenario(scenario)
    try:
        branches = sc.build(point)
    except DomainError:
        return [make_row(None, None, None, "domain_error")]
    rows = []
    for branch in branches:
        if sc.swapped:
            label, prob, rho = branch.label.value, branch.probability, branch.conditional_state
            if outcome_filter is not None and branch.label not in outcome_filter:
                continue
        else:
            label, prob, rho = branch
        if rho is None:
            rows.append(make_row(label, prob, None, "zero_probability"))
            continue
        try:
            validate_density(rho)
            report, post = analyze(rho)
        except ValidationError:
            rows.append(make_row(label, prob, None, "validation_error"))
            continue
        rows.append(make_row(label, prob, (report, post), "ok"))
    return rows


def make_row(label, prob, reports, status):
    row = {"outcome_label": label or "-", "probability": prob, "status": status}
    if reports is not None:
        report, post = reports
        row.update(
            M=report.horodecki_M,
            chsh_max=report.chsh_max,
            abs_lhs=report.abs_lhs,
            post_unitary_M=post.horodecki_M,
            abs_local_flag=report.is_absolutely_local,
        )
    return row


def grid_points(grids) -> list:
    names = [g.name for g in grids]
    return [dict(zip(names, vals)) for vals in itertools.product(*(g.values for g in grids))]


def _evaluate_star(args):
    return evaluate_point(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> list:
    """All rows for the sweep in deterministic order.

    Order is lexicographic in grid indices (first grid slowest), then Bell
    label order within a point. ``jobs > 1`` evaluates points in worker
    processes; results are reassembled in the same order.
    """
    points = grid_points(spec.grids)
    tasks = [(spec.scenario, p, spec.outcome_filter) for p in points]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_point = list(pool.map(_evaluate_star, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        per_point = [_evaluate_star(t) for t in tasks]
    rows = []
    for point, prs in zip(points, per_point):
        for r in prs:
            rows.append({**point, **r})
    return rows


def rows_to_csv(spec_or_scenario, grid_names, rows) -> str:
    scenario = spec_or_scenario.scenario if isinstance(spec_or_scenario, SweepSpec) else spec_or_scenario
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scenario", *grid_names, *COLUMNS_TAIL])
    for r in rows:
        out = [scenario]
        out += [fmt_num(r[n]) for n in grid_names]
        for col in COLUMNS_TAIL:
            v = r.get(col)
            if v is None:
                out.append("")
            elif isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, str):
                out.append(v)
            else:
                out.append(fmt_num(v))
        w.writerow(out)
    return buf.getvalue()


def sweep_csv(spec: SweepSpec, jobs: int = 1) -> str:
    rows = run_sweep(spec, jobs=jobs)
    return rows_to_csv(spec, [g.name for g in spec.grids], rows)


# --- threshold bisection ------------------------------------------------


@dataclass
class BisectionResult:
    value: float
    lo: float
    hi: float
    f_lo: float
    f_hi: float
    iterations: int
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "bracket": [self.lo, self.hi],
            "endpoint_values": [self.f_lo, self.f_hi],
            "iterations": self.iterations,
        }


def bisect_boundary(func, lo: float, hi: float, tol: float = 1e-6) -> BisectionResult:
    """Bisect on the sign of ``func`` (positive means past the boundary).

    Stops once the bracket width is at most ``tol`` and returns its midpoint.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    f_lo, f_hi = func(lo), func(hi)
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={f_lo!r}, f(hi)={f_hi!r}"
        )
    a, b, side_a = lo, hi, f_lo > 0
    it = 0
    history = []
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = func(mid)
        history.append((mid, fm))
        it += 1
        if (fm > 0) == side_a:
            a = mid
        else:
            b = mid
    return BisectionResult(0.5 * (a + b), lo, hi, f_lo, f_hi, it, history)


@dataclass
class ThresholdQuery:
    scenario: str
    fixed: dict
    scan: str
    lo: float
    hi: float
    outcome: Optional[str] = None
    tol: float = 1e-6

    def __post_init__(self):
        sc = get_scenario(self.scenario)
        allowed = set(sc.required) | set(sc.optional)
        names = [*self.fixed, self.scan]
        unknown = [n for n in names if n not in allowed]
        if unknown:
            raise ParseError(f"scenario {sc.name!r} has no parameters {unknown}")
        missing = [n for n in sc.required if n not in names]
        if missing:
            raise ParseError(f"scenario {sc.name!r} needs values for {missing}")
        if sc.swapped:
            if self.outcome is None:
                raise ParseError(f"scenario {sc.name!r} needs an outcome label")
            self.outcome = BellLabel.parse(self.outcome)


def boundary_function(query: ThresholdQuery):
    """x -> abs_lhs - 1 at the scanned point for the selected branch."""
    sc = get_scenario(query.scenario)

    def f(x):
        point = {**query.fixed, query.scan: x}
        branches = sc.build(point)
        if sc.swapped:
            rho = branches[BELL_LABELS.index(query.outcome)].conditional_state
            if rho is None:
                raise BellSwapError(f"outcome {query.outcome.value} has zero probability at {point}")
        else:
            rho = branches[0][2]
        report, _ = analyze(rho)
        return report.abs_lhs - 1.0

    return f


def find_threshold(query: ThresholdQuery) -> BisectionResult:
    return bisect_boundary(boundary_function(query), query.lo, query.hi, query.tol)
