"""Batch experiment driver: parameter sweeps, growth-law fits, and the
cross-module invariant checklist."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import certify as certmod
from . import directions as dirs
from . import probes as probemod
from .fields import SampledField


FAMILIES = ("uniform", "uniform2d", "lacunary", "boustrophedon")

CSV_COLUMNS = (
    "family",
    "params",
    "N",
    "rayleigh_lower",
    "certified_upper",
    "grid_meta",
    "seed",
)


@dataclass
class SweepPlan:
    family: str
    grid: list
    suite: str = "sharpness+random"
    strategy: str = ""
    seed: int = 7
    shape: tuple | None = None
    box: tuple | None = None
    probe_count: int = 4
    band: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if not self.grid:
            raise ValueError("parameter grid must be nonempty")
        if self.suite not in ("sharpness+random", "random", "sharpness"):
            raise ValueError(f"unknown probe suite {self.suite!r}")
        if not self.strategy:
            self.strategy = _natural_strategy(self.family)
        if self.shape is None:
            self.shape = _default_shape(self.family)
        if self.box is None:
            self.box = _default_box(self.family)
        self.shape = tuple(int(s) for s in self.shape)
        self.box = tuple(float(b) for b in self.box)


def _natural_strategy(family: str) -> str:
    return {
        "uniform": "dyadic-1d",
        "uniform2d": "product-grid",
        "lacunary": "lacunary-mixed",
        "boustrophedon": "curve-pairs",
    }[family]


def _default_shape(family: str) -> tuple:
    return (512, 512) if family in ("uniform", "lacunary") else (128, 128, 128)


def _default_box(family: str) -> tuple:
    return (16.0, 16.0) if family in ("uniform", "lacunary") else (64.0, 64.0, 64.0)


def build_family_instance(family: str, params: dict):
    """(DirectionSet, sharpness spec or None, curve degree or None)."""
    if family == "uniform":
        n = int(params["N"])
        return dirs.uniform(n), probemod.SharpnessSpec(1, (2,)), None
    if family == "uniform2d":
        m = int(params["M"])
        omega = dirs.product([dirs.uniform(m), dirs.uniform(m)],
                             label=f"uniform({m})^2")
        return omega, probemod.SharpnessSpec(2, (m, m)), None
    if family == "lacunary":
        r, m = int(params["R"]), int(params["M"])
        return dirs.lacunary_uniform(r, m), probemod.SharpnessSpec(1, (2,)), None
    if family == "boustrophedon":
        m = int(params["M"])
        omega, degree = dirs.boustrophedon_curve_samples(m)
        return omega, probemod.SharpnessSpec(2, (m, m)), degree
    raise AssertionError(family)


def build_suite(plan: SweepPlan, spec, row_seed: int):
    probes = []
    if plan.suite in ("sharpness", "sharpness+random") and spec is not None:
        try:
            f = probemod.build_sharpness_field(spec, plan.shape, plan.box)
            probes.append(probemod.Probe(f"sharpness{spec.n_list}", f, None))
        except ValueError:
            pass  # box too small for this spec; random probes still apply
    if plan.suite in ("random", "sharpness+random"):
        probes.extend(
            probemod.random_probes(plan.shape, plan.box, plan.probe_count,
                                   row_seed, plan.band)
        )
    if not probes:
        raise ValueError("probe suite is empty for this grid")
    return probes


def _strategy_for(plan: SweepPlan, degree) -> certmod.Strategy:
    strat = certmod.Strategy.parse(plan.strategy)
    if strat.kind == "curve-pairs" and strat.degree is None:
        strat = certmod.Strategy("curve-pairs", degree=degree)
    return strat


def run_row(plan: SweepPlan, index: int, params: dict) -> dict:
    omega, spec, degree = build_family_instance(plan.family, params)
    row_seed = plan.seed * 1000 + index
    probes = build_suite(plan, spec, row_seed)
    report = probemod.estimate_lower_bound(omega, probes)
    cert = certmod.certify(omega, _strategy_for(plan, degree))
    if not certmod.soundness_audit(cert, report):
        raise AssertionError(
            f"soundness violation: certificate {cert.value} < measured "
            f"{report.max_rayleigh} for {omega.label}"
        )
    return {
        "family": plan.family,
        "params": ",".join(f"{k}={v}" for k, v in sorted(params.items())),
        "N": len(omega),
        "rayleigh_lower": repr(report.max_rayleigh),
        "certified_upper": repr(cert.value),
        "grid_meta": "shape=" + "x".join(map(str, plan.shape))
        + ";box=" + "x".join(repr(b) for b in plan.box),
        "seed": row_seed,
    }


def run_sweep(plan: SweepPlan, max_workers: int | None = None) -> list:
    """One row per grid point, executed in a worker pool, output in grid
    order regardless of completion order.  Row failures are recorded in
    place and do not stop the run."""
    if max_workers is None:
        max_workers = int(os.environ.get("MDHT_THREADS", "0")) or min(
            4, os.cpu_count() or 1
        )
    rows = [None] * len(plan.grid)

    def work(i):
        try:
            return run_row(plan, i, plan.grid[i])
        except Exception as exc:  # recorded per-row, run continues
            return {
                "family": plan.family,
                "params": ",".join(f"{k}={v}" for k, v in sorted(plan.grid[i].items())),
                "N": "",
                "rayleigh_lower": f"ERROR:{type(exc).__name__}",
                "certified_upper": "",
                "grid_meta": "",
                "seed": plan.seed * 1000 + i,
            }

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for i, row in enumerate(pool.map(work, range(len(plan.grid)))):
            rows[i] = row
    return rows


def rows_to_csv(rows, preamble_lines=()) -> bytes:
    buf = io.StringIO()
    for line in preamble_lines:
        buf.write(f"# {line}\n")
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buf.getvalue().encode()


def csv_to_rows(data: bytes) -> list:
    lines = [ln for ln in data.decode().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


# ------------------------------------------------------------------- fitting

MODELS = ("logN", "sqrtlogN", "power")


@dataclass
class FitRecord:
    model: str
    intercept: float
    slope: float
    residual_rms: float
    slope_ci95: float
    n_rows: int

    def to_json_dict(self) -> dict:
        return self.__dict__.copy()


def fit_growth(rows, model: str) -> FitRecord:
    """Least-squares fit of rayleigh_lower against N under the given model."""
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}")
    xs, ys = [], []
    for row in rows:
        try:
            n = float(row["N"])
            y = float(row["rayleigh_lower"])
        except (KeyError, ValueError):
            continue
        xs.append(n)
        ys.append(y)
    if len(xs) < 4:
        raise ValueError("need at least 4 usable rows to fit")
    xs = np.array(xs)
    ys = np.array(ys)
    if model == "logN":
        design_x, target = np.log(xs), ys
    elif model == "sqrtlogN":
        design_x, target = np.sqrt(np.log(xs)), ys
    else:
        if np.any(ys <= 0):
            raise ValueError("power model needs positive Rayleigh values")
        design_x, target = np.log(xs), np.log(ys)
    a = np.column_stack([np.ones_like(design_x), design_x])
    coef, *_ = np.linalg.lstsq(a, target, rcond=None)
    resid = target - a @ coef
    dof = max(1, len(xs) - 2)
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(a.T @ a)
    return FitRecord(
        model=model,
        intercept=float(coef[0]),
        slope=float(coef[1]),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        slope_ci95=float(1.96 * np.sqrt(max(cov[1, 1], 0.0))),
        n_rows=len(xs),
    )


def constant_model_rms(rows) -> float:
    ys = np.array([float(r["rayleigh_lower"]) for r in rows
                   if r.get("rayleigh_lower") not in (None, "",)
                   and not str(r["rayleigh_lower"]).startswith("ERROR")])
    return float(np.sqrt(np.mean((ys - ys.mean()) ** 2)))
