"""Parameter scans over thickness, exponent, stiffness, gap and field.

Rows of a sweep are independent Casimir-energy evaluations; they may be
computed concurrently but are always collected in plan order with no
shared mutable state, so the output is bit-identical for any worker
count. A failed point (e.g. tolerance not met) is recorded in its row and
does not abort the sweep.
"""

from __future__ import annotations

import dataclasses
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .casimir import CasimirQuad, CasimirResult, casimir_energy
from .errors import MagcasError, UnknownFigure
from .materials import MaterialPreset, override_params, preset

__all__ = ["SweepPlan", "SweepRow", "run_sweep", "figure_bundle", "worker_count"]

_AXES = ("N_z", "l", "D_z_ratio", "delta", "H0")
ULTRATHIN_MAX = 3  # conclusions are drawn for thicker films


@dataclass(frozen=True)
class SweepPlan:
    """One scan axis over a preset, with the coefficient exponents to report.

    ``N_z`` is the fixed thickness used when the axis is not N_z itself.
    """

    preset: MaterialPreset
    axis: str
    values: Tuple
    coefficient_exponents: Tuple[float, ...]
    quad: CasimirQuad = field(default_factory=CasimirQuad.default)
    N_z: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "coefficient_exponents",
                           tuple(float(b) for b in self.coefficient_exponents))
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("values must be non-empty")
        diffs = [b - a for a, b in zip(self.values, self.values[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            raise ValueError("values must be strictly monotone")
        if not self.coefficient_exponents:
            raise ValueError("at least one coefficient exponent required")
        if self.axis == "N_z":
            if not all(isinstance(v, int) and v >= 1 for v in self.values):
                raise ValueError("N_z values must be positive integers")
        elif self.N_z is None or self.N_z < 1:
            raise ValueError(f"axis {self.axis!r} requires a fixed positive N_z")
        if self.axis == "l" and not all(v > 0 for v in self.values):
            raise ValueError("l values must be > 0")
        if self.axis == "D_z_ratio" and not all(v > 0 for v in self.values):
            raise ValueError("D_z_ratio values must be > 0")
        if self.axis == "delta" and not all(v >= 0 for v in self.values):
            raise ValueError("delta values must be >= 0")


@dataclass(frozen=True)
class SweepRow:
    """Results of one plan value, one CasimirResult per coefficient exponent."""

    axis_value: object
    results: Tuple[CasimirResult, ...]
    wall_time: float
    error: Optional[str] = None
    flags: Tuple[str, ...] = ()


def _row_inputs(plan: SweepPlan, value):
    """Model parameters and thickness for one axis value."""
    if plan.axis == "N_z":
        return plan.preset.params, int(value)
    overrides = {
        "l": {"l": value},
        "D_z_ratio": {"dz_ratio": value},
        "delta": {"delta": value},
        "H0": {"h0": value},
    }[plan.axis]
    return override_params(plan.preset, **overrides).params, int(plan.N_z)


def _compute_row(plan: SweepPlan, value) -> SweepRow:
    start = time.perf_counter()
    model, n_z = _row_inputs(plan, value)
    flags = ("ultrathin",) if n_z <= ULTRATHIN_MAX else ()
    try:
        base = casimir_energy(model, n_z, plan.quad,
                              b_exponent=plan.coefficient_exponents[0])
        results = [base]
        for b in plan.coefficient_exponents[1:]:
            results.append(dataclasses.replace(
                base, coefficient=base.E_cas * float(n_z) ** b, b_exponent=b))
        return SweepRow(axis_value=value, results=tuple(results),
                        wall_time=time.perf_counter() - start, flags=flags)
    except MagcasError as exc:
        return SweepRow(axis_value=value, results=(),
                        wall_time=time.perf_counter() - start,
                        error=f"{type(exc).__name__}: {exc}", flags=flags)


def worker_count(explicit: Optional[int] = None) -> int:
    """Worker count: explicit argument, else MAGCAS_WORKERS, else 1."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("MAGCAS_WORKERS", "").strip()
    return max(1, int(env)) if env else 1


def run_sweep(plan: SweepPlan, workers: Optional[int] = None):
    """Evaluate every plan value; rows come back in plan order.

    Row evaluations are independent and internally deterministic, so the
    returned rows are identical for any degree of parallelism.
    """
    nworkers = worker_count(workers)
    if nworkers == 1 or len(plan.values) == 1:
        return [_compute_row(plan, v) for v in plan.values]
    with ThreadPoolExecutor(max_workers=nworkers) as pool:
        futures = [pool.submit(_compute_row, plan, v) for v in plan.values]
        return [f.result() for f in futures]


_FIGURE_NZ = tuple(range(1, 31))


def figure_bundle(figure_id: str):
    """Sweep plans reproducing a named figure's curves (label, plan pairs)."""
    if figure_id == "Fig2":
        cr2o3 = preset("Cr2O3")
        gapless = dataclasses.replace(
            cr2o3, name="Cr2O3-gapless",
            params=dataclasses.replace(cr2o3.params, delta=0.0, K=None))
        return (
            ("delta0", SweepPlan(gapless, "N_z", _FIGURE_NZ, (3.0,))),
            ("cr2o3", SweepPlan(cr2o3, "N_z", _FIGURE_NZ, (3.0,))),
        )
    if figure_id == "Fig3":
        yig = preset("YIG")
        return tuple(
            (f"l{l:g}", SweepPlan(override_params(yig, l=l), "N_z",
                                  _FIGURE_NZ, (l,)))
            for l in (2.1, 2.0, 1.99, 1.9)
        )
    if figure_id == "FigS1":
        yig = preset("YIG")
        return tuple(
            (f"l{l:g}", SweepPlan(override_params(yig, l=l), "N_z",
                                  _FIGURE_NZ, (l,)))
            for l in (2.0, 1.9, 1.5, 1.0)
        )
    if figure_id == "FigS2":
        yig = preset("YIG")
        return tuple(
            (f"dz{r:g}", SweepPlan(override_params(yig, l=1.99, dz_ratio=r),
                                   "N_z", _FIGURE_NZ, (1.99,)))
            for r in (0.3, 0.5, 0.8, 1.0)
        )
    raise UnknownFigure(
        f"unknown figure {figure_id!r}; known: Fig2, Fig3, FigS1, FigS2"
    )
