"""Parameter sweeps, finite-difference derivatives and transition detection.

A sweep evaluates the closed-form measures on a uniform grid.  Derivatives
are taken within regime segments only: stencils never straddle a regime
boundary (``delta = +-1`` for the chain, ``lambda = 1`` for LMG), so the
discontinuities that mark the transitions survive differencing.
"""
from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .correlators import Regime, classify, correlators
from .errors import BracketError, DomainError, SpinQCorrError
from .lmg import lmg_closed_measures
from .measures import LABELS, MeasureSet, closed_measures_xxz

log = logging.getLogger(__name__)

MODELS = ("xxz", "lmg")
XXZ_BOUNDARIES = (-1.0, 1.0)
LMG_BOUNDARIES = (1.0,)
BOUNDARY_SNAP = 1e-9  # grid points closer than this (in steps) count as "on" a boundary

ZERO_TOL = 1e-10
DETECTION_FACTOR = 10.0
DETECTION_WINDOW = 10
THREADS_ENV = "SPINQCORR_THREADS"


@dataclass(frozen=True)
class SweepConfig:
    model: str = "xxz"
    r: int = 1
    param_min: float = -1.5
    param_max: float = 3.0
    step: float = 0.01
    derivative_step: float | None = None
    measures: tuple[str, ...] = ("N", "I", "D", "U")
    include_boundaries: bool = False

    def __post_init__(self):
        if self.model not in MODELS:
            raise DomainError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.model == "xxz" and self.r not in (1, 2):
            raise DomainError(f"separation r must be 1 or 2, got {self.r!r}")
        if not (math.isfinite(self.param_min) and math.isfinite(self.param_max)):
            raise DomainError("sweep bounds must be finite")
        if not self.param_min < self.param_max:
            raise DomainError("param_min must be below param_max")
        if not self.step > 0:
            raise DomainError("step must be positive")
        if self.derivative_step is not None and not self.derivative_step > 0:
            raise DomainError("derivative_step must be positive")
        if self.model == "lmg" and self.param_min < 0:
            raise DomainError("lambda must be non-negative")
        bad = [m for m in self.measures if m not in LABELS]
        if bad or not self.measures:
            raise DomainError(f"measures must be a non-empty subset of N,I,D,U, got {self.measures!r}")

    @property
    def h(self) -> float:
        return self.derivative_step if self.derivative_step is not None else self.step

    @property
    def boundaries(self) -> tuple[float, ...]:
        return XXZ_BOUNDARIES if self.model == "xxz" else LMG_BOUNDARIES

    def to_dict(self) -> dict:
        d = asdict(self)
        d["measures"] = list(self.measures)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        d = dict(d)
        d["measures"] = tuple(d.get("measures", ("N", "I", "D", "U")))
        return cls(**d)


@dataclass(frozen=True)
class SweepRecord:
    param: float
    regime: Regime
    values: MeasureSet | None
    derivatives: MeasureSet | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class CriticalReport:
    location: float
    kind: str  # "sudden-birth" | "derivative-jump" | "kink"
    measure: str
    magnitude: float
    threshold: float = field(default=0.0, compare=False)


# ---------------------------------------------------------------------------
# grid and point evaluation

def sweep_grid(cfg: SweepConfig) -> np.ndarray:
    """Uniform grid over [param_min, param_max].

    Unless ``include_boundaries`` is set, a grid that would land on a regime
    boundary is shifted by half a step, so no sample sits on a transition.
    """
    n = int(math.floor((cfg.param_max - cfg.param_min) / cfg.step + 1e-9))
    grid = cfg.param_min + cfg.step * np.arange(n + 1)
    if cfg.include_boundaries:
        return grid
    if any(np.min(np.abs(grid - b)) < BOUNDARY_SNAP * cfg.step for b in cfg.boundaries):
        grid = grid + 0.5 * cfg.step
        grid = grid[grid <= cfg.param_max + BOUNDARY_SNAP * cfg.step]
    return grid


def regime_of(model: str, p: float) -> Regime:
    if model == "xxz":
        return classify(p)
    return Regime.LMG_PAIRED if p < 1.0 else Regime.LMG_POLARIZED


def point_measures(model: str, p: float, r: int = 1) -> MeasureSet:
    """Closed-form measures at one parameter value."""
    if model == "xxz":
        return closed_measures_xxz(correlators(p, r))
    if model == "lmg":
        return lmg_closed_measures(p)
    raise DomainError(f"unknown model {model!r}")


def _segment_key(model: str, p: float) -> Regime:
    return regime_of(model, p)


# ---------------------------------------------------------------------------
# sweep

def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        n = int(raw)
    except ValueError:
        log.warning("ignoring non-integer %s=%r", THREADS_ENV, raw)
        return 1
    return max(1, n)


def _evaluate_many(fn: Callable[[float], MeasureSet], params: Sequence[float], threads: int):
    def safe(p):
        try:
            return fn(p), None
        except (SpinQCorrError, ArithmeticError, ValueError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    if threads <= 1:
        return [safe(p) for p in params]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(safe, params))  # map keeps input order


def _derivative(p, h, value, lookup, seg, model) -> MeasureSet | None:
    """Central difference, or a second-order one-sided stencil at a segment edge."""
    keys = list(LABELS.values())

    def get(q):
        if _segment_key(model, q) is not seg:
            return None
        return lookup(q)

    fm, fp = get(p - h), get(p + h)
    if fm is not None and fp is not None:
        return MeasureSet(*[(getattr(fp, k) - getattr(fm, k)) / (2 * h) for k in keys])
    if fp is not None:
        fpp = get(p + 2 * h)
        if fpp is not None:
            return MeasureSet(*[(-3 * getattr(value, k) + 4 * getattr(fp, k) - getattr(fpp, k)) / (2 * h)
                                for k in keys])
        return MeasureSet(*[(getattr(fp, k) - getattr(value, k)) / h for k in keys])
    if fm is not None:
        fmm = get(p - 2 * h)
        if fmm is not None:
            return MeasureSet(*[(3 * getattr(value, k) - 4 * getattr(fm, k) + getattr(fmm, k)) / (2 * h)
                                for k in keys])
        return MeasureSet(*[(getattr(value, k) - getattr(fm, k)) / h for k in keys])
    return None


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> list[SweepRecord]:
    """Evaluate every grid point of ``cfg``; failures are recorded, not raised.

    Parameters
    ----------
    cfg : SweepConfig
    threads : int, optional
        Worker threads; defaults to ``$SPINQCORR_THREADS`` or 1.  Results are
        merged in grid order whatever the thread count.
    """
    threads = _thread_count() if threads is None else max(1, int(threads))
    grid = sweep_grid(cfg)
    h = cfg.h
    # stencil points: on-grid when h equals the step, extra evaluations otherwise
    wanted = {}
    for p in grid:
        for k in (-2, -1, 0, 1, 2):
            q = float(p + k * h)
            wanted.setdefault(round(q, 12), q)
    keys = sorted(wanted)
    results = _evaluate_many(lambda q: point_measures(cfg.model, q, cfg.r), [wanted[k] for k in keys], threads)
    table = dict(zip(keys, results))

    def lookup(q):
        return table.get(round(float(q), 12), (None, None))[0]

    records = []
    for p in grid:
        p = float(p)
        seg = _segment_key(cfg.model, p)
        value, err = table[round(p, 12)]
        if value is None:
            records.append(SweepRecord(p, seg, None, None, err))
            continue
        deriv = _derivative(p, h, value, lookup, seg, cfg.model)
        records.append(SweepRecord(p, seg, value, deriv))
    failed = sum(1 for rec in records if not rec.ok)
    if failed:
        log.warning("%d of %d sweep points failed", failed, len(records))
    return records


# ---------------------------------------------------------------------------
# detection

def _series(records: Sequence[SweepRecord], label: str):
    good = [rec for rec in records if rec.ok and rec.derivatives is not None]
    x = np.array([rec.param for rec in good])
    f = np.array([rec.values.by_label(label) for rec in good])
    df = np.array([rec.derivatives.by_label(label) for rec in good])
    return x, f, df


def _local_median(values: np.ndarray, i: int, window: int, exclude: int = 1) -> float:
    lo, hi = max(0, i - window), min(values.size, i + window + 1)
    neighbours = np.concatenate([values[lo:max(lo, i - exclude)], values[min(hi, i + exclude + 1):hi]])
    return float(np.median(neighbours)) if neighbours.size else 0.0


def _flag_spikes(x_loc, signal, window, factor, floor):
    """Indices where ``signal`` exceeds ``factor`` times its local median and ``floor``.

    Of several adjacent flagged indices only the largest is kept.
    """
    hits = []
    for i in range(signal.size):
        threshold = max(factor * _local_median(signal, i, window), floor)
        if signal[i] > threshold:
            hits.append((i, threshold))
    kept = []
    for i, thr in hits:
        if kept and i - kept[-1][0] <= 2:
            if signal[i] > signal[kept[-1][0]]:
                kept[-1] = (i, thr)
            continue
        kept.append((i, thr))
    return kept


def detect_critical_points(
    records: Sequence[SweepRecord],
    measures: Iterable[str] = ("N", "I", "D", "U"),
    *,
    factor: float = DETECTION_FACTOR,
    window: int = DETECTION_WINDOW,
    zero_tol: float = ZERO_TOL,
    rel_floor: float = 0.05,
) -> list[CriticalReport]:
    """Find transition signatures in a sweep.

    Three detectors run per measure:

    * ``sudden-birth``: the value leaves zero (``<= zero_tol``) between two
      adjacent points;
    * ``derivative-jump``: the change of the derivative between adjacent
      points exceeds ``factor`` times its local median;
    * ``kink``: the absolute second difference of the values exceeds
      ``factor`` times its local median.

    Spikes must also exceed ``rel_floor`` times the largest spike of the same
    signal so that rounding noise on flat stretches is not reported.

    Parameters
    ----------
    records : sequence of SweepRecord
        At least five successful points, sorted by parameter.
    """
    if sum(1 for rec in records if rec.ok) < 5:
        raise DomainError("detection needs at least five successful sweep points")
    reports: list[CriticalReport] = []
    for label in measures:
        x, f, df = _series(records, label)
        if x.size < 5:
            continue
        mids = 0.5 * (x[1:] + x[:-1])

        for i in range(x.size - 1):
            if abs(f[i]) <= zero_tol < abs(f[i + 1]):
                reports.append(CriticalReport(float(mids[i]), "sudden-birth", label, float(abs(f[i + 1])), zero_tol))

        jumps = np.abs(np.diff(df))
        floor = rel_floor * float(np.max(jumps)) if jumps.size else 0.0
        for i, thr in _flag_spikes(mids, jumps, window, factor, floor):
            reports.append(CriticalReport(float(mids[i]), "derivative-jump", label, float(jumps[i]), thr))

        second = np.abs(f[2:] - 2.0 * f[1:-1] + f[:-2])
        floor = rel_floor * float(np.max(second)) if second.size else 0.0
        for i, thr in _flag_spikes(x[1:-1], second, window, factor, floor):
            reports.append(CriticalReport(float(x[i + 1]), "kink", label, float(second[i]), thr))
    reports.sort(key=lambda rep: (rep.measure, rep.location, rep.kind))
    return reports


# ---------------------------------------------------------------------------
# zero crossing

def locate_zero_crossing(
    measure: str,
    r: int,
    bracket: tuple[float, float],
    *,
    width: float = 1e-6,
    model: str = "xxz",
    zero_tol: float = ZERO_TOL,
) -> float:
    """Bisect for the edge where ``measure`` switches between zero and positive.

    Returns the midpoint of the final interval of width ``width``.
    """
    if measure not in LABELS:
        raise DomainError(f"unknown measure {measure!r}")
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise BracketError(f"bracket {bracket!r} is empty")

    def positive(p):
        return point_measures(model, p, r).by_label(measure) > zero_tol

    s_lo, s_hi = positive(lo), positive(hi)
    if s_lo == s_hi:
        raise BracketError(
            f"{measure} is {'positive' if s_lo else 'zero'} at both ends of {bracket!r}"
        )
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if positive(mid) == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
