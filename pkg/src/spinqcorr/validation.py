"""Oracle-equivalence suites behind ``spinqcorr validate``.

Each suite returns a :class:`SuiteResult` holding one row per checked point.
A row passes when its residual is within tolerance.  Findings are
informational and never fail a suite.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .correlators import correlators
from .ed import DEFAULT_SIZES, extrapolate_ed
from .lmg import AGREEMENT_TOL as LMG_TOL, lmg_validate
from .measures import closed_measures_xxz, definitional_measures
from .states import xxz_state

CLOSED_FORM_TOL = 1e-7
ED_TOL = {1: 5e-3, 2: 1e-2}

CLOSED_FORM_GRID = (-0.9, -0.5, -0.1, 0.3, 0.7, 1.0, 1.5, 2.5)
ED_GRID = (-0.9, -0.5, 0.0, 0.5, 0.9, 1.5, 2.0, 3.0)
LMG_GRID = tuple(round(0.1 * k, 1) for k in range(10)) + (1.0, 1.5, 2.0)

SUITES = ("closed-forms", "ed", "lmg")


@dataclass
class SuiteResult:
    name: str
    rows: list[dict] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row["pass"] for row in self.rows)

    @property
    def max_residual(self) -> float:
        return max((row["residual"] for row in self.rows), default=0.0)

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "rows": self.rows,
            "findings": self.findings,
        }


def closed_form_suite(grid: Sequence[float] = CLOSED_FORM_GRID, tol: float = CLOSED_FORM_TOL) -> SuiteResult:
    out = SuiteResult("closed-forms")
    for r in (1, 2):
        for delta in grid:
            c = correlators(delta, r)
            closed = closed_measures_xxz(c).as_dict()
            ref = definitional_measures(xxz_state(c)).as_dict()
            for name in closed:
                res = abs(closed[name] - ref[name])
                out.rows.append({
                    "delta": delta, "r": r, "measure": name,
                    "closed": closed[name], "definitional": ref[name],
                    "residual": res, "tol": tol, "pass": res <= tol,
                })
    return out


def ed_suite(
    grid: Sequence[float] = ED_GRID,
    sizes: Sequence[int] = DEFAULT_SIZES,
    rs: Sequence[int] = (1, 2),
    scheme: str = "regime",
) -> SuiteResult:
    out = SuiteResult("ed")
    for r in rs:
        for delta in grid:
            c = correlators(delta, r)
            e = extrapolate_ed(delta, r, sizes, scheme)
            res = max(abs(c.zz - e.zz), abs(c.xx - e.xx))
            out.rows.append({
                "delta": delta, "r": r, "zz": c.zz, "xx": c.xx,
                "ed_zz": e.zz, "ed_xx": e.xx, "sizes": list(sizes), "scheme": scheme,
                "residual": res, "tol": ED_TOL[r], "pass": res <= ED_TOL[r],
            })
    return out


def lmg_suite(grid: Sequence[float] = LMG_GRID) -> SuiteResult:
    out = SuiteResult("lmg")
    for lam in grid:
        point = lmg_validate(lam)
        res = point.residuals()
        worst = max(res["negativity"], res["deficit"], res["tdd"])
        tol = LMG_TOL
        if lam >= 1.0:
            # product state: everything must vanish
            worst = max(worst, *point.definitional.as_dict().values())
            tol = 1e-10
        out.rows.append({
            "lambda": lam,
            "negativity": point.closed.negativity, "deficit": point.closed.deficit,
            "tdd": point.closed.tdd,
            "lqu_definitional": point.definitional.lqu, "lqu_published": point.lqu_published,
            "residual": worst, "tol": tol, "pass": worst <= tol,
        })
        if point.lqu_finding:
            out.findings.append(
                f"FINDING lambda={lam:g}: LQU from the W matrix is {point.definitional.lqu:.6f} "
                f"(= 1 - lambda^2), published closed form gives {point.lqu_published:.6f} (= 1 - lambda)"
            )
    return out


def run_suite(name: str, **kwargs) -> SuiteResult:
    if name == "closed-forms":
        return closed_form_suite(**kwargs)
    if name == "ed":
        return ed_suite(**kwargs)
    if name == "lmg":
        return lmg_suite(**kwargs)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
