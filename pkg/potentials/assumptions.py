"""
Assumption and threshold checks on h for each regime.

Each condition reports pass, fail or not-applicable together with the
attained value, the threshold and the margin threshold - attained.
"""

import logging
import math
from typing import Dict, Iterable, Literal, Optional

from pydantic import BaseModel, Field

from fields.grid import Grid
from functionals.params import KirchhoffParams
from landscape.thresholds import (
    landscape_threshold,
    linking_threshold,
    radial_derivative_threshold,
)
from potentials.families import PotentialSpec
from potentials.norms import PotentialNorms, potential_norms
from utils.errors import AssumptionError
from utils.run_context import get_run_context

logger = logging.getLogger(__name__)

Status = Literal["pass", "fail", "not-applicable"]

CONDITION_NAMES = (
    "potential_integrable",
    "radial_term_integrable",
    "radial_ratio_bounded",
    "landscape_gap",
    "radial_derivative_bound",
    "linking_bound",
)


class ConditionResult(BaseModel):
    """Outcome of one assumption check."""

    name: str
    status: Status
    attained: Optional[float] = None
    threshold: Optional[float] = None
    margin: Optional[float] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status != "fail"


class AssumptionReport(BaseModel):
    """All conditions for one (h, params) pair."""

    conditions: Dict[str, ConditionResult] = Field(default_factory=dict)
    norms: Dict[str, Optional[float]] = Field(default_factory=dict)

    def __getitem__(self, name: str) -> ConditionResult:
        return self.conditions[name]

    def failures(self, names: Optional[Iterable[str]] = None):
        names = list(names) if names is not None else list(self.conditions)
        return [self.conditions[n] for n in names if self.conditions[n].status == "fail"]

    def require(self, *names: str) -> None:
        """
        Raise if any of the named conditions failed.

        Raises:
            AssumptionError: Listing each failed condition with its margin
        """
        failed = self.failures(names)
        if failed:
            summary = ", ".join(f"{c.name} (margin {c.margin})" for c in failed)
            raise AssumptionError(
                f"assumption check failed: {summary}",
                {"conditions": [c.model_dump() for c in failed]},
            )


def _bound(name: str, attained: float, threshold: Optional[float], note: str = "") -> ConditionResult:
    if threshold is None:
        return ConditionResult(name=name, status="fail", attained=attained, note=note)
    ok = math.isfinite(attained) and attained < threshold
    return ConditionResult(
        name=name,
        status="pass" if ok else "fail",
        attained=attained,
        threshold=threshold,
        margin=threshold - attained,
        note=note,
    )


def _finite(name: str, attained: float) -> ConditionResult:
    return ConditionResult(
        name=name,
        status="pass" if math.isfinite(attained) else "fail",
        attained=attained,
    )


def _skip(name: str, note: str) -> ConditionResult:
    return ConditionResult(name=name, status="not-applicable", note=note)


def check_assumptions(
    spec: PotentialSpec,
    params: KirchhoffParams,
    m_c: Optional[float] = None,
    *,
    grid: Grid,
    c_np: Optional[float] = None,
    norms: Optional[PotentialNorms] = None,
) -> AssumptionReport:
    """
    Evaluate every condition that applies to (spec, params).

    Args:
        spec: Potential description
        params: Kirchhoff constants
        m_c: Limit mountain-pass level, needed by the supercritical bounds
        grid: Grid for the norms (and for C_{N,p} when c_np is not given)
        c_np: Best Gagliardo-Nirenberg constant
        norms: Precomputed norms of h

    Returns:
        AssumptionReport keyed by condition name
    """
    norms = norms or potential_norms(spec, params.q, params.p, grid)
    nonneg = spec.sign == "nonneg" or spec.vanishes
    nonpos = spec.sign == "nonpos" or spec.vanishes
    supercritical = params.regime == "supercritical"
    results: Dict[str, ConditionResult] = {}

    if nonneg:
        results["potential_integrable"] = _finite("potential_integrable", norms.norm_2_over_2mq)
        both_finite = math.isfinite(norms.norm_2_over_2mq) and math.isfinite(norms.norm_radial)
        results["radial_term_integrable"] = ConditionResult(
            name="radial_term_integrable",
            status="pass" if both_finite else "fail",
            attained=norms.norm_radial,
        )
    else:
        results["potential_integrable"] = _skip("potential_integrable", "needs h >= 0")
        results["radial_term_integrable"] = _skip("radial_term_integrable", "needs h >= 0")

    if nonpos:
        upsilon = norms.upsilon
        results["radial_ratio_bounded"] = ConditionResult(
            name="radial_ratio_bounded",
            status="pass" if upsilon is not None and math.isfinite(norms.norm_2_over_2mq) else "fail",
            attained=upsilon,
            note="" if upsilon is not None else "|x . grad hbar| / hbar is unbounded",
        )
    else:
        results["radial_ratio_bounded"] = _skip("radial_ratio_bounded", "needs h <= 0")

    if not supercritical:
        for name in ("landscape_gap", "radial_derivative_bound", "linking_bound"):
            results[name] = _skip(name, "subcritical regime")
    else:
        if nonneg:
            if c_np is None:
                c_np = get_run_context().gn_constant(params.dim, params.p, grid)
            results["landscape_gap"] = _bound(
                "landscape_gap", norms.norm_p_over_pmq, landscape_threshold(params, c_np)
            )
            if m_c is None:
                results["radial_derivative_bound"] = _skip(
                    "radial_derivative_bound", "m_c not supplied"
                )
            else:
                results["radial_derivative_bound"] = _bound(
                    "radial_derivative_bound",
                    norms.norm_radial,
                    radial_derivative_threshold(params, m_c),
                )
        else:
            results["landscape_gap"] = _skip("landscape_gap", "needs h >= 0")
            results["radial_derivative_bound"] = _skip("radial_derivative_bound", "needs h >= 0")

        if not nonpos:
            results["linking_bound"] = _skip("linking_bound", "needs h <= 0")
        elif m_c is None:
            results["linking_bound"] = _skip("linking_bound", "m_c not supplied")
        else:
            results["linking_bound"] = _bound(
                "linking_bound",
                norms.norm_2_over_2mq,
                linking_threshold(params, m_c, norms.upsilon),
                note="" if norms.upsilon is not None else "upsilon unbounded",
            )

    for result in results.values():
        if result.status == "fail":
            logger.warning("condition %s failed: %s", result.name, result.model_dump())

    return AssumptionReport(
        conditions={name: results[name] for name in CONDITION_NAMES},
        norms={k: v for k, v in norms.to_dict().items() if k != "source"},
    )
