"""
State of the verification workflow.

Each node appends its checks to the `checks` channel (accumulated with
operator.add); the report node reduces them into a VerificationReport.
"""

import operator
from typing import Annotated, Any, Dict, List, Literal, Optional, TypedDict

from pydantic import BaseModel, ConfigDict, Field

from utils.config import RunConfig

Relation = Literal["<", "<=", "approx"]


class Check(BaseModel):
    """One named inequality or identity with its two sides."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    name: str
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    relation: Relation = "<="
    passed: bool = Field(alias="pass")
    tolerance: float = 0.0
    anchor: str = ""
    note: str = ""

    @classmethod
    def compare(
        cls,
        name: str,
        lhs: float,
        rhs: float,
        relation: Relation = "<=",
        tolerance: float = 0.0,
        anchor: str = "",
        converged: bool = True,
        note: str = "",
    ) -> "Check":
        """
        Evaluate lhs `relation` rhs.

        "<" demands lhs < rhs - tolerance (a strict margin), "<=" allows
        lhs <= rhs + tolerance and "approx" is |lhs - rhs| <= tolerance |rhs|.
        A check built on an unconverged solver run never passes.
        """
        if relation == "<":
            holds = lhs < rhs - tolerance
        elif relation == "<=":
            holds = lhs <= rhs + tolerance
        else:
            holds = abs(lhs - rhs) <= tolerance * abs(rhs)
        if not converged:
            note = (note + "; " if note else "") + "underlying solver run did not converge"
        return cls(
            name=name,
            lhs=float(lhs),
            rhs=float(rhs),
            relation=relation,
            passed=bool(holds and converged),
            tolerance=tolerance,
            anchor=anchor,
            note=note,
        )

    @classmethod
    def failure(cls, name: str, note: str, anchor: str = "") -> "Check":
        return cls(name=name, passed=False, note=note, anchor=anchor)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


class VerificationReport(BaseModel):
    """Every check of a verify run; passes iff all checks pass."""

    model_config = ConfigDict(frozen=True)

    checks: List[Check] = Field(default_factory=list)
    groups: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> List[Check]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "pass": self.passed,
            "groups": list(self.groups),
            "checks": [check.to_dict() for check in self.checks],
        }


class VerificationState(TypedDict):
    """Channels of the verification graph."""

    config: RunConfig
    groups: List[str]

    # Checks accumulate across nodes
    checks: Annotated[List[Check], operator.add]

    report: Optional[VerificationReport]


def create_initial_state(config: RunConfig, groups: Optional[List[str]] = None) -> VerificationState:
    """
    Create the initial state for a verify run.

    Args:
        config: Validated run configuration
        groups: Check groups to run (defaults to config.solver.groups)

    Returns:
        Initial VerificationState
    """
    return VerificationState(
        config=config,
        groups=list(groups if groups is not None else config.solver.groups),
        checks=[],
        report=None,
    )
