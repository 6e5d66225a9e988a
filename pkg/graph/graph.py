"""
LangGraph workflow for the verify mode.

The check groups run as a fixed chain of nodes; each appends its checks to
the shared state and the last node reduces them into a VerificationReport.
"""

import logging
from typing import Any, Callable, Dict, List, Optional

from langgraph.graph import END, StateGraph

from graph.nodes import (
    identities_node,
    report_node,
    subcritical_node,
    supercritical_negative_node,
    supercritical_positive_node,
)
from graph.state import VerificationReport, VerificationState, create_initial_state
from utils.config import RunConfig

logger = logging.getLogger(__name__)

GROUP_NODES = (
    ("identities", identities_node),
    ("subcritical", subcritical_node),
    ("supercritical_positive", supercritical_positive_node),
    ("supercritical_negative", supercritical_negative_node),
)

RECURSION_LIMIT = 15


class VerificationWorkflow:
    """
    Verification workflow built on LangGraph's StateGraph.

    Groups left out of the selection pass through their node without
    running anything, so the graph shape never depends on the run.
    """

    def __init__(self):
        self.workflow = self._create_workflow()

    def _create_workflow(self):
        workflow = StateGraph(VerificationState)

        for name, node in GROUP_NODES:
            workflow.add_node(name, node)
        workflow.add_node("report", report_node)

        workflow.set_entry_point(GROUP_NODES[0][0])
        for (current, _), (following, _) in zip(GROUP_NODES, GROUP_NODES[1:]):
            workflow.add_edge(current, following)
        workflow.add_edge(GROUP_NODES[-1][0], "report")
        workflow.add_edge("report", END)

        return workflow.compile()

    def run(
        self,
        config: RunConfig,
        groups: Optional[List[str]] = None,
        on_status: Optional[Callable[[str], None]] = None,
    ) -> VerificationReport:
        """
        Run the selected check groups.

        Args:
            config: Validated run configuration
            groups: Groups to run (defaults to config.solver.groups)
            on_status: Receives a status line as each group finishes

        Returns:
            VerificationReport with every check of the selected groups
        """
        initial_state = create_initial_state(config, groups)
        logger.info("🔄 verifying groups %s", ", ".join(initial_state["groups"]))
        report = None
        for chunk in self.workflow.stream(
            initial_state, config={"recursion_limit": RECURSION_LIMIT}
        ):
            for node_name, output in chunk.items():
                if not isinstance(output, dict):
                    continue
                if output.get("report") is not None:
                    report = output["report"]
                if on_status is not None:
                    for line in status_lines(node_name, output):
                        on_status(line)
        return report


def status_lines(node_name: str, output: Dict[str, Any]) -> List[str]:
    """Status lines for one node update: group verdicts and the final verdict."""
    lines = []
    if output.get("checks"):
        failed = [c.name for c in output["checks"] if not c.passed]
        lines.append(f"{'❌' if failed else '✅'} {node_name}: {len(output['checks'])} checks")
        lines.extend(f"   ↳ failed: {name}" for name in failed)
    elif output.get("report") is not None:
        lines.append(f"📋 verification {'PASS' if output['report'].passed else 'FAIL'}")
    return lines


def create_workflow() -> VerificationWorkflow:
    """Create a verification workflow instance."""
    return VerificationWorkflow()
