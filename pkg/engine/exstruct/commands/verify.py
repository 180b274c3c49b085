"""`exstruct verify`: the full randomized verification suite."""

from argparse import Namespace

from exstruct.commands.render import section_lines
from exstruct.models.report import SuiteReport
from exstruct.services.suite import run_suite
from exstruct.services.workspace import Workspace


def render(report: SuiteReport, substructures: int) -> str:
    lines = [f"seed {report.seed}, {report.samples} samples", f"substructures: {substructures}"]
    for section in report.sections:
        lines += section_lines(section)
    lines.append("all checks passed" if report.passed else "CHECKS FAILED")
    return "\n".join(lines) + "\n"


def run(workspace: Workspace, args: Namespace) -> int:
    analysis = workspace.analysis
    report = run_suite(analysis, workspace.seed, workspace.samples)
    print(render(report, len(analysis.serre_subsets())), end="")
    return 0 if report.passed else 1
