"""`exstruct analyze`: Hom/Ext tables, simple defects and the substructure count."""

from argparse import Namespace
from pathlib import Path

from exstruct.commands.render import dimension_table, hasse_dot, serre_text
from exstruct.models.report import AnalysisReport
from exstruct.services.workspace import Workspace


def build_report(workspace: Workspace) -> AnalysisReport:
    analysis = workspace.analysis
    table = workspace.table
    subsets = analysis.serre_subsets()
    return AnalysisReport(
        p=workspace.field.p,
        algebra_dim=workspace.algebra.dim,
        atlas=table.names,
        hom_dims=[[h.dim for h in row] for row in table.homs],
        ext_dims=analysis.ext_dims,
        division_degrees=list(table.division_degrees),
        simple_defects=analysis.serre_label(analysis.simple_defects),
        serre_count=len(subsets),
        substructure_count=len({analysis.substructure_from_serre(s).key for s in subsets}),
    )


def render(report: AnalysisReport) -> str:
    lines = [
        f"p = {report.p}, dim A = {report.algebra_dim}",
        f"atlas: {' '.join(report.atlas)}",
        f"division degrees: {' '.join(str(d) for d in report.division_degrees)}",
    ]
    lines += dimension_table("dim Hom(row, column)", report.atlas, report.hom_dims)
    lines += dimension_table("dim E(row, column)", report.atlas, report.ext_dims)
    lines.append(f"simple defects: {serre_text(report.simple_defects)}")
    lines.append(f"substructures: {report.substructure_count}")
    return "\n".join(lines) + "\n"


def run(workspace: Workspace, args: Namespace) -> int:
    report = build_report(workspace)
    print(render(report), end="")
    if args.dot:
        analysis = workspace.analysis
        Path(args.dot).write_text(
            hasse_dot(analysis.serre_poset(), "serre", analysis.serre_subsets()),
            encoding="utf-8",
        )
    return 0
