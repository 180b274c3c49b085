"""`exstruct substructures`: the lattice of closed substructures F(S)."""

from argparse import Namespace
from pathlib import Path

from exstruct.commands.render import hasse_dot, substructure_lines
from exstruct.services.workspace import Workspace


def run(workspace: Workspace, args: Namespace) -> int:
    analysis = workspace.analysis
    report = analysis.exact_structure_report()
    lines = [f"substructures: {report.count}"]
    for summary in report.structures:
        lines += substructure_lines(summary)
    if report.full_module_category:
        lines.append(f"exact structures: {report.count}")
    lines.append(f"note: {report.note}")
    print("\n".join(lines))
    if args.dot:
        subs = [analysis.substructure_from_serre(s) for s in analysis.serre_subsets()]
        Path(args.dot).write_text(
            hasse_dot(analysis.substructure_poset(subs), "substructures", [s.key for s in subs]),
            encoding="utf-8",
        )
    return 0 if report.serre_isomorphic else 1
