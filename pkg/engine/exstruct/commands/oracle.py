"""`exstruct oracle`: brute-force enumeration compared with the Serre construction."""

from argparse import Namespace

from exstruct.models.report import OracleReport
from exstruct.services.workspace import Workspace


def build_report(workspace: Workspace) -> OracleReport:
    analysis = workspace.analysis
    stable, closed = analysis.oracle_sweep()
    from_serre = {
        analysis.substructure_from_serre(s).key: analysis.substructure_from_serre(s)
        for s in analysis.serre_subsets()
    }
    oracle = {sub.key: sub for sub in closed}
    return OracleReport(
        oracle_count=len(oracle),
        serre_count=len(from_serre),
        stable_count=len(stable),
        identical=oracle.keys() == from_serre.keys(),
        only_oracle=sorted(
            analysis.substructure_label(sub)
            for key, sub in oracle.items()
            if key not in from_serre
        ),
        only_serre=sorted(
            analysis.substructure_label(sub)
            for key, sub in from_serre.items()
            if key not in oracle
        ),
    )


def render(report: OracleReport) -> str:
    verdict = "sets identical" if report.identical else "sets differ"
    lines = [
        f"oracle = {report.oracle_count}, serre = {report.serre_count}, {verdict}",
        f"stable families: {report.stable_count}",
    ]
    lines += [f"  only in oracle: {label}" for label in report.only_oracle]
    lines += [f"  only from serre: {label}" for label in report.only_serre]
    return "\n".join(lines) + "\n"


def run(workspace: Workspace, args: Namespace) -> int:
    report = build_report(workspace)
    print(render(report), end="")
    return 0 if report.identical else 1
