"""Plain-text and DOT rendering of reports."""

from collections.abc import Sequence

import networkx as nx

from exstruct.models.report import SectionReport, SubstructureSummary


def dimension_table(title: str, names: Sequence[str], rows: Sequence[Sequence[int]]) -> list[str]:
    """Square table with row object i and column object j."""
    width = max([len(n) for n in names] + [3])
    lines = [title, " " * width + " " + " ".join(n.rjust(width) for n in names)]
    for name, row in zip(names, rows):
        lines.append(name.rjust(width) + " " + " ".join(str(v).rjust(width) for v in row))
    return lines


def serre_text(serre: Sequence[str]) -> str:
    return "{" + ", ".join(serre) + "}"


def substructure_lines(summary: SubstructureSummary) -> list[str]:
    dims = ", ".join(f"E({pair}):{d}" for pair, d in summary.dims.items()) or "none"
    lines = [f"F{serre_text(summary.serre)} [{summary.provenance.value}] dims {dims}"]
    for conf in summary.conflations:
        middle = " + ".join(conf.middle) or "0"
        lines.append(f"  {conf.start} -> {middle} -> {conf.end}")
    return lines


def section_lines(section: SectionReport) -> list[str]:
    status = "ok" if section.passed else "FAILED"
    lines = [f"{section.name}: {section.checked} checked, {section.failed} failed [{status}]"]
    lines.extend(f"  {d}" for d in section.diagnostics)
    return lines


def hasse_dot(graph: nx.DiGraph, name: str, order: Sequence) -> str:
    """Graphviz digraph of the Hasse diagram, nodes numbered in ``order``."""
    hasse = nx.transitive_reduction(graph)
    ids = {node: k for k, node in enumerate(order)}
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for node in order:
        label = graph.nodes[node].get("label", str(ids[node])).replace('"', '\\"')
        lines.append(f'  n{ids[node]} [label="{label}"];')
    for u, v in sorted(hasse.edges(), key=lambda e: (ids[e[0]], ids[e[1]])):
        lines.append(f"  n{ids[u]} -> n{ids[v]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
