"""`exstruct defect --class C A COEFF...`: one defect and its composition factors."""

from argparse import Namespace

from exstruct.models.report import DefectReport
from exstruct.services.workspace import InvariantViolation, Workspace


def resolve(workspace: Workspace, token: str) -> int:
    """An atlas member by name, or by index when no name matches."""
    names = workspace.table.names
    if token in names:
        return names.index(token)
    if token.isdigit() and int(token) < len(names):
        return int(token)
    raise InvariantViolation(f"no atlas member {token!r}")


def build_report(workspace: Workspace, end: str, start: str, coeffs: list[int]) -> DefectReport:
    analysis = workspace.analysis
    c, a = resolve(workspace, end), resolve(workspace, start)
    group = analysis.ext(c, a)
    if len(coeffs) != group.dim:
        raise InvariantViolation(
            f"E({workspace.table.names[c]}, {workspace.table.names[a]}) has dimension "
            f"{group.dim}, got {len(coeffs)} coefficients"
        )
    delta = group.element(coeffs)
    defect = analysis.defect_of(delta)
    embedded = analysis.defect_isomorphism(defect)
    middle = analysis.decompose(defect.origin.middle)
    names = workspace.table.names
    return DefectReport(
        end=names[c],
        start=names[a],
        coords=[int(x) for x in delta.coords],
        middle=sorted(names[i] for i in middle.indices),
        dims=list(defect.module.dims),
        factors={names[i]: n for i, n in sorted(defect.factors.items())},
        column_image_dims=[b.shape[1] for b in embedded.image],
        split=delta.is_zero(),
    )


def render(report: DefectReport) -> str:
    factors = ", ".join(f"{name}^{n}" for name, n in report.factors.items()) or "none"
    lines = [
        f"class {report.coords} in E({report.end}, {report.start})"
        + (" (split)" if report.split else ""),
        f"realization: {report.start} -> {' + '.join(report.middle) or '0'} -> {report.end}",
        f"defect dims: {report.dims}",
        f"composition factors: {factors}",
        f"image in E(-, {report.start}): {report.column_image_dims}",
    ]
    return "\n".join(lines) + "\n"


def run(workspace: Workspace, args: Namespace) -> int:
    end, start, *coeffs = args.defect_class
    try:
        values = [int(x) for x in coeffs]
    except ValueError:
        raise InvariantViolation(f"coefficients must be integers, got {coeffs}") from None
    print(render(build_report(workspace, end, start, values)), end="")
    return 0
