"""CLI subcommands for exstruct."""

from exstruct.commands import analyze, defect, oracle, substructures, verify

__all__ = ["analyze", "substructures", "defect", "verify", "oracle"]
