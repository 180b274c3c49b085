"""Command-line entry point.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for bad input.
"""

import argparse
import logging
import sys

from exstruct.commands import analyze, defect, oracle, substructures, verify
from exstruct.core.config import get_settings
from exstruct.core.logging import configure_logging
from exstruct.services import (
    AtlasIncomplete,
    CharacteristicTooSmall,
    ClosureViolation,
    InvalidAtlas,
    InvariantViolation,
    NotAdmissible,
    NotFullModuleCategory,
    NotHomogeneousRelation,
    ParseError,
    TheoremViolation,
    TooLarge,
    get_table_cache,
    load_workspace,
)

logger = logging.getLogger("exstruct.main")

COMMANDS = {
    "analyze": analyze.run,
    "substructures": substructures.run,
    "defect": defect.run,
    "verify": verify.run,
    "oracle": oracle.run,
}

INPUT_ERRORS = (
    ParseError,
    InvariantViolation,
    NotAdmissible,
    NotHomogeneousRelation,
    InvalidAtlas,
    AtlasIncomplete,
    CharacteristicTooSmall,
    TooLarge,
    NotFullModuleCategory,
)
CHECK_FAILURES = (ClosureViolation, TheoremViolation)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exstruct",
        description="Closed substructures of Ext over finite-dimensional algebras.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("input", help="input description (JSON)")
    parser.add_argument("--dot", help="write the lattice as a Graphviz digraph")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--p", type=int, help="reduce all integer data mod this prime")
    parser.add_argument("--no-cache", action="store_true", help="skip the on-disk table cache")
    parser.add_argument("--log-level", help="logging level for stderr (default from settings)")
    parser.add_argument(
        "--class",
        dest="defect_class",
        nargs="+",
        metavar="C A COEFF",
        help="for defect: end and start atlas members, then the class coordinates",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()
    if args.no_cache:
        settings = settings.model_copy(update={"cache_enabled": False})
    configure_logging(args.log_level or settings.log_level)

    if args.command == "defect" and (not args.defect_class or len(args.defect_class) < 2):
        parser.error("defect needs --class C A COEFF...")

    cache = get_table_cache()
    try:
        workspace = load_workspace(
            args.input,
            settings=settings,
            p=args.p,
            seed=args.seed,
            samples=args.samples,
            use_cache=not args.no_cache,
        )
        return COMMANDS[args.command](workspace, args)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CHECK_FAILURES as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    finally:
        cache.close()


if __name__ == "__main__":
    sys.exit(main())
