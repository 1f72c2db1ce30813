"""
kb: command-line entry point.

    kb inv [--alex --det --kh --jones --s --lee --writhe --linking] FILE.pdj
    kb moves FILE.pdj SCRIPT.moves.json
    kb rbg validate|slamdunk|pipeline FILE.pdj
    kb classify --r R [bounds and assumptions]
    kb library verify [LIBRARY.json]

Everything goes to stdout as JSON with sorted keys unless ``--pretty`` is
given.  Exit codes: 0 success, 1 library mismatch or other failure, 2 bad
input, 3 crossing budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import styles
from diagram import (BudgetExceeded, DiagramSyntaxError, DiagramValidationError, FramedLink, KBError, MoveError,
                     RoleError, diagram_to_dict, parse_diagram)
from khovanov import ENGINES
from kirby import parse_moves, run_moves, slam_dunk
from library import BUNDLED_LIBRARY, Config, compute_invariants, library_passed, load_config, load_library, \
    verify_library
from obstruction import AssumptionSet, PFBounds, classify, pf_upper_from_twists, run_pipeline, satellite_window
from surgery import validate_rbg

LOGGER = logging.getLogger("kb")

EXIT_OK, EXIT_FAILURE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3

INVARIANT_FLAGS = {
    "alex": "alexander",
    "det": "determinant",
    "kh": "kh",
    "jones": "jones",
    "s": "s",
    "lee": "lee",
    "writhe": "writhe",
    "linking": "linking",
}


def _emit(payload) -> None:
    print(json.dumps(payload, sort_keys=True, ensure_ascii=False))


def _read_link(path: str) -> FramedLink:
    link = parse_diagram(Path(path).read_text(encoding="utf-8"))
    return link if link.name else replace(link, name=Path(path).stem)


def _config(args) -> Config:
    config = load_config()
    if getattr(args, "budget", None) is not None:
        config = replace(config, budget=args.budget)
    if getattr(args, "no_cache", False):
        config = replace(config, use_cache=False)
    if getattr(args, "engine", None):
        config = replace(config, engine=args.engine)
    return config


def _assumptions(args) -> AssumptionSet:
    return AssumptionSet(
        assume_conjecture=args.assume_conjecture,
        assume_special=getattr(args, "assume_special", False),
        small_unknot_R=args.small_unknot_R,
        biprojective_R=args.biprojective_R,
        tau_R=args.tau_R,
        s_K=args.s_K,
        s_Kprime=args.s_Kprime,
    )


def _bounds(args) -> PFBounds:
    provenance = {"plus_lower": "homological", "minus_upper": "homological"}
    if args.pf_plus_upper is not None:
        provenance["plus_upper"] = "user-supplied"
    if args.pf_minus_lower is not None:
        provenance["minus_lower"] = "user-supplied"
    bounds = PFBounds(plus_upper=args.pf_plus_upper, minus_lower=args.pf_minus_lower, provenance=provenance)
    if args.twist_bound:
        knot_file, script_file = args.twist_bound
        script = parse_moves(Path(script_file).read_text(encoding="utf-8"))
        bounds = bounds.combine(pf_upper_from_twists(_read_link(knot_file), script))
    return bounds


# ------------------------------------------------------
# SUBCOMMANDS
# ------------------------------------------------------
def cmd_inv(args) -> int:
    names = [name for flag, name in INVARIANT_FLAGS.items() if getattr(args, flag)]
    if not names:
        raise KBError("no invariant requested; pass at least one of " +
                      " ".join(f"--{flag}" for flag in INVARIANT_FLAGS))
    link = _read_link(args.file)
    payload = compute_invariants(link, names, _config(args))
    if args.pretty:
        print(styles.render(styles.invariant_table(payload), title=link.name))
        if "kh" in payload:
            print(styles.render(styles.kh_table(payload["kh"]), title="Khovanov ranks (rows q, columns h)"))
    else:
        _emit(payload)
    return EXIT_OK


def cmd_moves(args) -> int:
    link = _read_link(args.file)
    moves = parse_moves(Path(args.script).read_text(encoding="utf-8"))
    _emit(diagram_to_dict(run_moves(link, moves)))
    return EXIT_OK


def cmd_rbg(args) -> int:
    link = _read_link(args.file)
    if args.action == "validate":
        _emit(validate_rbg(link, args.assume_special).to_json())
    elif args.action == "slamdunk":
        _emit(diagram_to_dict(slam_dunk(link, args.keep, args.assume_special)))
    else:
        config = _config(args)
        doc = run_pipeline(link, _assumptions(args), config.budget, _bounds(args))
        if args.pretty:
            print(styles.render(styles.verdict_table(doc["verdict"]), title=doc["name"]))
        else:
            _emit(doc)
    return EXIT_OK


def cmd_classify(args) -> int:
    if args.tau_J is not None:
        _emit(satellite_window(args.r, args.tau_J, args.winding).to_json())
        return EXIT_OK
    verdict = classify(args.r, _bounds(args), _assumptions(args))
    if args.pretty:
        print(styles.render(styles.verdict_table(verdict.to_json()), title=f"r = {args.r}"))
        if verdict.blocking:
            print(f"blocked: {verdict.blocking}")
        for conclusion in verdict.conclusions:
            print(f"conclusion: {conclusion}")
    else:
        _emit(verdict.to_json())
    return EXIT_OK


def cmd_library(args) -> int:
    table = verify_library(load_library(args.file), _config(args))
    if args.pretty:
        print(styles.render(styles.verification_table(table)))
    else:
        _emit(table.to_dict(orient="records"))
    return EXIT_OK if library_passed(table) else EXIT_FAILURE


# ------------------------------------------------------
# PARSER
# ------------------------------------------------------
def _add_compute_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, default=None, help="crossing budget (overrides KB_BUDGET)")
    parser.add_argument("--engine", choices=ENGINES, default=None, help="Khovanov engine")
    parser.add_argument("--no-cache", action="store_true", help="skip the on-disk invariant cache")
    parser.add_argument("--pretty", action="store_true", help="print tables instead of JSON")


def _add_classifier_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau-R", dest="tau_R", type=int, default=None, help="tau of R")
    parser.add_argument("--pf-plus-upper", type=int, default=None, help="known upper bound on PF_+(R)")
    parser.add_argument("--pf-minus-lower", type=int, default=None, help="known lower bound on PF_-(R)")
    parser.add_argument("--twist-bound", nargs=2, metavar=("KNOT", "SCRIPT"),
                        help="bound PF(R) from a twist script that unknots KNOT")
    parser.add_argument("--biprojective-R", dest="biprojective_R", action="store_true",
                        help="assert R is biprojectively H-slice")
    parser.add_argument("--small-unknot-R", dest="small_unknot_R", action="store_true",
                        help="assert the link is small with R the unknot")
    parser.add_argument("--assume-conjecture", action="store_true",
                        help="allow routes that need a (-1)-slice knot in #nCP² to have s >= 0")
    parser.add_argument("--s-K", dest="s_K", type=int, default=None, help="known s(K)")
    parser.add_argument("--s-Kprime", dest="s_Kprime", type=int, default=None, help="known s(K')")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kb", description="Knot invariants, Kirby moves and RBG obstructions.")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    inv = sub.add_parser("inv", help="compute invariants of a diagram")
    inv.add_argument("file")
    for flag, name in INVARIANT_FLAGS.items():
        inv.add_argument(f"--{flag}", action="store_true", help=f"compute {name}")
    _add_compute_options(inv)
    inv.set_defaults(handler=cmd_inv)

    moves = sub.add_parser("moves", help="apply a move script and print the result")
    moves.add_argument("file")
    moves.add_argument("script")
    moves.set_defaults(handler=cmd_moves)

    rbg = sub.add_parser("rbg", help="RBG-link validation, slam dunks and the obstruction pipeline")
    rbg.add_argument("action", choices=("validate", "slamdunk", "pipeline"))
    rbg.add_argument("file")
    rbg.add_argument("--keep", choices=("B", "G"), default="B", help="component kept by the slam dunk")
    rbg.add_argument("--assume-special", action="store_true",
                     help="trust the meridian conditions instead of checking them")
    _add_compute_options(rbg)
    _add_classifier_options(rbg)
    rbg.set_defaults(handler=cmd_rbg)

    cls = sub.add_parser("classify", help="decide which implications hold for framing r")
    cls.add_argument("--r", type=int, required=True, help="framing of R")
    cls.add_argument("--tau-J", dest="tau_J", type=int, default=None,
                     help="check the satellite family R = U # J with this tau(J) instead")
    cls.add_argument("--winding", type=int, default=0, help="winding number for --tau-J")
    cls.add_argument("--pretty", action="store_true", help="print a table instead of JSON")
    _add_classifier_options(cls)
    cls.set_defaults(handler=cmd_classify)

    lib = sub.add_parser("library", help="knot library operations")
    lib.add_argument("action", choices=("verify",))
    lib.add_argument("file", nargs="?", default=str(BUNDLED_LIBRARY))
    _add_compute_options(lib)
    lib.set_defaults(handler=cmd_library)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except (DiagramSyntaxError, DiagramValidationError, MoveError, RoleError) as exc:
        LOGGER.error("%s", exc)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        LOGGER.error("%s", exc)
        return EXIT_BUDGET
    except OSError as exc:
        LOGGER.error("%s", exc)
        return EXIT_INPUT
    except KBError as exc:
        LOGGER.error("%s", exc)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
