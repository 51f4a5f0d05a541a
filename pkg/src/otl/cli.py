"""Command-line entry point ``otl``.

Exit codes: 0 success, 1 malformed input, 2 state budget exceeded,
3 contract violation (an internal check failed).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

from .automata import BuchiAutomaton, StateBudgetExceeded, default_budget
from .cardinality import count_accepting_runs, language_cardinality
from .constructions import ConstructionError, unfold_dag
from .formula import FormulaError
from .hardness import InstanceError, NormalFormInstance, build_height3_trees, emit_instance_trees
from .io import (FormatError, dumps, file_digest, load_automaton, load_json, load_presentation,
                 presentation_from_json, presentation_to_json, write_atomic)
from .lasso import parse_lasso
from .parity import ParityAutomaton
from .presentation import Compiler, validate_presentation
from .trees import HeightViolation, check_forest_height, iso_height1, iso_height2

log = logging.getLogger("otl")

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_CONTRACT = 0, 1, 2, 3


class ContractViolation(RuntimeError):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--budget", type=int, default=None,
                   help="state cap for exponential constructions (env OTL_MAX_STATES)")
    p.add_argument("--seed", type=int, default=None, help="seed for sampled checks (env OTL_SEED)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="otl", description="omega-automatic trees toolkit")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check an automaton or presentation file")
    p.add_argument("file")
    p.add_argument("--height", type=int, default=None, help="also require a forest of this height")
    _common(p)

    p = sub.add_parser("card", help="cardinality of a language (or of a presentation's domain)")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("runs", help="number of accepting runs on a lasso word")
    p.add_argument("file")
    p.add_argument("lasso", help='lasso literal such as "a,a|⋄,a"')
    _common(p)

    p = sub.add_parser("mc", help="model-check a sentence on a presentation")
    p.add_argument("presentation")
    p.add_argument("formula", help="s-expression, e.g. (exists x (E x x))")
    _common(p)

    p = sub.add_parser("iso", help="isomorphism test for trees of height 1 or 2")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--height", type=int, choices=(1, 2), default=1)
    p.add_argument("--bound", type=int, default=8, help="largest finite leaf count compared")
    _common(p)

    p = sub.add_parser("unfold", help="unfold a finite-height dag into a forest")
    p.add_argument("presentation")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--out", required=True, help="output presentation file")
    _common(p)

    p = sub.add_parser("compile", help="build the trees of a normal-form instance")
    p.add_argument("instance_file", nargs="?")
    p.add_argument("--instance", dest="instance_opt", default=None)
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--mode", choices=("height3", "full"), default="height3")
    p.add_argument("--out", default="otl-out", help="output directory")
    p.add_argument("--check", action="store_true", help="validate the emitted trees")
    p.add_argument("--allow-large", action="store_true", help="lift the n <= 2 limit (full mode)")
    _common(p)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--only", default=None, help="comma-separated criterion numbers")
    _common(p)
    return parser


# ------------------------------------------------------------ subcommands

def _load_any(path):
    data = load_json(path)
    if isinstance(data, dict) and "domain" in data:
        return presentation_from_json(data)
    return load_automaton(path)


def cmd_validate(args, out) -> int:
    obj = _load_any(args.file)
    if isinstance(obj, (BuchiAutomaton, ParityAutomaton)):
        kind = "parity automaton" if isinstance(obj, ParityAutomaton) else "buchi automaton"
        out(f"ok: {kind}, {obj.n_states} states, {len(obj.tracks)} tracks")
        return EXIT_OK
    rep = validate_presentation(obj, args.budget)
    out(str(rep))
    good = rep.ok
    if args.height is not None:
        tree = check_forest_height(obj, args.height, budget=args.budget)
        out(f"forest of height <= {args.height}: {'ok' if tree else 'FAILED'}")
        good &= tree
    out("valid" if good else "invalid")
    return EXIT_OK if good else EXIT_INPUT


def cmd_card(args, out) -> int:
    obj = _load_any(args.file)
    m = obj if isinstance(obj, (BuchiAutomaton, ParityAutomaton)) else obj.domain
    out(str(language_cardinality(m, args.budget)))
    return EXIT_OK


def cmd_runs(args, out) -> int:
    m = load_automaton(args.file)
    if not isinstance(m, BuchiAutomaton):
        raise FormatError("run counting needs a Buchi automaton")
    try:
        w = parse_lasso(args.lasso)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    out(str(count_accepting_runs(m, w)))
    return EXIT_OK


def cmd_mc(args, out) -> int:
    from .automata import emptiness
    from .formula import parse_formula

    p = load_presentation(args.presentation)
    comp = Compiler(p, None, args.budget)
    auto, free = comp.compile(parse_formula(args.formula))
    if free:
        raise FormulaError(f"not a sentence: free variables {list(free)}")
    out("true" if not emptiness(auto) else "false")
    if comp.sampled:
        out("note: a cardinality quantifier fell back to sampled sections")
    return EXIT_OK


def cmd_iso(args, out) -> int:
    p1, p2 = load_presentation(args.first), load_presentation(args.second)
    if args.height == 1:
        out("isomorphic" if iso_height1(p1, p2, budget=args.budget) else "non-isomorphic")
    else:
        out(str(iso_height2(p1, p2, args.bound, budget=args.budget)))
    return EXIT_OK


def _manifest(command, inputs, outputs, sizes, options, verdict=None) -> dict:
    return {"command": command, "options": options,
            "inputs": {os.path.basename(p): file_digest(p) for p in inputs},
            "outputs": outputs, "sizes": sizes, "verdict": verdict,
            "budget": options.get("budget") or default_budget()}


def _write_outputs(directory, files: dict, manifest_fields: dict, elapsed: float, out) -> None:
    outputs = {}
    for name, text in files.items():
        outputs[name] = write_atomic(os.path.join(directory, name), text)
    manifest = dict(manifest_fields, outputs=outputs)
    write_atomic(os.path.join(directory, "manifest.json"), dumps(manifest))
    # wall time varies between runs, so it is kept out of the manifest
    write_atomic(os.path.join(directory, "timing.json"), dumps({"wall_seconds": round(elapsed, 3)}))
    for name in sorted(outputs):
        out(f"wrote {os.path.join(directory, name)} sha256={outputs[name][:16]}")


def cmd_unfold(args, out) -> int:
    t = time.perf_counter()
    p = load_presentation(args.presentation)
    forest = unfold_dag(p, args.height, budget=args.budget)
    text = dumps(presentation_to_json(forest))
    directory = os.path.dirname(os.path.abspath(args.out))
    name = os.path.basename(args.out)
    fields = _manifest("unfold", [args.presentation], {}, {"forest": forest.sizes()},
                       {"height": args.height, "budget": args.budget})
    fields["manifest_for"] = name
    _write_outputs(directory, {name: text}, fields, time.perf_counter() - t, out)
    return EXIT_OK


def cmd_compile(args, out) -> int:
    path = args.instance_opt or args.instance_file
    if not path:
        raise FormatError("compile needs an instance file")
    t = time.perf_counter()
    try:
        inst = NormalFormInstance.load(path)
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: malformed instance ({exc})") from None
    if args.mode == "height3":
        res = build_height3_trees(inst, args.x, args.budget)
    else:
        res = emit_instance_trees(inst, args.x, args.budget, args.allow_large)
    files = {f"{k}.json": dumps(presentation_to_json(tr)) for k, tr in sorted(res.trees.items())}
    checks = None
    if args.check:
        height = 3 if args.mode == "height3" else inst.n + 3
        checks = {}
        for k, tr in sorted(res.trees.items()):
            checks[k] = validate_presentation(tr, args.budget).ok and \
                check_forest_height(tr, height, budget=args.budget)
        if not all(checks.values()):
            raise ContractViolation(f"emitted trees failed their checks: {checks}")
    options = {"mode": args.mode, "x": args.x, "budget": args.budget}
    roots = {k: str(w) for k, w in sorted(res.roots.items())}
    fields = _manifest("compile", [path], {}, res.sizes(), options,
                       {"roots": roots, "checks": checks})
    _write_outputs(args.out, files, fields, time.perf_counter() - t, out)
    return EXIT_OK


def cmd_selftest(args, out) -> int:
    from . import acceptance
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError:
            raise FormatError(f"bad --only list {args.only!r}") from None
    results = acceptance.run(only, args.seed, report=out)
    failed = [r.number for r in results if not r.passed]
    out(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EXIT_OK if not failed else EXIT_CONTRACT


COMMANDS = {"validate": cmd_validate, "card": cmd_card, "runs": cmd_runs, "mc": cmd_mc,
            "iso": cmd_iso, "unfold": cmd_unfold, "compile": cmd_compile,
            "selftest": cmd_selftest}


def main(argv=None, quiet: bool = False) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    if args.budget is not None:
        os.environ["OTL_MAX_STATES"] = str(args.budget)
    if args.seed is not None:
        os.environ["OTL_SEED"] = str(args.seed)
    out = (lambda s: None) if quiet else print
    try:
        return COMMANDS[args.command](args, out)
    except StateBudgetExceeded as exc:
        print(f"otl: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolation as exc:
        print(f"otl: contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (FormatError, FormulaError, InstanceError, ConstructionError, HeightViolation,
            ValueError, OSError) as exc:
        print(f"otl: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry() -> None:
    """Console script.  Re-runs itself with a fixed hash seed so that state
    numbering, and hence every output file, is identical across runs."""
    if os.environ.get("PYTHONHASHSEED") != "0":
        env = dict(os.environ, PYTHONHASHSEED="0")
        os.execve(sys.executable, [sys.executable, "-m", "otl.cli", *sys.argv[1:]], env)
    sys.exit(main())


if __name__ == "__main__":
    entry()
