"""Command-line front end.

Exit codes: 0 success, 1 type/elaboration error (or disagreement in
``param-test``), 2 the evaluated program threw, 3 fuel exhausted, 4 usage error.
"""

import argparse
import json
import os
import sys

from . import __version__
from . import core as c
from .checker import check_val
from .elaborate import elaborate_program, emit_core
from .errors import FuelExhausted, ParseError, TypeCheckError
from .paramtest import campaign, exhaustive
from .phase import static_part_sig, static_part_val
from .runtime import DEFAULT_FUEL, Threw, eval_closed_val, force
from .sexp import pretty, show

EXIT_OK, EXIT_ERROR, EXIT_THREW, EXIT_FUEL, EXIT_USAGE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _color(stream):
    mode = os.environ.get("MODTT_COLOR", "auto")
    if mode == "always":
        return True
    if mode == "never":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def _diag(path, e):
    prefix = "error:"
    if _color(sys.stderr):
        prefix = "\x1b[1;31merror:\x1b[0m"
    span = getattr(e, "span", None)
    where = f"{path}:{span}" if span else path
    body = str(e) if isinstance(e, TypeCheckError) else e.message
    if isinstance(e, TypeCheckError) and span:
        body = body.split(": ", 1)[1]
    print(f"{where}: {prefix} {body}", file=sys.stderr)


def _error_json(e):
    if isinstance(e, TypeCheckError):
        return e.to_json()
    return {"kind": "parse", "message": e.message, "span": {"line": e.span.line, "col": e.span.col},
            "expected": None, "actual": None}


def _load(path):
    try:
        with open(path, encoding="utf-8") as f:
            source = f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    return elaborate_program(source)


def _item(program, name):
    try:
        return program.closed(name)
    except KeyError:
        raise UsageError(f"no top-level definition named {name!r}")


# ---------------------------------------------------------------- commands


def cmd_check(args):
    try:
        program = _load(args.path)
    except (TypeCheckError, ParseError) as e:
        if args.json:
            print(json.dumps({"ok": False, "error": _error_json(e)}))
        else:
            _diag(args.path, e)
        return EXIT_ERROR
    if args.json:
        items = [{"name": it.name, "kind": it.kind, "sig": show(it.sig)} for it in program.items]
        print(json.dumps({"ok": True, "items": items}))
    else:
        print(f"{args.path}: ok ({len(program.items)} definitions)")
    return EXIT_OK


def cmd_elaborate(args):
    try:
        program = _load(args.path)
    except (TypeCheckError, ParseError) as e:
        _diag(args.path, e)
        return EXIT_ERROR
    if args.emit_core:
        sys.stdout.write(emit_core(program))
    else:
        for it in program.items:
            print(f"{it.kind} {it.name} : {pretty(it.sig, 100)}")
    return EXIT_OK


def cmd_eval(args):
    try:
        program = _load(args.path)
    except (TypeCheckError, ParseError) as e:
        _diag(args.path, e)
        return EXIT_ERROR
    term, sig, _ = _item(program, args.main)
    if term is None:
        raise UsageError(f"{args.main} is a signature, not a program")
    try:
        if isinstance(sig, c.Cmp):
            outcome = force(term, args.fuel)
        else:
            print(show(eval_closed_val(term, args.fuel)))
            return EXIT_OK
    except FuelExhausted as e:
        print(f"{args.path}: fuel exhausted after {args.fuel} steps ({e})", file=sys.stderr)
        return EXIT_FUEL
    if isinstance(outcome, Threw):
        print("throw")
        return EXIT_THREW
    print(show(outcome.value))
    return EXIT_OK


def cmd_static(args):
    try:
        program = _load(args.path)
    except (TypeCheckError, ParseError) as e:
        _diag(args.path, e)
        return EXIT_ERROR
    term, sig, _ = _item(program, args.item)
    ctx = c.Context()
    print("sig " + pretty(static_part_sig(ctx, sig), 100).replace("\n", "\n    "))
    if term is not None:
        print("val " + pretty(static_part_val(ctx, term, sig), 100).replace("\n", "\n    "))
    return EXIT_OK


def cmd_param_test(args):
    if len(args.impl) != 2:
        raise UsageError("param-test needs exactly two --impl options")
    try:
        program = _load(args.path)
    except (TypeCheckError, ParseError) as e:
        _diag(args.path, e)
        return EXIT_ERROR
    _, sig, layout = _item(program, args.sig)
    impls = []
    for name in args.impl:
        term, _, _ = _item(program, name)
        try:
            check_val(c.Context(), term, sig)
        except TypeCheckError as e:
            _diag(args.path, e.__class__(e.kind, f"{name} does not implement {args.sig}: {e.message}"))
            return EXIT_ERROR
        impls.append(term)
    try:
        if args.exhaustive is not None:
            report = exhaustive(impls[0], impls[1], sig, layout, args.exhaustive, args.fuel)
        else:
            report = campaign(impls[0], impls[1], sig, layout, args.clients, args.max_len, args.seed,
                              args.fuel, workers=args.workers)
    except ValueError as e:
        raise UsageError(str(e))
    if args.json:
        print(json.dumps(report.to_json(), indent=2))
    else:
        a, b = args.impl
        print(f"{a} vs {b} at {args.sig}: {report.clients} clients, {report.agree} agree, "
              f"{report.disagree} disagree, {report.inconclusive} inconclusive")
        cx = report.counterexample
        if cx is not None:
            ops = "; ".join(cx["script"]["ops"])
            print(f"counterexample [{ops}] observe {cx['script']['mode']}: {a} gives {cx['left']}, "
                  f"{b} gives {cx['right']}")
    if report.disagree:
        return EXIT_ERROR
    if report.inconclusive:
        return EXIT_FUEL
    return EXIT_OK


def cmd_version(args):
    print(f"modtt {__version__}")
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def build_parser():
    p = _Parser(prog="modtt", description="ModTT typechecker, elaborator and evaluator")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("check", help="parse, elaborate and typecheck a .mtt file")
    sp.add_argument("path")
    sp.add_argument("--json", action="store_true", help="machine-readable diagnostics")
    sp.set_defaults(run=cmd_check)

    sp = sub.add_parser("elaborate", help="print elaborated signatures or core terms")
    sp.add_argument("path")
    sp.add_argument("--emit-core", action="store_true", help="dump every item as core text")
    sp.set_defaults(run=cmd_elaborate)

    sp = sub.add_parser("eval", help="run the main definition")
    sp.add_argument("path")
    sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    sp.add_argument("--main", default="main", help="definition to run (default: main)")
    sp.set_defaults(run=cmd_eval)

    sp = sub.add_parser("static", help="print the static part of a definition")
    sp.add_argument("path")
    sp.add_argument("item")
    sp.set_defaults(run=cmd_static)

    sp = sub.add_parser("param-test", help="check that two implementations agree on generated clients")
    sp.add_argument("path")
    sp.add_argument("--impl", action="append", default=[], required=True)
    sp.add_argument("--sig", required=True)
    sp.add_argument("--clients", type=int, default=1000)
    sp.add_argument("--max-len", type=int, default=20)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    sp.add_argument("--workers", type=int, default=None)
    sp.add_argument("--exhaustive", type=int, metavar="LEN", default=None,
                    help="relate every script up to LEN operations instead of sampling")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(run=cmd_param_test)

    sp = sub.add_parser("version", help="print the version")
    sp.set_defaults(run=cmd_version)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    if getattr(args, "fuel", 1) <= 0:
        print("modtt: error: --fuel must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.run(args)
    except UsageError as e:
        print(f"modtt: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
