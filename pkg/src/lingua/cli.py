"""Command-line driver: run, parse, restore, eval, grammar.

Exit codes: 0 success, 1 a language-level error in the register,
2 malformed input (parse errors, bad grammar files), 3 out of fuel.
"""

from __future__ import annotations

import argparse
import sys
import threading
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Optional, Sequence

from . import algebra_tools as alg
from .ast import dump, pretty
from .domains import AbstractError, Limits, format_composite
from .semantics import DEFAULT_MAX_STEPS, Fuel, OutOfFuel, eval_data_exp, exec_program
from .state import dump_state, initial_state, is_error
from .syntax import FRAGMENTS, ParseError, parse

EXIT_OK, EXIT_ERROR, EXIT_MALFORMED, EXIT_FUEL = 0, 1, 2, 3


@dataclass
class RunConfig:
    max_steps: int = DEFAULT_MAX_STEPS
    limits: Limits = field(default_factory=Limits)
    dump_ast: bool = False
    trace: bool = False
    strict_concrete: bool = False
    fragment: str = "auto"

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


def _positive_int(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _config(args: argparse.Namespace) -> RunConfig:
    limits = Limits(
        max_number_total_digits=args.max_number_digits,
        max_number_fraction_digits=args.max_fraction_digits,
        max_word_length=args.max_word_length,
        max_collection_size=args.max_collection_size,
        max_number_magnitude=Decimal(args.max_number_magnitude) if args.max_number_magnitude else None,
    )
    return RunConfig(
        max_steps=args.max_steps,
        limits=limits,
        dump_ast=args.dump_ast,
        trace=args.trace,
        strict_concrete=args.strict_concrete,
        fragment=getattr(args, "fragment", "auto"),
    )


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _parse_source(source: str, name: str, cfg: RunConfig, fragment: str):
    try:
        return parse(source, fragment, colloquial=not cfg.strict_concrete)
    except ParseError as exc:
        print(exc.format(name), file=sys.stderr)
        return None


def cmd_run(path: str, cfg: RunConfig) -> int:
    prog = _parse_source(_read(path), path, cfg, "program")
    if prog is None:
        return EXIT_MALFORMED
    if cfg.dump_ast:
        print(dump(prog), file=sys.stderr)

    def trace(node, sta):
        print(f"-- after {type(node).__name__}", file=sys.stderr)
        print(dump_state(sta), file=sys.stderr)

    fuel = Fuel(cfg.max_steps)
    outcome = exec_program(prog, initial_state(cfg.limits), fuel, trace if cfg.trace else None)
    if isinstance(outcome, OutOfFuel):
        print(f"out of fuel after {fuel.used} steps")
        return EXIT_FUEL
    sta = outcome.state
    if is_error(sta):
        print(f"error: {sta.register.message}")
        return EXIT_ERROR
    print(dump_state(sta))
    return EXIT_OK


def cmd_parse(path: str, cfg: RunConfig) -> int:
    node = _parse_source(_read(path), path, cfg, cfg.fragment)
    if node is None:
        return EXIT_MALFORMED
    print(dump(node))
    return EXIT_OK


def cmd_restore(path: str, cfg: RunConfig) -> int:
    node = _parse_source(_read(path), path, cfg, cfg.fragment)
    if node is None:
        return EXIT_MALFORMED
    print(pretty(node))
    return EXIT_OK


def cmd_eval(expr: str, cfg: RunConfig) -> int:
    node = _parse_source(expr, "<expr>", cfg, "data")
    if node is None:
        return EXIT_MALFORMED
    if cfg.dump_ast:
        print(dump(node), file=sys.stderr)
    fuel = Fuel(cfg.max_steps)
    result = eval_data_exp(node, initial_state(cfg.limits), fuel)
    if isinstance(result, OutOfFuel):
        print(f"out of fuel after {fuel.used} steps")
        return EXIT_FUEL
    print(format_composite(result))
    return EXIT_ERROR if isinstance(result, AbstractError) else EXIT_OK


def cmd_grammar(args: argparse.Namespace) -> int:
    try:
        if args.action == "derive":
            sig = alg.parse_signature(_read(args.signature))
            sys.stdout.write(alg.format_grammar(alg.derive_abstract_syntax(sig)))
            return EXIT_OK
        g = alg.parse_grammar(_read(args.grammar))
        if args.nonterminal not in g.equations:
            raise alg.AlgebraError(f"unknown nonterminal {args.nonterminal}")
        if args.action == "enumerate":
            for w in alg.sorted_words(alg.grammar_enumerate(g, args.nonterminal, args.max_len)):
                print(w)
            return EXIT_OK
        return EXIT_OK if alg.grammar_member(g, args.nonterminal, args.word) else EXIT_ERROR
    except (alg.AlgebraError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-steps", type=_positive_int, default=DEFAULT_MAX_STEPS)
    common.add_argument("--max-number-digits", type=_positive_int, default=Limits.max_number_total_digits)
    common.add_argument("--max-fraction-digits", type=_positive_int, default=Limits.max_number_fraction_digits)
    common.add_argument("--max-word-length", type=_positive_int, default=Limits.max_word_length)
    common.add_argument("--max-collection-size", type=_positive_int, default=Limits.max_collection_size)
    common.add_argument("--max-number-magnitude", default=None, help="bound on absolute values of numbers")
    common.add_argument("--dump-ast", action="store_true", help="print the parsed tree to stderr")
    common.add_argument("--trace", action="store_true", help="dump the state to stderr after each step")
    common.add_argument("--strict-concrete", action="store_true", help="accept only fully parenthesized syntax")

    parser = argparse.ArgumentParser(prog="lingua", description="Interpreter and grammar toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="execute a program")
    p.add_argument("file")
    for name, helptext in (("parse", "print the tree dump"), ("restore", "print the strict concrete form")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("file")
        p.add_argument("--fragment", choices=("auto",) + FRAGMENTS, default="auto")
    p = sub.add_parser("eval", parents=[common], help="evaluate a data expression in the empty state")
    p.add_argument("expr")

    g = sub.add_parser("grammar", help="signatures and equational grammars")
    gsub = g.add_subparsers(dest="action", required=True)
    d = gsub.add_parser("derive", help="abstract-syntax grammar of a signature file")
    d.add_argument("signature")
    e = gsub.add_parser("enumerate", help="words of a nonterminal up to a length")
    e.add_argument("grammar")
    e.add_argument("nonterminal")
    e.add_argument("max_len", type=int)
    m = gsub.add_parser("member", help="exit 0 if the word belongs to the nonterminal")
    m.add_argument("grammar")
    m.add_argument("nonterminal")
    m.add_argument("word")
    return parser


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "grammar":
        if args.action == "enumerate" and args.max_len < 0:
            print("error: max_len must be non-negative", file=sys.stderr)
            return EXIT_MALFORMED
        return cmd_grammar(args)
    try:
        cfg = _config(args)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        if args.command == "eval":
            return cmd_eval(args.expr, cfg)
        handler = {"run": cmd_run, "parse": cmd_parse, "restore": cmd_restore}[args.command]
        return handler(args.file, cfg)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    # Deeply nested programs recurse deeply; give the evaluator room.
    result = [EXIT_MALFORMED]
    old_limit = sys.getrecursionlimit()
    old_stack = threading.stack_size()

    def work():
        result[0] = _dispatch(args)

    try:
        sys.setrecursionlimit(max(old_limit, 100_000))
        threading.stack_size(512 * 1024 * 1024)
        t = threading.Thread(target=work)
        t.start()
        t.join()
    finally:
        threading.stack_size(old_stack)
        sys.setrecursionlimit(old_limit)
    return result[0]


if __name__ == "__main__":
    sys.exit(main())
