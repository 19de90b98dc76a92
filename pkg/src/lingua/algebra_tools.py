"""Many-sorted signatures, equational grammars and the NumBool oracle.

Signature files are line oriented::

    sort NumExp
    ctor 0 : -> NumExp
    ctor + : NumExp x NumExp -> NumExp

Grammar files hold one equation per line (a line starting with ``|``
continues the previous one)::

    NumExp = "0" | "1" | "+" "(" NumExp "," NumExp ")"

Terminals are double-quoted, ``""`` is the empty word and ``{}`` the empty
language.  Postfix ``*``, ``+`` and ``^N`` give star, plus and power;
parentheses group.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from .mccarthy import FF, TT, TriBool, from_bool, not_m, or_m


class AlgebraError(ValueError):
    """Malformed signature, grammar or term."""


# -- signatures ---------------------------------------------------------------------


@dataclass(frozen=True)
class Constructor:
    name: str
    args: tuple[str, ...]
    result: str


@dataclass(frozen=True)
class Signature:
    sorts: tuple[str, ...]
    constructors: tuple[Constructor, ...] = ()

    def __post_init__(self):
        declared = set(self.sorts)
        if len(declared) != len(self.sorts):
            raise AlgebraError("sort declared twice")
        for c in self.constructors:
            for s in (*c.args, c.result):
                if s not in declared:
                    raise AlgebraError(f"constructor {c.name} uses undeclared sort {s}")

    def without(self, *names: str) -> Signature:
        return Signature(self.sorts, tuple(c for c in self.constructors if c.name not in names))


def parse_signature(text: str) -> Signature:
    sorts: list[str] = []
    ctors: list[Constructor] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "sort" and len(parts) == 2:
            sorts.append(parts[1])
            continue
        m = re.fullmatch(r"ctor\s+(\S+)\s*:\s*(.*?)\s*->\s*(\S+)", line)
        if m is None:
            raise AlgebraError(f"line {lineno}: cannot read {raw.strip()!r}")
        name, args, result = m.groups()
        arg_sorts = tuple(a.strip() for a in args.split(" x ")) if args else ()
        if any(not a or " " in a for a in arg_sorts):
            raise AlgebraError(f"line {lineno}: bad argument sorts {args!r}")
        ctors.append(Constructor(name, arg_sorts, result))
    return Signature(tuple(sorts), tuple(ctors))


def format_signature(sig: Signature) -> str:
    lines = [f"sort {s}" for s in sig.sorts]
    for c in sig.constructors:
        lines.append(f"ctor {c.name} : {' x '.join(c.args)}{' ' if c.args else ''}-> {c.result}")
    return "\n".join(lines) + "\n"


NUMBOOL_EXP = Signature(
    ("NumExp", "BoolExp"),
    (
        Constructor("0", (), "NumExp"),
        Constructor("1", (), "NumExp"),
        Constructor("+", ("NumExp", "NumExp"), "NumExp"),
        Constructor("tt", (), "BoolExp"),
        Constructor("ff", (), "BoolExp"),
        Constructor("=", ("NumExp", "NumExp"), "BoolExp"),
        Constructor("<", ("NumExp", "NumExp"), "BoolExp"),
        Constructor("not", ("BoolExp",), "BoolExp"),
        Constructor("or", ("BoolExp", "BoolExp"), "BoolExp"),
    ),
)


def reachable_sorts(sig: Signature) -> dict[str, bool]:
    """Least fixpoint: a sort is reachable once some constructor into it has reachable arguments."""
    reached: set[str] = set()
    changed = True
    while changed:
        changed = False
        for c in sig.constructors:
            if c.result not in reached and all(a in reached for a in c.args):
                reached.add(c.result)
                changed = True
    return {s: s in reached for s in sig.sorts}


# -- language expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    """A one-word language; ``Lit("")`` is {ε}."""

    word: str


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class NT:
    name: str


@dataclass(frozen=True)
class Union_:
    alts: tuple


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Power:
    base: object
    n: int


@dataclass(frozen=True)
class Star:
    base: object


@dataclass(frozen=True)
class Plus:
    base: object


LangExp = Union[Lit, Empty, NT, Union_, Concat, Power, Star, Plus]


@dataclass(frozen=True)
class EquationalGrammar:
    equations: Mapping[str, LangExp] = field(default_factory=dict)

    def __post_init__(self):
        for rhs in self.equations.values():
            for name in _nonterminals(rhs):
                if name not in self.equations:
                    raise AlgebraError(f"nonterminal {name} has no equation")

    @property
    def nonterminals(self) -> tuple[str, ...]:
        return tuple(self.equations)

    def __hash__(self):
        return hash(tuple(self.equations.items()))


def _nonterminals(e) -> Iterator[str]:
    if isinstance(e, NT):
        yield e.name
    elif isinstance(e, Union_):
        for a in e.alts:
            yield from _nonterminals(a)
    elif isinstance(e, Concat):
        for p in e.parts:
            yield from _nonterminals(p)
    elif isinstance(e, (Power, Star, Plus)):
        yield from _nonterminals(e.base)


def derive_abstract_syntax(sig: Signature) -> EquationalGrammar:
    """One equation per sort; constructor ``c : S1 x ... x Sn -> S`` gives ``c(S1,...,Sn)``."""
    equations = {}
    for sort in sig.sorts:
        alts = []
        for c in sig.constructors:
            if c.result != sort:
                continue
            parts: list = [Lit(c.name)]
            if c.args:
                parts.append(Lit("("))
                for i, a in enumerate(c.args):
                    if i:
                        parts.append(Lit(","))
                    parts.append(NT(a))
                parts.append(Lit(")"))
            alts.append(parts[0] if len(parts) == 1 else Concat(tuple(parts)))
        if not alts:
            equations[sort] = Empty()
        else:
            equations[sort] = alts[0] if len(alts) == 1 else Union_(tuple(alts))
    return EquationalGrammar(equations)


# -- bounded least solution ---------------------------------------------------------------


def _concat(left: frozenset, right: frozenset, max_len: int) -> frozenset:
    return frozenset(p + q for p in left for q in right if len(p) + len(q) <= max_len)


def _closure(base: frozenset, max_len: int, start: frozenset) -> frozenset:
    result = start
    while True:
        grown = result | _concat(result, base, max_len)
        if grown == result:
            return result
        result = grown


def _eval(e, env: Mapping[str, frozenset], max_len: int) -> frozenset:
    if isinstance(e, Lit):
        return frozenset([e.word]) if len(e.word) <= max_len else frozenset()
    if isinstance(e, Empty):
        return frozenset()
    if isinstance(e, NT):
        return env[e.name]
    if isinstance(e, Union_):
        return frozenset().union(*(_eval(a, env, max_len) for a in e.alts))
    if isinstance(e, Concat):
        out = frozenset([""])
        for p in e.parts:
            out = _concat(out, _eval(p, env, max_len), max_len)
            if not out:
                break
        return out
    if isinstance(e, Power):
        base = _eval(e.base, env, max_len)
        out = frozenset([""])
        for _ in range(e.n):
            out = _concat(out, base, max_len)
        return out
    if isinstance(e, Star):
        return _closure(_eval(e.base, env, max_len), max_len, frozenset([""]))
    if isinstance(e, Plus):
        base = _eval(e.base, env, max_len)
        return _closure(base, max_len, base)
    raise AlgebraError(f"unknown language expression {e!r}")


def kleene_iterates(g: EquationalGrammar, max_len: int) -> Iterator[dict[str, frozenset]]:
    """Successive Kleene approximations, starting from all-empty languages, until stable."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    env = {nt: frozenset() for nt in g.equations}
    yield env
    while True:
        nxt = {nt: _eval(rhs, env, max_len) for nt, rhs in g.equations.items()}
        if nxt == env:
            return
        env = nxt
        yield env


def solve(g: EquationalGrammar, max_len: int) -> dict[str, frozenset]:
    env: dict[str, frozenset] = {}
    for env in kleene_iterates(g, max_len):
        pass
    return env


def grammar_enumerate(g: EquationalGrammar, nt: str, max_len: int) -> frozenset:
    if nt not in g.equations:
        raise AlgebraError(f"unknown nonterminal {nt}")
    return solve(g, max_len)[nt]


def grammar_member(g: EquationalGrammar, nt: str, word: str) -> bool:
    return word in grammar_enumerate(g, nt, len(word))


def sorted_words(words) -> list[str]:
    return sorted(words, key=lambda w: (len(w), w))


# -- grammar files ---------------------------------------------------------------------------

_GTOKEN = re.compile(r'\s*(?:("(?:[^"\\]|\\.)*")|(\{\})|(\^\d+)|([A-Za-z_][A-Za-z0-9_-]*)|([|()*+=]))')


def _gtokens(text: str, lineno: int) -> list[str]:
    out, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _GTOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise AlgebraError(f"line {lineno}: cannot read {text[pos:]!r}")
        out.append(m.group().strip())
        pos = m.end()
    return out


class _GrammarReader:
    def __init__(self, toks: list[str], lineno: int):
        self.toks, self.i, self.lineno = toks, 0, lineno

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def fail(self, what: str):
        raise AlgebraError(f"line {self.lineno}: expected {what}, found {self.peek()!r}")

    def union(self):
        alts = [self.concat()]
        while self.peek() == "|":
            self.i += 1
            alts.append(self.concat())
        return alts[0] if len(alts) == 1 else Union_(tuple(alts))

    def concat(self):
        parts = []
        while self.peek() is not None and self.peek() not in ("|", ")"):
            parts.append(self.postfix())
        if not parts:
            self.fail("a term")
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def postfix(self):
        e = self.atom()
        while True:
            t = self.peek()
            if t == "*":
                e = Star(e)
            elif t == "+":
                e = Plus(e)
            elif t is not None and t.startswith("^"):
                e = Power(e, int(t[1:]))
            else:
                return e
            self.i += 1

    def atom(self):
        t = self.peek()
        if t is None:
            self.fail("a term")
        self.i += 1
        if t.startswith('"'):
            return Lit(re.sub(r"\\(.)", r"\1", t[1:-1]))
        if t == "{}":
            return Empty()
        if t == "(":
            e = self.union()
            if self.peek() != ")":
                self.fail("')'")
            self.i += 1
            return e
        if t[0].isalpha() or t[0] == "_":
            return NT(t)
        self.i -= 1
        self.fail("a term")


def parse_grammar(text: str) -> EquationalGrammar:
    lines: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if line.lstrip().startswith("|") and lines:
            n, prev = lines[-1]
            lines[-1] = (n, prev + " " + line.strip())
        else:
            lines.append((lineno, line.strip()))
    equations: dict[str, LangExp] = {}
    for lineno, line in lines:
        toks = _gtokens(line, lineno)
        if len(toks) < 3 or toks[1] != "=" or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_-]*", toks[0]):
            raise AlgebraError(f"line {lineno}: expected 'NT = ...'")
        if toks[0] in equations:
            raise AlgebraError(f"line {lineno}: second equation for {toks[0]}")
        reader = _GrammarReader(toks[2:], lineno)
        rhs = reader.union()
        if reader.peek() is not None:
            reader.fail("end of line")
        equations[toks[0]] = rhs
    return EquationalGrammar(equations)


def _strip_comment(line: str) -> str:
    in_quote = False
    for i, ch in enumerate(line):
        if ch == '"' and (i == 0 or line[i - 1] != "\\"):
            in_quote = not in_quote
        elif ch == "#" and not in_quote:
            return line[:i]
    return line


def _quote(word: str) -> str:
    return '"' + word.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_lang(e, top: bool = True) -> str:
    if isinstance(e, Lit):
        return _quote(e.word)
    if isinstance(e, Empty):
        return "{}"
    if isinstance(e, NT):
        return e.name
    if isinstance(e, Union_):
        body = " | ".join(format_lang(a, False) for a in e.alts)
        return body if top else f"( {body} )"
    if isinstance(e, Concat):
        return " ".join(
            f"( {format_lang(p)} )" if isinstance(p, Concat) else format_lang(p, False) for p in e.parts
        )
    suffix = {Star: "*", Plus: "+"}.get(type(e)) or f"^{e.n}"
    inner = format_lang(e.base, False)
    if isinstance(e.base, (Concat, Star, Plus, Power)):
        inner = f"( {inner} )"
    return inner + suffix


def format_grammar(g: EquationalGrammar) -> str:
    return "".join(f"{nt} = {format_lang(rhs)}\n" for nt, rhs in g.equations.items())


def alternatives(e) -> frozenset:
    """Top-level alternatives of an equation, for order-insensitive comparison."""
    if isinstance(e, Union_):
        return frozenset(e.alts)
    if isinstance(e, Empty):
        return frozenset()
    return frozenset([e])


# -- NumBool reference semantics ---------------------------------------------------------------


def eval_numbool(term: str) -> Union[int, TriBool]:
    """The unique homomorphism from NumBoolExp words to numbers and truth values.

    Arithmetic is exact and unbounded.
    """
    value, pos = _numbool(term.replace(" ", ""), 0)
    if pos != len(term.replace(" ", "")):
        raise AlgebraError(f"malformed term: trailing input at {pos}")
    return value


def _numbool_args(term: str, pos: int, n: int) -> tuple[list, int]:
    if not term.startswith("(", pos):
        raise AlgebraError(f"malformed term: expected '(' at {pos}")
    pos += 1
    args = []
    for i in range(n):
        if i:
            if not term.startswith(",", pos):
                raise AlgebraError(f"malformed term: expected ',' at {pos}")
            pos += 1
        v, pos = _numbool(term, pos)
        args.append(v)
    if not term.startswith(")", pos):
        raise AlgebraError(f"malformed term: expected ')' at {pos}")
    return args, pos + 1


def _num(v) -> int:
    if isinstance(v, TriBool):
        raise AlgebraError("malformed term: number expected")
    return v


def _bool(v) -> TriBool:
    if not isinstance(v, TriBool):
        raise AlgebraError("malformed term: truth value expected")
    return v


def _numbool(term: str, pos: int):
    for const, value in (("0", 0), ("1", 1), ("tt", TT), ("ff", FF)):
        if term.startswith(const, pos):
            return value, pos + len(const)
    for op in ("+", "=", "<", "or", "not"):
        if term.startswith(op, pos):
            args, pos = _numbool_args(term, pos + len(op), 1 if op == "not" else 2)
            if op == "+":
                return _num(args[0]) + _num(args[1]), pos
            if op == "=":
                return from_bool(_num(args[0]) == _num(args[1])), pos
            if op == "<":
                return from_bool(_num(args[0]) < _num(args[1])), pos
            if op == "or":
                return or_m(_bool(args[0]), _bool(args[1])), pos
            return not_m(_bool(args[0])), pos
    raise AlgebraError(f"malformed term at {pos}")
