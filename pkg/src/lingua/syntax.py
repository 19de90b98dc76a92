"""Lexer, concrete-syntax parser and the colloquial restoring transformation.

One recursive-descent parser serves both grammars.  In strict mode every
binary operation must carry its own parentheses, exactly as the pretty-printer
emits them.  In colloquial mode the parser additionally accepts the usual
shortcuts and restores them while building the tree:

* arithmetic chains associate to the left, ``*`` and ``/`` before ``+`` and ``-``;
* ``and``/``or`` chains associate to the right;
* ``array [e1, ..., en]`` becomes nested ``add-to-arr`` forms;
* ``record-type a as t1, b as t2 ee`` becomes nested ``expand-record-type``;
* redundant grouping parentheses are dropped;
* a procedure body may be a bare instruction.

Instruction and preamble sequences are right-nested in both modes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Optional, Sequence

from . import ast
from .ast import KEYWORDS

# -- lexer ----------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
     (?P<ws>[ \t\r\n]+)
    |(?P<comment>--[^\n]*)
    |(?P<word>'[^'\n]*')
    |(?P<num>\d+(?:\.\d+)?)
    |(?P<name>[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z][A-Za-z0-9_]*)*)
    |(?P<punct>:=|<=|>=|!=|<>|≠|≤|≥|[()\[\],;.+\-*/<>=])
    """,
    re.VERBOSE,
)

_ALIASES = {"≠": "!=", "<>": "!=", "≤": "<=", "≥": ">="}

# tokens after which a '-' is binary subtraction rather than a sign
_OPERAND_END_KEYWORDS = {"ee", "fi", "true", "false", "it", "TT", "number", "word", "boolean"}


@dataclass(frozen=True)
class Token:
    kind: str  # kw | ide | num | word | punct | eof
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected: Sequence[str] = ()):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)

    def format(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: {self.message}"

    def __str__(self) -> str:
        return self.format()


def _ends_operand(tok: Optional[Token]) -> bool:
    if tok is None:
        return False
    if tok.kind in ("ide", "num", "word"):
        return True
    if tok.kind == "punct":
        return tok.text in (")", "]")
    return tok.kind == "kw" and tok.text in _OPERAND_END_KEYWORDS


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if m is None:
            ch = source[pos]
            if ch == "'":
                raise ParseError("unterminated word literal", line, col)
            raise ParseError(f"unexpected character {ch!r}", line, col)
        kind, text = m.lastgroup, m.group()
        if kind in ("ws", "comment"):
            newlines = text.count("\n")
            if newlines:
                line += newlines
                line_start = m.start() + text.rindex("\n") + 1
            pos = m.end()
            continue
        if kind == "name":
            kind = "kw" if text in KEYWORDS else "ide"
        elif kind == "word":
            following = source[m.end(): m.end() + 1]
            if following.isalnum() or following == "_":
                # 'ab'c' : a word may not contain an apostrophe
                raise ParseError("apostrophe inside word literal", line, col)
        elif kind == "punct":
            text = _ALIASES.get(text, text)
            if text == "-" and not _ends_operand(tokens[-1] if tokens else None):
                n = re.compile(r"\d+(?:\.\d+)?").match(source, m.end())
                if n is not None:
                    tokens.append(Token("num", "-" + n.group(), line, col))
                    pos = n.end()
                    continue
        tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser -----------------------------------------------------------------------

_DATA_BINARY = {"and": ast.And, "or": ast.Or, "glue": ast.Glue}
_TRANSFER_BINARY = {"and": ast.TAnd, "or": ast.TOr}
_DECL_START = {"let", "set", "proc", "begin", "fun"}


class Parser:
    def __init__(self, tokens: list[Token], colloquial: bool = True):
        self.tokens = tokens
        self.pos = 0
        self.colloquial = colloquial

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def look(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("kw", "punct") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, expected: Sequence[str]) -> ParseError:
        t = self.tok
        want = " or ".join(expected)
        return ParseError(f"expected {want}, found {t}", t.line, t.col, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error([repr(text)])
        return self.advance()

    def ide(self) -> str:
        if self.tok.kind != "ide":
            raise self.error(["identifier"])
        return self.advance().text

    def finish(self, node):
        if self.tok.kind != "eof":
            raise self.error(["end of input"])
        return node

    # shared pieces of both expression grammars

    def _binary_op(self, table) -> Optional[tuple]:
        t = self.tok
        if t.kind == "kw" and t.text in table:
            return ("word", t.text)
        if t.kind == "punct" and t.text in ast.ARITH_OPS:
            return ("arith", t.text)
        if t.kind == "punct" and t.text in ast.COMPARE_OPS:
            return ("compare", t.text)
        return None

    def _make_binary(self, kind: str, op: str, left, right, table, arith, compare):
        if kind == "word":
            return table[op](left, right)
        return (arith if kind == "arith" else compare)(op, left, right)

    def _parenthesized(self, sub, table, arith, compare, require_binary: bool):
        """``( e )`` or ``( e op e )``; strict mode has no plain grouping."""
        self.expect("(")
        if self.colloquial:
            node = sub()
            self.expect(")")
            return node
        left = sub()
        op = self._binary_op(table)
        if op is None:
            if require_binary:
                raise self.error(["binary operator"])
            self.expect(")")
            return left
        self.advance()
        right = sub()
        self.expect(")")
        return self._make_binary(*op, left, right, table, arith, compare)

    def _chain(self, sub, table, arith, compare):
        """Colloquial precedence ladder for data and transfer expressions."""

        def level_or():
            left = level_and()
            if self.at("or"):
                self.advance()
                return table["or"](left, level_or())
            return left

        def level_and():
            left = level_not()
            if self.at("and"):
                self.advance()
                return table["and"](left, level_and())
            return left

        def level_not():
            if self.at("not") and not self.look().text == "(":
                self.advance()
                return (ast.Not if table is _DATA_BINARY else ast.TNot)(level_not())
            return level_compare()

        def level_compare():
            left = level_glue()
            if self.tok.kind == "punct" and self.tok.text in ast.COMPARE_OPS:
                op = self.advance().text
                right = level_glue()
                if self.tok.kind == "punct" and self.tok.text in ast.COMPARE_OPS:
                    raise ParseError("comparisons do not chain", self.tok.line, self.tok.col)
                return compare(op, left, right)
            return left

        def level_glue():
            left = level_add()
            while "glue" in table and self.at("glue"):
                self.advance()
                left = table["glue"](left, level_add())
            return left

        def level_add():
            left = level_mul()
            while self.at("+", "-"):
                op = self.advance().text
                left = arith(op, left, level_mul())
            return left

        def level_mul():
            left = sub()
            while self.at("*", "/"):
                op = self.advance().text
                left = arith(op, left, sub())
            return left

        return level_or()

    # data expressions

    def data(self):
        if self.colloquial:
            return self._chain(self.data_postfix, _DATA_BINARY, ast.Arith, ast.Compare)
        return self.data_postfix()

    def _data_paren(self, require_binary: bool):
        return self._parenthesized(self.data, _DATA_BINARY, ast.Arith, ast.Compare, require_binary)

    def data_postfix(self):
        node = self.data_primary()
        while True:
            if self.at("["):
                self.advance()
                idx = self.data()
                self.expect("]")
                node = ast.Index(node, idx)
            elif self.at("."):
                self.advance()
                node = ast.Select(node, self.ide())
            else:
                return node

    def data_primary(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return ast.NumLit(Decimal(t.text))
        if t.kind == "word":
            self.advance()
            return ast.WordLit(t.text[1:-1])
        if t.kind == "ide":
            self.advance()
            if self.at("("):
                return ast.FunCall(t.text, self._ide_list_in_parens())
            return ast.Ide(t.text)
        if self.at("("):
            return self._data_paren(require_binary=True)
        if t.kind != "kw":
            raise self.error(["data expression"])
        kw = t.text
        if kw in ("true", "false"):
            self.advance()
            return ast.BoolLit(kw == "true")
        if kw == "not":
            self.advance()
            if self.at("("):
                return ast.Not(self._data_paren(require_binary=False))
            if not self.colloquial:
                raise self.error(["'('"])
            return ast.Not(self.data_postfix())
        if kw == "top":
            self.advance()
            return ast.Top(self._data_paren(require_binary=False))
        if kw == "list":
            self.advance()
            e = self.data()
            self.expect("ee")
            return ast.ListMake(e)
        if kw == "push":
            self.advance()
            e = self.data()
            self.expect("on")
            lst = self.data()
            self.expect("ee")
            return ast.Push(e, lst)
        if kw == "array":
            self.advance()
            if self.at("[") and self.colloquial:
                return self._array_display()
            e = self.data()
            self.expect("ee")
            return ast.ArrayMake(e)
        if kw == "add-to-arr":
            self.advance()
            arr = self.data()
            self.expect("new")
            e = self.data()
            self.expect("ee")
            return ast.AddToArr(arr, e)
        if kw == "record":
            self.advance()
            attr = self.ide()
            self.expect("as")
            e = self.data()
            self.expect("ee")
            return ast.RecordMake(attr, e)
        if kw == "expand-record":
            self.advance()
            rec = self.data()
            self.expect("at")
            attr = self.ide()
            self.expect("by")
            e = self.data()
            self.expect("ee")
            return ast.ExpandRecord(rec, attr, e)
        if kw == "remove-attr":
            self.advance()
            rec = self.data()
            self.expect("at")
            attr = self.ide()
            self.expect("ee")
            return ast.RemoveAttr(rec, attr)
        if kw == "if":
            self.advance()
            cond = self.data()
            self.expect("then")
            then = self.data()
            self.expect("else")
            orelse = self.data()
            self.expect("fi")
            return ast.IfExp(cond, then, orelse)
        raise self.error(["data expression"])

    def _array_display(self):
        self.expect("[")
        items = [self.data()]
        while self.at(","):
            self.advance()
            items.append(self.data())
        self.expect("]")
        node = ast.ArrayMake(items[0])
        for item in items[1:]:
            node = ast.AddToArr(node, item)
        return node

    def _ide_list_in_parens(self) -> tuple[str, ...]:
        self.expect("(")
        names = []
        if not self.at(")"):
            names.append(self.ide())
            while self.at(","):
                self.advance()
                names.append(self.ide())
        self.expect(")")
        return tuple(names)

    # transfer expressions

    def transfer(self):
        if self.colloquial:
            return self._chain(self.transfer_primary, _TRANSFER_BINARY, ast.TArith, ast.TCompare)
        return self.transfer_primary()

    def _transfer_paren(self, require_binary: bool):
        return self._parenthesized(self.transfer, _TRANSFER_BINARY, ast.TArith, ast.TCompare, require_binary)

    def transfer_primary(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return ast.TConst(Decimal(t.text))
        if t.kind == "word":
            self.advance()
            return ast.TConst(t.text[1:-1])
        if self.at("("):
            return self._transfer_paren(require_binary=True)
        if t.kind != "kw":
            raise self.error(["transfer expression"])
        kw = t.text
        if kw in ("true", "false"):
            self.advance()
            return ast.TConst(kw == "true")
        if kw == "it":
            self.advance()
            return ast.Current()
        if kw == "TT":
            self.advance()
            return ast.TTTransfer()
        if kw in ast.SIMPLE_TYPE_NAMES:
            self.advance()
            return ast.BodyTest(kw)
        if kw == "record":
            self.advance()
            self.expect(".")
            return ast.AttrSelect(self.ide())
        if kw == "not":
            self.advance()
            if self.at("("):
                return ast.TNot(self._transfer_paren(require_binary=False))
            if not self.colloquial:
                raise self.error(["'('"])
            return ast.TNot(self.transfer_primary())
        if kw == "all-list":
            self.advance()
            inner = self.transfer()
            self.expect("ee")
            return ast.AllList(inner)
        raise self.error(["transfer expression"])

    # type expressions

    def type_exp(self):
        t = self.tok
        if t.kind == "ide":
            self.advance()
            return ast.TypeConst(t.text)
        if t.kind != "kw":
            raise self.error(["type expression"])
        kw = t.text
        if kw in ast.SIMPLE_TYPE_NAMES:
            self.advance()
            return ast.SimpleType(kw)
        if kw in ("list-type", "array-type"):
            self.advance()
            elem = self.type_exp()
            self.expect("ee")
            return (ast.ListType if kw == "list-type" else ast.ArrayType)(elem)
        if kw == "record-type":
            self.advance()
            attr = self.ide()
            self.expect("as")
            node = ast.RecordType(attr, self.type_exp())
            while self.colloquial and self.at(","):
                self.advance()
                attr = self.ide()
                self.expect("as")
                node = ast.ExpandRecordType(node, attr, self.type_exp())
            self.expect("ee")
            return node
        if kw == "expand-record-type":
            self.advance()
            base = self.type_exp()
            self.expect("at")
            attr = self.ide()
            self.expect("by")
            elem = self.type_exp()
            self.expect("ee")
            return ast.ExpandRecordType(base, attr, elem)
        if kw == "replace-transfer-in":
            self.advance()
            base = self.type_exp()
            self.expect("by")
            tre = self.transfer()
            self.expect("ee")
            return ast.ReplaceTransfer(base, tre)
        raise self.error(["type expression"])

    # instructions

    def instructions(self):
        items = [self.instruction()]
        while self.at(";"):
            self.advance()
            items.append(self.instruction())
        return ast.seq_of(items)

    def instruction(self):
        t = self.tok
        if t.kind == "ide":
            target = self.advance().text
            self.expect(":=")
            return ast.Assign(target, self.data())
        if self.at("skip"):
            self.advance()
            return ast.Skip()
        if self.at("yoke"):
            self.advance()
            target = self.ide()
            self.expect(":=")
            return ast.YokeReplace(target, self.transfer())
        if self.at("call"):
            self.advance()
            name = self.ide()
            ref, val = self._call_args()
            return ast.Call(name, ref, val)
        if self.at("if"):
            self.advance()
            cond = self.data()
            self.expect("then")
            then = self.instructions()
            if self.at("else"):
                self.advance()
                orelse = self.instructions()
                self.expect("fi")
                return ast.If(cond, then, orelse)
            self.expect("fi")
            return ast.ErrorHandler(cond, then)
        if self.at("while"):
            self.advance()
            cond = self.data()
            self.expect("do")
            body = self.instructions()
            self.expect("od")
            return ast.While(cond, body)
        raise self.error(["instruction"])

    def _ide_run(self) -> list[str]:
        names = [self.ide()]
        while self.at(","):
            self.advance()
            names.append(self.ide())
        return names

    def _call_args(self):
        self.expect("(")
        sections = {"ref": (), "val": ()}
        while self.at("ref", "val"):
            which = self.advance().text
            if sections[which]:
                raise self.error(["')'"])
            sections[which] = tuple(self._ide_run()) if self.tok.kind == "ide" else ()
        self.expect(")")
        return sections["ref"], sections["val"]

    # declarations, preambles, programs

    def _formal_params(self) -> list[ast.FormalParam]:
        params = []
        while True:
            names = [self.ide()]
            while self.at(",") and self.look().kind == "ide":
                self.advance()
                names.append(self.ide())
            self.expect("as")
            tex = self.type_exp()
            params.extend(ast.FormalParam(n, tex) for n in names)
            if self.at(",") and self.look().kind == "ide":
                self.advance()
                continue
            return params

    def _check_distinct(self, params, where: Token):
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ParseError("duplicate formal parameter", where.line, where.col)

    def _body(self) -> ast.Program:
        if self.at("begin-program"):
            return self.program()
        if not self.colloquial:
            raise self.error(["'begin-program'"])
        return ast.Program(ast.Skip(), self.instructions())

    def proc_decl(self) -> ast.ImpProcDecl:
        start = self.expect("proc")
        name = self.ide()
        self.expect("(")
        sections = {"ref": [], "val": []}
        while self.at("ref", "val"):
            which = self.advance().text
            if sections[which]:
                raise self.error(["')'"])
            if self.tok.kind == "ide":
                sections[which] = self._formal_params()
        self.expect(")")
        self._check_distinct(sections["ref"] + sections["val"], start)
        body = self._body()
        self.expect("end")
        self.expect("proc")
        return ast.ImpProcDecl(name, tuple(sections["ref"]), tuple(sections["val"]), body)

    def declaration(self):
        t = self.tok
        if self.at("let"):
            self.advance()
            name = self.ide()
            self.expect("be")
            tex = self.type_exp()
            self.expect("tel")
            return ast.VarDecl(name, tex)
        if self.at("set"):
            self.advance()
            name = self.ide()
            self.expect("as")
            tex = self.type_exp()
            self.expect("tes")
            return ast.TypeDef(name, tex)
        if self.at("proc"):
            return self.proc_decl()
        if self.at("begin"):
            self.advance()
            self.expect("multiproc")
            procs = [self.proc_decl()]
            while self.at(";"):
                self.advance()
                procs.append(self.proc_decl())
            self.expect("end")
            self.expect("multiproc")
            return ast.MultiProcDecl(tuple(procs))
        if self.at("fun"):
            self.advance()
            name = self.ide()
            self.expect("(")
            params = []
            if self.at("val"):
                self.advance()
            if self.tok.kind == "ide":
                params = self._formal_params()
            self.expect(")")
            self._check_distinct(params, t)
            body = self._body()
            self.expect("return")
            result = self.data()
            self.expect("as")
            return ast.FunProcDecl(name, tuple(params), body, result, self.type_exp())
        raise self.error(["declaration"])

    def _skip_starts_preamble_item(self) -> bool:
        """Is the ``skip`` at the cursor followed, past further skips, by a declaration?"""
        j = self.pos + 1
        toks = self.tokens
        while j + 1 < len(toks) and toks[j].text == ";" and toks[j + 1].text == "skip" and toks[j + 1].kind == "kw":
            j += 2
        return (
            j + 1 < len(toks)
            and toks[j].text == ";"
            and toks[j + 1].kind == "kw"
            and toks[j + 1].text in _DECL_START
        )

    def preamble(self):
        items = []
        while True:
            if self.tok.kind == "kw" and self.tok.text in _DECL_START:
                items.append(self.declaration())
            elif self.at("skip") and self._skip_starts_preamble_item():
                self.advance()
                items.append(ast.Skip())
            else:
                break
            self.expect(";")
        if not items:
            self.expect("skip")
            self.expect(";")
            items.append(ast.Skip())
        return ast.seq_of(items, ast.PreSeq)

    def program(self) -> ast.Program:
        self.expect("begin-program")
        pam = self.preamble()
        ins = self.instructions()
        self.expect("end-program")
        return ast.Program(pam, ins)


# -- entry points -------------------------------------------------------------------

FRAGMENTS = ("program", "instruction", "data", "transfer", "type")


def _entry(parser: Parser, fragment: str):
    return {
        "program": parser.program,
        "instruction": parser.instructions,
        "data": parser.data,
        "transfer": parser.transfer,
        "type": parser.type_exp,
    }[fragment]


def parse(source, fragment: str = "program", colloquial: bool = True):
    """Parse ``source`` (text or tokens) as the given fragment kind.

    ``fragment="auto"`` tries a program, an instruction, then data, transfer
    and type expressions, and reports the error of the most plausible kind.
    """
    tokens = tokenize(source) if isinstance(source, str) else list(source)
    if fragment != "auto":
        p = Parser(tokens, colloquial)
        return p.finish(_entry(p, fragment)())
    first = tokens[0]
    if first.kind == "kw" and first.text == "begin-program":
        return parse(tokens, "program", colloquial)
    errors = []
    for kind in ("instruction", "data", "transfer", "type"):
        try:
            return parse(tokens, kind, colloquial)
        except ParseError as exc:
            errors.append(exc)
    # the attempt that got furthest is the most informative
    raise max(errors, key=lambda e: (e.line, e.col))


def parse_concrete(source, fragment: str = "program"):
    """Strict concrete syntax only: binary operations need their parentheses."""
    return parse(source, fragment, colloquial=False)


def restore_colloquial(source, fragment: str = "program"):
    """Parse colloquial syntax and restore it to the concrete tree."""
    return parse(source, fragment, colloquial=True)
