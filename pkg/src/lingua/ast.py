"""Abstract syntax of Lingua, the canonical pretty-printer and the AST dump.

Every node is a frozen dataclass, so structural equality comes for free and
trees can be shared between threads.  ``pretty`` emits the fully parenthesized
concrete syntax; ``dump`` emits a prefix form used for golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from decimal import Decimal
from typing import Union

# Every keyword of the concrete syntax.  None of them may be used as an
# identifier, neither by the parser nor by the binding operations.
KEYWORDS = frozenset(
    """
    true false and or not glue list push on top array add-to-arr new record
    expand-record remove-attr at by if then else fi it all-list TT ee
    boolean number word list-type array-type record-type expand-record-type
    replace-transfer-in as yoke skip call ref val while do od let be tel set
    tes proc end begin multiproc fun return begin-program end-program
    """.split()
)

ARITH_OPS = ("+", "-", "*", "/")
COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
SIMPLE_TYPE_NAMES = ("boolean", "number", "word")


class Node:
    """Base class of all syntax nodes."""

    def __str__(self) -> str:
        return pretty(self)


# -- data expressions -------------------------------------------------------


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class NumLit(Node):
    value: Decimal


@dataclass(frozen=True)
class WordLit(Node):
    value: str


@dataclass(frozen=True)
class Ide(Node):
    name: str


@dataclass(frozen=True)
class And(Node):
    left: DatExp
    right: DatExp


@dataclass(frozen=True)
class Or(Node):
    left: DatExp
    right: DatExp


@dataclass(frozen=True)
class Not(Node):
    arg: DatExp


@dataclass(frozen=True)
class Arith(Node):
    op: str
    left: DatExp
    right: DatExp


@dataclass(frozen=True)
class Compare(Node):
    op: str
    left: DatExp
    right: DatExp


@dataclass(frozen=True)
class Glue(Node):
    left: DatExp
    right: DatExp


@dataclass(frozen=True)
class ListMake(Node):
    elem: DatExp


@dataclass(frozen=True)
class Push(Node):
    elem: DatExp
    lst: DatExp


@dataclass(frozen=True)
class Top(Node):
    lst: DatExp


@dataclass(frozen=True)
class ArrayMake(Node):
    elem: DatExp


@dataclass(frozen=True)
class AddToArr(Node):
    arr: DatExp
    elem: DatExp


@dataclass(frozen=True)
class Index(Node):
    arr: DatExp
    idx: DatExp


@dataclass(frozen=True)
class RecordMake(Node):
    attr: str
    value: DatExp


@dataclass(frozen=True)
class ExpandRecord(Node):
    rec: DatExp
    attr: str
    value: DatExp


@dataclass(frozen=True)
class RemoveAttr(Node):
    rec: DatExp
    attr: str


@dataclass(frozen=True)
class Select(Node):
    rec: DatExp
    attr: str


@dataclass(frozen=True)
class IfExp(Node):
    cond: DatExp
    then: DatExp
    orelse: DatExp


@dataclass(frozen=True)
class FunCall(Node):
    name: str
    args: tuple[str, ...]


DatExp = Union[
    BoolLit, NumLit, WordLit, Ide, And, Or, Not, Arith, Compare, Glue,
    ListMake, Push, Top, ArrayMake, AddToArr, Index, RecordMake, ExpandRecord,
    RemoveAttr, Select, IfExp, FunCall,
]

# -- transfer expressions ---------------------------------------------------


@dataclass(frozen=True)
class TConst(Node):
    value: Union[bool, Decimal, str]


@dataclass(frozen=True)
class Current(Node):
    """The identity transfer, written ``it``."""


@dataclass(frozen=True)
class AttrSelect(Node):
    attr: str


@dataclass(frozen=True)
class TArith(Node):
    op: str
    left: TraExp
    right: TraExp


@dataclass(frozen=True)
class TCompare(Node):
    op: str
    left: TraExp
    right: TraExp


@dataclass(frozen=True)
class TAnd(Node):
    left: TraExp
    right: TraExp


@dataclass(frozen=True)
class TOr(Node):
    left: TraExp
    right: TraExp


@dataclass(frozen=True)
class TNot(Node):
    arg: TraExp


@dataclass(frozen=True)
class BodyTest(Node):
    name: str


@dataclass(frozen=True)
class AllList(Node):
    inner: TraExp


@dataclass(frozen=True)
class TTTransfer(Node):
    pass


TraExp = Union[
    TConst, Current, AttrSelect, TArith, TCompare, TAnd, TOr, TNot, BodyTest,
    AllList, TTTransfer,
]

# -- type expressions -------------------------------------------------------


@dataclass(frozen=True)
class SimpleType(Node):
    name: str


@dataclass(frozen=True)
class TypeConst(Node):
    name: str


@dataclass(frozen=True)
class ListType(Node):
    elem: TypExp


@dataclass(frozen=True)
class ArrayType(Node):
    elem: TypExp


@dataclass(frozen=True)
class RecordType(Node):
    attr: str
    elem: TypExp


@dataclass(frozen=True)
class ExpandRecordType(Node):
    base: TypExp
    attr: str
    elem: TypExp


@dataclass(frozen=True)
class ReplaceTransfer(Node):
    base: TypExp
    transfer: TraExp


TypExp = Union[
    SimpleType, TypeConst, ListType, ArrayType, RecordType, ExpandRecordType,
    ReplaceTransfer,
]

# -- instructions -----------------------------------------------------------


@dataclass(frozen=True)
class Assign(Node):
    target: str
    value: DatExp


@dataclass(frozen=True)
class YokeReplace(Node):
    target: str
    transfer: TraExp


@dataclass(frozen=True)
class Skip(Node):
    pass


@dataclass(frozen=True)
class Call(Node):
    name: str
    ref_args: tuple[str, ...]
    val_args: tuple[str, ...]


@dataclass(frozen=True)
class ErrorHandler(Node):
    cond: DatExp
    body: Instruction


@dataclass(frozen=True)
class If(Node):
    cond: DatExp
    then: Instruction
    orelse: Instruction


@dataclass(frozen=True)
class While(Node):
    cond: DatExp
    body: Instruction


@dataclass(frozen=True)
class Seq(Node):
    first: Instruction
    second: Instruction


Instruction = Union[Assign, YokeReplace, Skip, Call, ErrorHandler, If, While, Seq]

# -- declarations, preambles, programs --------------------------------------


@dataclass(frozen=True)
class FormalParam(Node):
    name: str
    type: TypExp


@dataclass(frozen=True)
class VarDecl(Node):
    name: str
    type: TypExp


@dataclass(frozen=True)
class TypeDef(Node):
    name: str
    type: TypExp


@dataclass(frozen=True)
class ImpProcDecl(Node):
    name: str
    ref_params: tuple[FormalParam, ...]
    val_params: tuple[FormalParam, ...]
    body: Program


@dataclass(frozen=True)
class MultiProcDecl(Node):
    procs: tuple[ImpProcDecl, ...]


@dataclass(frozen=True)
class FunProcDecl(Node):
    name: str
    params: tuple[FormalParam, ...]
    body: Program
    result: DatExp
    result_type: TypExp


@dataclass(frozen=True)
class PreSeq(Node):
    first: Preamble
    second: Preamble


Preamble = Union[VarDecl, TypeDef, ImpProcDecl, MultiProcDecl, FunProcDecl, Skip, PreSeq]


@dataclass(frozen=True)
class Program(Node):
    preamble: Preamble
    instruction: Instruction


DECLARATIONS = (VarDecl, TypeDef, ImpProcDecl, MultiProcDecl, FunProcDecl)


def flatten_seq(node: Node) -> list[Node]:
    """Items of a (possibly nested) instruction or preamble sequence, in order."""
    kind = type(node)
    if kind not in (Seq, PreSeq):
        return [node]
    out: list[Node] = []
    stack = [node]
    while stack:
        n = stack.pop()
        if type(n) is kind:
            stack.append(n.second)
            stack.append(n.first)
        else:
            out.append(n)
    return out


def seq_of(items: list, kind=Seq):
    """Right-nested sequence of ``items`` (the restored reading of ``a ; b ; c``)."""
    result = items[-1]
    for item in reversed(items[:-1]):
        result = kind(item, result)
    return result


# -- pretty-printer ---------------------------------------------------------

_BINARY_DATA = {And: "and", Or: "or", Glue: "glue"}
_BINARY_TRANSFER = {TAnd: "and", TOr: "or"}


def format_number(value: Decimal) -> str:
    text = format(value, "f")
    return text


def format_word(value: str) -> str:
    return f"'{value}'"


def _literal(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Decimal):
        return format_number(value)
    return format_word(value)


def _params(params: tuple[FormalParam, ...]) -> str:
    return ", ".join(f"{p.name} as {pretty(p.type)}" for p in params)


def _param_head(ref: str, val: str) -> str:
    parts = []
    if ref:
        parts.append(f"ref {ref}")
    if val:
        parts.append(f"val {val}")
    return "(" + " ".join(parts) + ")"


def _indent(text: str, by: str = "  ") -> str:
    return "\n".join(by + line if line else line for line in text.split("\n"))


def _wrapped(node: Node) -> str:
    # a binary operation already brings its own parentheses
    text = pretty(node)
    if type(node) in _BINARY_DATA or type(node) in (Arith, Compare, TArith, TCompare):
        return text
    return f"({text})"


def pretty(node: Node) -> str:
    """Strict concrete syntax of ``node``; every binary operation is parenthesized."""
    t = type(node)
    # data expressions
    if t is BoolLit:
        return "true" if node.value else "false"
    if t is NumLit:
        return format_number(node.value)
    if t is WordLit:
        return format_word(node.value)
    if t is Ide:
        return node.name
    if t in _BINARY_DATA:
        return f"({pretty(node.left)} {_BINARY_DATA[t]} {pretty(node.right)})"
    if t in (Arith, Compare, TArith, TCompare):
        return f"({pretty(node.left)} {node.op} {pretty(node.right)})"
    if t is Not or t is TNot:
        return f"not {_wrapped(node.arg)}"
    if t is ListMake:
        return f"list {pretty(node.elem)} ee"
    if t is Push:
        return f"push {pretty(node.elem)} on {pretty(node.lst)} ee"
    if t is Top:
        return f"top {_wrapped(node.lst)}"
    if t is ArrayMake:
        return f"array {pretty(node.elem)} ee"
    if t is AddToArr:
        return f"add-to-arr {pretty(node.arr)} new {pretty(node.elem)} ee"
    if t is Index:
        return f"{pretty(node.arr)}[{pretty(node.idx)}]"
    if t is RecordMake:
        return f"record {node.attr} as {pretty(node.value)} ee"
    if t is ExpandRecord:
        return f"expand-record {pretty(node.rec)} at {node.attr} by {pretty(node.value)} ee"
    if t is RemoveAttr:
        return f"remove-attr {pretty(node.rec)} at {node.attr} ee"
    if t is Select:
        return f"{pretty(node.rec)}.{node.attr}"
    if t is IfExp:
        return f"if {pretty(node.cond)} then {pretty(node.then)} else {pretty(node.orelse)} fi"
    if t is FunCall:
        return f"{node.name}({', '.join(node.args)})"
    # transfer expressions
    if t is TConst:
        return _literal(node.value)
    if t is Current:
        return "it"
    if t is AttrSelect:
        return f"record.{node.attr}"
    if t in _BINARY_TRANSFER:
        return f"({pretty(node.left)} {_BINARY_TRANSFER[t]} {pretty(node.right)})"
    if t is BodyTest:
        return node.name
    if t is AllList:
        return f"all-list {pretty(node.inner)} ee"
    if t is TTTransfer:
        return "TT"
    # type expressions
    if t is SimpleType or t is TypeConst:
        return node.name
    if t is ListType:
        return f"list-type {pretty(node.elem)} ee"
    if t is ArrayType:
        return f"array-type {pretty(node.elem)} ee"
    if t is RecordType:
        return f"record-type {node.attr} as {pretty(node.elem)} ee"
    if t is ExpandRecordType:
        return f"expand-record-type {pretty(node.base)} at {node.attr} by {pretty(node.elem)} ee"
    if t is ReplaceTransfer:
        return f"replace-transfer-in {pretty(node.base)} by {pretty(node.transfer)} ee"
    # instructions
    if t is Assign:
        return f"{node.target} := {pretty(node.value)}"
    if t is YokeReplace:
        return f"yoke {node.target} := {pretty(node.transfer)}"
    if t is Skip:
        return "skip"
    if t is Call:
        return f"call {node.name} {_param_head(', '.join(node.ref_args), ', '.join(node.val_args))}"
    if t is ErrorHandler:
        return f"if {pretty(node.cond)} then\n{_indent(pretty(node.body))}\nfi"
    if t is If:
        return (
            f"if {pretty(node.cond)} then\n{_indent(pretty(node.then))}\n"
            f"else\n{_indent(pretty(node.orelse))}\nfi"
        )
    if t is While:
        return f"while {pretty(node.cond)} do\n{_indent(pretty(node.body))}\nod"
    if t is Seq or t is PreSeq:
        return " ;\n".join(pretty(item) for item in flatten_seq(node))
    # declarations
    if t is VarDecl:
        return f"let {node.name} be {pretty(node.type)} tel"
    if t is TypeDef:
        return f"set {node.name} as {pretty(node.type)} tes"
    if t is ImpProcDecl:
        head = _param_head(_params(node.ref_params), _params(node.val_params))
        return f"proc {node.name} {head}\n{_indent(pretty(node.body))}\nend proc"
    if t is MultiProcDecl:
        members = " ;\n".join(pretty(p) for p in node.procs)
        return f"begin multiproc\n{_indent(members)}\nend multiproc"
    if t is FunProcDecl:
        return (
            f"fun {node.name} ({_params(node.params)})\n{_indent(pretty(node.body))}\n"
            f"return {pretty(node.result)} as {pretty(node.result_type)}"
        )
    if t is Program:
        body = f"{pretty(node.preamble)} ;\n{pretty(node.instruction)}"
        return f"begin-program\n{_indent(body)}\nend-program"
    raise TypeError(f"not a syntax node: {node!r}")


# -- prefix dump ------------------------------------------------------------

_TAGS = {
    BoolLit: "bool", NumLit: "num", WordLit: "word", Ide: "ide", And: "and",
    Or: "or", Not: "not", Arith: "arith", Compare: "compare", Glue: "glue",
    ListMake: "list-make", Push: "push", Top: "top", ArrayMake: "array-make",
    AddToArr: "add-to-arr", Index: "index", RecordMake: "record-make",
    ExpandRecord: "expand-record", RemoveAttr: "remove-attr", Select: "select",
    IfExp: "if-exp", FunCall: "fun-call", TConst: "const", Current: "current",
    AttrSelect: "attr-select", TArith: "arith", TCompare: "compare", TAnd: "and",
    TOr: "or", TNot: "not", BodyTest: "body-test", AllList: "all-list",
    TTTransfer: "tt-transfer", SimpleType: "simple-type", TypeConst: "type-const",
    ListType: "list-type", ArrayType: "array-type", RecordType: "record-type",
    ExpandRecordType: "expand-record-type", ReplaceTransfer: "replace-transfer",
    Assign: "assign", YokeReplace: "yoke", Skip: "skip", Call: "call",
    ErrorHandler: "on-error", If: "if", While: "while", Seq: "seq",
    FormalParam: "param", VarDecl: "let", TypeDef: "set", ImpProcDecl: "proc",
    MultiProcDecl: "multiproc", FunProcDecl: "fun", PreSeq: "pre-seq",
    Program: "program",
}


def _dump_field(value) -> str:
    if isinstance(value, Node):
        return dump(value)
    if isinstance(value, tuple):
        return "(" + " ".join(_dump_field(v) for v in value) + ")"
    if isinstance(value, (bool, Decimal)):
        return _literal(value)
    return str(value)


def dump(node: Node) -> str:
    """Canonical prefix form, e.g. ``(assign x (arith + (ide y) (num 1)))``."""
    t = type(node)
    if t is WordLit or (t is TConst and isinstance(node.value, str)):
        return f"({_TAGS[t]} {format_word(node.value)})"
    parts = [_TAGS[t]] + [_dump_field(getattr(node, f.name)) for f in fields(node)]
    return "(" + " ".join(parts) + ")"
