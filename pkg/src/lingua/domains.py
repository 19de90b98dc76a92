"""Semantic domains: data, bodies, composites, transfers, types and values.

All composite-level operations below are transparent for errors: when any
argument is an ``AbstractError``, the first such argument (left to right) is
the result.  They never raise on bad input; failures are abstract errors.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from decimal import Decimal, Inexact, localcontext
from fractions import Fraction
from typing import Callable, Optional, Union

from . import ast


class FrozenMap(Mapping):
    """Immutable, hashable mapping that keeps insertion order for display.

    Equality ignores order and requires both sides to be the same class, so a
    record of data never equals a record of bodies.
    """

    __slots__ = ("_items", "_hash")

    def __init__(self, items=()):
        self._items = dict(items)
        self._hash = None

    def __getitem__(self, key):
        return self._items[key]

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __eq__(self, other):
        return type(self) is type(other) and self._items == other._items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, frozenset(self._items.items())))
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({self._items!r})"

    def set(self, key, value):
        items = dict(self._items)
        items[key] = value
        return type(self)(items)

    def delete(self, key):
        items = dict(self._items)
        del items[key]
        return type(self)(items)


@dataclass(frozen=True)
class AbstractError:
    message: str

    def __post_init__(self):
        if not self.message or "'" in self.message:
            raise ValueError(f"invalid abstract error word: {self.message!r}")

    def __str__(self):
        return self.message


# -- data -------------------------------------------------------------------
# booleans are Python bools, numbers are Decimals, words are strs.


@dataclass(frozen=True)
class ListData:
    items: tuple = ()


@dataclass(frozen=True)
class ArrayData:
    items: tuple = ()  # element i is stored at position i - 1


class RecordData(FrozenMap):
    __slots__ = ()


Data = Union[bool, Decimal, str, ListData, ArrayData, RecordData]


class _Omega:
    """Pseudo-data of a declared but uninitialized variable."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Ω"

    def __reduce__(self):
        return (_Omega, ())


OMEGA = _Omega()

# -- bodies -----------------------------------------------------------------


@dataclass(frozen=True)
class SimpleBody:
    name: str

    def __post_init__(self):
        if self.name not in ("Boolean", "number", "word"):
            raise ValueError(f"unknown simple body {self.name!r}")


BOOLEAN = SimpleBody("Boolean")
NUMBER = SimpleBody("number")
WORD = SimpleBody("word")


@dataclass(frozen=True)
class ListBody:
    elem: Body


@dataclass(frozen=True)
class ArrayBody:
    elem: Body


class BodyMap(FrozenMap):
    __slots__ = ()


@dataclass(frozen=True)
class RecordBody:
    attrs: BodyMap

    def __post_init__(self):
        if not isinstance(self.attrs, BodyMap):
            object.__setattr__(self, "attrs", BodyMap(self.attrs))


Body = Union[SimpleBody, ListBody, ArrayBody, RecordBody]

SIMPLE_BODY_OF_TYPE_NAME = {"boolean": BOOLEAN, "number": NUMBER, "word": WORD}


def clan_contains_body(body: Body, data) -> bool:
    if isinstance(body, SimpleBody):
        if body is BOOLEAN or body.name == "Boolean":
            return isinstance(data, bool)
        if body.name == "number":
            return isinstance(data, Decimal) and data.is_finite()
        return isinstance(data, str) and "'" not in data
    if isinstance(body, ListBody):
        return isinstance(data, ListData) and all(
            clan_contains_body(body.elem, d) for d in data.items
        )
    if isinstance(body, ArrayBody):
        return isinstance(data, ArrayData) and all(
            clan_contains_body(body.elem, d) for d in data.items
        )
    if isinstance(body, RecordBody):
        return (
            isinstance(data, RecordData)
            and set(data) == set(body.attrs)
            and all(clan_contains_body(body.attrs[k], data[k]) for k in data)
        )
    return False


@dataclass(frozen=True)
class Composite:
    data: Data
    body: Body

    def __post_init__(self):
        if not clan_contains_body(self.body, self.data):
            raise ValueError(f"data {self.data!r} is not in the clan of {self.body!r}")


TRUE = Composite(True, BOOLEAN)
FALSE = Composite(False, BOOLEAN)

CompositeE = Union[Composite, AbstractError]


def boo(value: bool) -> Composite:
    return TRUE if value else FALSE


def is_boo_composite(x) -> bool:
    return isinstance(x, Composite) and x.body == BOOLEAN


# -- transfers, types, values -----------------------------------------------


@dataclass(frozen=True)
class Transfer:
    """A one-argument function on composites or errors.

    ``term`` is the transfer expression it denotes; it identifies the transfer
    for equality and display.  ``fn`` is only ever called on composites.
    """

    term: ast.Node
    fn: Callable[[Composite], CompositeE] = field(compare=False, repr=False)


def apply_transfer(tra: Transfer, arg: CompositeE) -> CompositeE:
    if isinstance(arg, AbstractError):
        return arg
    return tra.fn(arg)


TT = Transfer(ast.TTTransfer(), lambda com: TRUE)


@dataclass(frozen=True)
class Type:
    body: Body
    transfer: Transfer = TT


@dataclass(frozen=True)
class Value:
    content: object  # Data or OMEGA
    type: Type

    @property
    def is_pseudo(self) -> bool:
        return self.content is OMEGA

    @property
    def composite(self) -> Composite:
        return Composite(self.content, self.type.body)


def clan_contains_type(typ: Type, com: Composite) -> bool:
    if not isinstance(com, Composite) or com.body != typ.body:
        return False
    if not clan_contains_body(typ.body, com.data):
        return False
    return apply_transfer(typ.transfer, com) == TRUE


def coherent(b1: Body, b2: Body) -> bool:
    if b1 == b2:
        return True
    if not (isinstance(b1, RecordBody) and isinstance(b2, RecordBody)):
        return False
    small, big = sorted((b1.attrs, b2.attrs), key=len)
    if len(big) != len(small) + 1:
        return False
    return all(k in big and big[k] == v for k, v in small.items())


# -- size limits ------------------------------------------------------------


@dataclass(frozen=True)
class Limits:
    max_number_total_digits: int = 12
    max_number_fraction_digits: int = 4
    max_word_length: int = 4096
    max_collection_size: int = 65536
    # Optional bound on absolute value; None means digit budgets only.
    max_number_magnitude: Optional[Decimal] = None

    def __post_init__(self):
        for name in (
            "max_number_total_digits",
            "max_number_fraction_digits",
            "max_word_length",
            "max_collection_size",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.max_number_magnitude is not None:
            object.__setattr__(self, "max_number_magnitude", Decimal(self.max_number_magnitude))
            if self.max_number_magnitude <= 0:
                raise ValueError("max_number_magnitude must be positive")


DEFAULT_LIMITS = Limits()


def digit_counts(n: Decimal) -> tuple[int, int]:
    """(total significant-position digits, fraction digits) of ``n``."""
    _, digits, exp = n.as_tuple()
    # strip trailing zeros without going through a precision-bound context
    digits = list(digits)
    while exp < 0 and len(digits) > 1 and digits[-1] == 0:
        digits.pop()
        exp += 1
    if exp < 0 and digits == [0]:
        exp = 0
    if exp >= 0:
        if digits == [0]:
            return 1, 0
        return len(digits) + exp, 0
    frac = -exp
    return max(len(digits) - frac, 0) + frac, frac


def oversized(data, limits: Limits = DEFAULT_LIMITS) -> bool:
    stack = [data]
    while stack:
        d = stack.pop()
        if isinstance(d, bool):
            continue
        if isinstance(d, Decimal):
            total, frac = digit_counts(d)
            if total > limits.max_number_total_digits or frac > limits.max_number_fraction_digits:
                return True
            if limits.max_number_magnitude is not None and abs(d) > limits.max_number_magnitude:
                return True
        elif isinstance(d, str):
            if len(d) > limits.max_word_length:
                return True
        elif isinstance(d, (ListData, ArrayData)):
            if len(d.items) > limits.max_collection_size:
                return True
            stack.extend(d.items)
        elif isinstance(d, RecordData):
            if len(d) > limits.max_collection_size:
                return True
            stack.extend(d.values())
    return False


# -- composite-level operations ---------------------------------------------

NUMBER_EXPECTED = AbstractError("number-expected")
DIVISION_BY_ZERO = AbstractError("division-by-zero")
OVERFLOW = AbstractError("overflow")
INCOMPARABLE = AbstractError("incomparable")
WORD_EXPECTED = AbstractError("word-expected")
BOOLEAN_EXPECTED = AbstractError("boolean-expected")
LIST_EXPECTED = AbstractError("list-expected")
ARRAY_EXPECTED = AbstractError("array-expected")
RECORD_EXPECTED = AbstractError("record-expected")
BODY_MISMATCH = AbstractError("body-mismatch")
EMPTY_LIST = AbstractError("empty-list")
INDEX_OUT_OF_RANGE = AbstractError("index-out-of-range")
ATTRIBUTE_EXISTS = AbstractError("attribute-exists")
ATTRIBUTE_MISSING = AbstractError("attribute-missing")


def first_error(*args) -> Optional[AbstractError]:
    for a in args:
        if isinstance(a, AbstractError):
            return a
    return None


def _checked(data, body: Body, limits: Limits) -> CompositeE:
    if oversized(data, limits):
        return OVERFLOW
    return Composite(data, body)


def _strip(n: Decimal) -> Decimal:
    """Drop trailing fractional zeros exactly (no context rounding)."""
    text = format(n, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return Decimal(text)


def _divide(a: Decimal, b: Decimal, fraction_digits: int) -> Decimal:
    scaled = Fraction(a) / Fraction(b) * 10**fraction_digits
    q = round(scaled)  # half-even
    return _strip(Decimal(f"{q}E-{fraction_digits}"))


def comp_arith(op: str, c1: CompositeE, c2: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    err = first_error(c1, c2)
    if err:
        return err
    if c1.body != NUMBER or c2.body != NUMBER:
        return NUMBER_EXPECTED
    a, b = c1.data, c2.data
    if op == "/":
        if b == 0:
            return DIVISION_BY_ZERO
        result = _divide(a, b, limits.max_number_fraction_digits)
    else:
        with localcontext() as ctx:
            ctx.prec = sum(len(o.as_tuple().digits) + abs(o.as_tuple().exponent) for o in (a, b)) + 16
            ctx.traps[Inexact] = True
            if op == "+":
                result = a + b
            elif op == "-":
                result = a - b
            elif op == "*":
                result = a * b
            else:
                raise ValueError(f"unknown arithmetic operator {op!r}")
    return _checked(_strip(result), NUMBER, limits)


def comp_compare(op: str, c1: CompositeE, c2: CompositeE) -> CompositeE:
    err = first_error(c1, c2)
    if err:
        return err
    if op in ("=", "!="):
        if c1.body != c2.body:
            return INCOMPARABLE
        same = c1 == c2
        return boo(same if op == "=" else not same)
    if c1.body != NUMBER or c2.body != NUMBER:
        return NUMBER_EXPECTED
    a, b = c1.data, c2.data
    if op == "<":
        return boo(a < b)
    if op == "<=":
        return boo(a <= b)
    if op == ">":
        return boo(a > b)
    if op == ">=":
        return boo(a >= b)
    raise ValueError(f"unknown comparison operator {op!r}")


def comp_glue(c1: CompositeE, c2: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    err = first_error(c1, c2)
    if err:
        return err
    if c1.body != WORD or c2.body != WORD:
        return WORD_EXPECTED
    return _checked(c1.data + c2.data, WORD, limits)


def list_make(c: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    if isinstance(c, AbstractError):
        return c
    return _checked(ListData((c.data,)), ListBody(c.body), limits)


def list_push(elem: CompositeE, lst: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    err = first_error(elem, lst)
    if err:
        return err
    if not isinstance(lst.body, ListBody):
        return LIST_EXPECTED
    if elem.body != lst.body.elem:
        return BODY_MISMATCH
    return _checked(ListData((elem.data,) + lst.data.items), lst.body, limits)


def list_top(lst: CompositeE) -> CompositeE:
    if isinstance(lst, AbstractError):
        return lst
    if not isinstance(lst.body, ListBody):
        return LIST_EXPECTED
    if not lst.data.items:
        return EMPTY_LIST
    return Composite(lst.data.items[0], lst.body.elem)


def array_make(c: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    if isinstance(c, AbstractError):
        return c
    return _checked(ArrayData((c.data,)), ArrayBody(c.body), limits)


def array_append(arr: CompositeE, c: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    err = first_error(arr, c)
    if err:
        return err
    if not isinstance(arr.body, ArrayBody):
        return ARRAY_EXPECTED
    if c.body != arr.body.elem:
        return BODY_MISMATCH
    return _checked(ArrayData(arr.data.items + (c.data,)), arr.body, limits)


def array_index(arr: CompositeE, idx: CompositeE) -> CompositeE:
    err = first_error(arr, idx)
    if err:
        return err
    if not isinstance(arr.body, ArrayBody):
        return ARRAY_EXPECTED
    if idx.body != NUMBER:
        return NUMBER_EXPECTED
    k = idx.data
    if k != k.to_integral_value() or not 1 <= k <= len(arr.data.items):
        return INDEX_OUT_OF_RANGE
    return Composite(arr.data.items[int(k) - 1], arr.body.elem)


def record_make(ide: str, c: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    if isinstance(c, AbstractError):
        return c
    return _checked(RecordData({ide: c.data}), RecordBody({ide: c.body}), limits)


def record_expand(rec: CompositeE, ide: str, c: CompositeE, limits: Limits = DEFAULT_LIMITS) -> CompositeE:
    err = first_error(rec, c)
    if err:
        return err
    if not isinstance(rec.body, RecordBody):
        return RECORD_EXPECTED
    if ide in rec.body.attrs:
        return ATTRIBUTE_EXISTS
    return _checked(
        rec.data.set(ide, c.data), RecordBody(rec.body.attrs.set(ide, c.body)), limits
    )


def record_remove(rec: CompositeE, ide: str) -> CompositeE:
    if isinstance(rec, AbstractError):
        return rec
    if not isinstance(rec.body, RecordBody):
        return RECORD_EXPECTED
    if ide not in rec.body.attrs:
        return ATTRIBUTE_MISSING
    return Composite(rec.data.delete(ide), RecordBody(rec.body.attrs.delete(ide)))


def record_select(rec: CompositeE, ide: str) -> CompositeE:
    if isinstance(rec, AbstractError):
        return rec
    if not isinstance(rec.body, RecordBody):
        return RECORD_EXPECTED
    if ide not in rec.body.attrs:
        return ATTRIBUTE_MISSING
    return Composite(rec.data[ide], rec.body.attrs[ide])


# -- display ----------------------------------------------------------------


def format_data(data) -> str:
    if data is OMEGA:
        return "Ω"
    if isinstance(data, bool):
        return "tt" if data else "ff"
    if isinstance(data, Decimal):
        return ast.format_number(data)
    if isinstance(data, str):
        return ast.format_word(data)
    if isinstance(data, ListData):
        return "list[" + ", ".join(format_data(d) for d in data.items) + "]"
    if isinstance(data, ArrayData):
        return "array[" + ", ".join(format_data(d) for d in data.items) + "]"
    if isinstance(data, RecordData):
        return "record{" + ", ".join(f"{k}: {format_data(v)}" for k, v in data.items()) + "}"
    raise TypeError(f"not a data: {data!r}")


def format_body(body: Body) -> str:
    if isinstance(body, SimpleBody):
        return "boolean" if body.name == "Boolean" else body.name
    if isinstance(body, ListBody):
        return f"list-type {format_body(body.elem)} ee"
    if isinstance(body, ArrayBody):
        return f"array-type {format_body(body.elem)} ee"
    attrs = ", ".join(f"{k} as {format_body(v)}" for k, v in body.attrs.items())
    return f"record-type {attrs} ee" if attrs else "record-type ee"


def format_type(typ: Type) -> str:
    if typ.transfer == TT:
        return format_body(typ.body)
    return f"replace-transfer-in {format_body(typ.body)} by {ast.pretty(typ.transfer.term)} ee"


def format_composite(com: CompositeE) -> str:
    if isinstance(com, AbstractError):
        return f"error: {com.message}"
    return f"({format_data(com.data)}, {format_body(com.body)})"
