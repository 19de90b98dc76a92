"""States: environments (types, procedures) plus stores (valuation, error register).

States are immutable.  Every update returns a new state that shares the
untouched parts with the old one, so procedure-call snapshots cost nothing and
never alias.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Optional, Union

from .ast import KEYWORDS
from .domains import (
    DEFAULT_LIMITS,
    OMEGA,
    AbstractError,
    Limits,
    Type,
    Value,
    clan_contains_body,
    clan_contains_type,
    format_data,
    format_type,
)


class _Ok:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OK"

    def __str__(self):
        return "OK"


OK = _Ok()

IDENTIFIER_NOT_FREE = AbstractError("identifier-not-free")

_EMPTY: Mapping = MappingProxyType({})


def _with(mapping: Mapping, key, value) -> Mapping:
    d = dict(mapping)
    d[key] = value
    return MappingProxyType(d)


@dataclass(frozen=True)
class Env:
    types: Mapping[str, Type] = _EMPTY
    procs: Mapping[str, object] = _EMPTY

    def __eq__(self, other):
        return (
            isinstance(other, Env)
            and dict(self.types) == dict(other.types)
            and dict(self.procs) == dict(other.procs)
        )

    __hash__ = None


@dataclass(frozen=True)
class Store:
    valuation: Mapping[str, Value] = _EMPTY
    register: Union[AbstractError, _Ok] = OK

    def __eq__(self, other):
        return (
            isinstance(other, Store)
            and dict(self.valuation) == dict(other.valuation)
            and self.register == other.register
        )

    __hash__ = None


@dataclass(frozen=True)
class State:
    env: Env = field(default_factory=Env)
    store: Store = field(default_factory=Store)
    limits: Limits = field(default=DEFAULT_LIMITS, compare=False)

    @property
    def register(self) -> Union[AbstractError, _Ok]:
        return self.store.register

    @property
    def valuation(self) -> Mapping[str, Value]:
        return self.store.valuation

    def with_valuation(self, valuation: Mapping[str, Value]) -> State:
        return replace(self, store=replace(self.store, valuation=MappingProxyType(dict(valuation))))

    def with_env(self, env: Env) -> State:
        return replace(self, env=env)

    def set_value(self, ide: str, value: Value) -> State:
        return replace(self, store=replace(self.store, valuation=_with(self.store.valuation, ide, value)))

    def clear_error(self) -> State:
        return replace(self, store=replace(self.store, register=OK))


def initial_state(limits: Limits = DEFAULT_LIMITS) -> State:
    return State(limits=limits)


def is_error(sta: State) -> bool:
    return sta.store.register is not OK


def insert_error(sta: State, err: AbstractError) -> State:
    return replace(sta, store=replace(sta.store, register=err))


def declare_var(sta: State, ide: str, typ: Type) -> State:
    if ide in KEYWORDS or ide in sta.store.valuation:
        return insert_error(sta, IDENTIFIER_NOT_FREE)
    return sta.set_value(ide, Value(OMEGA, typ))


def bind_type(sta: State, ide: str, typ: Type) -> State:
    if ide in KEYWORDS or ide in sta.env.types:
        return insert_error(sta, IDENTIFIER_NOT_FREE)
    return replace(sta, env=replace(sta.env, types=_with(sta.env.types, ide, typ)))


def bind_proc(sta: State, ide: str, proc) -> State:
    if ide in KEYWORDS or ide in sta.env.procs:
        return insert_error(sta, IDENTIFIER_NOT_FREE)
    return replace(sta, env=replace(sta.env, procs=_with(sta.env.procs, ide, proc)))


def lookup_var(sta: State, ide: str) -> Optional[Value]:
    return sta.store.valuation.get(ide)


def lookup_type(sta: State, ide: str) -> Optional[Type]:
    return sta.env.types.get(ide)


def lookup_proc(sta: State, ide: str):
    return sta.env.procs.get(ide)


def dump_state(sta: State) -> str:
    """Line-oriented dump: ``ide : type = data`` per variable, then the register."""
    lines = [
        f"{ide} : {format_type(v.type)} = {format_data(v.content)}"
        for ide, v in sta.store.valuation.items()
    ]
    lines.append(f"register: {sta.store.register}")
    return "\n".join(lines)


def audit_state(sta: State) -> list[str]:
    """Identifiers whose initialized value breaks its body's clan or its transfer."""
    bad = []
    for ide, v in sta.store.valuation.items():
        if v.is_pseudo:
            continue
        if not clan_contains_body(v.type.body, v.content) or not clan_contains_type(v.type, v.composite):
            bad.append(ide)
    return bad
