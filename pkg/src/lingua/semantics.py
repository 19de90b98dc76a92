"""Denotational semantics of Lingua, run as an evaluator.

Data expressions map a state to a composite or an abstract error; transfer
expressions denote transfers; type expressions map a state to a type or an
error; instructions, declarations and programs map states to states.  Errors
of the imperative layer live in the state's error register and are never
raised as Python exceptions.

Divergence is made observable with a step budget (``Fuel``): every syntax
node visited costs one step and exhausting the budget yields ``OUT_OF_FUEL``
instead of a state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import ast
from .ast import (
    AddToArr, AllList, And, Arith, ArrayMake, ArrayType, Assign, AttrSelect,
    BodyTest, BoolLit, Call, Compare, Current, ErrorHandler, ExpandRecord,
    ExpandRecordType, FunCall, FunProcDecl, Glue, Ide, If, IfExp, ImpProcDecl,
    Index, ListMake, ListType, MultiProcDecl, Not, NumLit, Or, PreSeq, Program,
    Push, RecordMake, RecordType, RemoveAttr, ReplaceTransfer, Select, Seq,
    SimpleType, Skip, TAnd, TArith, TCompare, TConst, TNot, TOr, TTTransfer, Top,
    TypeConst, TypeDef, VarDecl, While, WordLit, YokeReplace,
)
from .domains import (
    BOOLEAN_EXPECTED, DEFAULT_LIMITS, OMEGA, OVERFLOW, SIMPLE_BODY_OF_TYPE_NAME,
    TT, AbstractError, ArrayBody, Composite, CompositeE, FALSE, Limits,
    ListBody, NUMBER, RecordBody, TRUE, Transfer, Type, Value, WORD, ATTRIBUTE_EXISTS,
    LIST_EXPECTED, apply_transfer, array_append, array_index, array_make, boo,
    clan_contains_type, coherent, comp_arith, comp_compare, comp_glue,
    is_boo_composite, list_make, list_push, list_top, oversized, record_expand,
    record_make, record_remove, record_select,
)
from .mccarthy import EE, FF, TT as M_TT, TriBool, and_then, not_m, or_else
from .state import (
    Env, State, Store, bind_proc, bind_type, declare_var, insert_error, is_error,
    lookup_proc, lookup_type, lookup_var,
)

IDENTIFIER_NOT_DECLARED = AbstractError("identifier-not-declared")
VARIABLE_NOT_INITIALIZED = AbstractError("variable-not-initialized")
NO_COHERENCE = AbstractError("no-coherence")
A_YOKE_EXPECTED = AbstractError("a-yoke-expected")
YOKE_NOT_SATISFIED = AbstractError("yoke-not-satisfied")
TYPE_NOT_DEFINED = AbstractError("type-not-defined")
RECORD_TYPE_EXPECTED = AbstractError("record-type-expected")
PROCEDURE_NOT_DECLARED = AbstractError("procedure-not-declared")
PARAMETER_LIST_MISMATCH = AbstractError("parameter-list-mismatch")
PARAMETER_TYPE_MISMATCH = AbstractError("parameter-type-mismatch")
RESULT_TYPE_MISMATCH = AbstractError("result-type-mismatch")

DEFAULT_MAX_STEPS = 1_000_000


# -- outcomes and fuel --------------------------------------------------------


class OutOfFuel:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OUT_OF_FUEL"


OUT_OF_FUEL = OutOfFuel()


@dataclass(frozen=True)
class Done:
    state: State


Outcome = Union[Done, OutOfFuel]


class FuelExhausted(Exception):
    pass


class Fuel:
    def __init__(self, steps: int = DEFAULT_MAX_STEPS):
        if steps < 0:
            raise ValueError("fuel must be nonnegative")
        self.initial = steps
        self.remaining = steps

    def tick(self) -> None:
        if self.remaining <= 0:
            raise FuelExhausted()
        self.remaining -= 1

    @property
    def used(self) -> int:
        return self.initial - self.remaining


def _fuel(fuel) -> Fuel:
    return fuel if isinstance(fuel, Fuel) else Fuel(fuel)


# -- procedures ---------------------------------------------------------------


@dataclass(frozen=True)
class ImperativeProcedure:
    decl: ImpProcDecl
    declaration_env: Env
    # all members of the declaring multiprocedure, the procedure itself included
    group: tuple[ImpProcDecl, ...]

    @property
    def name(self) -> str:
        return self.decl.name

    def local_env(self) -> Env:
        procs = dict(self.declaration_env.procs)
        for d in self.group:
            procs[d.name] = ImperativeProcedure(d, self.declaration_env, self.group)
        return Env(self.declaration_env.types, procs)


@dataclass(frozen=True)
class FunctionalProcedure:
    decl: FunProcDecl
    declaration_env: Env

    @property
    def name(self) -> str:
        return self.decl.name

    def local_env(self) -> Env:
        procs = dict(self.declaration_env.procs)
        procs[self.decl.name] = self
        return Env(self.declaration_env.types, procs)


# -- transfer expressions -----------------------------------------------------


def _tri(x: CompositeE) -> tuple[TriBool, Optional[AbstractError]]:
    if isinstance(x, AbstractError):
        return EE, x
    if not is_boo_composite(x):
        return EE, BOOLEAN_EXPECTED
    return (M_TT if x.data else FF), None


def _mccarthy(kernel, left: CompositeE, right: Callable[[], CompositeE]) -> CompositeE:
    """Combine boolean composites lazily with ``kernel`` (and_then or or_else)."""
    p, p_err = _tri(left)
    q_err: list = []

    def q() -> TriBool:
        tri, err = _tri(right())
        q_err.append(err)
        return tri

    result = kernel(p, q)
    if result is EE:
        return p_err if p_err is not None else q_err[0]
    return boo(result is M_TT)


def _negate(x: CompositeE) -> CompositeE:
    p, err = _tri(x)
    result = not_m(p)
    return err if result is EE else boo(result is M_TT)


def _literal(value, limits: Limits) -> CompositeE:
    if isinstance(value, bool):
        return boo(value)
    if oversized(value, limits):
        return OVERFLOW
    return Composite(value, WORD if isinstance(value, str) else NUMBER)


def _transfer_fn(tre: ast.Node, limits: Limits) -> Callable[[Composite], CompositeE]:
    t = type(tre)
    if t is TTTransfer:
        return TT.fn
    if t is TConst:
        com = _literal(tre.value, limits)
        return lambda c: com
    if t is Current:
        return lambda c: c
    if t is AttrSelect:
        attr = tre.attr
        return lambda c: record_select(c, attr)
    if t is BodyTest:
        body = SIMPLE_BODY_OF_TYPE_NAME[tre.name]
        return lambda c: boo(c.body == body)
    if t is TArith:
        f, g, op = _transfer_fn(tre.left, limits), _transfer_fn(tre.right, limits), tre.op
        return lambda c: comp_arith(op, f(c), g(c), limits)
    if t is TCompare:
        f, g, op = _transfer_fn(tre.left, limits), _transfer_fn(tre.right, limits), tre.op
        return lambda c: comp_compare(op, f(c), g(c))
    if t is TAnd:
        f, g = _transfer_fn(tre.left, limits), _transfer_fn(tre.right, limits)
        return lambda c: _mccarthy(and_then, f(c), lambda: g(c))
    if t is TOr:
        f, g = _transfer_fn(tre.left, limits), _transfer_fn(tre.right, limits)
        return lambda c: _mccarthy(or_else, f(c), lambda: g(c))
    if t is TNot:
        f = _transfer_fn(tre.arg, limits)
        return lambda c: _negate(f(c))
    if t is AllList:
        return _all_list(_transfer_fn(tre.inner, limits))
    raise TypeError(f"not a transfer expression: {tre!r}")


def _all_list(inner: Callable[[Composite], CompositeE]) -> Callable[[Composite], CompositeE]:
    def fn(com: Composite) -> CompositeE:
        if not isinstance(com.body, ListBody):
            return LIST_EXPECTED
        results = [inner(Composite(d, com.body.elem)) for d in com.data.items]
        for r in results:
            if isinstance(r, AbstractError):
                return r
        if not all(is_boo_composite(r) for r in results):
            return A_YOKE_EXPECTED
        return boo(all(r == TRUE for r in results))

    return fn


def eval_transfer_exp(tre: ast.Node, limits: Limits = DEFAULT_LIMITS) -> Transfer:
    if isinstance(tre, TTTransfer):
        return TT
    return Transfer(tre, _transfer_fn(tre, limits))


# -- type expressions ---------------------------------------------------------


def _type(tex: ast.Node, sta: State) -> Union[Type, AbstractError]:
    t = type(tex)
    if t is SimpleType:
        return Type(SIMPLE_BODY_OF_TYPE_NAME[tex.name])
    if t is TypeConst:
        typ = lookup_type(sta, tex.name)
        return TYPE_NOT_DEFINED if typ is None else typ
    if t in (ListType, ArrayType, RecordType):
        elem = _type(tex.elem, sta)
        if isinstance(elem, AbstractError):
            return elem
        if t is ListType:
            return Type(ListBody(elem.body))
        if t is ArrayType:
            return Type(ArrayBody(elem.body))
        return Type(RecordBody({tex.attr: elem.body}))
    if t is ExpandRecordType:
        base = _type(tex.base, sta)
        if isinstance(base, AbstractError):
            return base
        elem = _type(tex.elem, sta)
        if isinstance(elem, AbstractError):
            return elem
        if not isinstance(base.body, RecordBody):
            return RECORD_TYPE_EXPECTED
        if tex.attr in base.body.attrs:
            return ATTRIBUTE_EXISTS
        return Type(RecordBody(base.body.attrs.set(tex.attr, elem.body)), base.transfer)
    if t is ReplaceTransfer:
        base = _type(tex.base, sta)
        if isinstance(base, AbstractError):
            return base
        return Type(base.body, eval_transfer_exp(tex.transfer, sta.limits))
    raise TypeError(f"not a type expression: {tex!r}")


def eval_type_exp(tex: ast.Node, sta: State) -> Union[Type, AbstractError]:
    if is_error(sta):
        return sta.register
    return _type(tex, sta)


# -- the evaluator ------------------------------------------------------------


def check_assignment(former: Value, new: Composite) -> Union[Value, AbstractError]:
    """Steps five to nine of assignment: the value ``new`` may replace ``former``."""
    tra = former.type.transfer
    com = apply_transfer(tra, new)
    if isinstance(com, AbstractError):
        return com
    if not coherent(new.body, former.type.body):
        return NO_COHERENCE
    if not is_boo_composite(com):
        return A_YOKE_EXPECTED
    if com == FALSE:
        return YOKE_NOT_SATISFIED
    return Value(new.data, Type(new.body, tra))


StepHook = Callable[[ast.Node, State], None]


class Interpreter:
    """One evaluation run: a fuel budget plus an optional per-step hook."""

    def __init__(self, fuel: Fuel, on_step: Optional[StepHook] = None):
        self.fuel = fuel
        self.on_step = on_step

    def _stepped(self, node: ast.Node, sta: State) -> State:
        if self.on_step is not None:
            self.on_step(node, sta)
        return sta

    # data expressions

    def data(self, dae: ast.Node, sta: State) -> CompositeE:
        if is_error(sta):
            return sta.register
        self.fuel.tick()
        t = type(dae)
        limits = sta.limits
        if t is BoolLit:
            return boo(dae.value)
        if t is NumLit or t is WordLit:
            return _literal(dae.value, limits)
        if t is Ide:
            v = lookup_var(sta, dae.name)
            if v is None:
                return IDENTIFIER_NOT_DECLARED
            if v.is_pseudo:
                return VARIABLE_NOT_INITIALIZED
            return v.composite
        if t is And:
            return _mccarthy(and_then, self.data(dae.left, sta), lambda: self.data(dae.right, sta))
        if t is Or:
            return _mccarthy(or_else, self.data(dae.left, sta), lambda: self.data(dae.right, sta))
        if t is Not:
            return _negate(self.data(dae.arg, sta))
        if t is IfExp:
            cond = self.data(dae.cond, sta)
            if isinstance(cond, AbstractError):
                return cond
            if not is_boo_composite(cond):
                return BOOLEAN_EXPECTED
            return self.data(dae.then if cond.data else dae.orelse, sta)
        if t is FunCall:
            return self.call_functional(dae.name, dae.args, sta)
        # the remaining forms are eager and transparent: evaluate, then delegate
        if t is Arith:
            return comp_arith(dae.op, self.data(dae.left, sta), self.data(dae.right, sta), limits)
        if t is Compare:
            return comp_compare(dae.op, self.data(dae.left, sta), self.data(dae.right, sta))
        if t is Glue:
            return comp_glue(self.data(dae.left, sta), self.data(dae.right, sta), limits)
        if t is ListMake:
            return list_make(self.data(dae.elem, sta), limits)
        if t is Push:
            return list_push(self.data(dae.elem, sta), self.data(dae.lst, sta), limits)
        if t is Top:
            return list_top(self.data(dae.lst, sta))
        if t is ArrayMake:
            return array_make(self.data(dae.elem, sta), limits)
        if t is AddToArr:
            return array_append(self.data(dae.arr, sta), self.data(dae.elem, sta), limits)
        if t is Index:
            return array_index(self.data(dae.arr, sta), self.data(dae.idx, sta))
        if t is RecordMake:
            return record_make(dae.attr, self.data(dae.value, sta), limits)
        if t is ExpandRecord:
            return record_expand(self.data(dae.rec, sta), dae.attr, self.data(dae.value, sta), limits)
        if t is RemoveAttr:
            return record_remove(self.data(dae.rec, sta), dae.attr)
        if t is Select:
            return record_select(self.data(dae.rec, sta), dae.attr)
        raise TypeError(f"not a data expression: {dae!r}")

    def _condition(self, dae: ast.Node, sta: State) -> Union[bool, AbstractError]:
        c = self.data(dae, sta)
        if isinstance(c, AbstractError):
            return c
        if not is_boo_composite(c):
            return BOOLEAN_EXPECTED
        return c.data

    # instructions

    def instruction(self, ins: ast.Node, sta: State) -> State:
        t = type(ins)
        if t is Seq:
            for item in ast.flatten_seq(ins):
                sta = self.instruction(item, sta)
            return sta
        self.fuel.tick()
        if t is ErrorHandler:
            return self._stepped(ins, self._error_handler(ins, sta))
        if is_error(sta):
            return sta
        if t is Skip:
            result = sta
        elif t is Assign:
            result = self.assign(ins.target, ins.value, sta)
        elif t is YokeReplace:
            result = self._yoke_replace(ins, sta)
        elif t is Call:
            result = self.call_imperative(ins.name, ins.ref_args, ins.val_args, sta)
        elif t is If:
            cond = self._condition(ins.cond, sta)
            if isinstance(cond, AbstractError):
                result = insert_error(sta, cond)
            else:
                result = self.instruction(ins.then if cond else ins.orelse, sta)
        elif t is While:
            result = self._while(ins, sta)
        else:
            raise TypeError(f"not an instruction: {ins!r}")
        return self._stepped(ins, result)

    def assign(self, ide: str, dae: ast.Node, sta: State) -> State:
        if is_error(sta):
            return sta
        former = lookup_var(sta, ide)
        if former is None:
            return insert_error(sta, IDENTIFIER_NOT_DECLARED)
        new = self.data(dae, sta)
        if isinstance(new, AbstractError):
            return insert_error(sta, new)
        value = check_assignment(former, new)
        if isinstance(value, AbstractError):
            return insert_error(sta, value)
        return sta.set_value(ide, value)

    def _yoke_replace(self, ins: YokeReplace, sta: State) -> State:
        former = lookup_var(sta, ins.target)
        if former is None:
            return insert_error(sta, IDENTIFIER_NOT_DECLARED)
        tra = eval_transfer_exp(ins.transfer, sta.limits)
        if not former.is_pseudo:
            com = apply_transfer(tra, former.composite)
            if isinstance(com, AbstractError):
                return insert_error(sta, com)
            if not is_boo_composite(com):
                return insert_error(sta, A_YOKE_EXPECTED)
            if com == FALSE:
                return insert_error(sta, YOKE_NOT_SATISFIED)
        return sta.set_value(ins.target, Value(former.content, Type(former.type.body, tra)))

    def _error_handler(self, ins: ErrorHandler, sta: State) -> State:
        if not is_error(sta):
            return sta
        cleared = sta.clear_error()
        c = self.data(ins.cond, cleared)
        if isinstance(c, Composite) and c.body == WORD and c.data == sta.register.message:
            return self.instruction(ins.body, cleared)
        return sta

    def _while(self, ins: While, sta: State) -> State:
        while True:
            cond = self._condition(ins.cond, sta)
            if isinstance(cond, AbstractError):
                return insert_error(sta, cond)
            if not cond:
                return sta
            sta = self.instruction(ins.body, sta)
            if is_error(sta):
                return sta
            self.fuel.tick()

    # procedures

    def _local_state(
        self, env: Env, formals, actuals, sta: State, refs: int
    ) -> Union[State, AbstractError]:
        """Initial local state: exactly the formals, bound to the actuals' values.

        The first ``refs`` formals are reference parameters; those may receive
        an uninitialized actual.
        """
        local = State(env, Store(), sta.limits)
        bindings = {}
        for i, (formal, actual) in enumerate(zip(formals, actuals)):
            typ = eval_type_exp(formal.type, local)
            if isinstance(typ, AbstractError):
                return typ
            v = lookup_var(sta, actual)
            if v is None:
                return IDENTIFIER_NOT_DECLARED
            if v.is_pseudo:
                if i >= refs:
                    return VARIABLE_NOT_INITIALIZED
                bindings[formal.name] = Value(OMEGA, typ)
                continue
            com = v.composite
            if not clan_contains_type(typ, com):
                return PARAMETER_TYPE_MISMATCH
            bindings[formal.name] = Value(com.data, Type(com.body, typ.transfer))
        return local.with_valuation(bindings)

    def call_imperative(self, ide: str, ref_args, val_args, sta: State) -> State:
        if is_error(sta):
            return sta
        proc = lookup_proc(sta, ide)
        if not isinstance(proc, ImperativeProcedure):
            return insert_error(sta, PROCEDURE_NOT_DECLARED)
        d = proc.decl
        if (
            len(ref_args) != len(d.ref_params)
            or len(val_args) != len(d.val_params)
            or len(set(ref_args)) != len(ref_args)
        ):
            return insert_error(sta, PARAMETER_LIST_MISMATCH)
        local = self._local_state(
            proc.local_env(),
            d.ref_params + d.val_params,
            tuple(ref_args) + tuple(val_args),
            sta,
            refs=len(ref_args),
        )
        if isinstance(local, AbstractError):
            return insert_error(sta, local)
        terminal = self.program(d.body, local)
        if is_error(terminal):
            return insert_error(sta, terminal.register)
        out = sta
        for formal, actual in zip(d.ref_params, ref_args):
            returned = terminal.valuation[formal.name]
            if returned.is_pseudo:
                continue
            value = check_assignment(out.valuation[actual], returned.composite)
            if isinstance(value, AbstractError):
                return insert_error(sta, value)
            out = out.set_value(actual, value)
        return out

    def call_functional(self, ide: str, val_args, sta: State) -> CompositeE:
        if is_error(sta):
            return sta.register
        proc = lookup_proc(sta, ide)
        if not isinstance(proc, FunctionalProcedure):
            return PROCEDURE_NOT_DECLARED
        d = proc.decl
        if len(val_args) != len(d.params):
            return PARAMETER_LIST_MISMATCH
        local = self._local_state(proc.local_env(), d.params, val_args, sta, refs=0)
        if isinstance(local, AbstractError):
            return local
        terminal = self.program(d.body, local)
        if is_error(terminal):
            return terminal.register
        result = self.data(d.result, terminal)
        if isinstance(result, AbstractError):
            return result
        typ = eval_type_exp(d.result_type, terminal)
        if isinstance(typ, AbstractError):
            return typ
        if not clan_contains_type(typ, result):
            return RESULT_TYPE_MISMATCH
        return result

    # declarations and programs

    def preamble(self, pam: ast.Node, sta: State) -> State:
        t = type(pam)
        if t is PreSeq:
            for item in ast.flatten_seq(pam):
                sta = self.preamble(item, sta)
            return sta
        self.fuel.tick()
        if t is Skip:
            return self._stepped(pam, sta)
        return self._stepped(pam, declare(pam, sta))

    def program(self, prog: Program, sta: State) -> State:
        return self.instruction(prog.instruction, self.preamble(prog.preamble, sta))


def declare(decl: ast.Node, sta: State) -> State:
    """The (total) denotation of a single declaration or type definition."""
    if is_error(sta):
        return sta
    t = type(decl)
    if t is VarDecl or t is TypeDef:
        bind = declare_var if t is VarDecl else bind_type
        typ = eval_type_exp(decl.type, sta)
        if isinstance(typ, AbstractError):
            return insert_error(sta, typ)
        return bind(sta, decl.name, typ)
    if t is ImpProcDecl:
        return bind_proc(sta, decl.name, ImperativeProcedure(decl, sta.env, (decl,)))
    if t is MultiProcDecl:
        env = sta.env
        for member in decl.procs:
            sta = bind_proc(sta, member.name, ImperativeProcedure(member, env, decl.procs))
            if is_error(sta):
                return sta
        return sta
    if t is FunProcDecl:
        return bind_proc(sta, decl.name, FunctionalProcedure(decl, sta.env))
    raise TypeError(f"not a declaration: {decl!r}")


# -- public entry points --------------------------------------------------------


def _outcome(run: Callable[[], State]) -> Outcome:
    try:
        return Done(run())
    except FuelExhausted:
        return OUT_OF_FUEL


def eval_data_exp(dae: ast.Node, sta: State, fuel=DEFAULT_MAX_STEPS) -> Union[CompositeE, OutOfFuel]:
    try:
        return Interpreter(_fuel(fuel)).data(dae, sta)
    except FuelExhausted:
        return OUT_OF_FUEL


def exec_assign(ide: str, dae: ast.Node, sta: State, fuel=DEFAULT_MAX_STEPS) -> Outcome:
    return _outcome(lambda: Interpreter(_fuel(fuel)).assign(ide, dae, sta))


def exec_instruction(ins: ast.Node, sta: State, fuel=DEFAULT_MAX_STEPS, on_step: Optional[StepHook] = None) -> Outcome:
    return _outcome(lambda: Interpreter(_fuel(fuel), on_step).instruction(ins, sta))


def exec_var_decl(decl: VarDecl, sta: State) -> State:
    return declare(decl, sta)


def exec_type_def(decl: TypeDef, sta: State) -> State:
    return declare(decl, sta)


def exec_proc_decl(decl: Union[ImpProcDecl, MultiProcDecl, FunProcDecl], sta: State) -> State:
    return declare(decl, sta)


def call_imperative(ide: str, actual_ref, actual_val, sta: State, fuel=DEFAULT_MAX_STEPS) -> Outcome:
    return _outcome(lambda: Interpreter(_fuel(fuel)).call_imperative(ide, tuple(actual_ref), tuple(actual_val), sta))


def call_functional(ide: str, actual_val, sta: State, fuel=DEFAULT_MAX_STEPS) -> Union[CompositeE, OutOfFuel]:
    try:
        return Interpreter(_fuel(fuel)).call_functional(ide, tuple(actual_val), sta)
    except FuelExhausted:
        return OUT_OF_FUEL


def exec_program(prog: Program, sta: State, fuel=DEFAULT_MAX_STEPS, on_step: Optional[StepHook] = None) -> Outcome:
    return _outcome(lambda: Interpreter(_fuel(fuel), on_step).program(prog, sta))
