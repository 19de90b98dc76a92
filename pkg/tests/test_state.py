from lingua.domains import NUMBER, OMEGA, OVERFLOW, AbstractError, Type, Value
from lingua.semantics import Done, exec_program
from lingua.state import (
    OK,
    audit_state,
    bind_type,
    declare_var,
    dump_state,
    initial_state,
    insert_error,
    is_error,
    lookup_type,
    lookup_var,
)
from lingua.syntax import parse

NUM = Type(NUMBER)


def test_initial_state_is_clean():
    sta = initial_state()
    assert not is_error(sta)
    assert lookup_var(sta, "x") is None
    assert sta.register is OK


def test_insert_error_only_touches_register():
    sta = declare_var(initial_state(), "x", NUM)
    bad = insert_error(sta, OVERFLOW)
    assert is_error(bad)
    assert bad.valuation == sta.valuation
    assert bad.env == sta.env
    again = insert_error(bad, AbstractError("division-by-zero"))
    assert again.register.message == "division-by-zero"


def test_declare_twice():
    sta = declare_var(initial_state(), "x", NUM)
    assert lookup_var(sta, "x") == Value(OMEGA, NUM)
    assert declare_var(sta, "x", NUM).register.message == "identifier-not-free"


def test_keywords_cannot_be_bound():
    assert declare_var(initial_state(), "while", NUM).register.message == "identifier-not-free"
    assert bind_type(initial_state(), "number", NUM).register.message == "identifier-not-free"


def test_types_bind_once():
    sta = bind_type(initial_state(), "T", NUM)
    assert lookup_type(sta, "T") is NUM
    assert bind_type(sta, "T", NUM).register.message == "identifier-not-free"


def test_updates_do_not_alias():
    base = declare_var(initial_state(), "x", NUM)
    other = base.set_value("y", Value(OMEGA, NUM))
    assert "y" not in base.valuation
    assert "y" in other.valuation


def test_skip_program_is_identity():
    sta = initial_state()
    out = exec_program(parse("begin-program skip ; skip end-program"), sta)
    assert isinstance(out, Done) and out.state == sta


def test_dump_and_audit():
    from decimal import Decimal

    sta = declare_var(initial_state(), "x", NUM)
    assert dump_state(sta) == "x : number = Ω\nregister: OK"
    sta = sta.set_value("x", Value(Decimal(3), NUM))
    assert audit_state(sta) == []
    assert dump_state(insert_error(sta, OVERFLOW)).endswith("register: overflow")
