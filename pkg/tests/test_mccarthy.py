import itertools

import pytest

from lingua.mccarthy import EE, FF, TT, TriBool, and_m, and_then, implies_m, not_m, or_else, or_m

ALL = (TT, FF, EE)

# rows are the left argument, columns the right, both in the order tt ff ee
OR_TABLE = {TT: (TT, TT, TT), FF: (TT, FF, EE), EE: (EE, EE, EE)}
AND_TABLE = {TT: (TT, FF, EE), FF: (FF, FF, FF), EE: (EE, EE, EE)}


@pytest.mark.parametrize("p", ALL)
@pytest.mark.parametrize("j,q", list(enumerate(ALL)))
def test_tables(p, j, q):
    assert or_m(p, q) is OR_TABLE[p][j]
    assert and_m(p, q) is AND_TABLE[p][j]


def test_not():
    assert [not_m(p) for p in ALL] == [FF, TT, EE]


def test_named_examples():
    assert and_m(FF, EE) is FF
    assert and_m(EE, FF) is EE
    assert or_m(TT, EE) is TT
    assert or_m(EE, TT) is EE
    assert implies_m(FF, EE) is TT
    assert implies_m(TT, FF) is FF
    assert implies_m(EE, TT) is EE


def test_exactly_three_values():
    assert len(TriBool) == 3


def test_lazy_forms_skip_the_right_argument():
    def boom():
        raise AssertionError("right argument evaluated")

    assert and_then(FF, boom) is FF
    assert and_then(EE, boom) is EE
    assert or_else(TT, boom) is TT
    assert or_else(EE, boom) is EE


def test_classical_restriction():
    for p, q in itertools.product((True, False), repeat=2):
        tp, tq = (TT if p else FF), (TT if q else FF)
        assert and_m(tp, tq) is (TT if p and q else FF)
        assert or_m(tp, tq) is (TT if p or q else FF)


def test_excluded_middle_is_never_false():
    for p in ALL:
        assert or_m(p, not_m(p)) is not FF
        assert and_m(p, not_m(p)) is not TT
