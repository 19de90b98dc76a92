"""McCarthy's three-valued propositional operators.

Arguments are read left to right and evaluation is lazy: the left argument
alone decides the result whenever it can, so ``ee`` on the right is ignored
in ``ff and-m ee`` and ``tt or-m ee``.  Neither operator is commutative.
"""

from __future__ import annotations

import enum
from typing import Callable


class TriBool(enum.Enum):
    TT = "tt"
    FF = "ff"
    EE = "ee"

    def __str__(self) -> str:
        return self.value


TT, FF, EE = TriBool.TT, TriBool.FF, TriBool.EE


def and_then(p: TriBool, q: Callable[[], TriBool]) -> TriBool:
    """``p and-m q`` with ``q`` evaluated only when ``p`` is ``tt``."""
    if p is TT:
        return q()
    return p


def or_else(p: TriBool, q: Callable[[], TriBool]) -> TriBool:
    """``p or-m q`` with ``q`` evaluated only when ``p`` is ``ff``."""
    if p is FF:
        return q()
    return p


def and_m(p: TriBool, q: TriBool) -> TriBool:
    return and_then(p, lambda: q)


def or_m(p: TriBool, q: TriBool) -> TriBool:
    return or_else(p, lambda: q)


def not_m(p: TriBool) -> TriBool:
    if p is TT:
        return FF
    if p is FF:
        return TT
    return EE


def implies_m(p: TriBool, q: TriBool) -> TriBool:
    return or_m(not_m(p), q)


def from_bool(b: bool) -> TriBool:
    return TT if b else FF
