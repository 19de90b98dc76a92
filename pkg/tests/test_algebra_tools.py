from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from lingua.algebra_tools import (
    NUMBOOL_EXP,
    AlgebraError,
    Concat,
    Constructor,
    Empty,
    EquationalGrammar,
    Lit,
    NT,
    Plus,
    Power,
    Signature,
    Star,
    Union_,
    alternatives,
    derive_abstract_syntax,
    eval_numbool,
    format_grammar,
    format_signature,
    grammar_enumerate,
    grammar_member,
    kleene_iterates,
    parse_grammar,
    parse_signature,
    reachable_sorts,
)
from lingua.mccarthy import FF, TT

from oracles import NUMBOOL, closure_terms

DATA = Path(__file__).parent / "data"
GRAMMAR = derive_abstract_syntax(NUMBOOL_EXP)


class TestSignatures:
    def test_file_round_trip(self):
        text = (DATA / "numbool.sig").read_text()
        sig = parse_signature(text)
        assert sig == NUMBOOL_EXP
        assert format_signature(sig) == text

    def test_undeclared_sort(self):
        with pytest.raises(AlgebraError):
            Signature(("A",), (Constructor("c", ("B",), "A"),))

    def test_malformed_line(self):
        with pytest.raises(AlgebraError):
            parse_signature("sort A\nconstructor c : -> A\n")


class TestDerive:
    def test_numbool_matches_golden_file(self):
        assert format_grammar(GRAMMAR) == (DATA / "numbool.grammar").read_text()

    def test_numbool_alternatives(self):
        golden = parse_grammar((DATA / "numbool.grammar").read_text())
        for nt in ("NumExp", "BoolExp"):
            assert alternatives(GRAMMAR.equations[nt]) == alternatives(golden.equations[nt])

    def test_single_constant(self):
        g = derive_abstract_syntax(Signature(("X",), (Constructor("k", (), "X"),)))
        assert g.equations == {"X": Lit("k")}

    def test_no_constructors(self):
        g = derive_abstract_syntax(Signature(("X", "Y")))
        assert g.equations == {"X": Empty(), "Y": Empty()}
        assert grammar_enumerate(g, "X", 5) == frozenset()


class TestEnumerate:
    def test_one_character_numbers(self):
        assert grammar_enumerate(GRAMMAR, "NumExp", 1) == {"0", "1"}

    def test_epsilon(self):
        g = EquationalGrammar({"X": Lit("")})
        assert grammar_enumerate(g, "X", 4) == {""}

    def test_sample_expression(self):
        assert "+(1,+(1,0))" in grammar_enumerate(GRAMMAR, "NumExp", 12)

    def test_membership(self):
        assert grammar_member(GRAMMAR, "BoolExp", "not(<(1,+(1,1)))")
        assert not grammar_member(GRAMMAR, "NumExp", "tt")
        assert not grammar_member(GRAMMAR, "NumExp", "")

    def test_star_plus_power(self):
        g = parse_grammar('A = "a"* \nB = "b"+ "c"\nC = ( "x" | "y" )^2\n')
        assert grammar_enumerate(g, "A", 3) == {"", "a", "aa", "aaa"}
        assert grammar_enumerate(g, "B", 3) == {"bc", "bbc"}
        assert grammar_enumerate(g, "C", 5) == {"xx", "xy", "yx", "yy"}

    def test_left_recursion_terminates(self):
        g = EquationalGrammar({"S": Union_((Lit("a"), Concat((NT("S"), Lit("a")))))})
        assert grammar_enumerate(g, "S", 4) == {"a", "aa", "aaa", "aaaa"}

    def test_unknown_nonterminal(self):
        with pytest.raises(AlgebraError):
            EquationalGrammar({"S": NT("T")})

    def test_iterates_are_monotone(self):
        slices = list(kleene_iterates(GRAMMAR, 10))
        for before, after in zip(slices, slices[1:]):
            for nt in before:
                assert before[nt] <= after[nt]

    @pytest.mark.parametrize("n", range(0, 13))
    def test_matches_closure_oracle(self, n):
        oracle = closure_terms(("NumExp", "BoolExp"), NUMBOOL, n)
        for nt in ("NumExp", "BoolExp"):
            assert grammar_enumerate(GRAMMAR, nt, n) == oracle[nt]


class TestGrammarFiles:
    def test_round_trip(self):
        text = 'S = ( "a" | "b" )* "c"^2 | {} | "" | T+\nT = "\\"q"\n'
        g = parse_grammar(text)
        assert parse_grammar(format_grammar(g)) == g
        assert g.equations["T"] == Lit('"q')
        assert isinstance(g.equations["S"].alts[0].parts[0], Star)
        assert isinstance(g.equations["S"].alts[0].parts[1], Power)
        assert isinstance(g.equations["S"].alts[3], Plus)

    def test_continuation_and_comments(self):
        g = parse_grammar('S = "a"  # first\n  | "b"\n')
        assert grammar_enumerate(g, "S", 1) == {"a", "b"}

    @pytest.mark.parametrize("text", ['S = "a" |\n', "S\n", 'S = "a"\nS = "b"\n', 'S = ( "a"\n', "= \"a\"\n"])
    def test_malformed(self, text):
        with pytest.raises(AlgebraError):
            parse_grammar(text)


class TestReachability:
    def test_numbool(self):
        assert reachable_sorts(NUMBOOL_EXP) == {"NumExp": True, "BoolExp": True}

    def test_without_both_number_constants(self):
        got = reachable_sorts(NUMBOOL_EXP.without("0", "1"))
        assert got == {"NumExp": False, "BoolExp": True}

    def test_without_one_only(self):
        # 0 alone still reaches numbers
        assert reachable_sorts(NUMBOOL_EXP.without("1"))["NumExp"]

    def test_no_base_case(self):
        assert reachable_sorts(Signature(("S",), (Constructor("c", ("S",), "S"),))) == {"S": False}

    def test_agrees_with_enumeration(self):
        sig = NUMBOOL_EXP.without("0", "1")
        g = derive_abstract_syntax(sig)
        assert grammar_enumerate(g, "NumExp", 12) == frozenset()


class TestNumBool:
    def test_worked_examples(self):
        assert eval_numbool("+(1,+(1,0))") == 2
        assert eval_numbool("<(+(1,+(1,0)),0)") is FF
        assert eval_numbool("0") == 0

    def test_gluing(self):
        assert eval_numbool("+(1,+(1,0))") == eval_numbool("+(1,1)")
        assert eval_numbool("<(+(1,+(1,0)),0)") is eval_numbool("<(0,0)")

    def test_booleans(self):
        assert eval_numbool("not(<(1,+(1,1)))") is FF
        assert eval_numbool("or(ff,=(1,1))") is TT

    @pytest.mark.parametrize("bad", ["", "+(1)", "+(1,tt)", "not(1)", "2", "+(1,1))"])
    def test_malformed(self, bad):
        with pytest.raises(AlgebraError):
            eval_numbool(bad)

    def test_every_enumerated_term_evaluates(self):
        for t in grammar_enumerate(GRAMMAR, "NumExp", 12):
            assert eval_numbool(t) == t.count("1")

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=200))
    def test_unbounded(self, n):
        term = "0"
        for _ in range(n):
            term = f"+(1,{term})"
        assert eval_numbool(term) == n
