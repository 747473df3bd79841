import random

import pytest

from dagproof.formula import (And, DiGraph, Falsum, GraphFormatError, Imp, Or,
                              ParseError, Var, parse_formula, parse_graph,
                              purely_implicational, subformulas, to_text,
                              variables_of, weight, Sequent)
from dagproof.generators import random_full, random_implicational


p, q = Var("p"), Var("q")


def test_parse_right_associative():
    assert parse_formula("p->q->p") == Imp(p, Imp(q, p))


def test_parse_explicit_parens():
    assert parse_formula("(p->q)->p") == Imp(Imp(p, q), p)


def test_parse_error_position():
    with pytest.raises(ParseError) as e:
        parse_formula("->p")
    assert e.value.position == 0


def test_parse_trailing_garbage():
    with pytest.raises(ParseError):
        parse_formula("p q")


def test_precedence():
    f = parse_formula("p & q | r -> false")
    assert f == Imp(Or(And(p, q), Var("r")), Falsum)


def test_false_keyword_and_identifiers():
    assert parse_formula("false") is Falsum
    assert parse_formula("falsehood") == Var("falsehood")
    assert parse_formula("X_1_0") == Var("X_1_0")


def test_weight_examples():
    assert weight(p) == 1
    assert weight(parse_formula("p->(q->p)")) == 5
    assert weight(parse_formula("(p->q)->false")) == 5


def test_weight_recurrence():
    f, g = parse_formula("p->q"), parse_formula("q&p")
    for ctor in (Imp, And, Or):
        assert weight(ctor(f, g)) == weight(f) + weight(g) + 1


def test_subformulas_examples():
    assert subformulas(p) == {p}
    assert subformulas(Imp(p, q)) == {p, q, Imp(p, q)}
    f = parse_formula("(p->q)->(p->q)")
    assert len(subformulas(f)) == 4


def test_subformulas_bounded_by_weight():
    rng = random.Random(3)
    for _ in range(100):
        f = random_full(rng, 15)
        assert len(subformulas(f)) <= weight(f)


def test_purely_implicational():
    assert purely_implicational(parse_formula("p->q->p"))
    assert not purely_implicational(parse_formula("p&q"))
    assert not purely_implicational(Falsum)


def test_roundtrip_random():
    rng = random.Random(11)
    for _ in range(300):
        f = random_implicational(rng, 17)
        assert parse_formula(to_text(f)) == f
    for _ in range(300):
        f = random_full(rng, 17)
        assert parse_formula(to_text(f)) == f


def test_variables_of():
    assert variables_of(parse_formula("p->q&p")) == {"p", "q"}


def test_sequent_multiset_semantics():
    a = Sequent([p, q, p], q)
    b = Sequent([q, p, p], q)
    c = Sequent([p, q], q)
    assert a == b and hash(a) == hash(b)
    assert a != c


def test_graph_parsing():
    g = parse_graph("2\n0 1")
    assert g == DiGraph(2, [(0, 1)])
    assert parse_graph("1") == DiGraph(1, [])
    assert parse_graph('{"n": 2, "edges": [[0, 1]]}') == DiGraph(2, [(0, 1)])


def test_graph_rejects_self_loop():
    with pytest.raises(GraphFormatError):
        parse_graph("2\n0 0")


def test_graph_rejects_duplicates_and_range():
    with pytest.raises(GraphFormatError):
        parse_graph("2\n0 1\n0 1")
    with pytest.raises(GraphFormatError):
        parse_graph("2\n0 5")
