import json
import random

import pytest

from dagproof import nd
from dagproof.formula import Imp, Var, parse_formula, to_text
from dagproof.nd import (Deduction, Node, LEAF, IMP_INTRO, IMP_ELIM, REP, SEP,
                         assumption_sets, check_local_correctness, from_document,
                         is_normal, measures, proves, proves_modified,
                         proves_threads, threads, to_document, to_dot, unfold,
                         tree_leaf, tree_imp_intro, tree_imp_elim, tree_rep,
                         tree_subst, tree_to_deduction, UnfoldBudgetExceeded)


def ded(entries, root=0):
    """entries: (id, formula text, rule, premises[, discharged text])"""
    nodes = {}
    for entry in entries:
        nid, ftext, rule, prems = entry[:4]
        discharged = parse_formula(entry[4]) if len(entry) > 4 else None
        nodes[nid] = Node(nid, parse_formula(ftext), rule, prems, discharged)
    return Deduction(nodes, root)


def id_proof():
    return ded([(0, "p->p", IMP_INTRO, (1,), "p"), (1, "p", LEAF, ())])


def test_axiom_shaped_proof_is_correct():
    assert check_local_correctness(id_proof()).ok


def test_merged_multipremise_is_violation():
    d = ded([
        (0, "a->b", IMP_ELIM, (1, 2, 3)),
        (1, "b", LEAF, ()),
        (2, "g", LEAF, ()),
        (3, "g->a->b", LEAF, ()),
    ])
    report = check_local_correctness(d)
    assert not report.ok
    assert any(v[0] == 0 for v in report.violations)


def test_separated_multipremise_is_correct():
    d = ded([
        (0, "a->b", SEP, (1, 2)),
        (1, "a->b", IMP_INTRO, (3,), "a"),
        (2, "a->b", IMP_ELIM, (4, 5)),
        (3, "b", LEAF, ()),
        (4, "g", LEAF, ()),
        (5, "g->a->b", LEAF, ()),
    ])
    assert check_local_correctness(d).ok


def test_level_inconsistency_reported():
    chain = ded([
        (0, "p", REP, (1,)),
        (1, "p", REP, (2,)),
        (2, "p", LEAF, ()),
    ])
    assert check_local_correctness(chain).ok
    # node 3 sits at distance 1 from the root and also at distance 3
    clashed = ded([
        (0, "q", IMP_ELIM, (3, 2)),
        (2, "p->q", IMP_INTRO, (4,), "p"),
        (4, "q", IMP_ELIM, (3, 5)),
        (5, "p->q", LEAF, ()),
        (3, "p", LEAF, ()),
    ])
    report = check_local_correctness(clashed)
    assert any(v[1] == "structure" for v in report.violations)


def test_cycle_reported():
    looped = ded([
        (0, "p", REP, (1,)),
        (1, "p", REP, (0,)),
    ])
    report = check_local_correctness(looped)
    assert any(v[1] == "cycle" for v in report.violations)


def test_assumption_sets_identity():
    sets = assumption_sets(id_proof())
    assert sets[1] == {parse_formula("p")}
    assert sets[0] == frozenset()


def test_assumption_sets_vacuous_discharge():
    d = ded([
        (0, "a->b->a", IMP_INTRO, (1,), "a"),
        (1, "b->a", IMP_INTRO, (2,), "b"),
        (2, "a", LEAF, ()),
    ])
    sets = assumption_sets(d)
    a = parse_formula("a")
    assert sets[2] == {a}
    assert sets[1] == {a}
    assert sets[0] == frozenset()


def test_assumption_sets_elimination_union():
    d = ded([
        (0, "q", IMP_ELIM, (1, 2)),
        (1, "p", LEAF, ()),
        (2, "p->q", LEAF, ()),
    ])
    sets = assumption_sets(d)
    assert sets[0] == {parse_formula("p"), parse_formula("p->q")}
    assert not proves(d)


def test_assumption_sets_reject_separation():
    d = ded([
        (0, "p", SEP, (1,)),
        (1, "p", LEAF, ()),
    ])
    with pytest.raises(nd.DeductionError):
        assumption_sets(d)


def test_proves_and_threads_agree_on_examples():
    assert proves(id_proof()) and proves_threads(id_proof())
    single = ded([(0, "p", LEAF, ())])
    assert not proves(single) and not proves_threads(single)


def test_proves_modified_degenerate_sep_free():
    assert proves_modified(id_proof()) == {}
    assert proves_modified(ded([(0, "p", LEAF, ())])) is None


def test_proves_modified_picks_closing_premise():
    d = ded([
        (0, "p->p", SEP, (1, 2)),
        (1, "p->p", REP, (3,)),
        (2, "p->p", IMP_INTRO, (4,), "p"),
        (3, "p->p", LEAF, ()),
        (4, "p", LEAF, ()),
    ])
    assert check_local_correctness(d).ok
    assert proves_modified(d) == {0: 2}


def test_proves_modified_none_when_all_leak():
    d = ded([
        (0, "q", IMP_ELIM, (1, 2)),
        (1, "p", LEAF, ()),
        (2, "p->q", SEP, (3, 4)),
        (3, "p->q", IMP_INTRO, (5,), "p"),
        (4, "p->q", REP, (6,)),
        (5, "q", LEAF, ()),
        (6, "p->q", LEAF, ()),
    ])
    assert check_local_correctness(d).ok
    assert proves_modified(d) is None


def test_unfold_identity_on_trees():
    d = id_proof()
    u = unfold(d)
    assert len(u) == len(d)
    assert proves(u) == proves(d)


def shared_leaf_dag():
    # leaf 3 is the premise of both introductions
    return ded([
        (0, "q", IMP_ELIM, (1, 2)),
        (1, "a->q", IMP_INTRO, (3,), "a"),
        (2, "(a->q)->q", IMP_INTRO, (3,), "a->q"),
        (3, "q", LEAF, ()),
    ])


def test_unfold_duplicates_shared_node():
    dag = shared_leaf_dag()
    assert check_local_correctness(dag).ok
    assert not dag.is_tree()
    u = unfold(dag)
    assert len(u) == 5
    assert u.is_tree()
    assert proves_threads(u) == proves(dag) == False


def test_unfold_budget():
    with pytest.raises(UnfoldBudgetExceeded):
        unfold(shared_leaf_dag(), budget=3)


def test_is_normal():
    assert is_normal(id_proof())
    redex = ded([
        (0, "p", IMP_ELIM, (1, 2)),
        (1, "p", LEAF, ()),
        (2, "p->p", IMP_INTRO, (3,), "p"),
        (3, "p", LEAF, ()),
    ])
    assert not is_normal(redex)


def test_measures_examples():
    m = measures(id_proof())
    assert (m.weight, m.height, m.phi) == (4, 1, 4)
    m2 = measures(ded([(0, "p", LEAF, ())]))
    assert (m2.weight, m2.height, m2.phi) == (1, 0, 1)


def test_measures_phi_at_most_weight():
    rng = random.Random(5)
    from dagproof.generators import random_implicational
    from dagproof.hsc import prove_lm, sc_to_nd
    done = 0
    while done < 25:
        f = random_implicational(rng, 11)
        pr = prove_lm(f)
        if pr is None:
            continue
        d = sc_to_nd(pr)
        m = measures(d)
        assert m.phi <= m.weight
        assert m.weight <= len(d) * max(
            nd.weight(n.formula) for n in d.nodes.values())
        done += 1


def test_threads_enumeration():
    d = ded([
        (0, "q", IMP_ELIM, (1, 2)),
        (1, "p", LEAF, ()),
        (2, "p->q", LEAF, ()),
    ])
    assert threads(d) == [(0, 1), (0, 2)]
    with pytest.raises(nd.ThreadCapExceeded):
        threads(d, cap=1)


def test_document_roundtrip():
    d = ded([
        (0, "a->b", SEP, (1, 2)),
        (1, "a->b", IMP_INTRO, (3,), "a"),
        (2, "a->b", IMP_ELIM, (4, 5)),
        (3, "b", LEAF, ()),
        (4, "g", LEAF, ()),
        (5, "g->a->b", LEAF, ()),
    ])
    doc = to_document(d)
    text = json.dumps(doc)
    d2 = from_document(json.loads(text))
    assert to_document(d2) == doc


def test_document_errors():
    with pytest.raises(nd.DocumentError):
        from_document({"root": 0, "nodes": [
            {"id": 0, "level": 0, "formula": "p->p", "rule": "impI",
             "premises": []}]})  # missing discharged
    with pytest.raises(nd.DocumentError):
        from_document({"nodes": []})


def test_dot_export():
    dot = to_dot(id_proof())
    assert "digraph" in dot and "rank=same" in dot
    assert "p->p\\nimpI" in dot


def test_tree_builders_and_subst():
    leaf_q = tree_leaf(parse_formula("q"))
    t = tree_imp_intro(parse_formula("p"), leaf_q)
    assert to_text(t.formula) == "p->q"
    # capture avoidance: a discharged assumption is not substituted
    inner = tree_imp_intro(parse_formula("q"), tree_leaf(parse_formula("q")))
    replaced = tree_subst(inner, parse_formula("q"), tree_rep(leaf_q))
    assert replaced is inner
    # open occurrences are substituted
    open_tree = tree_rep(tree_leaf(parse_formula("q")))
    swapped = tree_subst(open_tree, parse_formula("q"),
                         tree_imp_elim(tree_leaf(parse_formula("p")),
                                       tree_leaf(parse_formula("p->q"))))
    d = tree_to_deduction(swapped)
    assert check_local_correctness(d).ok
    assert len(d) == 4
