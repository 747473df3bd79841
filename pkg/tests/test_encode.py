import random

import pytest

from dagproof.encode import (DeskBoundError, classical_sat, conjuncts,
                             encode_hamiltonian, hamiltonian_families,
                             hamiltonian_oracle, kripke_valid,
                             statman_translate, step_variable,
                             _rooted_frames, _upsets)
from dagproof.formula import (And, DiGraph, Falsum, Imp, Or, parse_formula,
                              purely_implicational, to_text, weight,
                              variables_of)
from dagproof.generators import all_digraphs, random_full
from dagproof.hsc import prove_lm


def test_single_vertex_encoding():
    f = encode_hamiltonian(DiGraph(1, []))
    assert to_text(f) == "X_1_0 & X_1_0"
    assert classical_sat(f)
    assert hamiltonian_oracle(DiGraph(1, []))


def test_two_vertex_edge_family_counts():
    fam = hamiltonian_families(DiGraph(2, [(0, 1)]))
    # E covers the three non-edges (1,0), (0,0), (1,1) at the single step
    assert {k: len(v) for k, v in fam.items()} == {
        "A": 2, "B": 4, "C": 2, "D": 4, "E": 3}


def test_three_vertex_complete_counts():
    edges = [(u, v) for u in range(3) for v in range(3) if u != v]
    fam = hamiltonian_families(DiGraph(3, edges))
    # non-edges of the complete digraph are exactly the three self-pairs
    assert {k: len(v) for k, v in fam.items()} == {
        "A": 3, "B": 18, "C": 3, "D": 18, "E": 6}


def test_degenerate_families_omitted():
    fam = hamiltonian_families(DiGraph(1, []))
    assert set(fam) == {"A", "C"}
    # the top-level conjunction flattens to the two singleton families
    assert len(conjuncts(encode_hamiltonian(DiGraph(1, [])))) == 2


def test_encoding_matches_oracle_small():
    for n in (1, 2, 3):
        for g in all_digraphs(n):
            assert hamiltonian_oracle(g) == classical_sat(encode_hamiltonian(g))


def test_oracle_examples():
    assert hamiltonian_oracle(DiGraph(2, [(0, 1)]))
    assert not hamiltonian_oracle(DiGraph(2, []))
    with pytest.raises(DeskBoundError):
        hamiltonian_oracle(DiGraph(9, []), bound=8)


def test_classical_sat_basics():
    assert not classical_sat(Falsum)
    assert classical_sat(parse_formula("p | (p->false)"))
    assert not classical_sat(parse_formula("p & (p->false)"))
    alpha = encode_hamiltonian(DiGraph(2, []))
    assert not classical_sat(alpha)
    with pytest.raises(DeskBoundError):
        classical_sat(parse_formula("p"), max_vars=0)


def test_statman_identity_on_implicational():
    f = parse_formula("p->q")
    assert statman_translate(f) == f


def test_statman_conjunction_projection_provable():
    f = parse_formula("a&b->a")
    g = statman_translate(f)
    assert purely_implicational(g)
    assert prove_lm(g) is not None


def test_statman_disjunction():
    f = parse_formula("(p | q)->(q | p)")
    g = statman_translate(f)
    assert purely_implicational(g)
    assert prove_lm(g) is not None
    # p | q alone is not an intuitionistic tautology
    assert prove_lm(statman_translate(parse_formula("p | q"))) is None


def test_statman_falsum_explosion():
    g = statman_translate(parse_formula("false->p"))
    assert purely_implicational(g)
    assert prove_lm(g) is not None


def test_statman_cubic_bound_random():
    rng = random.Random(6)
    for _ in range(150):
        f = random_full(rng, 12)
        g = statman_translate(f)
        assert purely_implicational(g)
        assert weight(g) <= weight(f) ** 3


def test_statman_fresh_names_avoid_collisions():
    f = And(parse_formula("q_and_0"), parse_formula("q_bot"))
    g = statman_translate(f)
    assert purely_implicational(g)
    names = variables_of(g)
    assert "q_and_0" in names  # the original variable survives
    assert len(names) == 3     # plus a fresh conjunction name


def test_kripke_identity_always_valid():
    assert kripke_valid(parse_formula("p->p"), 6) is None


def test_kripke_k_axiom_valid_to_bound():
    assert kripke_valid(parse_formula("p->(q->p)"), 5) is None


def test_kripke_peirce_two_worlds():
    model = kripke_valid(parse_formula("((p->q)->p)->p"), 6)
    assert model is not None and model.worlds == 2
    assert model.forces(1, parse_formula("p"))
    assert not model.forces(0, parse_formula("((p->q)->p)->p"))
    doc = model.to_document()
    assert doc["worlds"] == 2
    assert doc["valuation"]["w1"] == ["p"]


def test_kripke_full_language():
    # excluded middle fails intuitionistically
    assert kripke_valid(parse_formula("p | (p->false)"), 3) is not None
    # but weak excluded middle's double negation holds in the fragment tested
    assert kripke_valid(parse_formula("p & q->p"), 4) is None
    assert kripke_valid(Falsum, 2) is not None


def test_rooted_frame_counts_match_poset_numbers():
    # rooted posets on k worlds = posets on k-1 unlabeled points
    assert [len(_rooted_frames(k)) for k in range(1, 7)] == [1, 1, 2, 5, 16, 63]


def test_upsets_are_monotone():
    for k in range(1, 5):
        for up in _rooted_frames(k):
            for mask in _upsets(up, k):
                for w in range(k):
                    if (mask >> w) & 1:
                        assert up[w] & ~mask == 0


def test_persistence_in_enumerated_models():
    model = kripke_valid(parse_formula("((p->q)->p)->p"), 4)
    for w, v in ((a, b) for a in range(model.worlds)
                 for b in range(model.worlds)):
        if (model.up[w] >> v) & 1:
            assert model.valuation[w] <= model.valuation[v]
