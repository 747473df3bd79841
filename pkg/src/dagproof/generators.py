"""Seeded random and exhaustive corpus generators shared by the benchmark
driver and the test suite."""

import itertools
import random

from .formula import And, DiGraph, Falsum, Imp, Or, Var
from . import nd

__all__ = [
    "random_implicational", "random_full", "implicational_formulas",
    "all_digraphs", "correct_trees", "DEFAULT_VARIABLES",
]

DEFAULT_VARIABLES = ("p", "q", "r")


def random_implicational(rng, max_weight, variables=DEFAULT_VARIABLES):
    """Random purely implicational formula of weight <= max_weight."""
    def gen(budget):
        if budget < 3 or rng.random() < 1.0 / budget:
            return Var(rng.choice(variables))
        left_budget = rng.randrange(1, budget - 1)
        return Imp(gen(left_budget), gen(budget - 1 - left_budget))
    return gen(max_weight)


def random_full(rng, max_weight, variables=DEFAULT_VARIABLES):
    """Random formula over the full language (falsum, and, or, imp)."""
    def gen(budget):
        if budget < 3:
            return Falsum if rng.random() < 0.15 else Var(rng.choice(variables))
        if rng.random() < 1.0 / budget:
            return Falsum if rng.random() < 0.15 else Var(rng.choice(variables))
        ctor = rng.choice((Imp, Imp, And, Or))
        left_budget = rng.randrange(1, budget - 1)
        return ctor(gen(left_budget), gen(budget - 1 - left_budget))
    return gen(max_weight)


def implicational_formulas(variables, max_weight):
    """All purely implicational formulas over `variables` with weight bounded
    by max_weight, smallest first (deterministic order)."""
    by_weight = {1: [Var(v) for v in variables]}
    for w in range(3, max_weight + 1, 2):
        items = []
        for wl in range(1, w - 1, 2):
            wr = w - 1 - wl
            for left in by_weight.get(wl, ()):
                for right in by_weight.get(wr, ()):
                    items.append(Imp(left, right))
        by_weight[w] = items
    out = []
    for w in sorted(by_weight):
        out.extend(by_weight[w])
    return out


def all_digraphs(n):
    """Every simple digraph on n labeled vertices, in bitmask order."""
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
        yield DiGraph(n, edges)


def correct_trees(max_nodes, variables=("p", "q"), pool_weight=3):
    """All locally correct separation-free trees with at most max_nodes
    nodes whose node formulas come from the bounded formula pool.

    Exhaustive by construction: leaves over the pool, repetitions,
    introductions whose conclusion stays in the pool, and eliminations whose
    major premise lies in the pool.  Yields Deduction objects.
    """
    pool = implicational_formulas(variables, pool_weight)
    pool_set = set(pool)
    # by_size[k][formula] -> list of TreeNode with k nodes concluding formula
    by_size = [None, {}]
    for f in pool:
        by_size[1].setdefault(f, []).append(nd.tree_leaf(f))
    for k in range(2, max_nodes + 1):
        layer = {}
        prev = by_size[k - 1]
        for f, trees in prev.items():
            for t in trees:
                layer.setdefault(f, []).append(nd.tree_rep(t))
        for f, trees in prev.items():
            for g in pool:
                if type(g) is Imp and g.right == f:
                    for t in trees:
                        layer.setdefault(g, []).append(
                            nd.tree_imp_intro(g.left, t))
        for i in range(1, k - 1):
            j = k - 1 - i
            for minor_f, minors in by_size[i].items():
                for major_f in pool_set:
                    if type(major_f) is not Imp or major_f.left != minor_f:
                        continue
                    majors = by_size[j].get(major_f, ())
                    for minor in minors:
                        for major in majors:
                            layer.setdefault(major_f.right, []).append(
                                nd.tree_imp_elim(minor, major))
        by_size.append(layer)
    for k in range(1, max_nodes + 1):
        for f in sorted(by_size[k], key=lambda g: g.sort_key()):
            for t in by_size[k][f]:
                yield nd.tree_to_deduction(t)


def seeded(seed):
    return random.Random(seed)
