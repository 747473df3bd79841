"""Problem encodings and independent semantic oracles.

Hamiltonian-path formulas over step/vertex variables, brute-force
Hamiltonicity, truth-table classical satisfiability, the translation of full
propositional formulas into the purely implicational fragment, and a bounded
Kripke countermodel search over rooted finite posets.
"""

import itertools
from functools import lru_cache

from .formula import (And, DiGraph, Falsum, Formula, Imp, Or, Var, to_text,
                      purely_implicational, subformulas, variables_of, weight)

__all__ = [
    "DeskBoundError", "TranslationError",
    "encode_hamiltonian", "hamiltonian_oracle", "classical_sat",
    "statman_translate", "KripkeModel", "kripke_valid",
    "conjuncts", "step_variable",
]


class DeskBoundError(ValueError):
    """Input exceeds the configured brute-force bound."""


class TranslationError(RuntimeError):
    pass


def step_variable(i, v):
    """Variable asserting vertex v is visited at step i (1-based step)."""
    return Var(f"X_{i}_{v}")


def _conj(parts):
    it = iter(parts)
    try:
        acc = next(it)
    except StopIteration:
        return None
    for p in it:
        acc = And(acc, p)
    return acc


def _disj(parts):
    it = iter(parts)
    acc = next(it)
    for p in it:
        acc = Or(acc, p)
    return acc


def conjuncts(f):
    """Top-level conjuncts of a left-folded conjunction."""
    out = []
    while type(f) is And:
        out.append(f.right)
        f = f.left
    out.append(f)
    out.reverse()
    return out


def _neg(a, b):
    return Imp(a, Imp(b, Falsum))


def hamiltonian_families(g):
    """The five conjunct families of the Hamiltonian-path encoding, keyed
    A..E: every vertex visited; no vertex visited twice; every step visits a
    vertex; no step visits two vertices; non-edges never taken between
    consecutive steps.  Empty families are omitted."""
    n = g.n
    if n < 1:
        raise DeskBoundError("graph must have at least one vertex")
    steps = range(1, n + 1)
    verts = range(n)
    non_edges = [(v, w) for v in verts for w in verts
                 if (v, w) not in g.edges]
    families = {
        "A": [_disj(step_variable(i, v) for i in steps) for v in verts],
        "B": [_neg(step_variable(i, v), step_variable(j, v))
              for v in verts for i in steps for j in steps if i != j],
        "C": [_disj(step_variable(i, v) for v in verts) for i in steps],
        "D": [_neg(step_variable(i, v), step_variable(i, w))
              for v in verts for w in verts if v != w for i in steps],
        "E": [_neg(step_variable(i, v), step_variable(i + 1, w))
              for (v, w) in non_edges for i in range(1, n)],
    }
    return {key: parts for key, parts in families.items() if parts}


def encode_hamiltonian(g):
    """Formula satisfiable exactly when g has a Hamiltonian path: the
    conjunction of the non-empty A..E families."""
    families = hamiltonian_families(g)
    return _conj(_conj(families[key]) for key in "ABCDE" if key in families)


def hamiltonian_oracle(g, bound=8):
    """Brute force over all vertex permutations."""
    if g.n > bound:
        raise DeskBoundError(f"{g.n} vertices exceeds the brute-force bound {bound}")
    for perm in itertools.permutations(range(g.n)):
        if all((perm[i], perm[i + 1]) in g.edges for i in range(g.n - 1)):
            return True
    return False


def _truth_columns(names):
    """Truth-table columns as big-integer bit vectors over 2**k rows: bit r of
    column i is set iff bit i of the row index r is set."""
    k = len(names)
    width = 1 << k
    cols = {}
    for i, name in enumerate(names):
        block = 1 << i
        piece = ((1 << block) - 1) << block
        span = 2 * block
        while span < width:
            piece |= piece << span
            span *= 2
        cols[name] = piece
    return cols


def classical_sat(f, max_vars=24):
    """Truth-table satisfiability; the table is evaluated as bit-parallel
    big-integer columns."""
    names = sorted(variables_of(f))
    if len(names) > max_vars:
        raise DeskBoundError(f"{len(names)} variables exceeds the bound {max_vars}")
    full = (1 << (1 << len(names))) - 1
    cols = _truth_columns(names)
    values = {}
    order = []
    seen = set()
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if expanded:
            order.append(g)
            continue
        if g in seen:
            continue
        seen.add(g)
        stack.append((g, True))
        if type(g) in (Imp, And, Or):
            stack.append((g.left, False))
            stack.append((g.right, False))
    for g in order:
        t = type(g)
        if t is Var:
            values[g] = cols[g.name]
        elif t is Imp:
            values[g] = (full ^ values[g.left]) | values[g.right]
        elif t is And:
            values[g] = values[g.left] & values[g.right]
        elif t is Or:
            values[g] = values[g.left] | values[g.right]
        else:
            values[g] = 0
    return values[f] != 0


def _fresh_name(base, used):
    name = base
    while name in used:
        name = name + "_"
    used.add(name)
    return name


def _postorder_subformulas(f):
    """Distinct subformulas, children before parents, deterministic order."""
    order = []
    seen = set()
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if expanded:
            if g not in seen:
                seen.add(g)
                order.append(g)
            continue
        if g in seen:
            continue
        stack.append((g, True))
        if type(g) in (Imp, And, Or):
            stack.append((g.right, False))
            stack.append((g.left, False))
    return order


def statman_translate(f):
    """Translate a full propositional formula into the purely implicational
    fragment.

    Each conjunction, disjunction, and falsum subformula is replaced by a
    fresh variable, and defining axioms for those variables are prepended as
    nested antecedents: projections and pairing for conjunctions,
    injections plus case analysis (at every subformula of the implicational
    skeleton) for disjunctions, and explosion into every original variable
    for falsum (the introduced variables are reachable from those through
    the other defining axioms, and the wider axiom set would break the cubic
    weight bound on small inputs).  The output weight is checked against the
    cubic bound.
    """
    used = set(variables_of(f))
    fresh = {}
    and_count = 0
    or_count = 0
    skeleton = {}
    for g in _postorder_subformulas(f):
        t = type(g)
        if t is Var:
            skeleton[g] = g
        elif t is Imp:
            skeleton[g] = Imp(skeleton[g.left], skeleton[g.right])
        elif t is And:
            q = Var(_fresh_name(f"q_and_{and_count}", used))
            and_count += 1
            fresh[g] = q
            skeleton[g] = q
        elif t is Or:
            q = Var(_fresh_name(f"q_or_{or_count}", used))
            or_count += 1
            fresh[g] = q
            skeleton[g] = q
        else:
            if g not in fresh:
                q = Var(_fresh_name("q_bot", used))
                fresh[g] = q
            skeleton[g] = fresh[g]
    body = skeleton[f]
    targets = sorted(subformulas(body), key=Formula.sort_key)
    axioms = []
    for g in _postorder_subformulas(f):
        t = type(g)
        if t is And:
            q = fresh[g]
            left, right = skeleton[g.left], skeleton[g.right]
            axioms.append(Imp(q, left))
            axioms.append(Imp(q, right))
            axioms.append(Imp(left, Imp(right, q)))
        elif t is Or:
            q = fresh[g]
            left, right = skeleton[g.left], skeleton[g.right]
            axioms.append(Imp(left, q))
            axioms.append(Imp(right, q))
            for delta in targets:
                axioms.append(
                    Imp(Imp(left, delta), Imp(Imp(right, delta), Imp(q, delta))))
    if Falsum in fresh:
        bot = fresh[Falsum]
        for name in sorted(variables_of(f)):
            axioms.append(Imp(bot, Var(name)))
    out = body
    for ax in reversed(axioms):
        out = Imp(ax, out)
    if not purely_implicational(out):
        raise TranslationError("translation left a non-implicational connective")
    if weight(out) > weight(f) ** 3:
        raise TranslationError(
            f"translated weight {weight(out)} exceeds cube of {weight(f)}")
    return out


class KripkeModel:
    """Finite rooted preorder with a monotone valuation; world 0 is the root."""

    __slots__ = ("worlds", "up", "valuation")

    def __init__(self, worlds, up, valuation):
        self.worlds = worlds
        self.up = tuple(up)  # up[w] = bitmask of worlds >= w, including w
        self.valuation = {w: frozenset(vs) for w, vs in valuation.items()}
        for w in range(worlds):
            for v in range(worlds):
                if (self.up[w] >> v) & 1:
                    assert self.valuation.get(w, frozenset()) <= \
                        self.valuation.get(v, frozenset()), \
                        "valuation must be monotone along the order"

    def order_pairs(self):
        return [(w, v) for w in range(self.worlds) for v in range(self.worlds)
                if (self.up[w] >> v) & 1]

    def forces(self, w, f):
        t = type(f)
        if t is Var:
            return f.name in self.valuation.get(w, frozenset())
        if t is Imp:
            return all(not self.forces(v, f.left) or self.forces(v, f.right)
                       for v in range(self.worlds) if (self.up[w] >> v) & 1)
        if t is And:
            return self.forces(w, f.left) and self.forces(w, f.right)
        if t is Or:
            return self.forces(w, f.left) or self.forces(w, f.right)
        return False  # falsum

    def to_document(self):
        return {
            "worlds": self.worlds,
            "order": [list(p) for p in self.order_pairs()],
            "valuation": {f"w{w}": sorted(self.valuation.get(w, frozenset()))
                          for w in range(self.worlds)},
        }

    def __repr__(self):
        return f"KripkeModel(worlds={self.worlds})"


@lru_cache(maxsize=None)
def _rooted_frames(k):
    """Rooted posets on k worlds (world 0 below all), as up-mask tuples,
    deduplicated up to isomorphism of the non-root part."""
    if k == 1:
        return ((1,),)
    rest = k - 1
    pairs = [(i, j) for i in range(1, k) for j in range(i + 1, k)]
    frames = []
    seen = set()
    for mask in range(1 << len(pairs)):
        rel = set()
        for idx, (i, j) in enumerate(pairs):
            if (mask >> idx) & 1:
                rel.add((i, j))
        ok = True
        for (i, j) in rel:
            for l in range(j + 1, k):
                if (j, l) in rel and (i, l) not in rel:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        # canonical form: min over relabelings of the non-root worlds of the
        # directed relation (direction preserved, so duals stay distinct)
        best = None
        for perm in itertools.permutations(range(1, k)):
            key = tuple(sorted((perm[i - 1], perm[j - 1]) for (i, j) in rel))
            if best is None or key < best:
                best = key
        if best in seen:
            continue
        seen.add(best)
        up = []
        for w in range(k):
            m = 1 << w
            if w == 0:
                m = (1 << k) - 1
            else:
                for (i, j) in rel:
                    if i == w:
                        m |= 1 << j
            up.append(m)
        frames.append(tuple(up))
    return tuple(frames)


def _upsets(up, k):
    """All up-closed world sets of a frame, as bitmasks, ascending."""
    out = []
    for mask in range(1 << k):
        closed = True
        m = mask
        while m:
            w = (m & -m).bit_length() - 1
            if up[w] & ~mask:
                closed = False
                break
            m &= m - 1
        if closed:
            out.append(mask)
    return out


def _eval_mask(f, up, k, val):
    """Bitmask of worlds forcing f (persistent valuation `val` per variable)."""
    full = (1 << k) - 1
    values = {}
    order = []
    seen = set()
    stack = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if expanded:
            order.append(g)
            continue
        if g in seen:
            continue
        seen.add(g)
        stack.append((g, True))
        if type(g) in (Imp, And, Or):
            stack.append((g.left, False))
            stack.append((g.right, False))
    for g in order:
        t = type(g)
        if t is Var:
            values[g] = val.get(g.name, 0)
        elif t is And:
            values[g] = values[g.left] & values[g.right]
        elif t is Or:
            values[g] = values[g.left] | values[g.right]
        elif t is Imp:
            bad = values[g.left] & (full ^ values[g.right])
            m = 0
            for w in range(k):
                if not (up[w] & bad):
                    m |= 1 << w
            values[g] = m
        else:
            values[g] = 0
    return values[f]


def kripke_valid(f, max_worlds):
    """Search rooted models with up to max_worlds worlds for a refutation of
    f at the root.

    Returns None when no countermodel exists within the bound (a bounded
    verdict, not a validity proof), otherwise the first countermodel found.
    Falsum is forced nowhere, so on the full language this decides bounded
    intuitionistic validity; on the implicational fragment minimal and
    intuitionistic validity coincide.
    """
    names = sorted(variables_of(f))
    for k in range(1, max_worlds + 1):
        for up in _rooted_frames(k):
            upsets = _upsets(up, k)
            for assignment in itertools.product(upsets, repeat=len(names)):
                val = dict(zip(names, assignment))
                mask = _eval_mask(f, up, k, val)
                if not (mask & 1):
                    valuation = {
                        w: frozenset(n for n in names if (val[n] >> w) & 1)
                        for w in range(k)}
                    return KripkeModel(k, up, valuation)
    return None
