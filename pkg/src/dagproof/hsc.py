"""Cutfree contraction-free sequent calculus for minimal implicational logic.

Backward search over five rule schemas decides derivability; every rule
strictly shrinks the total sequent weight, so depth-first search terminates
without loop checking.  Checked proofs translate into tree-like natural
deductions.
"""

import sys
import time

from .formula import Formula, Imp, Var, Sequent, purely_implicational, to_text
from . import nd

__all__ = [
    "MA", "MI1", "MI2", "MEP", "MEE", "SC_RULES",
    "SequentProof", "ProofSearchTimeout",
    "prove_lm", "check_sc_proof", "sc_to_nd", "sc_height", "sc_size",
    "nd_height_bound", "render_sc", "sc_to_document", "sc_from_document",
    "SCDocumentError",
]

MA = "MA"
MI1 = "MI1"
MI2 = "MI2"
MEP = "MEP"
MEE = "MEE"
SC_RULES = (MA, MI1, MI2, MEP, MEE)


class ProofSearchTimeout(RuntimeError):
    pass


class SequentProof:
    """Rule application tree.  `principal` is the antecedent formula the rule
    acts on (None for MA and MI1)."""

    __slots__ = ("conclusion", "rule", "premises", "principal")

    def __init__(self, conclusion, rule, premises=(), principal=None):
        self.conclusion = conclusion
        self.rule = rule
        self.premises = tuple(premises)
        self.principal = principal

    def __repr__(self):
        return f"SequentProof({self.rule}: {self.conclusion!r})"


def _remove_one(items, value):
    """Tuple minus one occurrence of value."""
    out = list(items)
    out.remove(value)
    return tuple(out)


_VARS_CACHE = {}


def _vars_of(f):
    cached = _VARS_CACHE.get(f)
    if cached is None:
        if type(f) is Var:
            cached = frozenset((f.name,))
        else:
            cached = _vars_of(f.left) | _vars_of(f.right)
        _VARS_CACHE[f] = cached
    return cached


def _varnames(formulas):
    names = set()
    for f in formulas:
        names |= _vars_of(f)
    return names


def _distinct(items):
    seen = set()
    out = []
    for f in items:
        if f not in seen:
            seen.add(f)
            out.append(f)
    return out


def prove_lm(sequent, timeout=None):
    """Exhaustive backward proof search.  Returns a SequentProof or None.

    Rules are tried in the order MA, MEP, MI2, MI1, MEE, principal choices in
    antecedent order; the first derivation found is returned.  Verdicts are
    memoized per sequent.  `timeout` (seconds) aborts with ProofSearchTimeout.
    """
    if isinstance(sequent, Formula):
        sequent = Sequent((), sequent)
    for f in sequent.antecedent + (sequent.succedent,):
        if not purely_implicational(f):
            raise ValueError(f"not purely implicational: {to_text(f)}")
    budget = sequent.weight() * 4 + 1000
    if sys.getrecursionlimit() < budget:
        sys.setrecursionlimit(budget)
    deadline = None if timeout is None else time.monotonic() + timeout
    memo = {}
    ticks = [0]

    def search(s):
        cached = memo.get(s, False)
        if cached is not False:
            return cached
        ticks[0] += 1
        if deadline is not None and ticks[0] % 256 == 0:
            if time.monotonic() > deadline:
                raise ProofSearchTimeout(f"no verdict within {timeout}s")
        ant = s.antecedent
        succ = s.succedent
        result = None
        committed = False
        # MA
        if type(succ) is Var and succ in ant:
            result = SequentProof(s, MA)
        # a variable goal absent from the antecedent can never be reached
        if result is None and type(succ) is Var \
                and succ.name not in _varnames(ant):
            memo[s] = None
            return None
        # MEP: its premise holds exactly when its conclusion does (the premise
        # context is pointwise stronger under monotone semantics), so the
        # first applicable instance is committed to without fallback.
        if result is None and not committed and type(succ) is Var:
            for p in _distinct(ant):
                if type(p) is not Var or p.name == succ.name:
                    continue
                for imp in _distinct(ant):
                    if type(imp) is not Imp or imp.left != p:
                        continue
                    rest = _remove_one(_remove_one(ant, p), imp)
                    if succ.name not in _varnames(rest + (imp.right,)):
                        continue
                    premise = Sequent(rest + (p, imp.right), succ)
                    sub = search(premise)
                    if sub is not None:
                        result = SequentProof(s, MEP, (sub,), imp)
                    committed = True
                    break
                if committed:
                    break
        # MI2: likewise invertible instance by instance; commit to the first.
        if result is None and not committed and type(succ) is Imp:
            for principal in _distinct(ant):
                if type(principal) is not Imp or principal.left != succ:
                    continue
                gamma = principal.right
                rest = _remove_one(ant, principal)
                premise = Sequent(
                    rest + (succ.left, Imp(succ.right, gamma)), succ.right)
                sub = search(premise)
                if sub is not None:
                    result = SequentProof(s, MI2, (sub,), principal)
                committed = True
                break
        # MI1: the only applicable rule when no antecedent head matches.
        if result is None and not committed and type(succ) is Imp:
            if not any(type(f) is Imp and f.left == succ for f in ant):
                premise = Sequent(ant + (succ.left,), succ.right)
                sub = search(premise)
                if sub is not None:
                    result = SequentProof(s, MI1, (sub,))
        # MEE: only the second premise is invertible; the principal choice is
        # a genuine branch, so all candidates are tried.
        if result is None and not committed and type(succ) is Var:
            for principal in _distinct(ant):
                if type(principal) is not Imp or type(principal.left) is not Imp:
                    continue
                alpha_beta = principal.left
                gamma = principal.right
                rest = _remove_one(ant, principal)
                if succ.name not in _varnames(rest + (gamma,)):
                    continue
                premise1 = Sequent(
                    rest + (alpha_beta.left, Imp(alpha_beta.right, gamma)),
                    alpha_beta.right)
                sub1 = search(premise1)
                if sub1 is None:
                    continue
                premise2 = Sequent(rest + (gamma,), succ)
                sub2 = search(premise2)
                if sub2 is not None:
                    result = SequentProof(s, MEE, (sub1, sub2), principal)
                    break
        memo[s] = result
        return result

    return search(Sequent(sequent.antecedent, sequent.succedent))


def _proof_postorder(pr):
    """Distinct proof nodes, premises before conclusions (proofs from the
    memoizing search share subproofs)."""
    seen = set()
    order = []
    stack = [(pr, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.premises:
            if id(p) not in seen:
                stack.append((p, False))
    return order


def _node_matches(node):
    """True iff `node` instantiates its declared rule schema exactly,
    including side conditions, for some principal choice."""
    s = node.conclusion
    ant = s.antecedent
    succ = s.succedent
    prems = [p.conclusion for p in node.premises]
    if node.rule == MA:
        return not prems and type(succ) is Var and succ in ant
    if node.rule == MI1:
        if len(prems) != 1 or type(succ) is not Imp:
            return False
        if any(type(f) is Imp and f.left == succ for f in ant):
            return False
        return prems[0] == Sequent(ant + (succ.left,), succ.right)
    if node.rule == MI2:
        if len(prems) != 1 or type(succ) is not Imp:
            return False
        for principal in _distinct(ant):
            if type(principal) is not Imp or principal.left != succ:
                continue
            rest = _remove_one(ant, principal)
            expected = Sequent(
                rest + (succ.left, Imp(succ.right, principal.right)),
                succ.right)
            if prems[0] == expected:
                return True
        return False
    if node.rule == MEP:
        if len(prems) != 1 or type(succ) is not Var:
            return False
        for p in _distinct(ant):
            if type(p) is not Var or p.name == succ.name:
                continue
            for imp in _distinct(ant):
                if type(imp) is not Imp or imp.left != p:
                    continue
                rest = _remove_one(_remove_one(ant, p), imp)
                if succ.name not in _varnames(rest + (imp.right,)):
                    continue
                if prems[0] == Sequent(rest + (p, imp.right), succ):
                    return True
        return False
    if node.rule == MEE:
        if len(prems) != 2 or type(succ) is not Var:
            return False
        for principal in _distinct(ant):
            if type(principal) is not Imp or type(principal.left) is not Imp:
                continue
            rest = _remove_one(ant, principal)
            if succ.name not in _varnames(rest + (principal.right,)):
                continue
            ab = principal.left
            exp1 = Sequent(rest + (ab.left, Imp(ab.right, principal.right)),
                           ab.right)
            exp2 = Sequent(rest + (principal.right,), succ)
            if prems[0] == exp1 and prems[1] == exp2:
                return True
        return False
    return False


def check_sc_proof(pr):
    """True iff every node instantiates its rule schema with matching
    multisets and side conditions."""
    return all(_node_matches(node) for node in _proof_postorder(pr))


def _find_principal(node):
    """Recover the principal formula of a checked node (needed after
    deserialization, where proofs carry no principal annotations)."""
    s = node.conclusion
    ant = s.antecedent
    succ = s.succedent
    prems = [p.conclusion for p in node.premises]
    if node.rule == MI2:
        for principal in _distinct(ant):
            if type(principal) is Imp and principal.left == succ:
                rest = _remove_one(ant, principal)
                expected = Sequent(
                    rest + (succ.left, Imp(succ.right, principal.right)),
                    succ.right)
                if prems[0] == expected:
                    return principal
    if node.rule == MEP:
        for p in _distinct(ant):
            if type(p) is not Var or p.name == succ.name:
                continue
            for imp in _distinct(ant):
                if type(imp) is not Imp or imp.left != p:
                    continue
                rest = _remove_one(_remove_one(ant, p), imp)
                if succ.name not in _varnames(rest + (imp.right,)):
                    continue
                if prems[0] == Sequent(rest + (p, imp.right), succ):
                    return imp
    if node.rule == MEE:
        for principal in _distinct(ant):
            if type(principal) is not Imp or type(principal.left) is not Imp:
                continue
            rest = _remove_one(ant, principal)
            if succ.name not in _varnames(rest + (principal.right,)):
                continue
            ab = principal.left
            exp1 = Sequent(rest + (ab.left, Imp(ab.right, principal.right)),
                           ab.right)
            exp2 = Sequent(rest + (principal.right,), succ)
            if prems[0] == exp1 and prems[1] == exp2:
                return principal
    return None


def _bridge(alpha, beta, gamma):
    """Derivation of beta->gamma from the open assumption (alpha->beta)->gamma:
    assume beta, introduce alpha->beta vacuously, eliminate, discharge beta."""
    inner = nd.tree_imp_intro(alpha, nd.tree_leaf(beta))
    applied = nd.tree_imp_elim(inner, nd.tree_leaf(Imp(Imp(alpha, beta), gamma)))
    return nd.tree_imp_intro(beta, applied)


def sc_interpret(pr):
    """Interpret a checked sequent proof as a TreeNode natural deduction of
    the succedent from open assumptions in the antecedent."""
    trees = {}
    for node in _proof_postorder(pr):
        succ = node.conclusion.succedent
        principal = node.principal
        if principal is None and node.rule in (MI2, MEP, MEE):
            principal = _find_principal(node)
            if principal is None:
                raise nd.DeductionError(f"no principal matches {node!r}")
        if node.rule == MA:
            trees[id(node)] = nd.tree_leaf(succ)
        elif node.rule == MI1:
            trees[id(node)] = nd.tree_imp_intro(
                succ.left, trees[id(node.premises[0])])
        elif node.rule == MI2:
            alpha, beta = succ.left, succ.right
            gamma = principal.right
            bridge = _bridge(alpha, beta, gamma)
            body = nd.tree_subst(trees[id(node.premises[0])],
                                 Imp(beta, gamma), bridge)
            trees[id(node)] = nd.tree_imp_intro(alpha, body)
        elif node.rule == MEP:
            p, gamma = principal.left, principal.right
            derived = nd.tree_imp_elim(nd.tree_leaf(p), nd.tree_leaf(principal))
            trees[id(node)] = nd.tree_subst(
                trees[id(node.premises[0])], gamma, derived)
        else:  # MEE
            ab = principal.left
            alpha, beta = ab.left, ab.right
            gamma = principal.right
            bridge = _bridge(alpha, beta, gamma)
            body = nd.tree_subst(trees[id(node.premises[0])],
                                 Imp(beta, gamma), bridge)
            ab_proof = nd.tree_imp_intro(alpha, body)
            gamma_proof = nd.tree_imp_elim(ab_proof, nd.tree_leaf(principal))
            trees[id(node)] = nd.tree_subst(
                trees[id(node.premises[1])], gamma, gamma_proof)
    return trees[id(pr)]


def sc_to_nd(pr, node_budget=None, check=True):
    """Tree-like natural deduction for a sequent proof; for a closed root
    sequent the result proves its formula (every thread discharged)."""
    if check and not check_sc_proof(pr):
        raise nd.DeductionError("sequent proof fails the rule checker")
    return nd.tree_to_deduction(sc_interpret(pr), node_budget=node_budget)


def sc_height(pr):
    heights = {}
    for node in _proof_postorder(pr):
        heights[id(node)] = (1 + max(heights[id(p)] for p in node.premises)
                             if node.premises else 0)
    return heights[id(pr)]


def sc_size(pr):
    """Rule applications in the fully expanded proof tree."""
    sizes = {}
    for node in _proof_postorder(pr):
        sizes[id(node)] = 1 + sum(sizes[id(p)] for p in node.premises)
    return sizes[id(pr)]


def nd_height_bound(pr):
    """Upper bound on the interpreted deduction's height, accumulated from the
    per-rule constructions (the two-premise rule combines its premises'
    bounds additively)."""
    bounds = {}
    for node in _proof_postorder(pr):
        prems = [bounds[id(p)] for p in node.premises]
        if node.rule == MA:
            bounds[id(node)] = 0
        elif node.rule == MI1:
            bounds[id(node)] = prems[0] + 1
        elif node.rule == MEP:
            bounds[id(node)] = prems[0] + 1
        elif node.rule == MI2:
            bounds[id(node)] = prems[0] + 4
        else:  # MEE
            bounds[id(node)] = prems[0] + prems[1] + 5
    return bounds[id(pr)]


def render_sc(pr, indent="  "):
    """One sequent per line, indented by inference depth."""
    lines = []
    stack = [(pr, 0)]
    while stack:
        node, depth = stack.pop()
        lines.append(f"{indent * depth}{node.conclusion!r}   [{node.rule}]")
        for p in reversed(node.premises):
            stack.append((p, depth + 1))
    return "\n".join(lines) + "\n"


class SCDocumentError(ValueError):
    pass


def sc_to_document(pr):
    return {
        "conclusion": {
            "antecedent": [to_text(f) for f in pr.conclusion.antecedent],
            "succedent": to_text(pr.conclusion.succedent),
        },
        "rule": pr.rule,
        "premises": [sc_to_document(p) for p in pr.premises],
    }


def sc_from_document(doc):
    from .formula import parse_formula
    if not isinstance(doc, dict):
        raise SCDocumentError("sequent proof document must be an object")
    try:
        conc = doc["conclusion"]
        ant = tuple(parse_formula(t) for t in conc["antecedent"])
        succ = parse_formula(conc["succedent"])
        rule = doc["rule"]
        premises = tuple(sc_from_document(p) for p in doc.get("premises", []))
    except (KeyError, TypeError) as e:
        raise SCDocumentError(f"bad sequent proof document: {e}") from None
    if rule not in SC_RULES:
        raise SCDocumentError(f"unknown rule {rule!r}")
    return SequentProof(Sequent(ant, succ), rule, premises)
