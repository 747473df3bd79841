"""Tree- and dag-like natural deductions for minimal implicational logic.

Deductions are leveled rooted dags of rule-labeled nodes.  The rules are
assumption leaves, implication introduction (which discharges an assumption
by formula), implication elimination, repetition, and the n-premise
separation rule whose premises are read disjunctively.
"""

from collections import deque

from .formula import Formula, Imp, parse_formula, to_text, weight

__all__ = [
    "LEAF", "IMP_INTRO", "IMP_ELIM", "REP", "SEP", "RULES",
    "Node", "Deduction", "DeductionError", "UnfoldBudgetExceeded",
    "ThreadCapExceeded",
    "CorrectnessReport", "check_local_correctness",
    "assumption_sets", "proves", "threads", "thread_closed", "proves_threads",
    "proves_modified", "evaluate_with_choices", "unfold", "is_normal",
    "Measures", "measures",
    "TreeNode", "tree_leaf", "tree_rep", "tree_imp_intro", "tree_imp_elim",
    "tree_subst", "tree_size", "tree_height", "tree_to_deduction",
    "to_document", "from_document", "to_dot", "DocumentError",
]

LEAF = "leaf"
IMP_INTRO = "impI"
IMP_ELIM = "impE"
REP = "rep"
SEP = "sep"
RULES = (LEAF, IMP_INTRO, IMP_ELIM, REP, SEP)


class DeductionError(ValueError):
    pass


class UnfoldBudgetExceeded(RuntimeError):
    pass


class ThreadCapExceeded(RuntimeError):
    pass


class Node:
    """One deduction node.  For IMP_ELIM the premises are ordered
    (minor, major); for IMP_INTRO `discharged` is the assumption closed."""

    __slots__ = ("id", "formula", "rule", "premises", "discharged")

    def __init__(self, id, formula, rule, premises=(), discharged=None):
        if rule not in RULES:
            raise DeductionError(f"unknown rule {rule!r}")
        self.id = id
        self.formula = formula
        self.rule = rule
        self.premises = tuple(premises)
        self.discharged = discharged

    def __repr__(self):
        extra = f" [{to_text(self.discharged)}]" if self.discharged else ""
        return (f"Node({self.id}, {to_text(self.formula)}, {self.rule}"
                f"{extra}, premises={list(self.premises)})")


class Deduction:
    """Immutable-by-convention container of nodes indexed by id."""

    __slots__ = ("nodes", "root", "_levels", "_parents")

    def __init__(self, nodes, root):
        if isinstance(nodes, dict):
            self.nodes = dict(nodes)
        else:
            self.nodes = {node.id: node for node in nodes}
        if root not in self.nodes:
            raise DeductionError(f"root {root} is not a node")
        self.root = root
        self._levels = None
        self._parents = None

    def __len__(self):
        return len(self.nodes)

    def node(self, nid):
        return self.nodes[nid]

    def parents(self):
        """Map node id -> sorted tuple of parent (conclusion) ids."""
        if self._parents is None:
            par = {nid: [] for nid in self.nodes}
            for node in self.nodes.values():
                for p in node.premises:
                    if p in par:
                        par[p].append(node.id)
            self._parents = {nid: tuple(sorted(ps)) for nid, ps in par.items()}
        return self._parents

    def levels(self):
        """Distance from root along conclusion->premise edges.

        Raises DeductionError when the dag is not leveled (two root paths of
        different lengths reach the same node) or contains dangling premise ids.
        """
        if self._levels is None:
            levels, problems = _level_analysis(self)
            if problems:
                raise DeductionError("; ".join(problems[:3]))
            self._levels = levels
        return self._levels

    def is_tree(self):
        seen = set()
        for node in self.nodes.values():
            for p in node.premises:
                if p in seen:
                    return False
                seen.add(p)
        return len(seen) == len(self.nodes) - 1 and self.root not in seen


def _level_analysis(d):
    """BFS levels plus a list of structural problems (dangling ids,
    unreachable nodes, inconsistent levels)."""
    problems = []
    levels = {d.root: 0}
    queue = deque([d.root])
    while queue:
        nid = queue.popleft()
        lvl = levels[nid]
        for p in d.nodes[nid].premises:
            if p not in d.nodes:
                problems.append(f"node {nid} references missing premise {p}")
                continue
            if p in levels:
                if levels[p] != lvl + 1:
                    problems.append(
                        f"node {p} reached at levels {levels[p]} and {lvl + 1}")
            else:
                levels[p] = lvl + 1
                queue.append(p)
    unreachable = sorted(set(d.nodes) - set(levels))
    for nid in unreachable:
        problems.append(f"node {nid} unreachable from root")
    return levels, problems


def _has_cycle(d):
    state = {}
    for start in d.nodes:
        if state.get(start):
            continue
        stack = [(start, iter(d.nodes[start].premises))]
        state[start] = "open"
        while stack:
            nid, it = stack[-1]
            advanced = False
            for p in it:
                if p not in d.nodes:
                    continue
                s = state.get(p)
                if s == "open":
                    return True
                if s is None:
                    state[p] = "open"
                    stack.append((p, iter(d.nodes[p].premises)))
                    advanced = True
                    break
            if not advanced:
                state[nid] = "done"
                stack.pop()
    return False


class CorrectnessReport:
    __slots__ = ("violations",)

    def __init__(self, violations):
        self.violations = tuple(violations)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok

    def __repr__(self):
        if self.ok:
            return "CorrectnessReport(ok)"
        return f"CorrectnessReport({len(self.violations)} violations)"


def check_local_correctness(d):
    """Check every node against its rule schema and the dag invariants
    (rooted, acyclic, leveled).  Violations are returned as data."""
    violations = []
    if _has_cycle(d):
        violations.append((None, "cycle", "premise edges contain a cycle"))
        return CorrectnessReport(violations)
    levels, problems = _level_analysis(d)
    for msg in problems:
        violations.append((None, "structure", msg))
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        prems = [d.nodes[p] for p in node.premises if p in d.nodes]
        if len(prems) != len(node.premises):
            continue  # dangling ids already reported
        if node.rule == LEAF:
            if node.premises:
                violations.append((nid, LEAF, "leaf with premises"))
        elif node.rule == REP:
            if len(prems) != 1 or prems[0].formula != node.formula:
                violations.append((nid, REP, "repetition premise must repeat the conclusion"))
        elif node.rule == SEP:
            if not prems or any(p.formula != node.formula for p in prems):
                violations.append((nid, SEP, "separation premises must all repeat the conclusion"))
        elif node.rule == IMP_INTRO:
            ok = (len(prems) == 1
                  and type(node.formula) is Imp
                  and node.discharged is not None
                  and node.formula.left == node.discharged
                  and node.formula.right == prems[0].formula)
            if not ok:
                violations.append((nid, IMP_INTRO,
                                   "conclusion must be discharged->premise"))
        elif node.rule == IMP_ELIM:
            ok = (len(prems) == 2
                  and type(prems[1].formula) is Imp
                  and prems[1].formula.left == prems[0].formula
                  and prems[1].formula.right == node.formula)
            if not ok:
                violations.append((nid, IMP_ELIM,
                                   "premises must be (minor, minor->conclusion)"))
    return CorrectnessReport(violations)


def _topo_order(d):
    """Node ids with premises before conclusions (children first)."""
    indeg = {nid: len(d.nodes[nid].premises) for nid in d.nodes}
    parents = d.parents()
    order = []
    queue = deque(sorted(nid for nid, k in indeg.items() if k == 0))
    while queue:
        nid = queue.popleft()
        order.append(nid)
        for par in parents[nid]:
            indeg[par] -= 1
            if indeg[par] == 0:
                queue.append(par)
    if len(order) != len(d.nodes):
        raise DeductionError("premise edges contain a cycle")
    return order


def assumption_sets(d):
    """Assumption set A(x) for every node, computed once per node bottom-up.

    Leaves contribute themselves; repetition passes through; implication
    introduction removes the discharged formula; elimination unites both
    premises.  Rejects deductions containing separation nodes.
    """
    sets = {}
    for nid in _topo_order(d):
        node = d.nodes[nid]
        if node.rule == SEP:
            raise DeductionError("assumption sets are undefined under separation; "
                                 "use proves_modified")
        if node.rule == LEAF:
            sets[nid] = frozenset((node.formula,))
        elif node.rule == REP:
            sets[nid] = sets[node.premises[0]]
        elif node.rule == IMP_INTRO:
            sets[nid] = sets[node.premises[0]] - {node.discharged}
        else:
            sets[nid] = sets[node.premises[0]] | sets[node.premises[1]]
    return sets


def proves(d):
    """True iff the root's assumption set is empty."""
    return not assumption_sets(d)[d.root]


def threads(d, cap=None):
    """Maximal root-to-leaf threads as node-id tuples, in lexicographic
    premise order.  `cap` bounds the count (dag threads can explode)."""
    out = []
    stack = [(d.root,)]
    while stack:
        path = stack.pop()
        node = d.nodes[path[-1]]
        if not node.premises:
            out.append(path)
            if cap is not None and len(out) > cap:
                raise ThreadCapExceeded(f"thread cap {cap} exceeded")
            continue
        for p in reversed(node.premises):
            stack.append(path + (p,))
    return out


def thread_closed(d, thread):
    """A thread is closed when some introduction on it discharges the
    thread's leaf formula."""
    leaf_formula = d.nodes[thread[-1]].formula
    for nid in thread:
        node = d.nodes[nid]
        if node.rule == IMP_INTRO and node.discharged == leaf_formula:
            return True
    return False


def proves_threads(d, cap=None):
    """True iff every maximal thread is closed.  Agrees with `proves` on
    separation-free deductions."""
    return all(thread_closed(d, t) for t in threads(d, cap=cap))


def evaluate_with_choices(d, choices):
    """Assumption set at the root of the sub-deduction induced by picking
    one premise per separation node.  `choices` maps sep node id -> premise id."""
    reach = _reachable(d, choices)
    sets = {}
    for nid in _topo_order(d):
        if nid not in reach:
            continue
        node = d.nodes[nid]
        if node.rule == LEAF:
            sets[nid] = frozenset((node.formula,))
        elif node.rule == REP:
            sets[nid] = sets[node.premises[0]]
        elif node.rule == SEP:
            sets[nid] = sets[choices[nid]]
        elif node.rule == IMP_INTRO:
            sets[nid] = sets[node.premises[0]] - {node.discharged}
        else:
            sets[nid] = sets[node.premises[0]] | sets[node.premises[1]]
    return sets[d.root]


def _reachable(d, choices):
    """Nodes reachable from the root when sep nodes follow only their chosen
    premise.  Raises KeyError via `choices` when a reachable sep is unchosen."""
    reach = set()
    stack = [d.root]
    while stack:
        nid = stack.pop()
        if nid in reach:
            continue
        reach.add(nid)
        node = d.nodes[nid]
        if node.rule == SEP:
            stack.append(choices[nid])
        else:
            stack.extend(node.premises)
    return reach


def proves_modified(d):
    """Search for one premise choice per separation node making the induced
    separation-free sub-deduction prove the root.

    Returns the witness choice map (sep node id -> chosen premise id) or None.
    Premises are tried left to right; visited partial states are memoized.
    """
    seps = sorted(nid for nid, n in d.nodes.items() if n.rule == SEP)
    if not seps:
        return {} if proves(d) else None
    failed = set()

    def next_unchosen(choices):
        stack = [d.root]
        seen = set()
        best = None
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            node = d.nodes[nid]
            if node.rule == SEP:
                if nid in choices:
                    stack.append(choices[nid])
                elif best is None or nid < best:
                    best = nid
            else:
                stack.extend(node.premises)
        return best

    def search(choices):
        target = next_unchosen(choices)
        if target is None:
            key = frozenset(choices.items())
            if key in failed:
                return None
            if not evaluate_with_choices(d, choices):
                return dict(choices)
            failed.add(key)
            return None
        for premise in d.nodes[target].premises:
            choices[target] = premise
            result = search(choices)
            if result is not None:
                return result
            del choices[target]
        return None

    return search({})


def unfold(d, budget=100000):
    """Expand a dag into a tree by duplicating shared nodes, preserving
    threads.  Raises UnfoldBudgetExceeded past `budget` nodes."""
    counter = [0]
    stack = [(d.root, None, None)]
    # iterative preorder; premise id tuples are patched in after allocation
    pending = []
    new_premises = {}
    while stack:
        nid, parent_new, slot = stack.pop()
        new_id = counter[0]
        counter[0] += 1
        if counter[0] > budget:
            raise UnfoldBudgetExceeded(f"unfold exceeds {budget} nodes")
        node = d.nodes[nid]
        new_premises[new_id] = [None] * len(node.premises)
        if parent_new is not None:
            new_premises[parent_new][slot] = new_id
        pending.append((new_id, node))
        for slot_idx in range(len(node.premises) - 1, -1, -1):
            stack.append((node.premises[slot_idx], new_id, slot_idx))
    out = {}
    for new_id, node in pending:
        out[new_id] = Node(new_id, node.formula, node.rule,
                           tuple(new_premises[new_id]), node.discharged)
    return Deduction(out, 0)


def is_normal(d):
    """True iff no introduction conclusion is used as the major premise of an
    elimination (no redex in the implicational fragment)."""
    for node in d.nodes.values():
        if node.rule == IMP_ELIM:
            major = d.nodes[node.premises[1]]
            if major.rule == IMP_INTRO:
                return False
    return True


class Measures:
    __slots__ = ("weight", "height", "phi")

    def __init__(self, weight, height, phi):
        self.weight = weight
        self.height = height
        self.phi = phi

    def __repr__(self):
        return f"Measures(weight={self.weight}, height={self.height}, phi={self.phi})"

    def as_dict(self):
        return {"weight": self.weight, "height": self.height, "phi": self.phi}


def measures(d):
    """weight: sum of formula weights over nodes; height: max level;
    phi: total weight of the distinct formulas occurring in d."""
    levels = d.levels()
    total = sum(weight(n.formula) for n in d.nodes.values())
    distinct = {n.formula for n in d.nodes.values()}
    return Measures(total, max(levels.values()), sum(weight(f) for f in distinct))


# -- recursive tree construction (used by the sequent-calculus interpretation
#    and by tests; converted to Deduction via tree_to_deduction) --

class TreeNode:
    """Immutable proof tree node; subtrees may be shared in memory and are
    expanded into distinct nodes by tree_to_deduction."""

    __slots__ = ("formula", "rule", "premises", "discharged")

    def __init__(self, formula, rule, premises=(), discharged=None):
        self.formula = formula
        self.rule = rule
        self.premises = tuple(premises)
        self.discharged = discharged


def tree_leaf(f):
    return TreeNode(f, LEAF)


def tree_rep(t):
    return TreeNode(t.formula, REP, (t,))


def tree_imp_intro(discharged, t):
    return TreeNode(Imp(discharged, t.formula), IMP_INTRO, (t,), discharged)


def tree_imp_elim(minor, major):
    mf = major.formula
    if type(mf) is not Imp or mf.left != minor.formula:
        raise DeductionError("major premise must be minor->conclusion")
    return TreeNode(mf.right, IMP_ELIM, (minor, major))


def _tree_postorder(root, descend=None):
    """Distinct subtree objects, children before parents.  Shared subtrees
    appear once.  `descend` may cut traversal below a node."""
    if descend is None:
        descend = lambda node: node.premises
    seen = set()
    order = []
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in descend(node):
            if id(p) not in seen:
                stack.append((p, False))
    return order


def tree_subst(t, assumption, replacement):
    """Replace open leaves labeled `assumption` by `replacement`.

    Leaves above an introduction that discharges `assumption` are bound there
    and left untouched.  Shared subtrees are transformed once.
    """
    def descend(node):
        if node.rule == IMP_INTRO and node.discharged == assumption:
            return ()
        return node.premises

    memo = {}
    for node in _tree_postorder(t, descend):
        if node.rule == LEAF and node.formula == assumption:
            memo[id(node)] = replacement
            continue
        if node.rule == IMP_INTRO and node.discharged == assumption:
            memo[id(node)] = node
            continue
        new_premises = tuple(memo.get(id(p), p) for p in node.premises)
        if all(np is op for np, op in zip(new_premises, node.premises)):
            memo[id(node)] = node
        else:
            memo[id(node)] = TreeNode(node.formula, node.rule, new_premises,
                                      node.discharged)
    return memo[id(t)]


def tree_size(t):
    """Node count of the fully expanded tree (shared subtrees counted per
    occurrence)."""
    sizes = {}
    for node in _tree_postorder(t):
        sizes[id(node)] = 1 + sum(sizes[id(p)] for p in node.premises)
    return sizes[id(t)]


def tree_height(t):
    heights = {}
    for node in _tree_postorder(t):
        heights[id(node)] = (1 + max(heights[id(p)] for p in node.premises)
                             if node.premises else 0)
    return heights[id(t)]


def tree_to_deduction(t, node_budget=None):
    """Materialize a TreeNode as a tree-like Deduction with preorder ids and
    depth levels.  Shared subtrees are duplicated."""
    nodes = {}
    counter = 0
    stack = [(t, None, None)]
    premise_slots = {}
    while stack:
        node, parent_id, slot = stack.pop()
        nid = counter
        counter += 1
        if node_budget is not None and counter > node_budget:
            raise UnfoldBudgetExceeded(f"tree exceeds {node_budget} nodes")
        premise_slots[nid] = [None] * len(node.premises)
        nodes[nid] = node
        if parent_id is not None:
            premise_slots[parent_id][slot] = nid
        for slot_idx in range(len(node.premises) - 1, -1, -1):
            stack.append((node.premises[slot_idx], nid, slot_idx))
    out = {}
    for nid, node in nodes.items():
        out[nid] = Node(nid, node.formula, node.rule,
                        tuple(premise_slots[nid]), node.discharged)
    return Deduction(out, 0)


# -- serialization --

class DocumentError(ValueError):
    pass


def to_document(d):
    levels = d.levels()
    nodes = []
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        entry = {
            "id": nid,
            "level": levels[nid],
            "formula": to_text(node.formula),
            "rule": node.rule,
            "premises": list(node.premises),
        }
        if node.discharged is not None:
            entry["discharged"] = to_text(node.discharged)
        nodes.append(entry)
    return {"root": d.root, "nodes": nodes}


def from_document(doc):
    if not isinstance(doc, dict) or "root" not in doc or "nodes" not in doc:
        raise DocumentError("proof document must carry 'root' and 'nodes'")
    nodes = {}
    for entry in doc["nodes"]:
        try:
            nid = int(entry["id"])
            rule = entry["rule"]
            formula = parse_formula(entry["formula"])
            premises = tuple(int(p) for p in entry["premises"])
            discharged = entry.get("discharged")
            if discharged is not None:
                discharged = parse_formula(discharged)
        except (KeyError, TypeError, ValueError) as e:
            raise DocumentError(f"bad node entry {entry!r}: {e}") from None
        if rule not in RULES:
            raise DocumentError(f"unknown rule {rule!r} in node {nid}")
        if rule == IMP_INTRO and discharged is None:
            raise DocumentError(f"impI node {nid} must carry 'discharged'")
        if nid in nodes:
            raise DocumentError(f"duplicate node id {nid}")
        nodes[nid] = Node(nid, formula, rule, premises, discharged)
    try:
        root = int(doc["root"])
    except (TypeError, ValueError):
        raise DocumentError("bad root id") from None
    if root not in nodes:
        raise DocumentError(f"root {root} is not a node")
    for node in nodes.values():
        for p in node.premises:
            if p not in nodes:
                raise DocumentError(f"node {node.id} references missing premise {p}")
    return Deduction(nodes, root)


def to_dot(d, name="deduction"):
    """DOT rendering: premise->conclusion edges, one rank per level."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    try:
        levels = d.levels()
    except DeductionError:
        levels = {}
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        label = f"{to_text(node.formula)}\\n{node.rule}"
        lines.append(f'  n{nid} [label="{label}"];')
    for nid in sorted(d.nodes):
        for p in d.nodes[nid].premises:
            lines.append(f"  n{p} -> n{nid};")
    by_level = {}
    for nid, lvl in levels.items():
        by_level.setdefault(lvl, []).append(nid)
    for lvl in sorted(by_level):
        ids = "; ".join(f"n{nid}" for nid in sorted(by_level[lvl]))
        lines.append(f"  {{ rank=same; {ids}; }}")
    lines.append("}")
    return "\n".join(lines) + "\n"
