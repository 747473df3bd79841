"""Horizontal compression of tree proofs into dag proofs, with cleansing.

The pipeline merges per-level duplicate formulas into dag nodes, repairs
multi-inference clashes with separation nodes, carries the images of the tree
threads as a fundamental set of threads, verifies its local coherency, and
then commits one premise per separation node (guided by those threads) to
recover a separation-free dag proof contained in the separated one.
"""

from . import nd
from .nd import (Deduction, Node, LEAF, IMP_ELIM, IMP_INTRO, REP, SEP,
                 ThreadCapExceeded)

__all__ = [
    "CompressError", "CoherencyError", "CleansingError", "BoundViolation",
    "ThreadSet", "CompressionTrace", "CoherencyReport",
    "compress_levels", "insert_separation", "extract_fst",
    "verify_local_coherency", "cleanse", "compress_proof",
    "DEFAULT_THREAD_CAP",
]

DEFAULT_THREAD_CAP = 10 ** 6


class CompressError(ValueError):
    pass


class CoherencyError(CompressError):
    pass


class CleansingError(CompressError):
    pass


class BoundViolation(CompressError):
    pass


class ThreadSet:
    """Lexicographically sorted set of maximal threads over a deduction."""

    __slots__ = ("threads", "origins")

    def __init__(self, threads, cap=DEFAULT_THREAD_CAP, origins=None):
        threads = sorted(set(tuple(t) for t in threads))
        if cap is not None and len(threads) > cap:
            raise ThreadCapExceeded(
                f"{len(threads)} threads exceed the cap {cap}")
        self.threads = tuple(threads)
        self.origins = origins or {}

    def __len__(self):
        return len(self.threads)

    def __iter__(self):
        return iter(self.threads)

    def __getitem__(self, i):
        return self.threads[i]


class CompressionTrace:
    """Pipeline record: the four stages, node correspondences, measures,
    bound checks, and certificate verdicts."""

    __slots__ = ("tree", "prime", "flat", "star", "tree_to_prime",
                 "shape_index", "shapes", "affected_levels", "copies",
                 "fst", "choices", "kept_threads", "measures", "bounds",
                 "verdicts")

    def __init__(self, tree):
        self.tree = tree
        self.prime = None
        self.flat = None
        self.star = None
        self.tree_to_prime = {}
        self.shape_index = {}
        self.shapes = {}
        self.affected_levels = ()
        self.copies = {}
        self.fst = None
        self.choices = {}
        self.kept_threads = ()
        self.measures = {}
        self.bounds = {}
        self.verdicts = {}

    def to_document(self):
        doc = {
            "stages": {
                "tree": nd.to_document(self.tree),
                "prime": nd.to_document(self.prime) if self.prime else None,
                "flat": nd.to_document(self.flat) if self.flat else None,
                "star": nd.to_document(self.star) if self.star else None,
            },
            "bounds": dict(self.bounds),
            "verdicts": dict(self.verdicts),
            "measures": {k: m.as_dict() for k, m in self.measures.items()},
            "fst_size": len(self.fst) if self.fst is not None else None,
            "choices": {str(k): v for k, v in sorted(self.choices.items())},
        }
        return doc


def _require_tree_input(t, need_proof):
    if not t.is_tree():
        raise CompressError("input deduction must be tree-like")
    if any(n.rule == SEP for n in t.nodes.values()):
        raise CompressError("input deduction must be separation-free")
    report = nd.check_local_correctness(t)
    if not report.ok:
        raise CompressError(f"input deduction is locally incorrect: "
                            f"{report.violations[0]}")
    if need_proof and not nd.proves_threads(t):
        raise CompressError("input deduction does not prove its root formula")


def compress_levels(t, trace=None):
    """Merge identical formulas within each horizontal section of a tree.

    Returns (dag, trace).  Inferences are inherited from the sources; a
    merged node whose sources applied several distinct inferences carries all
    their premises concatenated and is in general locally incorrect until
    insert_separation repairs it.
    """
    _require_tree_input(t, need_proof=False)
    if trace is None:
        trace = CompressionTrace(t)
    levels = t.levels()
    prime_ids = {}
    tree_to_prime = {}
    for nid in sorted(t.nodes, key=lambda i: (levels[i], i)):
        key = (levels[nid], t.nodes[nid].formula)
        if key not in prime_ids:
            prime_ids[key] = len(prime_ids)
        tree_to_prime[nid] = prime_ids[key]
    shapes = {pid: [] for pid in prime_ids.values()}
    shape_index = {}
    for nid in sorted(t.nodes):
        node = t.nodes[nid]
        pid = tree_to_prime[nid]
        shape = (node.rule,
                 tuple(tree_to_prime[p] for p in node.premises),
                 node.discharged)
        if shape not in shapes[pid]:
            shapes[pid].append(shape)
        shape_index[nid] = shapes[pid].index(shape)
    prime_nodes = {}
    for key, pid in prime_ids.items():
        level, formula = key
        sh = shapes[pid]
        premises = tuple(p for (_, prems, _) in sh for p in prems)
        prime_nodes[pid] = Node(pid, formula, sh[0][0], premises, sh[0][2])
    prime = Deduction(prime_nodes, tree_to_prime[t.root])
    trace.prime = prime
    trace.tree_to_prime = tree_to_prime
    trace.shapes = {pid: tuple(sh) for pid, sh in shapes.items()}
    trace.shape_index = shape_index
    return prime, trace


def insert_separation(prime, trace):
    """Repair multi-inference nodes with separation.

    Every level holding a multi-inference node receives an intermediate
    layer: each merged inference is materialized as its own node there, the
    merged conclusion becomes a separation (or repetition, when only one
    inference survives) over those copies, and leaves stay in place."""
    shapes = trace.shapes
    levels = prime.levels()
    affected = sorted({levels[pid] for pid, sh in shapes.items()
                       if len(sh) >= 2})
    affected_set = set(affected)
    next_id = max(prime.nodes) + 1 if prime.nodes else 0
    flat_nodes = {}
    copies = {}
    for pid in sorted(prime.nodes):
        node = prime.nodes[pid]
        sh = shapes[pid]
        if levels[pid] not in affected_set or (
                len(sh) == 1 and sh[0][0] == LEAF):
            flat_nodes[pid] = Node(pid, node.formula, node.rule,
                                   node.premises, node.discharged)
            continue
        copy_ids = []
        for idx, (rule, premises, discharged) in enumerate(sh):
            cid = next_id
            next_id += 1
            copies[(pid, idx)] = cid
            flat_nodes[cid] = Node(cid, node.formula, rule, premises,
                                   discharged)
            copy_ids.append(cid)
        rule = SEP if len(sh) >= 2 else REP
        flat_nodes[pid] = Node(pid, node.formula, rule, tuple(copy_ids))
    flat = Deduction(flat_nodes, prime.root)
    trace.flat = flat
    trace.affected_levels = tuple(affected)
    trace.copies = copies
    return flat


def extract_fst(t, trace, cap=DEFAULT_THREAD_CAP):
    """Images of the tree's maximal threads in the separated dag.

    Requires every tree thread to be closed; the image set then satisfies
    the three local-coherency conditions."""
    if not nd.proves_threads(t):
        raise CompressError("fundamental threads require a proved tree")
    tree_to_prime = trace.tree_to_prime
    shape_index = trace.shape_index
    copies = trace.copies
    images = []
    origins = {}
    for thread in nd.threads(t, cap=cap):
        img = []
        for x in thread:
            pid = tree_to_prime[x]
            img.append(pid)
            cid = copies.get((pid, shape_index[x]))
            if cid is not None:
                img.append(cid)
        img = tuple(img)
        images.append(img)
        origins.setdefault(img, thread)
    fst = ThreadSet(images, cap=cap, origins=origins)
    trace.fst = fst
    return fst


class _Trie:
    __slots__ = ("children", "committed")

    def __init__(self):
        self.children = {}
        self.committed = False


def _build_trie(threads):
    root = _Trie()
    for thread in threads:
        cur = root
        for nid in thread:
            nxt = cur.children.get(nid)
            if nxt is None:
                nxt = _Trie()
                cur.children[nid] = nxt
            cur = nxt
    return root


class CoherencyReport:
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
            return "CoherencyReport(ok)"
        return f"CoherencyReport({len(self.violations)} violations)"


def verify_local_coherency(d, fst):
    """Check the three fundamental-thread conditions against deduction d:

    1. density: every node of d lies on some thread;
    2. closure: every thread's leaf formula is discharged on the thread;
    3. elimination preservation: wherever a thread passes an elimination node
       and takes one premise, some thread with the identical prefix takes the
       other premise.
    Violations carry witnesses.
    """
    violations = []
    for ti, thread in enumerate(fst):
        if not thread or thread[0] != d.root:
            violations.append(("thread", ti, "does not start at the root"))
            continue
        for pos in range(len(thread) - 1):
            if thread[pos + 1] not in d.nodes[thread[pos]].premises:
                violations.append(("thread", ti, f"broken edge at {thread[pos]}"))
                break
        else:
            if d.nodes[thread[-1]].premises:
                violations.append(("thread", ti, "does not end at a leaf"))
    if violations:
        return CoherencyReport(violations)
    covered = set()
    for thread in fst:
        covered.update(thread)
    for nid in sorted(set(d.nodes) - covered):
        violations.append(("density", nid))
    for ti, thread in enumerate(fst):
        if not nd.thread_closed(d, thread):
            violations.append(("closed", ti, thread[-1]))
    trie = _build_trie(fst.threads)
    for ti, thread in enumerate(fst):
        cur = trie
        for pos, nid in enumerate(thread):
            cur = cur.children[nid]
            node = d.nodes[nid]
            if node.rule == IMP_ELIM and pos + 1 < len(thread):
                succ = thread[pos + 1]
                for w in node.premises:
                    if w != succ and w not in cur.children:
                        violations.append(("imp_elim", ti, nid, w))
    return CoherencyReport(violations)


def _compatible_thread(trie_node, prefix, flat, choices):
    """Depth-first search below a trie node for a thread suffix honoring the
    separation choices committed so far.  Returns the full thread or None."""
    stack = [(trie_node, prefix)]
    while stack:
        cur, path = stack.pop()
        if not cur.children:
            return path
        nid = path[-1]
        node = flat.nodes[nid]
        if node.rule == SEP:
            chosen = choices.get(nid)
            if chosen is not None:
                child = cur.children.get(chosen)
                if child is not None:
                    stack.append((child, path + (chosen,)))
                continue
        for succ in sorted(cur.children, reverse=True):
            stack.append((cur.children[succ], path + (succ,)))
    return None


def _select_threads(flat, fst, budget=2_000_000):
    """Close a thread family under elimination-sibling obligations, resolving
    every obligation with a suffix compatible with the separation choices
    committed so far.

    Seeds at the lowest elimination conclusion (lex-least covering thread).
    Obligations are resolved in discovery order against the then-current
    choices, so committing a resolved thread can never conflict.  Returns
    (choices, committed threads) or None when an obligation admits no
    compatible sibling; this guided selection is one deterministic pass, not
    a full search.
    """
    threads = fst.threads
    if not threads:
        return None
    trie = _build_trie(threads)
    levels = flat.levels()
    elim_nodes = sorted(
        (nid for nid, n in flat.nodes.items() if n.rule == IMP_ELIM),
        key=lambda nid: (levels[nid], nid))
    choices = {}
    committed = []
    steps = 0

    def commit(thread):
        """Record the thread's separation choices and enqueue its
        elimination obligations.  The thread must honor current choices."""
        nonlocal steps
        committed.append(thread)
        cur = trie
        for pos, nid in enumerate(thread):
            cur = cur.children[nid]
            cur.committed = True
            node = flat.nodes[nid]
            if pos + 1 >= len(thread):
                break
            succ = thread[pos + 1]
            if node.rule == SEP:
                choices.setdefault(nid, succ)
            elif node.rule == IMP_ELIM:
                for w in node.premises:
                    if w != succ:
                        agenda.append((cur.children.get(w),
                                       thread[:pos + 1] + (w,)))

    agenda = []
    if elim_nodes:
        seed_node = elim_nodes[0]
        seed = next((th for th in threads if seed_node in th), None)
        if seed is None:
            return None
    else:
        seed = threads[0]
    commit(seed)
    while agenda:
        steps += len(agenda[-1][1])
        if steps > budget:
            return None
        child, prefix = agenda.pop()
        if child is None:
            return None
        if child.committed:
            continue
        thread = _compatible_thread(child, prefix, flat, choices)
        if thread is None:
            return None
        commit(thread)
    return choices, tuple(committed)


def _formula_bits(flat):
    universe = {n.formula for n in flat.nodes.values()}
    universe |= {n.discharged for n in flat.nodes.values()
                 if n.discharged is not None}
    distinct = sorted(universe, key=lambda f: f.sort_key())
    return {f: 1 << i for i, f in enumerate(distinct)}


def _escape_masks(flat, bits):
    """Per node, the set (as bitmask) of formulas that can reach the root
    from it along some parent chain without being discharged on the way.
    Separation parents are treated as passable (a safe over-approximation)."""
    levels = flat.levels()
    order = sorted(flat.nodes, key=lambda nid: (levels[nid], nid))
    full = (1 << len(bits)) - 1
    escape = {nid: 0 for nid in flat.nodes}
    escape[flat.root] = full
    for nid in order:
        node = flat.nodes[nid]
        mask = escape[nid]
        if node.rule == IMP_INTRO:
            mask &= ~bits[node.discharged]
        for p in node.premises:
            escape[p] |= mask
    return escape


def _assumption_masks_order(flat):
    levels = flat.levels()
    return sorted(flat.nodes, key=lambda nid: (-levels[nid], nid))


def _masks_for_choices(flat, bits, order, choices):
    """Assumption sets as bitmasks under a (possibly partial) choice map;
    unchosen separations fall back to their first premise."""
    masks = {}
    for nid in order:
        node = flat.nodes[nid]
        if node.rule == LEAF:
            masks[nid] = bits[node.formula]
        elif node.rule == REP:
            masks[nid] = masks[node.premises[0]]
        elif node.rule == SEP:
            masks[nid] = masks[choices.get(nid, node.premises[0])]
        elif node.rule == IMP_INTRO:
            masks[nid] = masks[node.premises[0]] & ~bits[node.discharged]
        else:
            masks[nid] = masks[node.premises[0]] | masks[node.premises[1]]
    return masks


def _greedy_choices(flat):
    """Pick per separation node the premise whose assumption set leaks the
    fewest undischargeable formulas toward the root (ties: smaller set, then
    premise order).  One bottom-up pass; returns (choices, root mask)."""
    bits = _formula_bits(flat)
    escape = _escape_masks(flat, bits)
    order = _assumption_masks_order(flat)
    masks = {}
    choices = {}
    for nid in order:
        node = flat.nodes[nid]
        if node.rule == LEAF:
            masks[nid] = bits[node.formula]
        elif node.rule == REP:
            masks[nid] = masks[node.premises[0]]
        elif node.rule == IMP_INTRO:
            masks[nid] = masks[node.premises[0]] & ~bits[node.discharged]
        elif node.rule == IMP_ELIM:
            masks[nid] = masks[node.premises[0]] | masks[node.premises[1]]
        else:
            best = None
            for i, p in enumerate(node.premises):
                m = masks[p]
                score = ((m & escape[nid]).bit_count(), m.bit_count(), i)
                if best is None or score < best[0]:
                    best = (score, p, m)
            choices[nid] = best[1]
            masks[nid] = best[2]
    return choices, masks[flat.root]


def _flow_expressions(flat, order):
    """Per distinct leaf formula, a constant-folded expression for 'the
    formula survives to the root assumption set', over the separation
    choices.  Expression forms: 0, 1, ('or', a, b), ('sel', sep_id, values).
    Returns the non-constant expressions (constraints that must become 0) or
    None when some formula leaks under every choice."""
    leaf_formulas = sorted(
        {n.formula for n in flat.nodes.values() if n.rule == LEAF},
        key=lambda f: f.sort_key())
    roots = []
    for delta in leaf_formulas:
        val = {}
        for nid in order:
            node = flat.nodes[nid]
            r = node.rule
            if r == LEAF:
                val[nid] = 1 if node.formula == delta else 0
            elif r == REP:
                val[nid] = val[node.premises[0]]
            elif r == IMP_INTRO:
                val[nid] = 0 if node.discharged == delta \
                    else val[node.premises[0]]
            elif r == IMP_ELIM:
                a, b = val[node.premises[0]], val[node.premises[1]]
                if a == 1 or b == 1:
                    val[nid] = 1
                elif a == 0:
                    val[nid] = b
                elif b == 0:
                    val[nid] = a
                elif a is b:
                    val[nid] = a
                else:
                    val[nid] = ("or", a, b)
            else:
                vals = tuple(val[p] for p in node.premises)
                if all(v is vals[0] for v in vals):
                    val[nid] = vals[0]
                else:
                    val[nid] = ("sel", nid, vals)
        e = val[flat.root]
        if e == 1:
            return None
        if e != 0:
            roots.append(e)
    return roots


def _eval_flow(e, assignment, cache):
    """Three-valued evaluation under a partial choice assignment: 0 and 1 are
    definite under every completion, None is undetermined."""
    if not isinstance(e, tuple):
        return e
    k = id(e)
    if k in cache:
        return cache[k]
    if e[0] == "or":
        a = _eval_flow(e[1], assignment, cache)
        if a == 1:
            r = 1
        else:
            b = _eval_flow(e[2], assignment, cache)
            r = 1 if b == 1 else (0 if (a == 0 and b == 0) else None)
    else:
        chosen = assignment.get(e[1])
        if chosen is not None:
            r = _eval_flow(e[2][chosen], assignment, cache)
        else:
            rs = [_eval_flow(v, assignment, cache) for v in e[2]]
            if all(x == 1 for x in rs):
                r = 1
            elif all(x == 0 for x in rs):
                r = 0
            else:
                r = None
    cache[k] = r
    return r


def _flow_vars(e, counts, seen):
    if not isinstance(e, tuple) or id(e) in seen:
        return
    seen.add(id(e))
    if e[0] == "or":
        _flow_vars(e[1], counts, seen)
        _flow_vars(e[2], counts, seen)
    else:
        counts[e[1]] = counts.get(e[1], 0) + 1
        for v in e[2]:
            _flow_vars(v, counts, seen)


def _search_choices(flat, budget=500000):
    """Complete search for separation choices emptying the root assumption
    set: per-formula survival constraints with constant folding, depth-first
    over the choice variables with definite-value propagation.

    Returns a full choice map, None when provably no selection exists, or
    raises CleansingError when the step budget runs out undecided.
    """
    order = _assumption_masks_order(flat)
    roots = _flow_expressions(flat, order)
    if roots is None:
        return None
    greedy, _ = _greedy_choices(flat)
    prem_index = {nid: {p: i for i, p in enumerate(n.premises)}
                  for nid, n in flat.nodes.items() if n.rule == SEP}
    steps = [0]

    def dfs(assignment):
        steps[0] += 1
        if steps[0] > budget:
            raise CleansingError(
                f"choice search budget {budget} exhausted undecided")
        cache = {}
        undetermined = []
        for e in roots:
            r = _eval_flow(e, assignment, cache)
            if r == 1:
                return None
            if r is None:
                undetermined.append(e)
        if not undetermined:
            return dict(assignment)
        counts = {}
        seen = set()
        for e in undetermined:
            _flow_vars(e, counts, seen)
        free = [u for u in counts if u not in assignment]
        target = max(free, key=lambda u: (counts[u], -u))
        indices = list(range(len(flat.nodes[target].premises)))
        preferred = greedy.get(target)
        if preferred is not None:
            pi = prem_index[target][preferred]
            indices.remove(pi)
            indices.insert(0, pi)
        for i in indices:
            assignment[target] = i
            result = dfs(assignment)
            if result is not None:
                return result
            del assignment[target]
        return None

    solution = dfs({})
    if solution is None:
        return None
    choices = dict(greedy)
    for nid, i in solution.items():
        choices[nid] = flat.nodes[nid].premises[i]
    return choices


def _build_star(flat, choices):
    keep = set()
    stack = [flat.root]
    while stack:
        nid = stack.pop()
        if nid in keep:
            continue
        keep.add(nid)
        node = flat.nodes[nid]
        if node.rule == SEP:
            if nid not in choices:
                raise CleansingError(
                    f"reachable separation node {nid} has no committed choice")
            stack.append(choices[nid])
        else:
            stack.extend(node.premises)
    star_nodes = {}
    for nid in keep:
        node = flat.nodes[nid]
        if node.rule == SEP:
            star_nodes[nid] = Node(nid, node.formula, REP, (choices[nid],))
        else:
            star_nodes[nid] = Node(nid, node.formula, node.rule,
                                   node.premises, node.discharged)
    return Deduction(star_nodes, flat.root)


def cleanse(flat, fst, trace=None):
    """Commit one premise per separation node, relabel the survivors as
    repetitions, and drop the unreachable remainder.

    The committed choices are taken from the fundamental threads when a
    consistent thread family exists (the guided selection); otherwise they
    are recovered directly from the assumption-set dataflow (greedy, then a
    bounded search), which the threads do not constrain.  The result is a
    separation-free, locally correct sub-deduction proving the root formula.
    Refuses to run when local coherency fails.
    """
    report = verify_local_coherency(flat, fst)
    if not report.ok:
        raise CoherencyError(
            f"local coherency fails: {report.violations[0]}")
    kept = ()
    method = "threads"
    selected = _select_threads(flat, fst)
    if selected is not None:
        choices, kept = selected
    else:
        method = "greedy"
        choices, root_mask = _greedy_choices(flat)
        if root_mask != 0:
            method = "search"
            choices = _search_choices(flat)
            if choices is None:
                raise CleansingError(
                    "provably no premise selection cleanses this deduction: "
                    "every choice map leaks some assumption to the root")
    star = _build_star(flat, choices)
    if not nd.check_local_correctness(star).ok:
        raise CleansingError("cleansed deduction is locally incorrect")
    if not nd.proves(star):
        raise CleansingError("cleansed deduction fails certification")
    if trace is not None:
        trace.star = star
        trace.choices = dict(choices)
        trace.kept_threads = kept
        trace.verdicts["cleanse_method"] = method
    return star


def compress_proof(t, thread_cap=DEFAULT_THREAD_CAP):
    """Full pipeline on a tree proof; asserts the stage bounds and the final
    certificate, and returns the CompressionTrace."""
    _require_tree_input(t, need_proof=True)
    trace = CompressionTrace(t)
    prime, trace = compress_levels(t, trace)
    flat = insert_separation(prime, trace)
    flat_report = nd.check_local_correctness(flat)
    if not flat_report.ok:
        raise CompressError(
            f"separated deduction locally incorrect: {flat_report.violations[0]}")
    fst = extract_fst(t, trace, cap=thread_cap)
    star = cleanse(flat, fst, trace)
    m_tree = nd.measures(t)
    m_prime = nd.measures(prime)
    m_flat = nd.measures(flat)
    m_star = nd.measures(star)
    trace.measures = {"tree": m_tree, "prime": m_prime,
                      "flat": m_flat, "star": m_star}
    trace.bounds = {
        "h": m_tree.height,
        "phi": m_tree.phi,
        "w_tree": m_tree.weight,
        "w_prime": m_prime.weight,
        "w_flat": m_flat.weight,
        "w_star": m_star.weight,
    }
    if m_prime.weight > m_tree.height * m_tree.phi:
        raise BoundViolation(
            f"|d'| = {m_prime.weight} exceeds h*phi = "
            f"{m_tree.height * m_tree.phi}")
    if m_flat.weight > 2 * m_prime.weight:
        raise BoundViolation(
            f"|d_flat| = {m_flat.weight} exceeds 2|d'| = {2 * m_prime.weight}")
    star_proved = nd.proves(star)
    trace.verdicts.update({
        "tree_proved": True,
        "flat_locally_correct": True,
        "coherent": True,
        "star_proved": star_proved,
        "flat_certified": not nd.evaluate_with_choices(flat, trace.choices),
        "star_subset_of_flat": set(star.nodes) <= set(flat.nodes),
    })
    if not star_proved:
        raise CleansingError("pipeline output fails certification")
    return trace
