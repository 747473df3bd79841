"""Propositional syntax: formulas, sequents, directed graphs, parsing and printing."""

import json
import re

__all__ = [
    "Formula", "Var", "Falsum", "Imp", "And", "Or",
    "ParseError", "parse_formula", "to_text", "weight", "subformulas",
    "purely_implicational", "variables_of",
    "Sequent", "DiGraph", "GraphFormatError", "parse_graph",
]


class Formula:
    """Base class; subclasses are immutable and compare structurally."""

    __slots__ = ("_hash", "_text")

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return to_text(self)

    def __hash__(self):
        return self._hash

    def sort_key(self):
        return (weight(self), to_text(self))


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name
        self._hash = hash(("var", name))
        self._text = None

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        return type(other) is Var and other.name == self.name


class _FalsumType(Formula):
    __slots__ = ()

    def __init__(self):
        self._hash = hash("falsum")
        self._text = "false"

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        return type(other) is _FalsumType


Falsum = _FalsumType()


class _Binary(Formula):
    __slots__ = ("left", "right")
    _tag = "?"

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self._hash = hash((self._tag, left._hash, right._hash))
        self._text = None

    __hash__ = Formula.__hash__

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or other._hash != self._hash:
            return False
        return other.left == self.left and other.right == self.right


class Imp(_Binary):
    __slots__ = ()
    _tag = "imp"


class And(_Binary):
    __slots__ = ()
    _tag = "and"


class Or(_Binary):
    __slots__ = ()
    _tag = "or"


# Precedence: And binds tightest, then Or, then Imp.  Imp is right-associative,
# And/Or left-associative; the printer emits minimal parentheses and round-trips
# through parse_formula.
_PREC = {Imp: 1, Or: 2, And: 3}


def to_text(f):
    """Render a formula in the concrete grammar."""
    if f._text is not None:
        return f._text
    # iterative rendering; recursion depth would track formula depth otherwise
    out = []
    work = [(f, 1)]
    while work:
        entry = work.pop()
        if isinstance(entry, str):
            out.append(entry)
            continue
        item, min_prec = entry
        if type(item) is Var:
            out.append(item.name)
            continue
        if type(item) is _FalsumType:
            out.append("false")
            continue
        prec = _PREC[type(item)]
        if type(item) is Imp:
            pieces = [(item.left, 2), "->", (item.right, 1)]
        elif type(item) is Or:
            pieces = [(item.left, 2), " | ", (item.right, 3)]
        else:
            pieces = [(item.left, 3), " & ", (item.right, 4)]
        if prec < min_prec:
            pieces = ["("] + pieces + [")"]
        for piece in reversed(pieces):
            work.append(piece)
    text = "".join(out)
    f._text = text
    return text


def weight(f):
    """Symbol count: one per variable, falsum, and connective occurrence."""
    total = 0
    stack = [f]
    while stack:
        g = stack.pop()
        total += 1
        if isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)
    return total


def subformulas(f):
    """All subformulas of f, including f itself, as a set."""
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        if isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)
    return seen


def purely_implicational(f):
    """True iff f is built from variables and '->' only."""
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is Imp:
            stack.append(g.left)
            stack.append(g.right)
        elif type(g) is not Var:
            return False
    return True


def variables_of(f):
    """Set of variable names occurring in f."""
    names = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is Var:
            names.add(g.name)
        elif isinstance(g, _Binary):
            stack.append(g.left)
            stack.append(g.right)
    return names


class ParseError(ValueError):
    """Syntax error with a character offset into the input."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


_TOKEN = re.compile(r"\s*(->|[&|()]|[A-Za-z_][A-Za-z0-9_]*)")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}",
                             len(text) - len(stripped))
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok, pos = self.next()
        if tok != value:
            raise ParseError(f"expected {value!r}", pos)

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.next()
            return Imp(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.next()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.atom()
        while self.peek() == "&":
            self.next()
            left = And(left, self.atom())
        return left

    def atom(self):
        tok, pos = self.next()
        if tok == "(":
            inner = self.imp()
            self.expect(")")
            return inner
        if tok == "false":
            return Falsum
        if tok is not None and tok not in ("->", "&", "|", ")"):
            return Var(tok)
        raise ParseError("expected a formula", pos)


def parse_formula(text):
    """Parse the concrete grammar; raises ParseError on malformed input."""
    parser = _Parser(_tokenize(text))
    f = parser.imp()
    tok, pos = parser.next()
    if tok is not None:
        raise ParseError(f"unexpected trailing input {tok!r}", pos)
    return f


class Sequent:
    """Antecedent multiset and a succedent formula.

    The antecedent is stored sorted, so equality and hashing are
    order-insensitive but multiplicity-sensitive.
    """

    __slots__ = ("antecedent", "succedent", "_hash")

    def __init__(self, antecedent, succedent):
        self.antecedent = tuple(sorted(antecedent, key=Formula.sort_key))
        self.succedent = succedent
        self._hash = hash((self.antecedent, succedent))

    def __eq__(self, other):
        return (isinstance(other, Sequent)
                and self._hash == other._hash
                and self.succedent == other.succedent
                and self.antecedent == other.antecedent)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        gamma = ", ".join(to_text(a) for a in self.antecedent)
        return f"{gamma} => {to_text(self.succedent)}" if gamma \
            else f"=> {to_text(self.succedent)}"

    def weight(self):
        return weight(self.succedent) + sum(weight(a) for a in self.antecedent)


class GraphFormatError(ValueError):
    pass


class DiGraph:
    """Simple directed graph on vertices 0..n-1; no self-loops, no multi-edges."""

    __slots__ = ("n", "edges")

    def __init__(self, n, edges):
        if n < 0:
            raise GraphFormatError("vertex count must be nonnegative")
        seen = set()
        for (u, v) in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop ({u},{v}) not allowed")
            if (u, v) in seen:
                raise GraphFormatError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        self.n = n
        self.edges = frozenset(seen)

    def __eq__(self, other):
        return (isinstance(other, DiGraph) and self.n == other.n
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        edges = sorted(self.edges)
        return f"DiGraph(n={self.n}, edges={edges})"

    def to_document(self):
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}


def parse_graph(text):
    """Parse a graph: either the line format ('n', then 'u v' lines) or a JSON
    document {"n": int, "edges": [[u, v], ...]}."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as e:
            raise GraphFormatError(f"bad JSON graph document: {e}") from None
        if not isinstance(doc, dict) or "n" not in doc:
            raise GraphFormatError("graph document must carry 'n'")
        edges = doc.get("edges", [])
        pairs = []
        for e in edges:
            if not (isinstance(e, (list, tuple)) and len(e) == 2):
                raise GraphFormatError(f"bad edge entry {e!r}")
            pairs.append((int(e[0]), int(e[1])))
        return DiGraph(int(doc["n"]), pairs)
    lines = [ln.strip() for ln in stripped.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty graph input")
    try:
        n = int(lines[0])
    except ValueError:
        raise GraphFormatError(f"bad vertex count line {lines[0]!r}") from None
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"bad edge line {ln!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphFormatError(f"bad edge line {ln!r}") from None
    return DiGraph(n, pairs)
