"""The .mata text format, boolean-formula alphabets, and DOT export.

A .mata file is line oriented: ``#`` starts a comment, ``@NAME`` opens an
automaton definition, ``%KEY tok…`` lines set traits such as initial and
final states, and the remaining lines are transitions. Explicit transitions
are ``SRC SYMBOL DST``; bit-vector transitions carry a boolean formula over
atomic propositions between the source and target tokens. Symbolic
automata are turned into explicit ones by mintermization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .core import EPSILON, Alphabet, AutomataError, Nfa

#: Truth-table mintermization bound.
MAX_MINTERM_ATOMS = 24

# reserved transition tokens that round-trip epsilon-like symbols
_EPS_TOKEN = re.compile(r"<eps(?:-(\d+))?>$")


class FormatError(AutomataError):
    """A .mata or formula syntax error with a location."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}: "
        elif col is not None:
            where = f"position {col}: "
        super().__init__(where + message)
        self.line = line
        self.col = col


class MintermError(AutomataError):
    """Raised when mintermization is out of its truth-table bounds."""


class AutomatonKind(Enum):
    EXPLICIT = "NFA-explicit"
    BITS = "NFA-bits"


@dataclass
class MataAutomaton:
    kind: AutomatonKind
    traits: list[tuple[str, list[str]]] = field(default_factory=list)
    transitions: list[tuple[str, str, str]] = field(default_factory=list)
    line: int = 0

    def trait_values(self, key: str) -> list[str]:
        """Tokens of every trait line with this key, concatenated in order."""
        out: list[str] = []
        for k, values in self.traits:
            if k == key:
                out.extend(values)
        return out


@dataclass
class MataDocument:
    automata: list[MataAutomaton] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.automata)

    def __iter__(self):
        return iter(self.automata)

    def __getitem__(self, i: int) -> MataAutomaton:
        return self.automata[i]


def parse_mata(text: str) -> MataDocument:
    """Parse .mata text into a structured document."""
    doc = MataDocument()
    current: MataAutomaton | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            tokens = line[1:].split()
            if len(tokens) != 1 or not tokens[0]:
                raise FormatError("malformed automaton header", line=lineno)
            try:
                kind = AutomatonKind(tokens[0])
            except ValueError:
                raise FormatError(
                    f"unknown header '@{tokens[0]}'", line=lineno
                ) from None
            current = MataAutomaton(kind, line=lineno)
            doc.automata.append(current)
        elif line.startswith("%"):
            if current is None:
                raise FormatError("trait line before automaton header", line=lineno)
            tokens = line[1:].split()
            if not tokens:
                raise FormatError("empty trait line", line=lineno)
            current.traits.append((tokens[0], tokens[1:]))
        else:
            if current is None:
                raise FormatError("transition before automaton header", line=lineno)
            tokens = line.split()
            if len(tokens) < 3:
                raise FormatError("malformed transition line", line=lineno)
            if current.kind is AutomatonKind.EXPLICIT and len(tokens) != 3:
                raise FormatError(
                    "explicit transition must be 'SRC SYMBOL DST'", line=lineno
                )
            label = " ".join(tokens[1:-1])
            if current.kind is AutomatonKind.BITS:
                try:
                    parse_formula(label)
                except FormatError as err:
                    raise FormatError(
                        f"malformed formula: {err}", line=lineno
                    ) from None
            current.transitions.append((tokens[0], label, tokens[-1]))
    return doc


# ---------------------------------------------------------------------------
# boolean formulas over atomic propositions a0, a1, ...

_ATOM = re.compile(r"a(\d+)")


def _tokenize_formula(text: str):
    tokens: list[tuple[str, object, int]] = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "!&|()":
            tokens.append((c, c, i))
            i += 1
            continue
        m = _ATOM.match(text, i)
        if m:
            tokens.append(("atom", int(m.group(1)), i))
            i = m.end()
            continue
        if text.startswith("true", i):
            tokens.append(("const", True, i))
            i += 4
            continue
        if text.startswith("false", i):
            tokens.append(("const", False, i))
            i += 5
            continue
        raise FormatError(f"unexpected character {c!r} in formula", col=i)
    return tokens


def parse_formula(text: str):
    """Parse a formula into a nested-tuple AST.

    Grammar: ``!`` binds tighter than ``&``, which binds tighter than ``|``;
    atoms are ``a<number>``; constants are ``true``/``false``.
    """
    tokens = _tokenize_formula(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, None, len(text))

    def parse_or():
        nonlocal pos
        node = parse_and()
        while peek()[0] == "|":
            pos += 1
            node = ("or", node, parse_and())
        return node

    def parse_and():
        nonlocal pos
        node = parse_unary()
        while peek()[0] == "&":
            pos += 1
            node = ("and", node, parse_unary())
        return node

    def parse_unary():
        nonlocal pos
        kind, value, col = peek()
        if kind == "!":
            pos += 1
            return ("not", parse_unary())
        if kind == "(":
            pos += 1
            node = parse_or()
            k2, _, c2 = peek()
            if k2 != ")":
                raise FormatError("expected ')'", col=c2)
            pos += 1
            return node
        if kind == "atom":
            pos += 1
            return ("atom", value)
        if kind == "const":
            pos += 1
            return ("const", value)
        raise FormatError("expected an atom, a constant, '!' or '('", col=col)

    node = parse_or()
    if pos != len(tokens):
        raise FormatError("trailing input after formula", col=peek()[2])
    return node


def formula_atoms(ast) -> set[int]:
    kind = ast[0]
    if kind == "atom":
        return {ast[1]}
    if kind == "const":
        return set()
    if kind == "not":
        return formula_atoms(ast[1])
    return formula_atoms(ast[1]) | formula_atoms(ast[2])


def _atom_column(bit: int, num_atoms: int) -> int:
    """Assignment-indexed bitmask of the assignments setting this atom."""
    block = ((1 << (1 << bit)) - 1) << (1 << bit)
    width = 1 << (bit + 1)
    total = 1 << num_atoms
    mask = block
    while width < total:
        mask |= mask << width
        width <<= 1
    return mask


def formula_sat_mask(ast, atom_bits: dict[int, int], num_atoms: int) -> int:
    """Bitmask over all 2^num_atoms assignments that satisfy the formula."""
    full = (1 << (1 << num_atoms)) - 1

    def ev(node) -> int:
        kind = node[0]
        if kind == "atom":
            return _atom_column(atom_bits[node[1]], num_atoms)
        if kind == "const":
            return full if node[1] else 0
        if kind == "not":
            return full & ~ev(node[1])
        if kind == "and":
            return ev(node[1]) & ev(node[2])
        return ev(node[1]) | ev(node[2])

    return ev(ast)


@dataclass(frozen=True)
class Minterm:
    """One cell of the alphabet partition: a set of total assignments."""

    symbol: int
    assignments: int  # bitmask over 2^len(atoms) assignments
    atoms: tuple[str, ...]

    def covers(self, assignment: int) -> bool:
        return bool(self.assignments >> assignment & 1)


@dataclass
class MintermResult:
    """Outcome of a mintermization: the partition and the atom order."""

    atoms: tuple[str, ...]
    atom_bits: dict[int, int]
    minterms: list[Minterm]
    formula_minterms: list[list[int]]  # parallel to the input formulas
    sat_masks: list[int]

    def minterms_for(self, ast) -> list[int]:
        """Minterm symbols implying an arbitrary formula over the same atoms."""
        missing = formula_atoms(ast) - set(self.atom_bits)
        if missing:
            raise MintermError(f"formula uses unknown atom a{min(missing)}")
        mask = formula_sat_mask(ast, self.atom_bits, len(self.atoms))
        return [m.symbol for m in self.minterms if m.assignments & ~mask == 0]


def mintermize(formulas) -> MintermResult:
    """Partition the alphabet of assignments along the given formulas.

    Refines {true} by each formula into its positive and negative parts,
    discarding unsatisfiable cells. Each input formula then maps to exactly
    the minterms implying it.
    """
    asts = [parse_formula(f) if isinstance(f, str) else f for f in formulas]
    if not asts:
        return MintermResult((), {}, [], [], [])
    atom_indices = sorted(set().union(*(formula_atoms(a) for a in asts)))
    if len(atom_indices) > MAX_MINTERM_ATOMS:
        raise MintermError(
            f"{len(atom_indices)} atomic propositions exceed the bound of "
            f"{MAX_MINTERM_ATOMS}; encode the alphabet explicitly"
        )
    num_atoms = len(atom_indices)
    atom_bits = {idx: bit for bit, idx in enumerate(atom_indices)}
    full = (1 << (1 << num_atoms)) - 1
    sats = [formula_sat_mask(a, atom_bits, num_atoms) for a in asts]
    parts = [full]
    for sat in sats:
        refined: list[int] = []
        for p in parts:
            pos = p & sat
            neg = p & ~sat
            if pos:
                refined.append(pos)
            if neg:
                refined.append(neg)
        parts = refined
    parts.sort(key=lambda p: (p & -p).bit_length())
    atoms = tuple(f"a{i}" for i in atom_indices)
    minterms = [Minterm(i, mask, atoms) for i, mask in enumerate(parts)]
    mapping = [
        [m.symbol for m in minterms if m.assignments & ~sat == 0] for sat in sats
    ]
    return MintermResult(atoms, atom_bits, minterms, mapping, sats)


# ---------------------------------------------------------------------------
# conversion between documents and automata


def _epsilon_symbol_of(token: str) -> int | None:
    m = _EPS_TOKEN.match(token)
    if m is None:
        return None
    return EPSILON - (int(m.group(1)) if m.group(1) else 0)


def _intern_states(entry: MataAutomaton, nfa: Nfa):
    """Intern trait states in file order; returns the growing name map."""
    ids: dict[str, int] = {}

    def state(name: str) -> int:
        q = ids.get(name)
        if q is None:
            q = len(ids)
            ids[name] = q
            nfa.delta.grow(q + 1)
        return q

    for key, values in entry.traits:
        if key == "Initial":
            for name in values:
                nfa.initial.add(state(name))
        elif key == "Final":
            for name in values:
                nfa.final.add(state(name))
    return state, ids


def to_nfa_explicit(
    entry: MataAutomaton,
    alphabet: Alphabet,
    state_names: dict | None = None,
) -> Nfa:
    """Realize an explicit-alphabet definition over the given alphabet.

    State names are interned to dense integers in first-appearance order
    (trait lines first); symbol names are interned through ``alphabet``.
    When supplied, ``state_names`` is filled with the name-to-state map.
    """
    if entry.kind is not AutomatonKind.EXPLICIT:
        raise FormatError("expected an explicit-alphabet automaton", line=entry.line)
    nfa = Nfa(alphabet=alphabet)
    state, ids = _intern_states(entry, nfa)
    for src, label, dst in entry.transitions:
        eps = _epsilon_symbol_of(label)
        if eps is not None:
            nfa.num_epsilons = max(nfa.num_epsilons, EPSILON - eps + 1)
            symbol = eps
        else:
            symbol = alphabet.translate(label)
        nfa.delta.add(state(src), symbol, state(dst))
    if state_names is not None:
        state_names.update(ids)
    return nfa


def to_nfa_bits(
    entry: MataAutomaton,
    shared: MintermResult | None = None,
    state_names: dict | None = None,
):
    """Mintermize a symbolic definition into an explicit automaton.

    Each formula-labelled transition expands into one transition per minterm
    implying the formula. Returns ``(nfa, minterm_result)``; pass ``shared``
    to expand against a mintermization computed over a larger formula set.
    """
    if entry.kind is not AutomatonKind.BITS:
        raise FormatError("expected a bit-vector automaton", line=entry.line)
    labels: list[str] = []
    seen: dict[str, int] = {}
    for _, label, _ in entry.transitions:
        if label not in seen:
            seen[label] = len(labels)
            labels.append(label)
    result = shared if shared is not None else mintermize(labels)
    if shared is None:
        expansion = {label: result.formula_minterms[i] for label, i in seen.items()}
    else:
        expansion = {label: result.minterms_for(parse_formula(label)) for label in labels}
    nfa = Nfa()
    state, ids = _intern_states(entry, nfa)
    for src, label, dst in entry.transitions:
        sq, dq = state(src), state(dst)
        for symbol in expansion[label]:
            nfa.delta.add(sq, symbol, dq)
    alphabet = Alphabet()
    for m in result.minterms:
        alphabet.translate(f"m{m.symbol}")
    nfa.alphabet = alphabet
    if state_names is not None:
        state_names.update(ids)
    return nfa, result


def _symbol_token(symbol: int, nfa: Nfa, alphabet: Alphabet | None) -> str:
    if symbol in nfa.epsilon_symbols():
        k = EPSILON - symbol
        return "<eps>" if k == 0 else f"<eps-{k}>"
    if alphabet is not None and alphabet.has_symbol(symbol):
        return alphabet.name_of(symbol)
    return f"a{symbol}"


def serialize_mata(nfa: Nfa, alphabet: Alphabet | None = None) -> str:
    """Emit an explicit-alphabet definition with deterministic ordering."""
    if alphabet is None:
        alphabet = nfa.alphabet
    lines = ["@NFA-explicit"]
    if len(nfa.initial):
        lines.append("%Initial " + " ".join(f"q{q}" for q in sorted(nfa.initial)))
    if len(nfa.final):
        lines.append("%Final " + " ".join(f"q{q}" for q in sorted(nfa.final)))
    for s, a, t in nfa.transitions():
        lines.append(f"q{s} {_symbol_token(a, nfa, alphabet)} q{t}")
    return "\n".join(lines) + "\n"


def _dot_escape(name: str) -> str:
    return name.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(nfa: Nfa, alphabet: Alphabet | None = None) -> str:
    """Render as a DOT digraph: point-node arrows mark initial states, final
    states are double-circled, and edges carry symbol names."""
    if alphabet is None:
        alphabet = nfa.alphabet
    lines = ["digraph nfa {", "  rankdir=LR;"]
    n = nfa.num_states()
    for q in range(n):
        shape = "doublecircle" if q in nfa.final else "circle"
        lines.append(f"  q{q} [shape={shape}];")
    for i, q in enumerate(sorted(nfa.initial)):
        lines.append(f"  i{i} [shape=point];")
        lines.append(f"  i{i} -> q{q};")
    for s, a, t in nfa.transitions():
        if a in nfa.epsilon_symbols():
            label = "eps" if a == EPSILON else f"eps-{EPSILON - a}"
        elif alphabet is not None and alphabet.has_symbol(a):
            label = _dot_escape(alphabet.name_of(a))
        else:
            label = f"a{a}"
        lines.append(f'  q{s} -> q{t} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
