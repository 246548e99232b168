"""A practical regular-expression subset compiled to byte-alphabet automata.

Supported syntax: literals, ``.``, character classes with ranges and a
leading ``^`` negation, grouping, alternation, ``*``/``+``/``?`` and bounded
repetition ``{m}``/``{m,}``/``{m,n}``, plus the usual escapes. Patterns
denote whole words; there is no unanchored-search semantics. Compilation
goes through union/concatenation of fragments with epsilon back-edges for
the iterations, followed by epsilon elimination and trimming.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

from .core import EPSILON, AutomataError, Nfa
from .algorithms import concatenate_inplace, remove_epsilon, trim, union_inplace

#: Bounded repetition is expanded by copying; larger bounds are refused.
MAX_REPEAT = 64

ALL_BYTES = frozenset(range(256))
_DIGITS = frozenset(ord(c) for c in string.digits)
_WORD = frozenset(ord(c) for c in string.ascii_letters + string.digits + "_")
_SPACE = frozenset(ord(c) for c in " \t\n\r\f\v")


class RegexError(AutomataError):
    """A pattern syntax error with its position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Literal:
    byte: int


@dataclass(frozen=True)
class CharClass:
    bytes_: frozenset
    negated: bool

    def resolve(self) -> frozenset:
        return ALL_BYTES - self.bytes_ if self.negated else self.bytes_


@dataclass(frozen=True)
class Concat:
    parts: tuple


@dataclass(frozen=True)
class Alternation:
    options: tuple


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Plus:
    inner: object


@dataclass(frozen=True)
class Optional:
    inner: object


@dataclass(frozen=True)
class Repeat:
    inner: object
    min: int
    max: int | None


@dataclass(frozen=True)
class Empty:
    pass


_ESCAPES = {
    "\\": Literal(ord("\\")),
    ".": Literal(ord(".")),
    "*": Literal(ord("*")),
    "+": Literal(ord("+")),
    "?": Literal(ord("?")),
    "(": Literal(ord("(")),
    ")": Literal(ord(")")),
    "[": Literal(ord("[")),
    "]": Literal(ord("]")),
    "{": Literal(ord("{")),
    "}": Literal(ord("}")),
    "|": Literal(ord("|")),
    "n": Literal(ord("\n")),
    "t": Literal(ord("\t")),
    "d": CharClass(_DIGITS, False),
    "w": CharClass(_WORD, False),
    "s": CharClass(_SPACE, False),
}

# escapes usable inside a character class, resolved to byte sets
_CLASS_ESCAPES = {
    "\\": frozenset({ord("\\")}),
    "]": frozenset({ord("]")}),
    "[": frozenset({ord("[")}),
    "-": frozenset({ord("-")}),
    "^": frozenset({ord("^")}),
    "n": frozenset({ord("\n")}),
    "t": frozenset({ord("\t")}),
    "d": _DIGITS,
    "w": _WORD,
    "s": _SPACE,
}


class _Parser:
    def __init__(self, pattern: str):
        self.pattern = pattern
        self.pos = 0

    def error(self, message: str, pos: int | None = None):
        raise RegexError(message, self.pos if pos is None else pos)

    def peek(self) -> str | None:
        return self.pattern[self.pos] if self.pos < len(self.pattern) else None

    def take(self) -> str:
        c = self.pattern[self.pos]
        self.pos += 1
        return c

    def parse(self):
        node = self.alternation()
        if self.pos != len(self.pattern):
            self.error(f"unexpected {self.pattern[self.pos]!r}")
        return node

    def alternation(self):
        options = [self.concat()]
        while self.peek() == "|":
            self.take()
            options.append(self.concat())
        if len(options) == 1:
            return options[0]
        return Alternation(tuple(options))

    def concat(self):
        parts = []
        while self.peek() is not None and self.peek() not in "|)":
            parts.append(self.repetition())
        if not parts:
            return Empty()
        if len(parts) == 1:
            return parts[0]
        return Concat(tuple(parts))

    def repetition(self):
        node = self.atom()
        while True:
            c = self.peek()
            if c == "*":
                self.take()
                node = Star(node)
            elif c == "+":
                self.take()
                node = Plus(node)
            elif c == "?":
                self.take()
                node = Optional(node)
            elif c == "{":
                node = self.bounds(node)
            else:
                return node

    def bounds(self, node):
        start = self.pos
        self.take()  # '{'
        lo = self.number("repetition count expected")
        hi: int | None = lo
        if self.peek() == ",":
            self.take()
            hi = self.number(None) if (self.peek() or "").isdigit() else None
        if self.peek() != "}":
            self.error("expected '}'", start)
        self.take()
        if hi is not None and lo > hi:
            self.error(f"bad repetition bounds {{{lo},{hi}}}", start)
        bound = lo if hi is None else hi
        if bound > MAX_REPEAT:
            self.error(f"repetition bound over {MAX_REPEAT}", start)
        return Repeat(node, lo, hi)

    def number(self, missing_message) -> int:
        digits = ""
        while (self.peek() or "").isdigit():
            digits += self.take()
        if not digits:
            self.error(missing_message or "number expected")
        return int(digits)

    def atom(self):
        c = self.peek()
        if c is None:
            self.error("pattern ended unexpectedly")
        if c in "*+?":
            self.error("dangling quantifier")
        if c == "{":
            self.error("dangling repetition bounds")
        if c == "(":
            open_pos = self.pos
            self.take()
            node = self.alternation()
            if self.peek() != ")":
                self.error("unbalanced '('", open_pos)
            self.take()
            return node
        if c == ")":
            self.error("unbalanced ')'")
        if c == "[":
            return self.char_class()
        if c == "]":
            self.error("unbalanced ']'")
        if c == ".":
            self.take()
            return CharClass(frozenset({ord("\n")}), True)
        if c == "\\":
            esc_pos = self.pos
            self.take()
            e = self.peek()
            if e is None:
                self.error("trailing backslash", esc_pos)
            self.take()
            node = _ESCAPES.get(e)
            if node is None:
                self.error(f"unknown escape \\{e}", esc_pos)
            return node
        return Literal(ord(self.take()))

    def char_class(self):
        open_pos = self.pos
        self.take()  # '['
        negated = False
        if self.peek() == "^":
            negated = True
            self.take()
        members: set[int] = set()
        first = True
        while True:
            c = self.peek()
            if c is None:
                self.error("unbalanced '['", open_pos)
            if c == "]" and not first:
                self.take()
                break
            first = False
            members |= self.class_item(open_pos)
        node = CharClass(frozenset(members), negated)
        if not node.resolve():
            self.error("empty character class", open_pos)
        return node

    def class_item(self, open_pos: int) -> set[int]:
        c = self.take()
        if c == "\\":
            e = self.peek()
            if e is None:
                self.error("trailing backslash")
            self.take()
            byte_set = _CLASS_ESCAPES.get(e)
            if byte_set is None:
                self.error(f"unknown escape \\{e} in class")
            return set(byte_set)
        lo = ord(c)
        if self.peek() == "-" and self.pos + 1 < len(self.pattern) \
                and self.pattern[self.pos + 1] != "]":
            self.take()  # '-'
            hi_char = self.take()
            if hi_char == "\\":
                self.error("escape not allowed as range end")
            hi = ord(hi_char)
            if lo > hi:
                self.error(f"bad range {chr(lo)}-{chr(hi)}")
            return set(range(lo, hi + 1))
        return {lo}


def parse_regex(pattern: str):
    """Parse a pattern into an AST; raises RegexError with a position."""
    return _Parser(pattern).parse()


def _byte_set_nfa(byte_set) -> Nfa:
    nfa = Nfa(num_states=2, initial=(0,), final=(1,))
    for b in sorted(byte_set):
        nfa.delta.add(0, b, 1)
    return nfa


def _empty_word_nfa() -> Nfa:
    return Nfa(num_states=1, initial=(0,), final=(0,))


def _add_loop_edges(nfa: Nfa) -> None:
    # epsilon back-edges final -> initial turn L into L+
    for f in sorted(nfa.final):
        for i in sorted(nfa.initial):
            nfa.delta.add(f, EPSILON, i)


def _accept_empty_too(nfa: Nfa) -> None:
    s = nfa.add_state()
    nfa.initial.add(s)
    nfa.final.add(s)


def _build(node) -> Nfa:
    if isinstance(node, Empty):
        return _empty_word_nfa()
    if isinstance(node, Literal):
        return _byte_set_nfa({node.byte})
    if isinstance(node, CharClass):
        return _byte_set_nfa(node.resolve())
    if isinstance(node, Concat):
        out = _build(node.parts[0])
        for part in node.parts[1:]:
            concatenate_inplace(out, _build(part))
        return out
    if isinstance(node, Alternation):
        out = _build(node.options[0])
        for option in node.options[1:]:
            union_inplace(out, _build(option))
        return out
    if isinstance(node, Star):
        out = _build(node.inner)
        _add_loop_edges(out)
        _accept_empty_too(out)
        return out
    if isinstance(node, Plus):
        out = _build(node.inner)
        _add_loop_edges(out)
        return out
    if isinstance(node, Optional):
        out = _build(node.inner)
        _accept_empty_too(out)
        return out
    if isinstance(node, Repeat):
        if node.min == 0 and node.max == 0:
            return _empty_word_nfa()
        parts: list = [node.inner] * node.min
        if node.max is None:
            parts.append(Star(node.inner))
        else:
            parts.extend([Optional(node.inner)] * (node.max - node.min))
        if not parts:
            return _empty_word_nfa()
        return _build(Concat(tuple(parts)) if len(parts) > 1 else parts[0])
    raise AutomataError(f"unknown regex node {node!r}")


def compile_regex(ast) -> Nfa:
    """Compile an AST (or a pattern string) into an epsilon-free automaton
    over byte symbols 0..255 accepting exactly the denoted words."""
    if isinstance(ast, str):
        ast = parse_regex(ast)
    nfa = _build(ast)
    nfa, _ = trim(remove_epsilon(nfa))
    return nfa
