"""Recursive-descent parser for the concrete syntax of IE.

Grammar, loosest binding first::

    formula := iff
    iff     := impl ("<->" impl)*
    impl    := or ("->" impl)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "!" unary | modal | atom
    modal   := ("K" | "B") "[" ident "]" unary
             | ("CK" | "CB") "[" group "]" unary
    group   := "all" | ident | "{" ident ("," ident)* "}"
    atom    := "(" formula ")" | term cmp term
    cmp     := "<=" | "=" | "!=" | "<" | ">=" | ">"
    term    := number | "now" | ident | ident "(" term ("," term)* ")"

A bare identifier is a declared constant or a process read at ``now``.
"""

import re
from dataclasses import dataclass

from belieflang.errors import FormulaError, ParseError
from belieflang.lang import (
    And,
    Believes,
    CommonBelief,
    CommonKnowledge,
    Compare,
    ConstReal,
    Declarations,
    Formula,
    FuncApp,
    Iff,
    Implies,
    Knows,
    Leq,
    Not,
    Now,
    Or,
    ProcApp,
    Term,
    desugar,
)

_TOKEN = re.compile(
    r"""
    (?P<space>\s+)
    |(?P<number>-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<op><->|->|<=|>=|!=|[<>=!&|()\[\]{},])
    """,
    re.VERBOSE,
)

_COMPARISONS = ("<=", "=", "!=", "<", ">=", ">")
_MODALS = ("K", "B", "CK", "CB")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(source: str) -> list[Token]:
    if not source.isascii():
        position = next(i for i, c in enumerate(source) if not c.isascii())
        raise ParseError("only ASCII input is supported", position)
    tokens = []
    position = 0
    while position < len(source):
        match = _TOKEN.match(source, position)
        if match is None:
            raise ParseError(
                f"unexpected character {source[position]!r}", position
            )
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, decls: Declarations):
        self.tokens = tokenize(source)
        self.index = 0
        self.decls = decls

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != "end":
            self.index += 1
        return token

    def at(self, text: str) -> bool:
        return self.current.kind == "op" and self.current.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def error(self, message: str) -> ParseError:
        token = self.current
        found = "end of input" if token.kind == "end" else repr(token.text)
        return ParseError(f"{message}, found {found}", token.position)

    def finish(self) -> None:
        if self.current.kind != "end":
            raise self.error("unexpected trailing input")

    def formula(self) -> Formula:
        left = self.implication()
        while self.accept("<->"):
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.accept("|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        token = self.current
        if (
            token.kind == "ident"
            and token.text in _MODALS
            and self.peek().text == "["
        ):
            return self.modal()
        return self.atom()

    def modal(self) -> Formula:
        operator = self.advance().text
        self.expect("[")
        if operator in ("K", "B"):
            agent = self.agent()
            self.expect("]")
            body = self.unary()
            if operator == "K":
                return Knows(agent, body)
            return Believes(agent, body)
        group = self.group()
        self.expect("]")
        body = self.unary()
        if operator == "CK":
            return CommonKnowledge(group, body)
        return CommonBelief(group, body)

    def agent(self) -> str:
        token = self.current
        if token.kind != "ident":
            raise self.error("expected an agent")
        if token.text not in self.decls.agents:
            raise FormulaError(
                f"unknown agent {token.text!r} at position {token.position}"
            )
        self.advance()
        return token.text

    def group(self) -> tuple[str, ...]:
        if self.current.kind == "ident" and self.current.text == "all":
            self.advance()
            return tuple(sorted(self.decls.agents))
        if not self.accept("{"):
            return (self.agent(),)
        if self.at("}"):
            raise FormulaError(
                f"empty group at position {self.current.position}"
            )
        members = [self.agent()]
        while self.accept(","):
            members.append(self.agent())
        self.expect("}")
        return tuple(sorted(set(members)))

    def atom(self) -> Formula:
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        left = self.term()
        token = self.current
        if token.kind != "op" or token.text not in _COMPARISONS:
            raise self.error("expected a comparison")
        self.advance()
        right = self.term()
        if token.text == "<=":
            return Leq(left, right)
        return Compare(token.text, left, right)

    def term(self) -> Term:
        token = self.current
        if token.kind == "number":
            self.advance()
            return ConstReal(float(token.text))
        if token.kind != "ident":
            raise self.error("expected a term")
        self.advance()
        name = token.text
        if name == "now":
            return Now()
        if not self.at("("):
            return self.bare_name(token)
        self.advance()
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        self.expect(")")
        if name in self.decls.processes:
            if len(args) != 1:
                raise FormulaError(
                    f"process {name!r} takes one argument, got {len(args)} "
                    f"at position {token.position}"
                )
            return ProcApp(name, args[0])
        if name in self.decls.functions:
            arity = self.decls.functions[name].arity
            if len(args) != arity:
                raise FormulaError(
                    f"function {name!r} takes {arity} arguments, got "
                    f"{len(args)} at position {token.position}"
                )
            return FuncApp(name, tuple(args))
        raise FormulaError(
            f"unknown identifier {name!r} at position {token.position}"
        )

    def bare_name(self, token: Token) -> Term:
        name = token.text
        if name in self.decls.constants:
            return ConstReal(float(self.decls.constants[name]))
        if name in self.decls.processes:
            return ProcApp(name, Now())
        raise FormulaError(
            f"unknown identifier {name!r} at position {token.position}"
        )


def parse_formula(
    text: str, decls: Declarations, *, sugar: bool = False
) -> Formula:
    """Parse ``text`` into a formula over ``decls``.

    The result is desugared unless ``sugar`` is set, in which case the
    surface connectives are kept.

    Raises:
        ParseError: On a syntax error, with its character position.
        FormulaError: On an unknown name, an arity mismatch or an empty
            group.
    """
    parser = _Parser(text, decls)
    phi = parser.formula()
    parser.finish()
    return phi if sugar else desugar(phi)


def parse_term(text: str, decls: Declarations) -> Term:
    parser = _Parser(text, decls)
    term = parser.term()
    parser.finish()
    return term
