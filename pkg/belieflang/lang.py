"""Abstract syntax of IE formulae and terms.

Terms denote real-valued processes, formulae denote [0, 1]-valued truth
processes. The core constructors are ``Leq``, ``Not``, ``And`` and the
four modalities; ``Compare``, ``Or``, ``Implies`` and ``Iff`` are sugar
that `desugar` rewrites into the core.
"""

import operator
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Literal, Self

import numpy as np
from inflection import underscore
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from belieflang.errors import FormulaError


@dataclass(frozen=True)
class ConstReal:
    value: float


@dataclass(frozen=True)
class Now:
    pass


@dataclass(frozen=True)
class ProcApp:
    name: str
    arg: "Term"


@dataclass(frozen=True)
class FuncApp:
    name: str
    args: tuple["Term", ...]


Term = ConstReal | Now | ProcApp | FuncApp


@dataclass(frozen=True)
class Leq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Knows:
    agent: str
    body: "Formula"


@dataclass(frozen=True)
class Believes:
    agent: str
    body: "Formula"


@dataclass(frozen=True)
class CommonKnowledge:
    group: tuple[str, ...]
    body: "Formula"


@dataclass(frozen=True)
class CommonBelief:
    group: tuple[str, ...]
    body: "Formula"


CompareOp = Literal["=", "!=", "<", ">=", ">"]


@dataclass(frozen=True)
class Compare:
    op: CompareOp
    left: Term
    right: Term


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = (
    Leq
    | Not
    | And
    | Knows
    | Believes
    | CommonKnowledge
    | CommonBelief
    | Compare
    | Or
    | Implies
    | Iff
)

CORE_FORMULAS = (
    Leq,
    Not,
    And,
    Knows,
    Believes,
    CommonKnowledge,
    CommonBelief,
)

FunctionKind = Literal[
    "add", "sub", "mul", "min", "max", "add_const", "scale"
]

_FIXED_ARITY = {"add_const": 1, "scale": 1, "sub": 2}


class FunctionSpec(BaseModel):
    """A predefined measurable function f: ℝ^k → ℝ."""

    model_config = ConfigDict(frozen=True)

    kind: FunctionKind
    c: float = 0.0
    arity: int = 2

    @model_validator(mode="before")
    @classmethod
    def _normalise(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        kind = data.get("kind")
        if isinstance(kind, str):
            kind = data["kind"] = underscore(kind.replace("-", "_"))
        fixed = _FIXED_ARITY.get(kind)
        if fixed is not None:
            if data.get("arity") not in (None, fixed):
                raise ValueError(f"{kind} takes exactly {fixed} argument(s)")
            data["arity"] = fixed
        elif data.get("arity") is None:
            data["arity"] = 2
        return data

    @field_validator("arity")
    @classmethod
    def _positive(cls, arity: int) -> int:
        if arity < 1:
            raise ValueError("a function needs at least one argument")
        return arity

    def apply(self, *args: np.ndarray) -> np.ndarray:
        if len(args) != self.arity:
            raise FormulaError(
                f"{self.kind} expects {self.arity} arguments, got {len(args)}"
            )
        match self.kind:
            case "add":
                return reduce(np.add, args)
            case "sub":
                return args[0] - args[1]
            case "mul":
                return reduce(np.multiply, args)
            case "min":
                return reduce(np.minimum, args)
            case "max":
                return reduce(np.maximum, args)
            case "add_const":
                return args[0] + self.c
            case "scale":
                return args[0] * self.c
        raise FormulaError(f"unknown function kind {self.kind!r}")

    def apply_exact(self, *args: Fraction) -> Fraction:
        """Apply the function to rationals without rounding.

        Args:
            *args: One rational per argument

        Returns:
            Fraction: The exact result; ``c`` is read as its decimal form
        """
        if len(args) != self.arity:
            raise FormulaError(
                f"{self.kind} expects {self.arity} arguments, got {len(args)}"
            )
        c = Fraction(str(self.c))
        match self.kind:
            case "add":
                return sum(args, Fraction(0))
            case "sub":
                return args[0] - args[1]
            case "mul":
                return reduce(operator.mul, args)
            case "min":
                return min(args)
            case "max":
                return max(args)
            case "add_const":
                return args[0] + c
            case "scale":
                return args[0] * c
        raise FormulaError(f"unknown function kind {self.kind!r}")



class Declarations(BaseModel):
    """Names a formula may mention: agents, processes, functions, constants."""

    model_config = ConfigDict(frozen=True)

    agents: tuple[str, ...]
    processes: tuple[str, ...] = ()
    functions: dict[str, FunctionSpec] = {}
    constants: dict[str, float] = {}

    @model_validator(mode="after")
    def _distinct_names(self) -> Self:
        if not self.agents:
            raise ValueError("at least one agent must be declared")
        names = [*self.processes, *self.functions, *self.constants]
        clashes = sorted({n for n in names if names.count(n) > 1})
        if clashes:
            raise ValueError(f"names declared twice: {clashes}")
        reserved = sorted(set(names) & {"now", "all"})
        if reserved:
            raise ValueError(f"reserved words used as names: {reserved}")
        return self


def desugar(phi: Formula) -> Formula:
    """Rewrite every abbreviation into ≤, ¬, ∧ and the modalities."""
    match phi:
        case Leq():
            return phi
        case Not(body):
            return Not(desugar(body))
        case And(left, right):
            return And(desugar(left), desugar(right))
        case Knows(agent, body):
            return Knows(agent, desugar(body))
        case Believes(agent, body):
            return Believes(agent, desugar(body))
        case CommonKnowledge(group, body):
            return CommonKnowledge(group, desugar(body))
        case CommonBelief(group, body):
            return CommonBelief(group, desugar(body))
        case Compare("=", m1, m2):
            return And(Leq(m1, m2), Leq(m2, m1))
        case Compare("!=", m1, m2):
            return Not(desugar(Compare("=", m1, m2)))
        case Compare("<", m1, m2):
            return And(Leq(m1, m2), desugar(Compare("!=", m1, m2)))
        case Compare(">=", m1, m2):
            return Not(desugar(Compare("<", m1, m2)))
        case Compare(">", m1, m2):
            return Not(Leq(m1, m2))
        case Or(left, right):
            return Not(And(Not(desugar(left)), Not(desugar(right))))
        case Implies(left, right):
            return desugar(Or(Not(left), right))
        case Iff(left, right):
            return And(
                desugar(Implies(left, right)), desugar(Implies(right, left))
            )
    raise FormulaError(f"not a formula: {phi!r}")


def walk(node: Formula | Term) -> Iterator[Formula | Term]:
    """Pre-order traversal of formulae and the terms inside them."""
    yield node
    match node:
        case Leq(left, right) | Compare(_, left, right):
            yield from walk(left)
            yield from walk(right)
        case And(left, right) | Or(left, right):
            yield from walk(left)
            yield from walk(right)
        case Implies(left, right) | Iff(left, right):
            yield from walk(left)
            yield from walk(right)
        case Not(body) | Knows(_, body) | Believes(_, body):
            yield from walk(body)
        case CommonKnowledge(_, body) | CommonBelief(_, body):
            yield from walk(body)
        case ProcApp(_, arg):
            yield from walk(arg)
        case FuncApp(_, args):
            for arg in args:
                yield from walk(arg)


def is_core(phi: Formula) -> bool:
    return all(
        isinstance(node, (*CORE_FORMULAS, ConstReal, Now, ProcApp, FuncApp))
        for node in walk(phi)
    )


def rename(
    mapping: Mapping[str, str], node: Formula | Term
) -> Formula | Term:
    """IE(f): replace every process name ``X`` by ``mapping[X]``.

    Raises:
        FormulaError: If ``mapping`` is undefined on an occurring name.
    """
    match node:
        case ConstReal() | Now():
            return node
        case ProcApp(name, arg):
            if name not in mapping:
                raise FormulaError(f"renaming is undefined on {name!r}")
            return ProcApp(mapping[name], rename(mapping, arg))
        case FuncApp(name, args):
            return FuncApp(name, tuple(rename(mapping, a) for a in args))
        case Leq(left, right):
            return Leq(rename(mapping, left), rename(mapping, right))
        case Compare(op, left, right):
            return Compare(op, rename(mapping, left), rename(mapping, right))
        case Not(body):
            return Not(rename(mapping, body))
        case Knows(agent, body):
            return Knows(agent, rename(mapping, body))
        case Believes(agent, body):
            return Believes(agent, rename(mapping, body))
        case CommonKnowledge(group, body):
            return CommonKnowledge(group, rename(mapping, body))
        case CommonBelief(group, body):
            return CommonBelief(group, rename(mapping, body))
        case And() | Or() | Implies() | Iff():
            return type(node)(
                rename(mapping, node.left), rename(mapping, node.right)
            )
    raise FormulaError(f"cannot rename {node!r}")


def format_number(value: float) -> str:
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


_BINARY_SYMBOLS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def pretty_print(node: Formula | Term) -> str:
    """Canonical text that parses back to the same syntax tree.

    Binary connectives and comparisons are always parenthesised; ``!``
    and the modalities are prefixes of an already delimited operand.
    """
    match node:
        case ConstReal(value):
            return format_number(value)
        case Now():
            return "now"
        case ProcApp(name, arg):
            return f"{name}({pretty_print(arg)})"
        case FuncApp(name, args):
            return f"{name}({', '.join(pretty_print(a) for a in args)})"
        case Leq(left, right):
            return f"({pretty_print(left)} <= {pretty_print(right)})"
        case Compare(op, left, right):
            return f"({pretty_print(left)} {op} {pretty_print(right)})"
        case Not(body):
            return f"!{pretty_print(body)}"
        case Knows(agent, body):
            return f"K[{agent}] {pretty_print(body)}"
        case Believes(agent, body):
            return f"B[{agent}] {pretty_print(body)}"
        case CommonKnowledge(group, body):
            return f"CK[{{{','.join(group)}}}] {pretty_print(body)}"
        case CommonBelief(group, body):
            return f"CB[{{{','.join(group)}}}] {pretty_print(body)}"
        case And() | Or() | Implies() | Iff():
            symbol = _BINARY_SYMBOLS[type(node)]
            return (
                f"({pretty_print(node.left)} {symbol} "
                f"{pretty_print(node.right)})"
            )
    raise FormulaError(f"cannot print {node!r}")
