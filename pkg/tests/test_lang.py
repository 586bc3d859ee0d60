from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belieflang.errors import FormulaError, ParseError
from belieflang.lang import (
    And,
    Believes,
    CommonBelief,
    CommonKnowledge,
    Compare,
    ConstReal,
    Declarations,
    FuncApp,
    FunctionSpec,
    Iff,
    Implies,
    Knows,
    Leq,
    Not,
    Now,
    Or,
    ProcApp,
    desugar,
    is_core,
    pretty_print,
    rename,
)
from belieflang.parser import parse_formula, parse_term, tokenize

DECLS = Declarations(
    agents=("i", "j", "k"),
    processes=("X", "Y", "V"),
    functions={
        "add1": FunctionSpec(kind="add_const", c=1),
        "plus": FunctionSpec(kind="add"),
        "low": FunctionSpec(kind="min", arity=3),
    },
    constants={"p": 10, "l": 5},
)

X_NOW = ProcApp("X", Now())


def _leq(left, right):
    return Leq(ConstReal(float(left)), ConstReal(float(right)))


numbers = st.one_of(
    st.integers(-100, 100).map(float),
    st.sampled_from([0.5, 0.25, -1.5, 2.75, 1e-05, 1.5e20]),
)

terms = st.recursive(
    st.one_of(numbers.map(ConstReal), st.just(Now())),
    lambda inner: st.one_of(
        st.builds(ProcApp, st.sampled_from(DECLS.processes), inner),
        st.builds(lambda a: FuncApp("add1", (a,)), inner),
        st.builds(lambda a, b: FuncApp("plus", (a, b)), inner, inner),
        st.builds(
            lambda a, b, c: FuncApp("low", (a, b, c)), inner, inner, inner
        ),
    ),
    max_leaves=4,
)

agents = st.sampled_from(DECLS.agents)
groups = st.sets(agents, min_size=1).map(lambda g: tuple(sorted(g)))
comparisons = st.sampled_from(["=", "!=", "<", ">=", ">"])

formulas = st.recursive(
    st.one_of(
        st.builds(Leq, terms, terms),
        st.builds(Compare, comparisons, terms, terms),
    ),
    lambda inner: st.one_of(
        st.builds(Not, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Implies, inner, inner),
        st.builds(Iff, inner, inner),
        st.builds(Knows, agents, inner),
        st.builds(Believes, agents, inner),
        st.builds(CommonKnowledge, groups, inner),
        st.builds(CommonBelief, groups, inner),
    ),
    max_leaves=8,
)


def test_trade_formula():
    """Test parsing of a conjunction of two beliefs about a price."""
    phi = parse_formula(
        "(B[j] (X(now) >= p)) & (B[k] (X(now) <= p))", DECLS
    )
    ten = ConstReal(10.0)
    geq = Not(And(Leq(X_NOW, ten), Not(And(Leq(X_NOW, ten), Leq(ten, X_NOW)))))
    assert phi == And(Believes("j", geq), Believes("k", Leq(X_NOW, ten)))


def test_credit_formula():
    """Test common belief of a value read one step ahead."""
    phi = parse_formula("CB[{k,j}] (V(add1(now)) >= l)", DECLS, sugar=True)
    ahead = ProcApp("V", FuncApp("add1", (Now(),)))
    assert phi == CommonBelief(("j", "k"), Compare(">=", ahead, ConstReal(5)))
    assert is_core(desugar(phi))


def test_primitive_formula():
    """Test the smallest formula."""
    assert parse_formula("1 <= 1", DECLS) == _leq(1, 1)


def test_bare_names():
    """Test that constants and processes may be written without calls."""
    assert parse_term("p", DECLS) == ConstReal(10.0)
    assert parse_term("X", DECLS) == X_NOW
    assert parse_term("-2.5e1", DECLS) == ConstReal(-25.0)


def test_all_group():
    """Test that ``all`` names every agent."""
    phi = parse_formula("CK[all] 1 <= 1", DECLS)
    assert phi == CommonKnowledge(("i", "j", "k"), _leq(1, 1))
    assert parse_formula("CK[j] 1 <= 1", DECLS).group == ("j",)


def test_precedence():
    """Test binding strength: ! over & over | over -> over <->."""
    a, b, c = _leq(1, 1), _leq(2, 2), _leq(3, 3)
    text = "!1 <= 1 & 2 <= 2 | 3 <= 3"
    assert parse_formula(text, DECLS, sugar=True) == Or(And(Not(a), b), c)
    text = "1 <= 1 -> 2 <= 2 -> 3 <= 3"
    assert parse_formula(text, DECLS, sugar=True) == Implies(
        a, Implies(b, c)
    )
    text = "1 <= 1 <-> 2 <= 2 -> 3 <= 3"
    assert parse_formula(text, DECLS, sugar=True) == Iff(a, Implies(b, c))
    text = "K[i] 1 <= 1 & 2 <= 2"
    assert parse_formula(text, DECLS) == And(Knows("i", a), b)


@pytest.mark.parametrize(
    "text, position",
    [
        ("X(now) <= ", 10),
        ("1 <= 1 )", 7),
        ("1 ≤ 1", 2),
        ("1 <= 1 & ", 9),
        ("(1 <= 1", 7),
        ("1 # 1", 2),
    ],
)
def test_syntax_errors_carry_position(text, position):
    """Test that syntax errors report where parsing stopped."""
    with pytest.raises(ParseError) as excinfo:
        parse_formula(text, DECLS)
    assert excinfo.value.position == position
    assert f"at position {position}" in str(excinfo.value)


@pytest.mark.parametrize(
    "text, message",
    [
        ("K[z] 1 <= 1", "unknown agent 'z'"),
        ("CK[{}] 1 <= 1", "empty group"),
        ("plus(1) <= 1", "takes 2 arguments"),
        ("X(1, 2) <= 1", "takes one argument"),
        ("Q(now) <= 1", "unknown identifier 'Q'"),
        ("q <= 1", "unknown identifier 'q'"),
    ],
)
def test_resolution_errors(text, message):
    """Test unknown names, arity mismatches and empty groups."""
    with pytest.raises(FormulaError, match=message):
        parse_formula(text, DECLS)


def test_tokens():
    """Test tokenization of operators and numbers."""
    kinds = [(t.kind, t.text) for t in tokenize("a<->-1.5")]
    assert kinds == [
        ("ident", "a"),
        ("op", "<->"),
        ("number", "-1.5"),
        ("end", ""),
    ]


def test_sugar_table():
    """Test each abbreviation against its definition."""
    m1, m2 = X_NOW, ConstReal(3.0)
    phi, psi = Leq(m1, m2), Leq(m2, m1)
    eq = And(Leq(m1, m2), Leq(m2, m1))
    assert desugar(Compare("=", m1, m2)) == eq
    assert desugar(Compare("!=", m1, m2)) == Not(eq)
    assert desugar(Compare("<", m1, m2)) == And(Leq(m1, m2), Not(eq))
    assert desugar(Compare(">=", m1, m2)) == Not(And(Leq(m1, m2), Not(eq)))
    assert desugar(Compare(">", m1, m2)) == Not(Leq(m1, m2))
    assert desugar(Or(phi, psi)) == Not(And(Not(phi), Not(psi)))
    implies = Not(And(Not(Not(phi)), Not(psi)))
    assert desugar(Implies(phi, psi)) == implies
    converse = Not(And(Not(Not(psi)), Not(phi)))
    assert desugar(Iff(phi, psi)) == And(implies, converse)


@given(formulas)
def test_desugar_is_idempotent_and_core(phi):
    """Test that desugaring leaves only core constructors."""
    core = desugar(phi)
    assert is_core(core)
    assert desugar(core) == core


@settings(max_examples=1000, deadline=None)
@given(st.one_of(formulas, formulas.map(desugar)))
def test_pretty_print_round_trip(phi):
    """Test that printed formulas parse back to the same tree."""
    text = pretty_print(phi)
    assert parse_formula(text, DECLS, sugar=True) == phi
    assert pretty_print(parse_formula(text, DECLS, sugar=True)) == text


@given(terms)
def test_term_round_trip(term):
    """Test that printed terms parse back to the same tree."""
    assert parse_term(pretty_print(term), DECLS) == term


def test_pretty_print_examples():
    """Test the canonical rendering."""
    assert pretty_print(Leq(ConstReal(1.0), Now())) == "(1 <= now)"
    phi = CommonKnowledge(("i", "j"), Not(Knows("i", _leq(0.5, 2))))
    assert pretty_print(phi) == "CK[{i,j}] !K[i] (0.5 <= 2)"


def test_rename():
    """Test the substitution of process names."""
    phi = parse_formula("X(now) <= 1", DECLS)
    assert rename({"X": "Y"}, phi) == parse_formula("Y(now) <= 1", DECLS)
    with pytest.raises(FormulaError, match="undefined on 'X'"):
        rename({"Y": "X"}, phi)


@given(formulas)
def test_rename_is_functorial(phi):
    """Test identity and composition laws of renaming."""
    identity = {name: name for name in DECLS.processes}
    f = {"X": "Y", "Y": "V", "V": "X"}
    g = {"X": "A", "Y": "B", "V": "C"}
    assert rename(identity, phi) == phi
    composite = {name: g[f[name]] for name in f}
    assert rename(g, rename(f, phi)) == rename(composite, phi)


def test_function_kinds():
    """Test the built-in function table."""
    a, b = np.array([1.0, 5.0]), np.array([3.0, 2.0])
    np.testing.assert_array_equal(FunctionSpec(kind="add").apply(a, b), a + b)
    np.testing.assert_array_equal(FunctionSpec(kind="sub").apply(a, b), a - b)
    np.testing.assert_array_equal(
        FunctionSpec(kind="max", arity=3).apply(a, b, a), [3.0, 5.0]
    )
    shift = FunctionSpec.model_validate({"kind": "addConst", "c": 1})
    assert shift.kind == "add_const" and shift.arity == 1
    np.testing.assert_array_equal(shift.apply(a), [2.0, 6.0])
    scale = FunctionSpec(kind="scale", c=2)
    np.testing.assert_array_equal(scale.apply(b), [6.0, 4.0])


def test_exact_function_kinds():
    """Test rational evaluation of the function table."""
    tenth = Fraction(1, 10)
    step = FunctionSpec(kind="add_const", c=0.2)
    assert step.apply_exact(tenth) == Fraction(3, 10)
    assert FunctionSpec(kind="scale", c=0.1).apply_exact(Fraction(3)) == (
        Fraction(3, 10)
    )
    assert FunctionSpec(kind="add").apply_exact(tenth, 2 * tenth) == (
        Fraction(3, 10)
    )
    assert FunctionSpec(kind="min", arity=3).apply_exact(
        Fraction(1), tenth, Fraction(2)
    ) == tenth
    with pytest.raises(FormulaError, match="expects 1 arguments"):
        step.apply_exact(tenth, tenth)


def test_function_arity_validation():
    """Test that unary kinds cannot be declared with other arities."""
    with pytest.raises(ValueError, match="exactly 1"):
        FunctionSpec(kind="scale", arity=2)
    with pytest.raises(ValueError, match="at least one"):
        FunctionSpec(kind="add", arity=0)
    with pytest.raises(FormulaError):
        FunctionSpec(kind="add").apply(np.zeros(2))


def test_declarations_reject_clashes():
    """Test that every name is declared once and none is reserved."""
    with pytest.raises(ValueError, match="declared twice"):
        Declarations(agents=("i",), processes=("X",), constants={"X": 1})
    with pytest.raises(ValueError, match="reserved"):
        Declarations(agents=("i",), processes=("now",))
    with pytest.raises(ValueError, match="at least one agent"):
        Declarations(agents=())
