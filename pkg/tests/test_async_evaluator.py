import logging
from fractions import Fraction

import numpy as np
import pytest

from belieflang import AsyncEvaluator, Evaluator, load_model, parse_formula
from belieflang.errors import ConvergenceError, FormulaError
from belieflang.schemas import EvalOptions


@pytest.fixture
def async_eval(m0):
    """Fixture to create an AsyncEvaluator over the trade model."""
    return AsyncEvaluator(m0)


@pytest.mark.asyncio
async def test_interpret_matches_sync(m0, async_eval):
    """Test that concurrent evaluation gives the synchronous result."""
    phi = parse_formula(
        "K[i](X(now) >= 10) & B[j](V(now) <= 9)", m0.declarations
    )
    result = await async_eval.interpret(phi)
    expected = Evaluator(m0).interpret(phi)
    np.testing.assert_array_equal(result.values, expected.values)
    assert result.times == expected.times


@pytest.mark.asyncio
async def test_validity_many(m0, async_eval):
    """Test that batched queries come back in submission order."""
    trade = parse_formula(
        "B[j](X(add1(now)) > p) & B[k](X(add1(now)) < p)", m0.declarations
    )
    informed = parse_formula("X(now) >= 10", m0.declarations)
    results = await async_eval.validity_many(
        [
            ("i", "w1", 0, 0.5, trade),
            ("i", "w1", 0, 0.05, trade),
            ("i", "w1", 1, 0.0, informed),
            ("i", "w2", 1, 0.0, informed),
        ]
    )
    assert [r.holds for r in results] == [True, False, True, False]
    assert results[0].value == pytest.approx(0.5)


@pytest.mark.asyncio
async def test_fixpoint(credit):
    """Test the asynchronous fixed-point trace."""
    evaluator = AsyncEvaluator(credit)
    phi = parse_formula("CK[{c,d}](D >= 1)", credit.declarations)
    trace = await evaluator.fixpoint(phi, 0)
    assert trace.iterations == 1
    assert trace.formula.startswith("CK[{c,d}] ")


@pytest.mark.asyncio
async def test_errors_propagate(credit):
    """Test that worker-thread errors reach the caller."""
    evaluator = AsyncEvaluator(credit, EvalOptions(max_iter=3))
    phi = parse_formula("CK[{a,b}](D >= 1)", credit.declarations)
    with pytest.raises(ConvergenceError):
        await evaluator.interpret(phi)
    with pytest.raises(FormulaError, match="no common knowledge"):
        await evaluator.fixpoint(
            parse_formula("K[a](D >= 1)", credit.declarations), 0
        )


@pytest.mark.asyncio
async def test_traces_ordered_by_time_and_formula(m0):
    """Test that traces from concurrent solves come back in a fixed order."""
    phi = parse_formula(
        "CK[{j,k}](1 <= 1) & CB[{j,k}](1 <= 1)", m0.declarations
    )
    evaluator = AsyncEvaluator(m0)
    await evaluator.interpret(phi)
    keys = [(trace.time, trace.formula) for trace in evaluator.traces]
    assert len(keys) == 4
    assert keys == sorted(keys)
    expected = Evaluator(m0)
    expected.interpret(phi)
    assert keys == [(trace.time, trace.formula) for trace in expected.traces]


@pytest.mark.asyncio
async def test_null_block_warned_once(fixture_path, caplog):
    """Test that concurrent queries log a null block a single time."""
    model = load_model(fixture_path("nullblock"))
    evaluator = AsyncEvaluator(model)
    phi = parse_formula("K[i](X >= 1)", model.declarations)
    with caplog.at_level(logging.WARNING):
        await evaluator.validity_many([("i", "w1", 0, 0.0, phi)] * 8)
    warnings = [r for r in caplog.records if "null blocks" in r.getMessage()]
    assert len(warnings) == 1
    assert evaluator.null_hits == {("i", Fraction(0), "knowledge")}
