import logging
import threading
from abc import ABC, abstractmethod
from collections.abc import Sequence
from fractions import Fraction
from typing import Any, Coroutine, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from belieflang.boolalg import enumerate_anchors
from belieflang.errors import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    FormulaError,
    ModelError,
)
from belieflang.lang import (
    And,
    Believes,
    CommonBelief,
    CommonKnowledge,
    ConstReal,
    Formula,
    FuncApp,
    Knows,
    Leq,
    Not,
    Now,
    ProcApp,
    Term,
    desugar,
    pretty_print,
    walk,
)
from belieflang.model import (
    Model,
    adaptedness_violations,
    check_adapted,
    check_pre_adapted,
    group_expect,
)
from belieflang.prob import cond_exp_operator, null_blocks
from belieflang.schemas import EvalOptions
from belieflang.utils import resolve_max_atoms

logger = logging.getLogger(__name__)

Time = Fraction | float | str
Operator = Literal["knowledge", "belief"]


class TruthProcess(BaseModel):
    """⟦φ⟧: a [0, 1]-valued process; row ``k`` is the value at ``times[k]``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: tuple[Fraction, ...]
    omega: tuple[str, ...]
    values: np.ndarray

    def at(self, k: int) -> np.ndarray:
        return self.values[k]

    def value(self, k: int, state: str) -> float:
        return float(self.values[k, self.omega.index(state)])


class FixpointTrace(BaseModel):
    """Iterates f_0 = 1, f_1, … of one common knowledge/belief solve.

    ``residuals[n]`` is the sup-norm distance between ``iterates[n]`` and
    ``iterates[n + 1]``; ``iterations`` is the first n where it fell to
    the tolerance.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    formula: str
    time: Fraction
    iterates: list[np.ndarray] = []
    residuals: list[float] = []
    iterations: int | None = None

    def rows(self) -> list[tuple[int, float, float, float]]:
        return [
            (n, self.residuals[n - 1], float(f.min()), float(f.max()))
            for n, f in enumerate(self.iterates)
            if n
        ]

    def to_csv(self) -> str:
        lines = ["n,sup_residual,min_value,max_value"]
        lines += [
            f"{n},{r:.12g},{lo:.12g},{hi:.12g}" for n, r, lo, hi in self.rows()
        ]
        return "\n".join(lines) + "\n"


class ValidityResult(BaseModel):
    """Outcome of ``i, ω, t ⊨_ε φ`` with the certified value."""

    model_config = ConfigDict(frozen=True)

    holds: bool
    value: float
    threshold: float


class BaseEvaluator(ABC):
    """Base class for interpreting IE formulae on a loaded model.

    This abstract class holds the semantics shared by the synchronous
    and asynchronous evaluators: term values, the per-time clauses of
    the interpretation and the fixed-point solver for common knowledge
    and common belief.
    """

    def __init__(self, model: Model, options: EvalOptions | None = None):
        self.model = model
        self.options = options or EvalOptions()
        self.max_atoms = resolve_max_atoms(self.options.max_atoms)
        if not check_adapted(model):
            if self.options.pre_adapted and check_pre_adapted(model):
                logger.warning(
                    "model is only pre-adapted; evaluating anyway"
                )
            else:
                violation = adaptedness_violations(model)[0]
                raise ModelError(f"history is not adapted: {violation}")
        self._operators: dict[tuple[Operator, str, int], np.ndarray] = {}
        self._null: dict[tuple[Operator, str, int], list[list[str]]] = {}
        for (agent, k), point in model.history.items():
            for kind, sigma in (
                ("knowledge", point.knowledge),
                ("belief", point.belief),
            ):
                key = (kind, agent, k)
                self._operators[key] = cond_exp_operator(point.measure, sigma)
                self._null[key] = null_blocks(point.measure, sigma)
        self._cache: dict[tuple[Formula, int], np.ndarray] = {}
        self._traces: dict[tuple[Formula, int], FixpointTrace] = {}
        self.null_hits: set[tuple[str, Fraction, Operator]] = set()
        self._lock = threading.Lock()
        logger.info(
            "evaluator ready: tol=%g, max_iter=%d",
            self.options.tol,
            self.options.max_iter,
        )

    @property
    def traces(self) -> list[FixpointTrace]:
        """Every fixed-point solve performed so far, by time and formula."""
        with self._lock:
            traces = list(self._traces.values())
        return sorted(traces, key=lambda trace: (trace.time, trace.formula))

    def time_index(self, t: Time) -> int:
        return self.model.time_index(t)

    def anchor_count(self, agent: str, t: Time) -> int:
        """|𝒜_𝔹| for the algebra of ``agent``'s point at ``t``."""
        point = self.model.point(agent, self.time_index(t))
        return len(enumerate_anchors(point.triple.algebra, self.max_atoms))

    def eval_term(self, m: Term, k: int) -> np.ndarray:
        """⟦m⟧(t_k) as a function on Ω.

        Raises:
            EvaluationError: If a process is read at an undeclared time
            FormulaError: If a process or function name is unknown
        """
        omega = self.model.omega
        match m:
            case ConstReal(value):
                return np.full(len(omega), float(value))
            case Now():
                return np.full(len(omega), float(self.model.times[k]))
            case ProcApp(name, arg):
                process = self.model.processes.get(name)
                if process is None:
                    raise FormulaError(f"unknown process {name!r}")
                when = self.eval_time(arg, k)
                values = np.empty(len(omega))
                for w, t in enumerate(when):
                    index = self.model.filtration.index_of(t)
                    if index is None:
                        raise EvaluationError(
                            f"{name} read at undeclared time {float(t):g} "
                            f"in state {omega[w]}"
                        )
                    values[w] = process.values[index, w]
                return values
            case FuncApp(name, args):
                spec = self.model.functions.get(name)
                if spec is None:
                    raise FormulaError(f"unknown function {name!r}")
                return spec.apply(*(self.eval_term(a, k) for a in args))
        raise FormulaError(f"not a term: {m!r}")

    def eval_time(self, m: Term, k: int) -> list[Fraction]:
        """⟦m⟧(t_k) per state in exact rational arithmetic.

        Process reads use this, so ``now + c`` matches a declared time
        such as 0.3 without floating-point drift.
        """
        match m:
            case ConstReal(value):
                return [Fraction(str(value))] * len(self.model.omega)
            case Now():
                return [self.model.times[k]] * len(self.model.omega)
            case ProcApp(name):
                read = self.eval_term(m, k)
                if not np.all(np.isfinite(read)):
                    raise EvaluationError(f"{name} is not a finite time")
                return [Fraction(str(float(v))) for v in read]
            case FuncApp(name, args):
                spec = self.model.functions.get(name)
                if spec is None:
                    raise FormulaError(f"unknown function {name!r}")
                columns = [self.eval_time(a, k) for a in args]
                return [spec.apply_exact(*row) for row in zip(*columns)]
        raise FormulaError(f"not a term: {m!r}")

    def _operator(self, kind: Operator, agent: str, k: int) -> np.ndarray:
        key = (kind, agent, k)
        if key not in self._operators:
            raise FormulaError(f"unknown agent {agent!r}")
        if self._null[key]:
            hit = (agent, self.model.times[k], kind)
            with self._lock:
                fresh = hit not in self.null_hits
                self.null_hits.add(hit)
            if fresh:
                logger.warning(
                    "%s of %s at t=%s has null blocks %s; using 0 there",
                    kind,
                    agent,
                    hit[1],
                    self._null[key],
                )
        return self._operators[key]

    def _check_group(self, group: Sequence[str]) -> None:
        if not group:
            raise FormulaError("group must be non-empty")
        unknown = sorted(set(group) - set(self.model.agents))
        if unknown:
            raise FormulaError(f"unknown agents {unknown}")

    def _interpret_at(self, phi: Formula, k: int) -> np.ndarray:
        """⟦φ⟧(t_k), memoised per subformula and time."""
        key = (phi, k)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        match phi:
            case Leq(left, right):
                result = (
                    self.eval_term(left, k) <= self.eval_term(right, k)
                ).astype(float)
            case Not(body):
                result = 1.0 - self._interpret_at(body, k)
            case And(left, right):
                result = np.minimum(
                    self._interpret_at(left, k), self._interpret_at(right, k)
                )
            case Knows(agent, body):
                operator = self._operator("knowledge", agent, k)
                result = operator @ self._interpret_at(body, k)
            case Believes(agent, body):
                operator = self._operator("belief", agent, k)
                result = operator @ self._interpret_at(body, k)
            case CommonKnowledge() | CommonBelief():
                result, _ = self._solve(phi, k)
            case _:
                raise FormulaError(
                    f"cannot interpret {pretty_print(phi)}; desugar it first"
                )
        result = np.clip(result, 0.0, 1.0)
        self._cache[key] = result
        return result

    def _solve(
        self, phi: CommonKnowledge | CommonBelief, k: int
    ) -> tuple[np.ndarray, FixpointTrace]:
        key = (phi, k)
        if key in self._traces and key in self._cache:
            return self._cache[key], self._traces[key]
        child = self._interpret_at(phi.body, k)
        if isinstance(phi, CommonKnowledge):
            values, trace = self.solve_ck(child, phi.group, k)
        else:
            values, trace = self.solve_cb(child, phi.group, k)
        trace.formula = pretty_print(phi)
        with self._lock:
            self._traces[key] = trace
        self._cache[key] = values
        return values, trace

    def solve_ck(
        self, child: np.ndarray, group: Sequence[str], k: int
    ) -> tuple[np.ndarray, FixpointTrace]:
        """Maximal fixed point of f = 𝔼^ρ[𝔼[f ∧ φ | 𝒦_i], G] at t_k."""
        return self._fixpoint("knowledge", child, group, k)

    def solve_cb(
        self, child: np.ndarray, group: Sequence[str], k: int
    ) -> tuple[np.ndarray, FixpointTrace]:
        """Maximal fixed point of f = 𝔼^ρ[𝔼[f ∧ φ | ℬ_i], G] at t_k."""
        return self._fixpoint("belief", child, group, k)

    def _fixpoint(
        self,
        kind: Operator,
        child: np.ndarray,
        group: Sequence[str],
        k: int,
    ) -> tuple[np.ndarray, FixpointTrace]:
        """Iterate from the constant 1 until the sup-norm step is ≤ tol.

        Raises:
            ConvergenceError: If ``max_iter`` steps do not converge
            EvaluationError: If the group has ρ-measure zero
        """
        self._check_group(group)
        group = sorted(set(group))
        operators = {i: self._operator(kind, i, k) for i in group}
        tol = self.options.tol
        f = np.ones(len(self.model.omega))
        trace = FixpointTrace(
            formula=f"{kind} fixpoint over {group}",
            time=self.model.times[k],
            iterates=[f],
        )
        for n in range(self.options.max_iter):
            guarded = np.minimum(f, child)
            step = group_expect(
                self.model.agent_space,
                group,
                {i: operators[i] @ guarded for i in group},
            )
            step = np.clip(step, 0.0, 1.0)
            residual = float(np.max(np.abs(step - f)))
            trace.iterates.append(step)
            trace.residuals.append(residual)
            logger.debug(
                "fixpoint n=%d residual=%.3e min=%g max=%g",
                n + 1,
                residual,
                step.min(),
                step.max(),
            )
            f = step
            if residual <= tol:
                trace.iterations = n
                break
        else:
            raise ConvergenceError(
                f"no fixed point within {self.options.max_iter} iterations "
                f"(last residual {trace.residuals[-1]:.3e})",
                trace,
            )
        return np.where(f <= tol, 0.0, f), trace

    def _validity_at(
        self, agent: str, state: str, k: int, eps: float, phi: Formula
    ) -> ValidityResult:
        if not 0 <= eps <= 1:
            raise DomainError(f"ε must lie in [0, 1], got {eps}")
        if state not in self.model.omega:
            raise DomainError(f"unknown state {state!r}")
        if agent not in self.model.agents:
            raise DomainError(f"unknown agent {agent!r}")
        values = self._interpret_at(phi, k)
        operator = self._operator("knowledge", agent, k)
        value = float(
            np.clip(operator[self.model.omega.index(state)] @ values, 0, 1)
        )
        threshold = 1.0 - eps
        return ValidityResult(
            holds=value >= threshold - self.options.tol,
            value=value,
            threshold=threshold,
        )

    def _outermost_fixpoint(
        self, phi: Formula
    ) -> CommonKnowledge | CommonBelief:
        for node in walk(phi):
            if isinstance(node, (CommonKnowledge, CommonBelief)):
                return node
        raise FormulaError(
            f"{pretty_print(phi)} has no common knowledge or belief"
        )

    def _prepare(self, phi: Formula) -> Formula:
        phi = desugar(phi)
        for node in walk(phi):
            match node:
                case Knows(agent, _) | Believes(agent, _):
                    self._check_group([agent])
                case CommonKnowledge(group, _) | CommonBelief(group, _):
                    self._check_group(group)
        return phi

    def _process(self, rows: Sequence[np.ndarray]) -> TruthProcess:
        return TruthProcess(
            times=self.model.times,
            omega=self.model.omega,
            values=np.vstack(rows),
        )

    @abstractmethod
    def interpret(
        self, phi: Formula
    ) -> TruthProcess | Coroutine[Any, Any, TruthProcess]:
        """Interpret ``phi`` at every declared time.

        Args:
            phi: Formula over the model's declarations; sugar is
                rewritten before evaluation

        Returns:
            The truth process ⟦φ⟧ or coroutine
        """
        pass

    @abstractmethod
    def validity(
        self,
        agent: str,
        state: str,
        t: Time,
        eps: float,
        phi: Formula,
    ) -> ValidityResult | Coroutine[Any, Any, ValidityResult]:
        """Decide ``agent, state, t ⊨_eps phi``.

        Args:
            agent: Observing agent i
            state: State ω
            t: Declared time
            eps: Tolerance ε in [0, 1]
            phi: Formula to check

        Returns:
            Verdict with the value 𝔼[⟦φ⟧(t) | 𝒦_{h(i)(t)}](ω) or coroutine
        """
        pass

    @abstractmethod
    def fixpoint(
        self, phi: Formula, t: Time
    ) -> FixpointTrace | Coroutine[Any, Any, FixpointTrace]:
        """Solve the outermost CK/CB subformula of ``phi`` at ``t``.

        Returns:
            The iteration trace of that solve or coroutine
        """
        pass
