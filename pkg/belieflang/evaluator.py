from belieflang.base_evaluator import (
    BaseEvaluator,
    FixpointTrace,
    Time,
    TruthProcess,
    ValidityResult,
)
from belieflang.lang import Formula
from belieflang.model import Model
from belieflang.schemas import EvalOptions


class Evaluator(BaseEvaluator):
    """Synchronous evaluator.

    Times are evaluated one after the other; use `AsyncEvaluator` to
    evaluate them concurrently.
    """

    def interpret(self, phi: Formula) -> TruthProcess:
        """Interpret ``phi`` at every declared time.

        Args:
            phi: Formula over the model's declarations

        Returns:
            TruthProcess: ⟦φ⟧ with one row per declared time

        Raises:
            FormulaError: If ``phi`` mentions an unknown name
            EvaluationError: If a term or a group cannot be evaluated
            ConvergenceError: If a fixed-point solve does not converge
        """
        phi = self._prepare(phi)
        return self._process(
            [self._interpret_at(phi, k) for k in range(len(self.model.times))]
        )

    def interpret_at(self, phi: Formula, t: Time) -> TruthProcess:
        """Like `interpret`, restricted to the single time ``t``."""
        k = self.time_index(t)
        phi = self._prepare(phi)
        return TruthProcess(
            times=(self.model.times[k],),
            omega=self.model.omega,
            values=self._interpret_at(phi, k)[None, :],
        )

    def validity(
        self,
        agent: str,
        state: str,
        t: Time,
        eps: float,
        phi: Formula,
    ) -> ValidityResult:
        """Decide ``agent, state, t ⊨_eps phi``.

        Raises:
            DomainError: If ``eps`` is outside [0, 1] or a coordinate is
                unknown
        """
        k = self.time_index(t)
        return self._validity_at(agent, state, k, eps, self._prepare(phi))

    def fixpoint(self, phi: Formula, t: Time) -> FixpointTrace:
        k = self.time_index(t)
        node = self._outermost_fixpoint(self._prepare(phi))
        _, trace = self._solve(node, k)
        return trace


def interpret(
    phi: Formula, model: Model, options: EvalOptions | None = None
) -> TruthProcess:
    """One-shot `Evaluator.interpret` over ``model``."""
    return Evaluator(model, options).interpret(phi)


def validity(
    agent: str,
    state: str,
    t: Time,
    eps: float,
    phi: Formula,
    model: Model,
    options: EvalOptions | None = None,
) -> ValidityResult:
    """One-shot `Evaluator.validity` over ``model``."""
    return Evaluator(model, options).validity(agent, state, t, eps, phi)
