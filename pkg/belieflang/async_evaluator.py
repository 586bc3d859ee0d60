import asyncio

from belieflang.base_evaluator import (
    BaseEvaluator,
    FixpointTrace,
    Time,
    TruthProcess,
    ValidityResult,
)
from belieflang.lang import Formula


class AsyncEvaluator(BaseEvaluator):
    """Asynchronous evaluator.

    Each declared time is interpreted in a worker thread and the results
    are gathered in time order, so the output does not depend on the
    schedule.
    """

    async def interpret(self, phi: Formula) -> TruthProcess:
        """Interpret ``phi`` at every declared time concurrently.

        Args:
            phi: Formula over the model's declarations

        Returns:
            TruthProcess: ⟦φ⟧ with one row per declared time
        """
        phi = self._prepare(phi)
        rows = await asyncio.gather(
            *[
                asyncio.to_thread(self._interpret_at, phi, k)
                for k in range(len(self.model.times))
            ]
        )
        return self._process(rows)

    async def validity(
        self,
        agent: str,
        state: str,
        t: Time,
        eps: float,
        phi: Formula,
    ) -> ValidityResult:
        k = self.time_index(t)
        return await asyncio.to_thread(
            self._validity_at, agent, state, k, eps, self._prepare(phi)
        )

    async def validity_many(
        self,
        queries: list[tuple[str, str, Time, float, Formula]],
    ) -> list[ValidityResult]:
        """Run several validity queries concurrently, results in order."""
        return await asyncio.gather(
            *[self.validity(*query) for query in queries]
        )

    async def fixpoint(self, phi: Formula, t: Time) -> FixpointTrace:
        k = self.time_index(t)
        node = self._outermost_fixpoint(self._prepare(phi))
        _, trace = await asyncio.to_thread(self._solve, node, k)
        return trace
