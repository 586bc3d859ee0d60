import json
import logging
from collections.abc import Iterator, Mapping, Sequence
from contextlib import contextmanager
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any, NamedTuple, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from belieflang.boolalg import Anchor, BooleanHom, FiniteBooleanAlgebra
from belieflang.errors import DomainError, EvaluationError, ModelError
from belieflang.infostruct import (
    GeneralizedSigmaAlgebra,
    InfoTriple,
    belief,
    check_chi_arrow,
    close_under_ops,
    knowledge,
)
from belieflang.lang import Declarations, FunctionSpec
from belieflang.prob import (
    MEASURE_TOLERANCE,
    Filtration,
    ProbabilityMeasure,
    Process,
    SigmaAlgebra,
    abs_continuous,
    is_adapted,
)
from belieflang.schemas import EvalOptions, ModelDocument, PointDoc
from belieflang.utils import count_noun, resolve_max_atoms

logger = logging.getLogger(__name__)


class AgentSpace(BaseModel):
    """The agents 𝐈 with a probability measure ρ on 2^𝐈."""

    model_config = ConfigDict(frozen=True)

    agents: tuple[str, ...]
    rho: tuple[float, ...]

    @model_validator(mode="after")
    def _normalised(self) -> Self:
        if not self.agents:
            raise ValueError("the set of agents must be non-empty")
        if len(set(self.agents)) != len(self.agents):
            raise ValueError(f"duplicate agents in {list(self.agents)}")
        if len(self.rho) != len(self.agents):
            raise ValueError("ρ needs one weight per agent")
        if any(w < 0 for w in self.rho):
            raise ValueError("ρ weights must be non-negative")
        total = sum(self.rho)
        if abs(total - 1.0) > MEASURE_TOLERANCE:
            raise ValueError(f"ρ sums to {total}, not 1")
        return self

    @classmethod
    def uniform(cls, agents: Sequence[str]) -> "AgentSpace":
        return cls(
            agents=tuple(agents), rho=(1 / len(agents),) * len(agents)
        )

    def weight(self, agent: str) -> float:
        try:
            return self.rho[self.agents.index(agent)]
        except ValueError:
            raise DomainError(f"unknown agent {agent!r}") from None

    def measure(self, group: Sequence[str]) -> float:
        return sum(self.weight(i) for i in set(group))


def group_expect(
    agent_space: AgentSpace,
    group: Sequence[str],
    values: Mapping[str, Any],
) -> Any:
    """𝔼^ρ[values, G]: the ρ-average of agent-indexed values over G.

    ``values`` may map agents to reals or to arrays of equal shape.

    Raises:
        EvaluationError: If G is empty or has ρ-measure zero.
    """
    group = sorted(set(group))
    if not group:
        raise EvaluationError("group must be non-empty")
    mass = agent_space.measure(group)
    if mass == 0:
        raise EvaluationError(f"group {group} has measure zero")
    total = sum(agent_space.weight(i) * values[i] for i in group)
    return total / mass


class HistoryPoint(BaseModel):
    """𝐡(i)(t) with its derived knowledge and belief σ-algebras."""

    model_config = ConfigDict(frozen=True)

    triple: InfoTriple
    measure: ProbabilityMeasure
    knowledge: SigmaAlgebra
    belief: SigmaAlgebra


class Violation(NamedTuple):
    agent: str
    time: Fraction
    kind: str

    def __str__(self) -> str:
        return f"{self.agent} at t={self.time}: {self.kind}"


class Model(BaseModel):
    """A filtered finite space, agents, a history, processes, functions."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    filtration: Filtration
    agent_space: AgentSpace
    history: dict[tuple[str, int], HistoryPoint]
    processes: dict[str, Process]
    functions: dict[str, FunctionSpec] = {}
    constants: dict[str, float] = {}
    arrows: dict[tuple[str, int], BooleanHom | None] = {}
    strict: bool = False

    @model_validator(mode="after")
    def _total_history(self) -> Self:
        for agent in self.agent_space.agents:
            for k in range(len(self.times)):
                point = self.history.get((agent, k))
                if point is None:
                    raise ValueError(
                        f"history has no point for {agent} at "
                        f"t={self.times[k]}"
                    )
                if point.triple.omega != self.omega:
                    raise ValueError(
                        f"point of {agent} at t={self.times[k]} uses "
                        "another state space"
                    )
        for process in self.processes.values():
            if not is_adapted(process.values, self.filtration):
                raise ValueError(f"process {process.name!r} is not adapted")
        return self

    @property
    def omega(self) -> tuple[str, ...]:
        return self.filtration.omega

    @property
    def times(self) -> tuple[Fraction, ...]:
        return self.filtration.times

    @property
    def agents(self) -> tuple[str, ...]:
        return self.agent_space.agents

    @property
    def declarations(self) -> Declarations:
        return Declarations(
            agents=self.agents,
            processes=tuple(self.processes),
            functions=self.functions,
            constants=self.constants,
        )

    def time_index(self, t: float | Fraction | str) -> int:
        """Index of ``t`` in the declared times.

        Args:
            t: A time as a number or a decimal string such as ``"0.1"``

        Returns:
            int: Position of ``t`` in ``times``

        Raises:
            DomainError: If ``t`` is not a time or is not declared
        """
        shown = t
        if isinstance(t, str):
            try:
                t = Fraction(Decimal(t))
            except (InvalidOperation, ValueError, OverflowError):
                raise DomainError(f"{t!r} is not a time value") from None
        k = self.filtration.index_of(t)
        if k is None:
            raise DomainError(f"time {shown} is not declared")
        return k

    def point(self, agent: str, k: int) -> HistoryPoint:
        try:
            return self.history[(agent, k)]
        except KeyError:
            raise DomainError(
                f"no history point for agent {agent!r} at index {k}"
            ) from None


def adaptedness_violations(model: Model) -> list[Violation]:
    """Points whose knowledge or belief is not inside 𝒢_t."""
    violations = []
    for agent in model.agents:
        for k, t in enumerate(model.times):
            point = model.point(agent, k)
            stage = model.filtration.stages[k]
            if not point.knowledge.is_subalgebra_of(stage):
                violations.append(Violation(agent, t, "knowledge ⊄ 𝒢_t"))
            if not point.belief.is_subalgebra_of(stage):
                violations.append(Violation(agent, t, "belief ⊄ 𝒢_t"))
    return violations


def check_pre_adapted(model: Model) -> bool:
    """𝒦_{𝐡(i)(t)} ⊆ 𝔾(t) for every agent and time."""
    return all(
        model.point(agent, k).knowledge.is_subalgebra_of(stage)
        for agent in model.agents
        for k, stage in enumerate(model.filtration.stages)
    )


def check_adapted(model: Model) -> bool:
    """Pre-adapted and ℬ_{𝐡(i)(t)} ⊆ 𝔾(t) for every agent and time."""
    return check_pre_adapted(model) and all(
        model.point(agent, k).belief.is_subalgebra_of(stage)
        for agent in model.agents
        for k, stage in enumerate(model.filtration.stages)
    )


def history_arrow_violations(model: Model) -> list[Violation]:
    """Consecutive points of an agent not linked by a χ arrow."""
    violations = []
    for agent in model.agents:
        for k in range(1, len(model.times)):
            t = model.times[k]
            before, after = model.point(agent, k - 1), model.point(agent, k)
            u = model.arrows.get((agent, k))
            if u is None:
                violations.append(
                    Violation(agent, t, "no Boolean hom from previous point")
                )
                continue
            if not check_chi_arrow(u, before.triple, after.triple):
                violations.append(Violation(agent, t, "not a χ_F arrow"))
            if not abs_continuous(before.measure, after.measure):
                violations.append(
                    Violation(agent, t, "ℙ_t not absolutely continuous")
                )
    return violations


@contextmanager
def _invalid(context: str) -> Iterator[None]:
    try:
        yield
    except ValidationError as e:
        error = e.errors()[0]
        where = ".".join(str(part) for part in error["loc"])
        suffix = f" ({where})" if where else ""
        raise ModelError(f"{context}: {error['msg']}{suffix}") from e
    except ValueError as e:
        raise ModelError(f"{context}: {e}") from e


def _read_document(document: Mapping[str, Any] | str | Path) -> Any:
    if isinstance(document, Mapping):
        return document
    path = Path(document)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelError(f"cannot read {path}: {e.strerror}") from e
    try:
        return json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as e:
        raise ModelError(f"{path} is not valid JSON: {e}") from e


def _align(
    entries: Mapping[str, Any], times: Sequence[Fraction], what: str
) -> list[Any]:
    """Values of a time-keyed mapping, in the order of ``times``."""
    by_time = {}
    for key, value in entries.items():
        try:
            by_time[Fraction(Decimal(key))] = value
        except (InvalidOperation, ValueError):
            raise ModelError(f"{what}: {key!r} is not a time") from None
    extra = sorted(set(by_time) - set(times))
    if extra:
        raise ModelError(f"{what}: undeclared times {[str(t) for t in extra]}")
    missing = [str(t) for t in times if t not in by_time]
    if missing:
        raise ModelError(f"{what}: missing times {missing}")
    return [by_time[t] for t in times]


def _build_point(
    omega: tuple[str, ...], doc: PointDoc, max_atoms: int
) -> HistoryPoint:
    algebra = FiniteBooleanAlgebra(atoms=tuple(doc.algebra.atoms))

    def event(values: list[list[str]]) -> tuple[int, ...]:
        if len(values) != len(omega):
            raise DomainError(
                f"function lists {len(values)} values for "
                f"{len(omega)} states"
            )
        return tuple(algebra.encode(v) for v in values)

    if doc.members is not None:
        info = GeneralizedSigmaAlgebra(
            omega=omega,
            algebra=algebra,
            members=frozenset(event(f) for f in doc.members),
        )
    else:
        info = close_under_ops(
            omega, algebra, (event(f) for f in doc.generators or [])
        )
    if doc.anchor.upset is not None:
        anchor = Anchor(
            algebra=algebra,
            upset=frozenset(algebra.encode(x) for x in doc.anchor.upset),
        )
    else:
        anchor = Anchor.generated_by(
            algebra, (algebra.encode(x) for x in doc.anchor.above or [])
        )
    if doc.p == "uniform":
        measure = ProbabilityMeasure.uniform(omega)
    else:
        measure = ProbabilityMeasure.from_mapping(
            omega, {s: float(w) for s, w in doc.p.items()}
        )
    triple = InfoTriple(algebra=algebra, info=info, anchor=anchor)
    return HistoryPoint(
        triple=triple,
        measure=measure,
        knowledge=knowledge(triple, max_atoms),
        belief=belief(triple),
    )


def _build_arrow(
    before: HistoryPoint, after: HistoryPoint, doc: PointDoc
) -> BooleanHom | None:
    source, target = before.triple.algebra, after.triple.algebra
    if doc.arrow_from_previous is not None:
        images = doc.arrow_from_previous
        missing = [a for a in source.atoms if a not in images]
        if missing:
            raise DomainError(f"arrow_from_previous misses atoms {missing}")
        return BooleanHom.from_atom_images(
            source, target, [target.encode(images[a]) for a in source.atoms]
        )
    if source == target:
        return BooleanHom.identity(source)
    return None


def load_model(
    document: Mapping[str, Any] | str | Path,
    options: EvalOptions | None = None,
) -> Model:
    """Validate a model document and build the `Model` it describes.

    Args:
        document: Parsed JSON mapping, or a path to a JSON file
        options: Evaluation options; ``max_atoms`` bounds anchor
            enumeration and ``strict`` enables the history-arrow check

    Returns:
        Model: The validated model with knowledge and belief
        σ-algebras precomputed for every history point

    Raises:
        ModelError: If the document violates the schema or an invariant
        CapacityError: If an algebra is too large to enumerate anchors
    """
    options = options or EvalOptions()
    max_atoms = resolve_max_atoms(options.max_atoms)
    raw = _read_document(document)
    with _invalid("schema"):
        doc = ModelDocument.model_validate(raw)

    with _invalid("omega"):
        omega = tuple(doc.omega)
        if not omega:
            raise ValueError("Ω must be non-empty")
        if len(set(omega)) != len(omega):
            raise ValueError("duplicate states")
    times = tuple(Fraction(t) for t in doc.times)
    if list(times) != sorted(set(times)):
        raise ModelError("times: must be strictly ascending")
    stages = _align(doc.filtration, times, "filtration")
    with _invalid("filtration"):
        filtration = Filtration(
            times=times,
            stages=tuple(
                SigmaAlgebra.from_named_blocks(omega, blocks)
                for blocks in stages
            ),
        )
    if doc.sigma is not None:
        with _invalid("sigma"):
            declared = SigmaAlgebra.from_named_blocks(omega, doc.sigma)
            if declared != filtration.sigma():
                raise ValueError("𝒢 is not the join of the filtration")

    with _invalid("agents"):
        names = tuple(doc.agents.names)
        if doc.agents.rho == "uniform":
            agent_space = AgentSpace.uniform(names)
        else:
            unknown = sorted(set(doc.agents.rho) - set(names))
            if unknown:
                raise ValueError(f"ρ mentions unknown agents {unknown}")
            agent_space = AgentSpace(
                agents=names,
                rho=tuple(float(doc.agents.rho.get(i, 0)) for i in names),
            )

    processes = {}
    for name, table in doc.processes.items():
        rows = _align(table, times, f"process {name}")
        with _invalid(f"process {name}"):
            values = np.empty((len(times), len(omega)))
            for k, row in enumerate(rows):
                if set(row) != set(omega):
                    raise ValueError(
                        f"values at t={times[k]} must cover exactly Ω"
                    )
                values[k] = [float(row[s]) for s in omega]
            processes[name] = Process(
                name=name, times=times, omega=omega, values=values
            )
            if not is_adapted(values, filtration):
                raise ValueError("not adapted to the filtration")

    unknown = sorted(set(doc.history) - set(names))
    if unknown:
        raise ModelError(f"history: unknown agents {unknown}")
    history = {}
    arrows: dict[tuple[str, int], BooleanHom | None] = {}
    for agent in names:
        if agent not in doc.history:
            raise ModelError(f"history: no entry for agent {agent!r}")
        docs = _align(doc.history[agent], times, f"history of {agent}")
        for k, point_doc in enumerate(docs):
            with _invalid(f"history of {agent} at t={times[k]}"):
                history[(agent, k)] = _build_point(omega, point_doc, max_atoms)
                if k:
                    arrows[(agent, k)] = _build_arrow(
                        history[(agent, k - 1)], history[(agent, k)], point_doc
                    )

    constants = {n: float(v) for n, v in doc.constants.items()}
    with _invalid("declarations"):
        Declarations(
            agents=names,
            processes=tuple(processes),
            functions=doc.functions,
            constants=constants,
        )
    with _invalid("model"):
        model = Model(
            filtration=filtration,
            agent_space=agent_space,
            history=history,
            processes=processes,
            functions=dict(doc.functions),
            constants=constants,
            arrows=arrows,
            strict=doc.strict or options.strict,
        )
    if model.strict:
        violations = history_arrow_violations(model)
        if violations:
            raise ModelError(f"history is not a functor: {violations[0]}")
    logger.info(
        "loaded model: %s, %s, %s",
        count_noun(len(omega), "state"),
        count_noun(len(times), "time"),
        count_noun(len(names), "agent"),
    )
    return model
