"""Blurred information and its resolution into knowledge and belief.

A generalized σ-algebra is a family ℱ of functions Ω → 𝔹 closed under the
pointwise Boolean operations. Anchoring a member with a: 𝔹 → 2 turns it
into a crisp event; what survives every anchor is knowledge, what
survives the agent's own anchor is belief.
"""

import logging
from collections.abc import Iterable, Sequence
from typing import Self

from pydantic import BaseModel, ConfigDict, model_validator

from belieflang.boolalg import (
    DEFAULT_MAX_ATOMS,
    Anchor,
    BooleanHom,
    FiniteBooleanAlgebra,
    enumerate_anchors,
)
from belieflang.errors import DomainError
from belieflang.prob import SigmaAlgebra, generate_sigma_from_indicators

logger = logging.getLogger(__name__)

# A function Ω → 𝔹, one algebra element per state in Ω order.
BlurredEvent = tuple[int, ...]
# A crisp event Ω → 2.
Indicator = tuple[int, ...]


class GeneralizedSigmaAlgebra(BaseModel):
    """A Boolean subalgebra ℱ of 𝔹^Ω (pointwise operations)."""

    model_config = ConfigDict(frozen=True)

    omega: tuple[str, ...]
    algebra: FiniteBooleanAlgebra
    members: frozenset[BlurredEvent]

    @model_validator(mode="after")
    def _closed(self) -> Self:
        _check_events(self.omega, self.algebra, self.members)
        top = self.algebra.top
        n = len(self.omega)
        if (0,) * n not in self.members or (top,) * n not in self.members:
            raise ValueError("ℱ must contain the constant functions 0 and 1")
        members = list(self.members)
        for f in members:
            if tuple(top ^ v for v in f) not in self.members:
                raise ValueError(f"ℱ is not closed under ¬ at {f}")
            for g in members:
                if _meet(f, g) not in self.members:
                    raise ValueError(f"ℱ is not closed under ∧ at {f}, {g}")
                if _join(f, g) not in self.members:
                    raise ValueError(f"ℱ is not closed under ∨ at {f}, {g}")
        return self

    def __len__(self) -> int:
        return len(self.members)


def _meet(f: BlurredEvent, g: BlurredEvent) -> BlurredEvent:
    return tuple(a & b for a, b in zip(f, g, strict=True))


def _join(f: BlurredEvent, g: BlurredEvent) -> BlurredEvent:
    return tuple(a | b for a, b in zip(f, g, strict=True))


def _check_events(
    omega: Sequence[str],
    algebra: FiniteBooleanAlgebra,
    events: Iterable[BlurredEvent],
) -> None:
    for f in events:
        if len(f) != len(omega):
            raise DomainError(
                f"function {f} has {len(f)} values for {len(omega)} states"
            )
        algebra.check(*f)


def close_under_ops(
    omega: Sequence[str],
    algebra: FiniteBooleanAlgebra,
    generators: Iterable[BlurredEvent],
) -> GeneralizedSigmaAlgebra:
    """Smallest generalized σ-algebra containing ``generators``."""
    omega = tuple(omega)
    generators = [tuple(g) for g in generators]
    _check_events(omega, algebra, generators)
    top = algebra.top
    n = len(omega)
    members = {(0,) * n, (top,) * n, *generators}
    frontier = list(members)
    while frontier:
        snapshot = list(members)
        fresh: set[BlurredEvent] = set()
        for f in frontier:
            fresh.add(tuple(top ^ v for v in f))
            for g in snapshot:
                fresh.add(_meet(f, g))
                fresh.add(_join(f, g))
        fresh -= members
        members |= fresh
        frontier = list(fresh)
    logger.debug(
        "closed %d generators into %d members", len(generators), len(members)
    )
    return GeneralizedSigmaAlgebra.model_construct(
        omega=omega, algebra=algebra, members=frozenset(members)
    )


class InfoTriple(BaseModel):
    """An object (𝔹, ℱ, a) of χ_F: blurred information plus an anchor."""

    model_config = ConfigDict(frozen=True)

    algebra: FiniteBooleanAlgebra
    info: GeneralizedSigmaAlgebra
    anchor: Anchor

    @model_validator(mode="after")
    def _same_algebra(self) -> Self:
        if self.info.algebra != self.algebra:
            raise ValueError("ℱ takes values in a different algebra")
        if self.anchor.algebra != self.algebra:
            raise ValueError("the anchor lives on a different algebra")
        return self

    @property
    def omega(self) -> tuple[str, ...]:
        return self.info.omega


def _anchored(anchor: Anchor, k: BlurredEvent) -> Indicator:
    return tuple(1 if v in anchor.upset else 0 for v in k)


def quotient(
    info: GeneralizedSigmaAlgebra, anchors: Iterable[Anchor]
) -> frozenset[Indicator]:
    """ℱ/A: events ``u`` with ``u = a ∘ k`` for one k and every a ∈ A.

    Raises:
        DomainError: If ``anchors`` is empty or an anchor lives on another
            algebra.
    """
    anchors = list(anchors)
    if not anchors:
        raise DomainError("ℱ/A needs a non-empty set of anchors")
    for a in anchors:
        if a.algebra != info.algebra:
            raise DomainError("anchor and ℱ use different algebras")
    first, rest = anchors[0], anchors[1:]
    result = set()
    for k in info.members:
        u = _anchored(first, k)
        if all(_anchored(a, k) == u for a in rest):
            result.add(u)
    return frozenset(result)


def crisp_quotient(info: GeneralizedSigmaAlgebra) -> frozenset[Indicator]:
    """ℱ/𝒜_𝔹 computed from the members taking only the values 0 and 1."""
    top = info.algebra.top
    return frozenset(
        tuple(1 if v == top else 0 for v in k)
        for k in info.members
        if all(v in (0, top) for v in k)
    )


def knowledge(
    triple: InfoTriple, max_atoms: int = DEFAULT_MAX_ATOMS
) -> SigmaAlgebra:
    """𝒦(𝔹, ℱ, a): σ-algebra generated by ℱ/𝒜_𝔹."""
    anchors = enumerate_anchors(triple.algebra, max_atoms)
    return generate_sigma_from_indicators(
        triple.omega, quotient(triple.info, anchors)
    )


def belief(triple: InfoTriple) -> SigmaAlgebra:
    """ℬ(𝔹, ℱ, a): σ-algebra generated by ℱ/a."""
    return generate_sigma_from_indicators(
        triple.omega, quotient(triple.info, [triple.anchor])
    )


def check_chi_arrow(
    u: BooleanHom, source: InfoTriple, target: InfoTriple
) -> bool:
    """Whether ``u`` is an arrow ``source → target`` of χ_F.

    That is, ``u ∘ f ∈ ℱ₂`` for every ``f ∈ ℱ₁`` and ``a₁ = a₂ ∘ u``.
    """
    if source.omega != target.omega:
        raise DomainError("information triples over different state spaces")
    if u.source != source.algebra or u.target != target.algebra:
        raise DomainError("hom does not connect the triples' algebras")
    for f in source.info.members:
        if tuple(u.table[v] for v in f) not in target.info.members:
            return False
    return all(
        source.anchor(x) == target.anchor(u.table[x])
        for x in source.algebra.elements()
    )
