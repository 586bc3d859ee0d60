"""Finite filtered probability spaces.

On a finite Ω every σ-algebra is determined by its atoms, the blocks of
states it cannot tell apart, so a `SigmaAlgebra` is stored as a
partition of state indices. Conditional expectation is the
probability-weighted block average.
"""

import logging
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from belieflang.errors import DomainError

logger = logging.getLogger(__name__)

MEASURE_TOLERANCE = 1e-12


class SigmaAlgebra(BaseModel):
    """A σ-algebra on a finite Ω, as the partition into its atoms."""

    model_config = ConfigDict(frozen=True)

    omega: tuple[str, ...]
    blocks: tuple[tuple[int, ...], ...]

    @field_validator("blocks")
    @classmethod
    def _canonical(
        cls, blocks: tuple[tuple[int, ...], ...]
    ) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(tuple(sorted(b)) for b in blocks))

    @model_validator(mode="after")
    def _is_partition(self) -> Self:
        seen: list[int] = [i for b in self.blocks for i in b]
        if any(not b for b in self.blocks):
            raise ValueError("a partition has no empty blocks")
        if sorted(seen) != list(range(len(self.omega))):
            raise ValueError(
                "blocks must be pairwise disjoint and cover every state"
            )
        return self

    @classmethod
    def trivial(cls, omega: Sequence[str]) -> "SigmaAlgebra":
        return cls(omega=tuple(omega), blocks=(tuple(range(len(omega))),))

    @classmethod
    def full(cls, omega: Sequence[str]) -> "SigmaAlgebra":
        return cls(
            omega=tuple(omega), blocks=tuple((i,) for i in range(len(omega)))
        )

    @classmethod
    def from_named_blocks(
        cls, omega: Sequence[str], blocks: Iterable[Iterable[str]]
    ) -> "SigmaAlgebra":
        omega = tuple(omega)
        return cls(
            omega=omega,
            blocks=tuple(
                tuple(state_index(omega, s) for s in b) for b in blocks
            ),
        )

    def labels(self) -> np.ndarray:
        """Block index of every state."""
        labels = np.empty(len(self.omega), dtype=np.intp)
        for k, block in enumerate(self.blocks):
            labels[list(block)] = k
        return labels

    def named_blocks(self) -> list[list[str]]:
        return [[self.omega[i] for i in b] for b in self.blocks]

    def is_subalgebra_of(self, other: "SigmaAlgebra") -> bool:
        """``self ⊆ other``: each block of ``other`` sits in one of ours."""
        _same_omega(self, other)
        labels = self.labels()
        return all(len({labels[i] for i in b}) == 1 for b in other.blocks)

    def join(self, other: "SigmaAlgebra") -> "SigmaAlgebra":
        """The smallest σ-algebra containing both (common refinement)."""
        _same_omega(self, other)
        return _partition_by_signature(
            self.omega, zip(self.labels(), other.labels(), strict=True)
        )

    def __str__(self) -> str:
        return " ".join(
            "{" + ",".join(block) + "}" for block in self.named_blocks()
        )


def state_index(omega: Sequence[str], state: str) -> int:
    """Position of ``state`` in Ω.

    Raises:
        DomainError: If ``state`` is not in Ω
    """
    try:
        return omega.index(state)
    except ValueError:
        raise DomainError(f"unknown state {state!r}") from None


def _same_omega(a: SigmaAlgebra, b: SigmaAlgebra) -> None:
    if a.omega != b.omega:
        raise DomainError("σ-algebras live on different state spaces")


def _partition_by_signature(
    omega: tuple[str, ...], signatures: Iterable[object]
) -> SigmaAlgebra:
    groups: dict[object, list[int]] = {}
    for i, signature in enumerate(signatures):
        groups.setdefault(signature, []).append(i)
    return SigmaAlgebra(
        omega=omega, blocks=tuple(tuple(g) for g in groups.values())
    )


def generate_sigma(
    omega: Sequence[str], sets: Iterable[Iterable[str]]
) -> SigmaAlgebra:
    """σ-algebra generated by ``sets``.

    Two states share a block iff no generator separates them.
    """
    omega = tuple(omega)
    members = [
        frozenset(state_index(omega, s) for s in subset) for subset in sets
    ]
    return _partition_by_signature(
        omega,
        (tuple(i in m for m in members) for i in range(len(omega))),
    )


def generate_sigma_from_indicators(
    omega: Sequence[str], indicators: Iterable[Sequence[int]]
) -> SigmaAlgebra:
    """Like `generate_sigma`, with events given as 0/1 vectors over Ω."""
    omega = tuple(omega)
    rows = [tuple(u) for u in indicators]
    for u in rows:
        if len(u) != len(omega):
            raise DomainError(
                f"indicator of length {len(u)} on {len(omega)} states"
            )
    return _partition_by_signature(
        omega, (tuple(u[i] for u in rows) for i in range(len(omega)))
    )


def block_of(sigma: SigmaAlgebra, state: str) -> frozenset[str]:
    """⋂{A ∈ F | ω ∈ A}: the states indistinguishable from ``state``."""
    i = state_index(sigma.omega, state)
    block = next(b for b in sigma.blocks if i in b)
    return frozenset(sigma.omega[j] for j in block)


class ProbabilityMeasure(BaseModel):
    """A probability measure on the full powerset of a finite Ω."""

    model_config = ConfigDict(frozen=True)

    omega: tuple[str, ...]
    weights: tuple[float, ...]

    @model_validator(mode="after")
    def _normalised(self) -> Self:
        if len(self.weights) != len(self.omega):
            raise ValueError(
                f"{len(self.weights)} weights for {len(self.omega)} states"
            )
        if any(w < 0 for w in self.weights):
            raise ValueError("probability weights must be non-negative")
        total = sum(self.weights)
        if abs(total - 1.0) > MEASURE_TOLERANCE:
            raise ValueError(f"probability weights sum to {total}, not 1")
        return self

    @classmethod
    def uniform(cls, omega: Sequence[str]) -> "ProbabilityMeasure":
        return cls(omega=tuple(omega), weights=(1 / len(omega),) * len(omega))

    @classmethod
    def point_mass(
        cls, omega: Sequence[str], state: str
    ) -> "ProbabilityMeasure":
        omega = tuple(omega)
        i = state_index(omega, state)
        return cls(
            omega=omega,
            weights=tuple(1.0 if j == i else 0.0 for j in range(len(omega))),
        )

    @classmethod
    def from_mapping(
        cls, omega: Sequence[str], weights: Mapping[str, float]
    ) -> "ProbabilityMeasure":
        """Measure from per-state weights; missing states weigh 0."""
        omega = tuple(omega)
        for s in weights:
            state_index(omega, s)
        return cls(
            omega=omega, weights=tuple(float(weights.get(s, 0)) for s in omega)
        )

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def mass(self, states: Iterable[int]) -> float:
        return float(sum(self.weights[i] for i in states))


def _check_space(p: ProbabilityMeasure, sigma: SigmaAlgebra) -> None:
    if p.omega != sigma.omega:
        raise DomainError("measure and σ-algebra live on different spaces")


def cond_exp(
    p: ProbabilityMeasure, sigma: SigmaAlgebra, x: Sequence[float]
) -> np.ndarray:
    """𝔼^P[x | sigma] as a function on Ω.

    On a block of positive mass the value is the P-weighted average of
    ``x``; on a P-null block it is 0.
    """
    _check_space(p, sigma)
    x = np.asarray(x, dtype=float)
    if x.shape != (len(sigma.omega),):
        raise DomainError(
            f"random variable of shape {x.shape} on {len(sigma.omega)} states"
        )
    labels = sigma.labels()
    w = p.array
    mass = np.bincount(labels, weights=w, minlength=len(sigma.blocks))
    total = np.bincount(labels, weights=w * x, minlength=len(sigma.blocks))
    positive = mass > 0
    averages = np.zeros_like(mass)
    averages[positive] = total[positive] / mass[positive]
    return averages[labels]


def cond_exp_operator(
    p: ProbabilityMeasure, sigma: SigmaAlgebra
) -> np.ndarray:
    """The Ω×Ω matrix ``E`` with ``E @ x == cond_exp(p, sigma, x)``."""
    _check_space(p, sigma)
    n = len(sigma.omega)
    operator = np.zeros((n, n))
    w = p.array
    for block in sigma.blocks:
        idx = list(block)
        mass = w[idx].sum()
        if mass > 0:
            operator[np.ix_(idx, idx)] = w[idx] / mass
    return operator


def null_blocks(
    p: ProbabilityMeasure, sigma: SigmaAlgebra
) -> list[list[str]]:
    """Blocks of ``sigma`` carrying no P-mass."""
    _check_space(p, sigma)
    return [
        [sigma.omega[i] for i in b]
        for b in sigma.blocks
        if p.mass(b) == 0
    ]


def abs_continuous(mu: ProbabilityMeasure, nu: ProbabilityMeasure) -> bool:
    """``nu ≪ mu``: every mu-null state is nu-null."""
    if mu.omega != nu.omega:
        raise DomainError("measures live on different state spaces")
    return all(
        n == 0 for m, n in zip(mu.weights, nu.weights, strict=True) if m == 0
    )


def is_measurable(
    x: Sequence[float], sigma: SigmaAlgebra, atol: float = 0.0
) -> bool:
    """Whether ``x`` is constant on every block of ``sigma``."""
    x = np.asarray(x, dtype=float)
    return all(np.ptp(x[list(b)]) <= atol for b in sigma.blocks)


class Filtration(BaseModel):
    """An increasing family 𝔾 = {𝒢_t} over a finite time domain 𝒯."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: tuple[Fraction, ...]
    stages: tuple[SigmaAlgebra, ...]

    @model_validator(mode="after")
    def _monotone(self) -> Self:
        if not self.times:
            raise ValueError("the time domain must be non-empty")
        if len(self.times) != len(self.stages):
            raise ValueError("one σ-algebra is needed per time point")
        if self.times[0] != 0:
            raise ValueError("the least time must be 0")
        if any(s >= t for s, t in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly ascending")
        for s, t, earlier, later in zip(
            self.times, self.times[1:], self.stages, self.stages[1:]
        ):
            if earlier.omega != later.omega:
                raise ValueError("stages live on different state spaces")
            if not earlier.is_subalgebra_of(later):
                raise ValueError(
                    f"filtration is not monotone: 𝒢_{s} ⊄ 𝒢_{t}"
                )
        return self

    @property
    def omega(self) -> tuple[str, ...]:
        return self.stages[0].omega

    def index_of(self, t: float | Fraction) -> int | None:
        """Position of ``t`` in 𝒯, or None when it is not declared."""
        try:
            value = Fraction(t)
        except (TypeError, ValueError, OverflowError):
            return None
        for k, declared in enumerate(self.times):
            if declared == value or float(declared) == t:
                return k
        return None

    def at(self, t: float | Fraction) -> SigmaAlgebra:
        k = self.index_of(t)
        if k is None:
            raise DomainError(f"time {t} is not declared")
        return self.stages[k]

    def sigma(self) -> SigmaAlgebra:
        """𝒢 = ⋁_t 𝒢_t."""
        result = self.stages[0]
        for stage in self.stages[1:]:
            result = result.join(stage)
        return result


class Process(BaseModel):
    """A real process on 𝒯 × Ω; row ``k`` is the value at ``times[k]``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    times: tuple[Fraction, ...]
    omega: tuple[str, ...]
    values: np.ndarray

    @model_validator(mode="after")
    def _total(self) -> Self:
        if self.values.shape != (len(self.times), len(self.omega)):
            raise ValueError(
                f"process {self.name!r} has shape {self.values.shape}, "
                f"expected {(len(self.times), len(self.omega))}"
            )
        return self


def is_adapted(
    values: np.ndarray, filtration: Filtration, atol: float = 0.0
) -> bool:
    """Whether row ``k`` of ``values`` is 𝒢_{t_k}-measurable for every k."""
    values = np.asarray(values, dtype=float)
    return all(
        is_measurable(row, stage, atol)
        for row, stage in zip(values, filtration.stages, strict=True)
    )
