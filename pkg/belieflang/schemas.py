from decimal import Decimal
from typing import Literal, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic.alias_generators import to_camel

from belieflang.lang import FunctionSpec


class EvalOptions(BaseModel):
    tol: float = Field(default=1e-12, gt=0)
    max_iter: int = Field(default=10_000, ge=1)
    pre_adapted: bool = False
    max_atoms: int | None = Field(default=None, ge=1)
    strict: bool = False


class _Document(BaseModel):
    model_config = ConfigDict(
        alias_generator=to_camel, populate_by_name=True, extra="forbid"
    )


class AlgebraDoc(_Document):
    atoms: list[str]


class AnchorDoc(_Document):
    upset: list[list[str]] | None = None
    above: list[list[str]] | None = None

    @model_validator(mode="after")
    def _one_form(self) -> Self:
        if (self.upset is None) == (self.above is None):
            raise ValueError("an anchor needs exactly one of upset, above")
        return self


class PointDoc(_Document):
    algebra: AlgebraDoc
    members: list[list[list[str]]] | None = None
    generators: list[list[list[str]]] | None = None
    anchor: AnchorDoc
    p: dict[str, Decimal] | Literal["uniform"] = Field(alias="P")
    arrow_from_previous: dict[str, list[str]] | None = None

    @model_validator(mode="after")
    def _one_information_form(self) -> Self:
        if self.members is not None and self.generators is not None:
            raise ValueError("give either members or generators, not both")
        return self


class AgentsDoc(_Document):
    names: list[str] = Field(alias="list")
    rho: dict[str, Decimal] | Literal["uniform"]


class ModelDocument(_Document):
    omega: list[str]
    times: list[Decimal]
    filtration: dict[str, list[list[str]]]
    sigma: list[list[str]] | None = None
    agents: AgentsDoc
    history: dict[str, dict[str, PointDoc]]
    processes: dict[str, dict[str, dict[str, Decimal]]]
    functions: dict[str, FunctionSpec] = {}
    constants: dict[str, Decimal] = {}
    strict: bool = False
