from belieflang.async_evaluator import AsyncEvaluator
from belieflang.base_evaluator import (
    FixpointTrace,
    TruthProcess,
    ValidityResult,
)
from belieflang.boolalg import (
    Anchor,
    BooleanHom,
    FiniteBooleanAlgebra,
    enumerate_anchors,
)
from belieflang.errors import (
    BelieflangError,
    CapacityError,
    ConvergenceError,
    DomainError,
    EvaluationError,
    FormulaError,
    ModelError,
    ParseError,
)
from belieflang.evaluator import Evaluator, interpret, validity
from belieflang.infostruct import (
    GeneralizedSigmaAlgebra,
    InfoTriple,
    belief,
    knowledge,
)
from belieflang.lang import desugar, pretty_print
from belieflang.model import AgentSpace, Model, load_model
from belieflang.parser import parse_formula, parse_term
from belieflang.prob import (
    Filtration,
    ProbabilityMeasure,
    SigmaAlgebra,
    cond_exp,
)
from belieflang.schemas import EvalOptions

__all__ = [
    "Evaluator",
    "AsyncEvaluator",
    "EvalOptions",
    "interpret",
    "validity",
    "load_model",
    "Model",
    "AgentSpace",
    "parse_formula",
    "parse_term",
    "desugar",
    "pretty_print",
    "TruthProcess",
    "FixpointTrace",
    "ValidityResult",
    "FiniteBooleanAlgebra",
    "BooleanHom",
    "Anchor",
    "enumerate_anchors",
    "GeneralizedSigmaAlgebra",
    "InfoTriple",
    "knowledge",
    "belief",
    "SigmaAlgebra",
    "ProbabilityMeasure",
    "Filtration",
    "cond_exp",
    "BelieflangError",
    "DomainError",
    "CapacityError",
    "FormulaError",
    "ParseError",
    "ModelError",
    "EvaluationError",
    "ConvergenceError",
]
