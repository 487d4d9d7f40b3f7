"""Fuzzy inference toolkit.

Mamdani, Sugeno and interval type-2 engines over an immutable system model,
with a textual DSL, FCL and Matlab ``.fis`` readers, standalone code
generation, chart rendering, and benchmarks.
"""

from .errors import (CodegenError, EvaluationError, FuzzkitError,
                     MissingInputError, ModelError, ParseError)
from .mf import (Gaussian, GeneralizedBell, IntervalMF, MembershipFunction,
                 PiecewiseLinear, Sigmoid, Singleton, Trapezoidal, Triangular)
from .model import (And, Domain, EngineSettings, FuzzySystem, Not, Or,
                    Relation, Rule, SugenoConstant, SugenoLinear, SystemKind,
                    Variable)
from .norms import Defuzzifier, Implication, SNorm, TNorm, snorm, tnorm
from .engine import (FiringVector, InferenceResult, denoise_detector,
                     eval_proposition, fire_rules, fire_rules_interval,
                     grouped_max_output, infer, infer_it2_mamdani,
                     infer_mamdani, infer_sugeno, km_reduce)
from .dsl import format_rule, format_system, parse_system
from .interop import FormatDiagnostics, parse_fcl, parse_fis
from .codegen import generate
from .corpus import load_system
from .viz import plot_system, plot_variable, render_ascii, render_svg

__version__ = "0.1.0"

__all__ = [
    "And", "CodegenError", "Defuzzifier", "Domain", "EngineSettings",
    "EvaluationError", "FiringVector", "FormatDiagnostics", "FuzzkitError",
    "FuzzySystem", "Gaussian", "GeneralizedBell", "Implication",
    "InferenceResult", "IntervalMF", "MembershipFunction",
    "MissingInputError", "ModelError", "Not", "Or", "ParseError",
    "PiecewiseLinear", "Relation", "Rule", "SNorm", "Sigmoid", "Singleton",
    "SugenoConstant", "SugenoLinear", "SystemKind", "TNorm", "Trapezoidal",
    "Triangular", "Variable", "denoise_detector", "eval_proposition",
    "fire_rules", "fire_rules_interval", "format_rule", "format_system",
    "generate", "grouped_max_output", "infer", "infer_it2_mamdani",
    "infer_mamdani", "infer_sugeno", "km_reduce", "load_system", "parse_fcl",
    "parse_fis", "parse_system", "plot_system", "plot_variable",
    "render_ascii", "render_svg", "snorm", "tnorm", "__version__",
]
