"""PSOA RuleML: parsing, printing, KB translation and query answering."""

from .core import (KB, TOP, And, Atom, DefaultFact, Equal, Exists, Expr,
                   External, ExternalTerm, Iri, Literal, Local, Number, Or,
                   Rule, Slot, Subclass, Tuple, Var, classify_atom)
from .parser import ParseError, parse_kb, parse_query
from .printer import emit_xml, print_formula, print_presentation
from .transform import ObjectificationMode, run_pipeline, describute
from .runtime import emit_prolog, emit_tptp, to_runtime
from .engine import Answer, Engine, EngineConfig, answer_format, solve

__version__ = "0.1.0"
