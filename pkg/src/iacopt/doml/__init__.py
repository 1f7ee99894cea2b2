"""Parser and emitters for the DOML subset used by the optimizer."""
from .archive import read_input_archive
from .emit import (
    emit_solutions,
    format_concrete,
    format_document,
    format_infrastructure,
    format_optimization,
    make_solution_record,
    sanitize,
)
from .model import *  # noqa: F401,F403
from .parser import parse_document, parse_optimization_layer, tokenize
