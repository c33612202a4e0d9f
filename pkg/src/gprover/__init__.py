"""A proof checker for the logic G: nominal abstraction, the nabla quantifier and
pattern-based (co)inductive definitions."""
from .checker import CheckConfig, check_file, check_text
from .nabs import csnas, holds
from .parser import parse

__all__ = ["CheckConfig", "check_file", "check_text", "csnas", "holds", "parse"]
__version__ = "0.1.0"
