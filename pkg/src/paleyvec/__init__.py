"""Product-subspace graphs over finite field towers and their clique numbers."""

from .errors import PaleyvecError
from .gf import FieldCtx, build_field, parse_field_spec

__version__ = "0.1.0"

__all__ = ["FieldCtx", "PaleyvecError", "build_field", "parse_field_spec", "__version__"]
