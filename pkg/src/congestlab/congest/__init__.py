"""CONGEST protocols: color-coded 2k-cycle detection, phased exact girth, and
the C6 to directed-triangle reduction."""
from congestlab.graph import validate_witness

__all__ = ["validate_witness"]
