"""Galois groups of polynomials over p-adic fields by the resolvent method."""

from .engine import GaloisResult, galois_group, parse_params
from .errors import (ChooserExhausted, GaloisError, Inconsistent, InputError, NotApplicable,
                     PrecisionError, ResourceCapExceeded)
from .perm import PermGroup

__all__ = [
    "ChooserExhausted", "GaloisError", "GaloisResult", "Inconsistent", "InputError",
    "NotApplicable", "PermGroup", "PrecisionError", "ResourceCapExceeded", "galois_group",
    "parse_params",
]
