"""Runtime limits and budgets.

All limits are process-global and mutable so the CLI can override them from
flags; library callers may also set them directly.  The field size guard can
be overridden with the BERTINI_MAX_FIELD_BITS environment variable.
"""

import os

# Reject working fields with more than 2**MAX_FIELD_BITS elements.
# Every desk-scale target needs at most 2**20.
_DEFAULT_MAX_FIELD_BITS = 20

# Log/exp multiplication tables are built for fields up to this size.
TABLE_LIMIT = 1 << 16

# Ceiling on |S_d| for exhaustive enumeration.
EXHAUSTIVE_BUDGET = 1 << 22

# Default closed-point degree bound for bounded smoothness checks on a
# general subscheme (no certified exactness there).
DEFAULT_SMOOTH_BOUND = 3

# Bound used when re-verifying candidates inside constructive searches.
SEARCH_SMOOTH_BOUND = 4

_max_field_bits = None


def max_field_bits() -> int:
    global _max_field_bits
    if _max_field_bits is None:
        _max_field_bits = int(os.environ.get("BERTINI_MAX_FIELD_BITS", _DEFAULT_MAX_FIELD_BITS))
    return _max_field_bits


def set_max_field_bits(bits: int) -> None:
    global _max_field_bits
    _max_field_bits = int(bits)
