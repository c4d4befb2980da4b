"""Shared exception types.

Everything user-triggerable raises one of these so the service and CLI can map
failures onto stable error codes (config errors vs. exhausted budgets).
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid parameter combination supplied by the caller."""


class BudgetExceededError(RuntimeError):
    """A simulation hit its step or memory budget before finishing."""


class FormatError(ValueError):
    """A serialized document does not match the expected schema."""


class DivergentTailError(ValueError):
    """Requested tail certificate does not exist at this dimension."""
