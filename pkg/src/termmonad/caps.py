"""Enumeration caps and the errors every solver in this package raises.

All exhaustive machinery (products, hom-sets, comma limits, monad carriers)
is guarded by a cap so that an infeasible computation fails loudly instead
of thrashing.  Caps travel in a single immutable config object.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


def _fmt(n) -> str:
    # counts like 2^65536 overflow int-to-str limits; report magnitude instead
    if isinstance(n, int) and n.bit_length() > 64:
        return f"~2^{n.bit_length() - 1}"
    return str(n)


class EnumerationTooLarge(Exception):
    """An enumeration would exceed the configured cap."""

    def __init__(self, what: str, needed, cap: int):
        self.what = what
        self.needed = needed
        self.cap = cap
        super().__init__(f"enumeration too large: {what} needs {_fmt(needed)} > cap {cap}")


class StructuralError(Exception):
    """Ill-formed input: mismatched domains, non-composable maps, bad tables."""


class CheckFailed(Exception):
    """A verification harness found a violated equation (carries a witness)."""

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


@dataclass(frozen=True)
class Caps:
    """Global limits for exhaustive enumeration.

    enumeration: max cardinality of any materialized product / carrier.
    table:       max length of a single materialized element table (e.g. an
                 element of a continuation monad value is a table over maps).
    solutions:   max number of limit-solver solutions collected.
    audit:       max candidate count for natural-transformation audits.
    max_arity:   operad truncation arity.
    samples:     sample size for law checks that exceed exhaustive caps.
    seed:        seed for all deterministic sampling.
    """

    enumeration: int = 2 ** 24
    table: int = 2 ** 20
    solutions: int = 2 ** 24
    audit: int = 2 ** 20
    max_arity: int = 2
    samples: int = 32
    seed: int = 2026

    def with_(self, **kw) -> "Caps":
        return replace(self, **kw)


DEFAULT_CAPS = Caps()

_ENV_FIELDS = {
    "TERMMONAD_CAP": "enumeration",
    "TERMMONAD_TABLE_CAP": "table",
    "TERMMONAD_AUDIT_CAP": "audit",
    "TERMMONAD_MAX_ARITY": "max_arity",
    "TERMMONAD_SAMPLES": "samples",
    "TERMMONAD_SEED": "seed",
}


def caps_from_env(base: Caps = DEFAULT_CAPS) -> Caps:
    """Apply TERMMONAD_* environment overrides to a base config."""
    kw = {}
    for var, field in _ENV_FIELDS.items():
        raw = os.environ.get(var)
        if raw is not None:
            kw[field] = int(raw)
    return base.with_(**kw) if kw else base


def guard(what: str, needed, cap: int) -> None:
    if needed > cap:
        raise EnumerationTooLarge(what, needed, cap)
