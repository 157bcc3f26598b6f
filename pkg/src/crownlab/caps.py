"""Resource caps shared by every module, plus the structured errors they raise.

Caps default to conservative values and can be overridden programmatically or
through the ``CROWNLAB_CAPS`` environment variable, e.g.
``CROWNLAB_CAPS="lattice=20000,element=500000"``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class CapExceeded(RuntimeError):
    """A computation needed more resources than its configured cap."""

    def __init__(self, what: str, needed: int | None, cap: int):
        self.what = what
        self.needed = needed
        self.cap = cap
        got = "?" if needed is None else str(needed)
        super().__init__(f"{what} cap exceeded: needs {got}, cap is {cap}")


class HypothesisError(ValueError):
    """The input does not satisfy the hypotheses of the requested operation."""


@dataclass(frozen=True)
class Caps:
    element: int = 200_000      # full element enumeration
    lattice: int = 10_000       # subgroup lattice construction
    degree: int = 2_000         # constructed permutation degrees
    index: int = 20_000         # coset actions
    search: int = 2_000_000     # generic backtracking node budget

    def with_overrides(self, spec: str | None) -> "Caps":
        if not spec:
            return self
        known = {f.name for f in fields(self)}
        updates = {}
        for item in spec.split(","):
            item = item.strip()
            if not item:
                continue
            key, _, value = item.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"unknown cap {key!r} in {spec!r}")
            updates[key] = int(value)
        return replace(self, **updates)


def default_caps() -> Caps:
    return Caps().with_overrides(os.environ.get("CROWNLAB_CAPS"))


CAPS = default_caps()


def set_caps(caps: Caps) -> Caps:
    """Install ``caps`` globally and return the previous value."""
    global CAPS
    old, CAPS = CAPS, caps
    return old


def get_caps() -> Caps:
    return CAPS
