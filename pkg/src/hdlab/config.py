"""Validated run configuration shared by the verification engine and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .groupalg import FiniteAbelianGroup

SUPPORTED_DIMS = range(2, 6)
OUTPUT_FORMATS = ("text", "json")
DEFAULT_GROUPS = ("Z2", "Z3", "Z2xZ2")
DEFAULT_SEED = 42


@dataclass(frozen=True)
class RunConfig:
    """Everything a verification run depends on; validated on construction.

    ``groups`` are group spec strings (``Z<n>`` joined by ``x``); the
    dimensions exercised are their orders.
    """

    groups: tuple[str, ...] = DEFAULT_GROUPS
    trials: int = 200
    seed: int = DEFAULT_SEED
    tol: float = 1e-9
    propositions: tuple[str, ...] = ("all",)
    output_format: str = "text"

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "propositions", tuple(str(p) for p in self.propositions))
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be a positive integer")
        if not (isinstance(self.tol, (int, float)) and math.isfinite(self.tol) and self.tol >= 0):
            raise ValueError("tolerance must be a nonnegative number")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")
        if not self.groups:
            raise ValueError("at least one group is required")
        for spec in self.groups:
            d = FiniteAbelianGroup.parse(spec).order
            if d not in SUPPORTED_DIMS:
                raise ValueError(f"unsupported dimension {d} (group {spec})")

    def parsed_groups(self) -> list[FiniteAbelianGroup]:
        return [FiniteAbelianGroup.parse(s) for s in self.groups]

    def dims(self) -> list[int]:
        return sorted({g.order for g in self.parsed_groups()})
